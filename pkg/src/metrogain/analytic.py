"""Closed-form gains of isotropic and Werner states.

Isotropic states are written as ``p_iso |me><me| + (1 - p_iso) I/d^2``
(see :mod:`metrogain.states` for conversions). For a single-party operator
H the relevant two-party generators are ``H (x) I + I (x) H*`` (isotropic)
and ``H (x) I - I (x) H`` (Werner); both gains factor through

    r(H) = [d sum_k h_k^2 - (sum_k h_k)^2] / [2 (h_max - h_min)^2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .activation import alternating_diag
from .linalg import hermitize
from .metrology import LocalHamiltonian


@dataclass(frozen=True)
class AnalyticGain:
    gain: float
    hamiltonian: np.ndarray
    threshold: float


class DegenerateHamiltonianError(ValueError):
    """H is proportional to the identity, so r(H) is undefined."""


def alpha(d: int) -> int:
    """0 for even d, 1 for odd d."""
    return d % 2


def best_hamiltonian(d: int) -> np.ndarray:
    return alternating_diag(d)


def worst_hamiltonian(d: int) -> np.ndarray:
    v = np.zeros(d)
    v[0], v[1] = 1.0, -1.0
    return np.diag(v).astype(complex)


def r_value(H) -> float:
    h = np.linalg.eigvalsh(hermitize(H))
    spread = h[-1] - h[0]
    if spread < 1e-12:
        raise DegenerateHamiltonianError("H is proportional to the identity")
    d = len(h)
    # d sum h^2 - (sum h)^2 written as d sum (h - mean)^2 to avoid cancellation
    return float(d * np.sum((h - h.mean()) ** 2) / (2 * spread**2))


def iso_hamiltonian(H) -> LocalHamiltonian:
    """``H (x) I + I (x) H*`` as a local Hamiltonian."""
    H = np.asarray(H, dtype=complex)
    return LocalHamiltonian((H, H.conj()))


def werner_hamiltonian(H) -> LocalHamiltonian:
    """``H (x) I - I (x) H`` as a local Hamiltonian."""
    H = np.asarray(H, dtype=complex)
    return LocalHamiltonian((H, -H))


def iso_gain(d: int, p_iso: float, H=None) -> float:
    """Gain of the isotropic state for ``H (x) I + I (x) H*`` (default H: best)."""
    if not 0 <= p_iso <= 1:
        raise ValueError(f"p_iso must lie in [0, 1], got {p_iso}")
    H = best_hamiltonian(d) if H is None else H
    p = p_iso
    return 16 * p**2 / (p * d * d + 2 * (1 - p)) * r_value(H)


def iso_threshold(d: int) -> float:
    """Smallest ``p_iso`` for which the isotropic state is useful."""
    if d < 2:
        raise ValueError("d must be at least 2")
    k = d * d - alpha(d)
    return (d * d - 2) / (4 * k) + math.sqrt((d * d - 2) ** 2 / (16 * k * k) + 1 / k)


def iso_analytic(d: int, p_iso: float) -> AnalyticGain:
    return AnalyticGain(iso_gain(d, p_iso), best_hamiltonian(d), iso_threshold(d))


def _check_phi(phi: float) -> None:
    if not -1 <= phi <= 0:
        raise ValueError(f"the Werner formulas hold for -1 <= phi <= 0, got {phi}")


def werner_gain(d: int, phi: float, H=None) -> float:
    """Gain of the Werner state for ``H (x) I - I (x) H`` (default H: best)."""
    _check_phi(phi)
    H = best_hamiltonian(d) if H is None else H
    return 8 * phi**2 / (d * d + phi * d) * r_value(H)


def werner_threshold(d: int) -> float:
    """Largest ``phi`` below which the Werner state is useful."""
    k = d * d - alpha(d)
    return d / (2 * k) - math.sqrt(d * d / (4 * k * k) + d * d / k)


def werner_analytic(d: int, phi: float) -> AnalyticGain:
    return AnalyticGain(werner_gain(d, phi), best_hamiltonian(d), werner_threshold(d))


def twirl_lower_bound_iso(F: float, d: int) -> float:
    """Lower bound on the gain from the entanglement fraction alone."""
    if not 0 <= F <= 1:
        raise ValueError(f"F must lie in [0, 1], got {F}")
    if F <= 1 / d**2:
        return 0.0
    d2 = d * d
    return 2 * (d2 - alpha(d)) * (d2 * F - 1) ** 2 / (d2 * (d2 - 1) * (1 - 2 * F + d2 * F))


def flip_to_phi(v_expect: float, d: int) -> float:
    """Werner parameter with the given flip-operator expectation value."""
    return (d * v_expect - 1) / (d - v_expect)


def twirl_lower_bound_werner(v_expect: float, d: int) -> float:
    """Lower bound on the gain from the flip-operator expectation value alone.

    Zero whenever the twirled Werner state has ``phi > 0``.
    """
    if not -1 <= v_expect <= 1:
        raise ValueError(f"<V> must lie in [-1, 1], got {v_expect}")
    phi = flip_to_phi(v_expect, d)
    if phi > 0:
        return 0.0
    phi = max(phi, -1.0)
    return phi**2 * (d * d - alpha(d)) / (d * d + phi * d)
