"""Quantum Fisher information, error propagation, the symmetric logarithmic
derivative and the separable-state limit for local Hamiltonians."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import DimensionError, embed_local, hermitize
from .states import DensityMatrix, as_matrix

# terms with lambda_k + lambda_l below this are dropped from QFI and SLD sums;
# results are insensitive to the choice anywhere in [1e-14, 1e-10]
SPECTRAL_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class LocalHamiltonian:
    """Sum of single-party operators ``H_1 + H_2 + ...`` (no interactions).

    ``bounds[n]`` is the constant c_n with ``-c_n <= H_n <= c_n``. When not
    given it is taken as the largest absolute eigenvalue of ``H_n``.
    """

    terms: tuple
    bounds: Optional[tuple] = None

    def __post_init__(self):
        terms = tuple(hermitize(t) for t in self.terms)
        if not terms:
            raise ValueError("a local Hamiltonian needs at least one party")
        spectra = [np.linalg.eigvalsh(t) for t in terms]
        if self.bounds is None:
            bounds = tuple(float(np.max(np.abs(s))) for s in spectra)
        else:
            bounds = tuple(float(c) for c in self.bounds)
            if len(bounds) != len(terms):
                raise ValueError("one bound per party is required")
            for n, (s, c) in enumerate(zip(spectra, bounds)):
                if np.max(np.abs(s)) > c + 1e-9:
                    raise ValueError(f"spectrum of party {n} exceeds its bound {c}")
        for t in terms:
            t.setflags(write=False)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def bipartite(cls, h1, h2, c1=None, c2=None) -> "LocalHamiltonian":
        bounds = None if c1 is None and c2 is None else (c1, c2)
        if bounds is not None and None in bounds:
            h = [np.asarray(h1), np.asarray(h2)]
            bounds = tuple(
                c if c is not None else float(np.max(np.abs(np.linalg.eigvalsh(hermitize(x)))))
                for c, x in zip(bounds, h)
            )
        return cls((h1, h2), bounds)

    @property
    def dims(self) -> tuple:
        return tuple(t.shape[0] for t in self.terms)

    @property
    def H1(self) -> np.ndarray:
        return self.terms[0]

    @property
    def H2(self) -> np.ndarray:
        return self.terms[1]

    @property
    def c1(self) -> float:
        return self.bounds[0]

    @property
    def c2(self) -> float:
        return self.bounds[1]

    def full(self) -> np.ndarray:
        """The operator on the composite space."""
        dims = self.dims
        return sum(embed_local(t, dims, n) for n, t in enumerate(self.terms))


@dataclass
class GainResult:
    gain: float
    qfi: float
    sep_bound: float
    hamiltonian: LocalHamiltonian
    measurement: np.ndarray
    iterations: int
    trace: list = field(default_factory=list)
    gain_trace: list = field(default_factory=list)
    trial: int = 0

    @property
    def c2(self) -> float:
        return self.hamiltonian.bounds[1] / self.hamiltonian.bounds[0]


def _operator(H, n: int) -> np.ndarray:
    if isinstance(H, LocalHamiltonian):
        op = H.full()
    else:
        op = np.asarray(H, dtype=complex)
    if op.shape != (n, n):
        raise DimensionError(f"operator of shape {op.shape} does not act on dimension {n}")
    return op


def _spectrum(rho: np.ndarray):
    w, u = np.linalg.eigh(rho)
    return w, u


def _qfi_weights(w: np.ndarray, cutoff: float = SPECTRAL_CUTOFF):
    s = w[:, None] + w[None, :]
    diff = w[:, None] - w[None, :]
    mask = s > cutoff
    safe = np.where(mask, s, 1.0)
    return np.where(mask, diff**2 / safe, 0.0), np.where(mask, diff / safe, 0.0)


def qfi(rho, H, cutoff: float = SPECTRAL_CUTOFF) -> float:
    """Quantum Fisher information of `rho` for the generator `H`.

    ``F_Q = 2 sum_{k,l} (l_k - l_l)^2 / (l_k + l_l) |<k|H|l>|^2`` over the
    eigen-decomposition of `rho`.
    """
    r = as_matrix(rho)
    h = _operator(H, r.shape[0])
    w, u = _spectrum(r)
    he = u.conj().T @ h @ u
    wq, _ = _qfi_weights(w, cutoff)
    return float(2 * np.sum(wq * np.abs(he) ** 2))


def sld(rho, H, cutoff: float = SPECTRAL_CUTOFF) -> np.ndarray:
    """Symmetric logarithmic derivative, the optimal measurement for `H`."""
    r = as_matrix(rho)
    h = _operator(H, r.shape[0])
    w, u = _spectrum(r)
    he = u.conj().T @ h @ u
    _, ws = _qfi_weights(w, cutoff)
    m = u @ (2j * ws * he) @ u.conj().T
    return (m + m.conj().T) / 2


def variance(rho, op) -> float:
    r = as_matrix(rho)
    op = np.asarray(op)
    m1 = np.trace(r @ op).real
    m2 = np.trace(r @ op @ op).real
    return float(m2 - m1**2)


def error_propagation(rho, H, M) -> float:
    """``Var(M) / <i[M, H]>^2``; ``inf`` when the commutator expectation vanishes."""
    r = as_matrix(rho)
    h = _operator(H, r.shape[0])
    m = _operator(M, r.shape[0])
    comm = 1j * (m @ h - h @ m)
    signal = np.trace(r @ comm).real
    if signal**2 <= 1e-24:
        return float("inf")
    return variance(r, m) / signal**2


def separable_bound(H) -> float:
    """Largest QFI reachable by separable states: ``sum_n (max eig - min eig)^2``."""
    if not isinstance(H, LocalHamiltonian):
        raise TypeError("separable_bound needs a LocalHamiltonian")
    total = 0.0
    for t in H.terms:
        s = np.linalg.eigvalsh(t)
        total += (s[-1] - s[0]) ** 2
    return float(total)


class UndefinedGainError(ValueError):
    """Every party term is proportional to the identity."""


def gain_for_H(rho, H: LocalHamiltonian) -> float:
    sep = separable_bound(H)
    if sep <= 1e-24:
        raise UndefinedGainError("separable bound vanishes; every H_n is proportional to identity")
    if isinstance(rho, DensityMatrix) and tuple(rho.dims) != H.dims:
        if int(np.prod(rho.dims)) != int(np.prod(H.dims)):
            raise DimensionError(f"state dims {rho.dims} do not match Hamiltonian dims {H.dims}")
    return qfi(rho, H) / sep
