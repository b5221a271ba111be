"""See-saw maximization of the metrological gain over local Hamiltonians.

One iteration, for a fixed state and current measurement M:

1. ``A_n = Tr_{other}(i[rho, M])`` and ``H_n = c_n * sign(A_n)`` maximize
   ``<i[M, H]>`` under ``-c_n <= H_n <= c_n``.
2. (optional) move ``c_2/c_1`` toward ``Tr(A_2 sign A_2) / Tr(A_1 sign A_1)``.
3. M becomes the symmetric logarithmic derivative of the new H, which
   saturates the error-propagation bound, so ``1/Var(theta)_M`` equals the QFI.

Each step can only increase ``1/(Var(theta)_M * 4 sum c_n^2)``, so the
recorded gain trace is non-decreasing. The objective is not strictly
concave, so several random restarts are used and the best trial is kept.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

import numpy as np

from .linalg import DimensionError, partial_trace, random_hermitian
from .metrology import SPECTRAL_CUTOFF, GainResult, LocalHamiltonian, _qfi_weights
from .states import DensityMatrix, as_matrix

log = logging.getLogger(__name__)

_DEGENERATE = 1e-14


@dataclass(frozen=True)
class SeeSawConfig:
    """Settings of the multi-restart see-saw.

    `c2` is either a positive number (kept fixed, with ``c1 = 1``) or
    ``"auto"`` for the analytic update damped by `damping`.
    """

    trials: int = 10
    steps: int = 100
    c2: Union[float, str] = "auto"
    damping: float = 0.3
    tol: float = 1e-10
    seed: int = 0
    max_restarts: int = 5

    def __post_init__(self):
        if self.trials < 1 or self.steps < 1:
            raise ValueError("trials and steps must be at least 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        if isinstance(self.c2, str):
            if self.c2 != "auto":
                raise ValueError(f"c2 must be 'auto' or a positive number, got {self.c2!r}")
        elif not self.c2 > 0:
            raise ValueError("a fixed c2 must be positive")

    @property
    def auto_c2(self) -> bool:
        return self.c2 == "auto"


@dataclass(frozen=True)
class BisectionConfig:
    p_low: float
    p_high: float
    tol: float = 1e-4
    seesaw: SeeSawConfig = field(default_factory=SeeSawConfig)

    def __post_init__(self):
        if not self.p_low < self.p_high:
            raise ValueError("p_low must be smaller than p_high")


class BracketError(ValueError):
    """The bisection interval does not straddle the usefulness boundary."""


def _party_dims(rho, dims) -> tuple:
    if dims is not None:
        return tuple(int(d) for d in dims)
    if isinstance(rho, DensityMatrix):
        return rho.dims
    raise ValueError("dims are required when the state is a bare array")


def party_operators(rho, M, dims=None) -> list:
    """``A_n = Tr_{other parties}(i[rho, M])`` for every party n."""
    dims = _party_dims(rho, dims)
    r = as_matrix(rho)
    m = np.asarray(M, dtype=complex)
    if m.shape != r.shape:
        raise DimensionError(f"measurement of shape {m.shape} does not match state {r.shape}")
    comm = 1j * (r @ m - m @ r)
    return [partial_trace(comm, dims, n) for n in range(len(dims))]


def _sign_operator(a: np.ndarray) -> np.ndarray:
    a = (a + a.conj().T) / 2
    w, u = np.linalg.eigh(a)
    s = np.where(w >= 0, 1.0, -1.0)
    return (u * s) @ u.conj().T


def optimal_H_for_M(rho, M, c1: float = 1.0, c2: float = 1.0, *, bounds=None, dims=None) -> LocalHamiltonian:
    """Local Hamiltonian maximizing ``<i[M, H]>`` with ``-c_n <= H_n <= c_n``.

    ``H_n`` shares the eigenvectors of ``A_n`` and has eigenvalue ``+c_n``
    where ``A_n`` is nonnegative and ``-c_n`` elsewhere.
    """
    dims = _party_dims(rho, dims)
    if bounds is None:
        bounds = (c1, c2) if len(dims) == 2 else (1.0,) * len(dims)
    if len(bounds) != len(dims) or any(c <= 0 for c in bounds):
        raise ValueError("one positive bound per party is required")
    A = party_operators(rho, M, dims)
    terms = tuple(c * _sign_operator(a) for c, a in zip(bounds, A))
    return LocalHamiltonian(terms, tuple(float(c) for c in bounds))


def c2_update(rho, M, H1_unit, H2_unit, dims=None) -> Optional[float]:
    """Ratio ``c2/c1 = Tr(A_2 H2) / Tr(A_1 H1)`` for unit-bounded party operators.

    Returns None when the denominator vanishes or the ratio is negative.
    """
    A1, A2 = party_operators(rho, M, dims)
    a1 = np.trace(A1 @ np.asarray(H1_unit)).real
    a2 = np.trace(A2 @ np.asarray(H2_unit)).real
    if abs(a1) < _DEGENERATE:
        return None
    ratio = a2 / a1
    if ratio < 0:
        return None
    return float(ratio)


def random_measurement(n: int, rng: np.random.Generator) -> np.ndarray:
    m = random_hermitian(n, rng)
    return m / np.linalg.norm(m)


class _Problem:
    """State data shared by all trials: spectrum, SLD weights and the
    (left, site, right) split of every party."""

    def __init__(self, rho, dims):
        self.rho = as_matrix(rho)
        self.dims = dims
        self.n = self.rho.shape[0]
        if int(np.prod(dims)) != self.n:
            raise DimensionError(f"dims {dims} do not match state of dimension {self.n}")
        self.w, self.u = np.linalg.eigh(self.rho)
        self.wq, self.ws = _qfi_weights(self.w, SPECTRAL_CUTOFF)
        self.splits = [
            (int(np.prod(dims[:k])), dims[k], int(np.prod(dims[k + 1:]))) for k in range(len(dims))
        ]

    def party_ops(self, m):
        comm = 1j * (self.rho @ m - m @ self.rho)
        return [
            np.einsum("aibajb->ij", comm.reshape(L, d, R, L, d, R)) for L, d, R in self.splits
        ]

    def embed_sum(self, ops):
        h = np.zeros((self.n, self.n), dtype=complex)
        for (L, d, R), op in zip(self.splits, ops):
            t = h.reshape(L, d, R, L, d, R)
            for a in range(L):
                for b in range(R):
                    t[a, :, b, a, :, b] += op
        return h

    def sld_and_qfi(self, h):
        he = self.u.conj().T @ h @ self.u
        f = 2 * float(np.sum(self.wq * np.abs(he) ** 2))
        m = self.u @ (2j * self.ws * he) @ self.u.conj().T
        return (m + m.conj().T) / 2, f


def _run_trial(prob: _Problem, m: np.ndarray, cfg: SeeSawConfig, idx: int):
    nparty = len(prob.dims)
    c = np.ones(nparty) if cfg.auto_c2 else np.array([1.0] + [float(cfg.c2)] * (nparty - 1))
    trace, gains = [], []
    units = None
    for it in range(cfg.steps):
        A = prob.party_ops(m)
        units = [_sign_operator(a) for a in A]
        if cfg.auto_c2:
            a = np.array([np.trace(x @ y).real for x, y in zip(A, units)])
            if a[0] > _DEGENERATE:
                target = np.clip(a / a[0], 0.0, None)
                c = (1 - cfg.damping) * c + cfg.damping * target
                c[0] = 1.0
        h = prob.embed_sum([ci * t for ci, t in zip(c, units)])
        m, f = prob.sld_and_qfi(h)
        sep = 4.0 * float(np.sum(c**2))
        trace.append(f)
        gains.append(f / sep)
        if f <= _DEGENERATE:
            break
        if it > 0 and abs(gains[-1] - gains[-2]) <= cfg.tol * abs(gains[-1]):
            break
    terms = tuple(ci * t for ci, t in zip(c, units))
    ham = LocalHamiltonian(terms, tuple(float(x) for x in c))
    return GainResult(
        gain=gains[-1],
        qfi=trace[-1],
        sep_bound=4.0 * float(np.sum(c**2)),
        hamiltonian=ham,
        measurement=m,
        iterations=len(trace),
        trace=trace,
        gain_trace=gains,
        trial=idx,
    )


def see_saw(rho, cfg: Optional[SeeSawConfig] = None, dims=None) -> GainResult:
    """Best gain over `cfg.trials` see-saw runs started from random measurements.

    Works for any number of parties; the party split is taken from
    ``rho.dims`` unless `dims` is given. Ties keep the lowest trial index.
    """
    cfg = cfg or SeeSawConfig()
    dims = _party_dims(rho, dims)
    if len(dims) < 2:
        raise ValueError("the gain needs at least two parties")
    prob = _Problem(rho, dims)
    n = prob.rho.shape[0]
    best = None
    for idx, child in enumerate(np.random.SeedSequence(cfg.seed).spawn(cfg.trials)):
        rng = np.random.default_rng(child)
        res = None
        for _ in range(cfg.max_restarts + 1):
            res = _run_trial(prob, random_measurement(n, rng), cfg, idx)
            if res.qfi > _DEGENERATE:
                break
        log.debug("trial %d: gain %.10f after %d iterations", idx, res.gain, res.iterations)
        if best is None or res.gain > best.gain:
            best = res
    return best


def optimize_gain(rho, cfg: Optional[SeeSawConfig] = None, dims=None) -> GainResult:
    """Metrological gain maximized over local Hamiltonians including ``c2``."""
    cfg = replace(cfg or SeeSawConfig(), c2="auto")
    return see_saw(rho, cfg, dims)


def robustness_threshold(
    family: Callable[[float], object],
    cfg: BisectionConfig,
    gain: Optional[Callable[[object], float]] = None,
) -> float:
    """Largest noise fraction keeping the gain above 1, by interval halving.

    `family` maps a noise fraction to a state. `gain` maps a state to its
    gain; the default runs :func:`optimize_gain` with ``cfg.seesaw``. The
    gain is assumed to decrease along the family.
    """
    if gain is None:
        def gain(rho):
            return optimize_gain(rho, cfg.seesaw).gain

    lo, hi = cfg.p_low, cfg.p_high
    g_lo, g_hi = gain(family(lo)), gain(family(hi))
    if not (g_lo > 1.0 >= g_hi):
        raise BracketError(
            f"need g(p_low) > 1 >= g(p_high); got g({lo})={g_lo:.6f}, g({hi})={g_hi:.6f}"
        )
    while hi - lo > cfg.tol:
        mid = (lo + hi) / 2
        if gain(family(mid)) > 1.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2
