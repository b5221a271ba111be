"""Density matrices, the state families used throughout the package, and
QSTATE-JSON file ingestion.

Noise conventions
-----------------
Three parametrizations of the same isotropic family appear in practice:

* ``noisy_max_entangled(d, p)`` -- `p` is the weight of white noise,
  ``(1 - p) |me><me| + p I/d^2``. This is the canonical knob.
* ``isotropic_state(d, F)`` -- `F` is the entanglement fraction.
* ``p_iso`` as used by :mod:`metrogain.analytic` -- the weight of the
  maximally entangled projector, ``p_iso |me><me| + (1 - p_iso) I/d^2``.

Conversions: ``p_iso = 1 - p`` and ``p_iso = (F d^2 - 1) / (d^2 - 1)``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .linalg import DimensionError, hermitize, partial_trace, tensor_product

TRACE_TOL = 1e-10
NEGATIVITY_TOL = 1e-10
# eigh returns tiny negative eigenvalues for exact projectors; below this
# magnitude the matrix is left untouched so that round trips stay bit-exact
_SOLVER_NOISE = 1e-13

FILE_TRACE_TOL = 1e-6
FILE_NEGATIVITY_TOL = 1e-6

RNG_NAME = f"numpy.random.PCG64 (numpy {np.__version__})"


class StateValidationError(ValueError):
    """The matrix is not a valid density matrix for the requested tolerance."""


def _validated(matrix, dims, trace_tol=TRACE_TOL, neg_tol=NEGATIVITY_TOL) -> np.ndarray:
    try:
        rho = hermitize(matrix)
    except ValueError as exc:
        raise StateValidationError(str(exc)) from exc
    n = int(np.prod(dims))
    if rho.shape != (n, n):
        raise DimensionError(f"matrix of shape {rho.shape} does not match dims {tuple(dims)}")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise StateValidationError(f"trace {tr:.12g} deviates from 1 by more than {trace_tol:.1e}")
    w, u = np.linalg.eigh(rho)
    if w[0] < -neg_tol:
        raise StateValidationError(f"minimum eigenvalue {w[0]:.3e} below -{neg_tol:.1e}")
    if w[0] < -_SOLVER_NOISE:
        w = np.clip(w, 0.0, None)
        rho = (u * w) @ u.conj().T
        tr = w.sum()
    if abs(tr - 1.0) > _SOLVER_NOISE:
        rho = rho / tr
    return rho


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix together with its subsystem dimensions.

    The stored matrix is Hermitized, has unit trace and no eigenvalue below
    zero; eigenvalues in ``[-1e-10, 0)`` are clipped and the result is
    renormalized, anything more negative is rejected.
    """

    matrix: np.ndarray
    dims: tuple
    label: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise DimensionError(f"invalid dims {self.dims}")
        rho = _validated(self.matrix, dims)
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def _trusted(cls, matrix: np.ndarray, dims, label=None) -> "DensityMatrix":
        # construction path for matrices already validated elsewhere
        obj = object.__new__(cls)
        matrix = np.array(matrix, dtype=complex)
        matrix.setflags(write=False)
        object.__setattr__(obj, "matrix", matrix)
        object.__setattr__(obj, "dims", tuple(int(d) for d in dims))
        object.__setattr__(obj, "label", label)
        return obj

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_bipartite(self) -> bool:
        return len(self.dims) == 2

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def reduced(self, keep) -> np.ndarray:
        return partial_trace(self.matrix, self.dims, keep)

    def expect(self, op) -> complex:
        return complex(np.trace(self.matrix @ np.asarray(op)))

    def with_dims(self, dims) -> "DensityMatrix":
        """Same matrix viewed with a different (compatible) subsystem split."""
        dims = tuple(int(d) for d in dims)
        if int(np.prod(dims)) != self.dim:
            raise DimensionError(f"dims {dims} incompatible with dimension {self.dim}")
        return DensityMatrix._trusted(self.matrix, dims, self.label)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def from_pure(psi, dims, label=None) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise StateValidationError("zero vector")
    psi = psi / nrm
    return DensityMatrix(np.outer(psi, psi.conj()), dims, label)


def _check_unit(name, x):
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")


def max_entangled_vector(d: int) -> np.ndarray:
    if d < 2:
        raise ValueError(f"local dimension must be at least 2, got {d}")
    psi = np.zeros(d * d, dtype=complex)
    psi[np.arange(d) * (d + 1)] = 1 / np.sqrt(d)
    return psi


def max_entangled_projector(d: int) -> np.ndarray:
    psi = max_entangled_vector(d)
    return np.outer(psi, psi.conj())


def flip_operator(d: int) -> np.ndarray:
    """The swap V with ``V |i>|j> = |j>|i>``."""
    v = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            v[j * d + i, i * d + j] = 1.0
    return v


def maximally_entangled(d: int) -> DensityMatrix:
    return DensityMatrix(max_entangled_projector(d), (d, d), f"me{d}")


def noisy_max_entangled(d: int, p: float) -> DensityMatrix:
    """``(1 - p) |me><me| + p I/d^2`` with `p` the white-noise weight."""
    _check_unit("p", p)
    rho = (1 - p) * max_entangled_projector(d) + p * np.eye(d * d) / d**2
    return DensityMatrix(rho, (d, d), f"noisy-me d={d} p={p}")


def isotropic_state(d: int, F: float) -> DensityMatrix:
    """Isotropic state with entanglement fraction `F`."""
    _check_unit("F", F)
    P = max_entangled_projector(d)
    rho = F * P + (1 - F) * (np.eye(d * d) - P) / (d * d - 1)
    return DensityMatrix(rho, (d, d), f"isotropic d={d} F={F}")


def fraction_to_p_iso(d: int, F: float) -> float:
    return (F * d * d - 1) / (d * d - 1)


def p_iso_to_fraction(d: int, p_iso: float) -> float:
    return (p_iso * (d * d - 1) + 1) / (d * d)


def werner_state(d: int, phi: float) -> DensityMatrix:
    """``(I + phi V) / (d^2 + phi d)`` with V the flip operator."""
    if not -1.0 <= phi <= 1.0:
        raise ValueError(f"phi must lie in [-1, 1], got {phi}")
    if d < 2:
        raise ValueError(f"local dimension must be at least 2, got {d}")
    rho = (np.eye(d * d) + phi * flip_operator(d)) / (d * d + phi * d)
    return DensityMatrix(rho, (d, d), f"werner d={d} phi={phi}")


def singlet_vector() -> np.ndarray:
    return np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


def noisy_singlet(p: float) -> DensityMatrix:
    _check_unit("p", p)
    s = singlet_vector()
    rho = (1 - p) * np.outer(s, s.conj()) + p * np.eye(4) / 4
    return DensityMatrix(rho, (2, 2), f"noisy-singlet p={p}")


def singlet_noise_to_phi(p: float) -> float:
    """Werner parameter of ``noisy_singlet(p)``."""
    return -2 * (1 - p) / (2 - p)


def nonwhite_noise_singlet() -> DensityMatrix:
    """Equal mixture of the singlet and ``|00>``."""
    s = singlet_vector()
    zz = np.zeros(4, dtype=complex)
    zz[0] = 1
    rho = (np.outer(s, s.conj()) + np.outer(zz, zz)) / 2
    return DensityMatrix(rho, (2, 2), "nonwhite-singlet")


@dataclass(frozen=True)
class SchmidtVector:
    """Descending nonnegative Schmidt coefficients with unit square sum."""

    coefficients: tuple

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float).ravel()
        if c.size == 0 or np.any(c < 0):
            raise ValueError("Schmidt coefficients must be nonnegative and non-empty")
        if np.any(np.diff(c) > 0):
            raise ValueError("Schmidt coefficients must be in descending order")
        if abs(np.sum(c**2) - 1) > 1e-12:
            raise ValueError(f"squared coefficients sum to {np.sum(c**2):.15g}, not 1")
        object.__setattr__(self, "coefficients", tuple(float(v) for v in c))

    @classmethod
    def normalized(cls, values) -> "SchmidtVector":
        """Sort descending and rescale to unit norm."""
        c = np.sort(np.abs(np.asarray(values, dtype=float)))[::-1]
        return cls(tuple(c / np.linalg.norm(c)))

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(np.asarray(self.coefficients) > 0))

    def __len__(self):
        return len(self.coefficients)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coefficients, dtype=dtype)


def pure_from_schmidt(sigma, d_A: Optional[int] = None, d_B: Optional[int] = None) -> DensityMatrix:
    """Density matrix of ``sum_k sigma_k |k>|k>``."""
    if not isinstance(sigma, SchmidtVector):
        sigma = SchmidtVector(tuple(sigma))
    s = np.asarray(sigma.coefficients)
    d_A = len(s) if d_A is None else d_A
    d_B = len(s) if d_B is None else d_B
    if sigma.rank > min(d_A, d_B) or len(s) > min(d_A, d_B):
        raise ValueError(f"{len(s)} Schmidt coefficients do not fit into {d_A}x{d_B}")
    psi = np.zeros(d_A * d_B, dtype=complex)
    for k, v in enumerate(s):
        psi[k * d_B + k] = v
    return from_pure(psi, (d_A, d_B), "schmidt")


def ghz_state(N: int, d: int, m: int) -> DensityMatrix:
    """``(1/sqrt(m)) sum_{n<m} |n>^N`` on N qudits of dimension d."""
    if N < 2:
        raise ValueError("need at least two parties")
    if m % 2 or m < 2:
        raise ValueError(f"number of superposed terms must be even and positive, got {m}")
    if m > d:
        raise ValueError(f"m={m} exceeds the local dimension d={d}")
    psi = np.zeros(d**N, dtype=complex)
    stride = sum(d**k for k in range(N))
    psi[np.arange(m) * stride] = 1 / np.sqrt(m)
    return from_pure(psi, (d,) * N, f"ghz N={N} d={d} m={m}")


_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)


def ring_cluster_stabilizers() -> list:
    """Generators ``Z_{i-1} X_i Z_{i+1}`` of the four-qubit ring."""
    out = []
    for i in range(4):
        ops = [np.eye(2)] * 4
        ops[i] = _X
        ops[(i - 1) % 4] = _Z
        ops[(i + 1) % 4] = _Z
        out.append(tensor_product(*ops))
    return out


def ring_cluster_4() -> DensityMatrix:
    """Four-qubit ring cluster (graph) state, CZ on edges 01, 12, 23, 30."""
    plus = np.full(16, 0.25, dtype=complex)
    idx = np.arange(16)
    bits = [(idx >> (3 - q)) & 1 for q in range(4)]
    parity = sum(bits[q] * bits[(q + 1) % 4] for q in range(4))
    psi = plus * (-1.0) ** parity
    return from_pure(psi, (2, 2, 2, 2), "ring-cluster-4")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_pure(dims: Sequence[int], seed) -> DensityMatrix:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    rng = _rng(seed)
    n = int(np.prod(dims))
    psi = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return from_pure(psi, tuple(dims), "random-pure")


def random_mixed(dims: Sequence[int], seed) -> DensityMatrix:
    """Hilbert-Schmidt random mixed state ``G G^dagger / Tr(G G^dagger)``."""
    rng = _rng(seed)
    n = int(np.prod(dims))
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real, tuple(dims), "random-mixed")


def random_product_pure(dims: Sequence[int], seed) -> DensityMatrix:
    rng = _rng(seed)
    vecs = []
    for d in dims:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        vecs.append(v / np.linalg.norm(v))
    return from_pure(tensor_product(*vecs), tuple(dims), "random-product")


def entanglement_fraction(rho) -> float:
    m = as_matrix(rho)
    d = int(round(np.sqrt(m.shape[0])))
    return float(np.real(np.trace(m @ max_entangled_projector(d))))


# -- QSTATE-JSON -------------------------------------------------------------

def state_to_json(rho: DensityMatrix) -> str:
    m = rho.matrix.ravel()
    doc = {
        "dims": list(rho.dims),
        "matrix": [[float(z.real), float(z.imag)] for z in m],
    }
    if rho.label is not None:
        doc["label"] = rho.label
    return json.dumps(doc) + "\n"


def state_from_json(text: str) -> DensityMatrix:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateValidationError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or "dims" not in doc or "matrix" not in doc:
        raise StateValidationError("QSTATE-JSON needs an object with 'dims' and 'matrix'")
    dims = doc["dims"]
    if (not isinstance(dims, list) or not dims
            or not all(isinstance(d, int) and not isinstance(d, bool) and d > 0 for d in dims)):
        raise StateValidationError(f"'dims' must be a non-empty list of positive integers, got {dims!r}")
    n = int(np.prod(dims))
    entries = doc["matrix"]
    if not isinstance(entries, list) or len(entries) != n * n:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise StateValidationError(f"'matrix' must hold {n * n} [re, im] pairs, got {got}")
    try:
        arr = np.array(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateValidationError(f"bad matrix entries: {exc}") from exc
    if arr.shape != (n * n, 2):
        raise StateValidationError("every matrix entry must be an [re, im] pair")
    m = (arr[:, 0] + 1j * arr[:, 1]).reshape(n, n)
    rho = _validated(m, dims, FILE_TRACE_TOL, FILE_NEGATIVITY_TOL)
    return DensityMatrix._trusted(rho, dims, doc.get("label"))


def save_state(rho: DensityMatrix, path) -> None:
    with open(os.fspath(path), "w", encoding="utf-8") as fh:
        fh.write(state_to_json(rho))


def load_state(path) -> DensityMatrix:
    with open(os.fspath(path), encoding="utf-8") as fh:
        return state_from_json(fh.read())
