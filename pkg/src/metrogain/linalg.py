"""Dense complex linear algebra for small multi-qudit systems.

All composite indices follow the mixed-radix convention with the leftmost
subsystem most significant, so for two parties the index is ``i_A * d_B + i_B``
(the same layout ``np.kron`` produces).
"""

from __future__ import annotations

from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

HERMITIAN_TOL = 1e-8


class SpectralDecomposition(NamedTuple):
    """Eigenvalues in ascending order and orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


class DimensionError(ValueError):
    """Raised when operator shapes and subsystem dimensions disagree."""


def hermitize(x, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``(X + X^dagger)/2``, rejecting X if it is not Hermitian within `tol`.

    The deviation is measured as the largest absolute entry of ``X - X^dagger``.
    """
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {x.shape}")
    dev = np.max(np.abs(x - x.conj().T)) if x.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (deviation {dev:.3e} > {tol:.1e})")
    return (x + x.conj().T) / 2


def spectral_decompose(x) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    Raises ``numpy.linalg.LinAlgError`` if the solver does not converge.
    """
    h = hermitize(x)
    w, u = np.linalg.eigh(h)
    return SpectralDecomposition(w, u)


def tensor_product(*ops) -> np.ndarray:
    """Kronecker product of any number of matrices (or vectors), left to right."""
    if not ops:
        raise ValueError("tensor_product needs at least one operand")
    return reduce(np.kron, (np.asarray(op) for op in ops))


def _check_dims(x: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionError(f"dimensions must be positive, got {dims}")
    n = int(np.prod(dims))
    if x.shape != (n, n):
        raise DimensionError(f"matrix of shape {x.shape} does not match dims {dims}")
    return dims


def partial_trace(x, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every subsystem not listed in `keep`.

    Parameters
    ----------
    x : array_like
        Square matrix on the composite space ``prod(dims)``.
    dims : sequence of int
        Subsystem dimensions, leftmost most significant.
    keep : int or iterable of int
        Subsystems to keep. They are returned in increasing index order.
    """
    x = np.asarray(x)
    dims = _check_dims(x, dims)
    if isinstance(keep, (int, np.integer)):
        keep = [int(keep)]
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"subsystem index out of range in {keep} for {n} subsystems")

    t = x.reshape(dims + dims)
    # Contract traced subsystems one at a time, highest index first so the
    # remaining axis positions stay valid.
    traced = [k for k in range(n) if k not in keep]
    m = n
    for k in reversed(traced):
        t = np.trace(t, axis1=k, axis2=k + m)
        m -= 1
    dk = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(dk, dk)


def embed_local(h, dims: Sequence[int], site: int) -> np.ndarray:
    """Place `h` on subsystem `site` with identities on all other subsystems."""
    h = np.asarray(h)
    dims = tuple(int(d) for d in dims)
    if not 0 <= site < len(dims):
        raise DimensionError(f"site {site} out of range for dims {dims}")
    if h.shape != (dims[site], dims[site]):
        raise DimensionError(
            f"operator of shape {h.shape} cannot act on a subsystem of dimension {dims[site]}"
        )
    left = int(np.prod(dims[:site]))
    right = int(np.prod(dims[site + 1:]))
    return np.kron(np.kron(np.eye(left), h), np.eye(right))


def permute_subsystems(x, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of an operator.

    Subsystem ``perm[j]`` of the input becomes subsystem ``j`` of the output.
    """
    x = np.asarray(x)
    dims = _check_dims(x, dims)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(len(dims))):
        raise DimensionError(f"{perm} is not a permutation of {len(dims)} subsystems")
    n = len(dims)
    t = x.reshape(dims + dims)
    t = t.transpose(perm + [p + n for p in perm])
    size = x.shape[0]
    return t.reshape(size, size)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix with phase fix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2
