"""State extensions (ancillas, extra copies, regrouping of parties), the
fixed Hamiltonians of the activation examples, and the many-copy QFI lower
bound for pure states."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
import numpy as np

from .linalg import DimensionError, permute_subsystems
from .metrology import LocalHamiltonian
from .states import DensityMatrix, SchmidtVector


@dataclass(frozen=True)
class Bipartition:
    """Two disjoint groups of subsystem indices covering the whole system."""

    A: tuple
    B: tuple

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(int(i) for i in self.A))
        object.__setattr__(self, "B", tuple(int(i) for i in self.B))
        if not self.A or not self.B:
            raise ValueError("both groups must be non-empty")
        if set(self.A) & set(self.B):
            raise ValueError(f"groups overlap: {self.A} and {self.B}")

    def validate(self, n: int) -> None:
        if sorted(self.A + self.B) != list(range(n)):
            raise ValueError(f"partition {self.A}|{self.B} does not cover {n} subsystems")


def _require_bipartite(rho: DensityMatrix) -> None:
    if not rho.is_bipartite:
        raise DimensionError(f"expected a bipartite state, got dims {rho.dims}")


def add_ancilla(rho: DensityMatrix, side: str = "A", anc_dim: int = 2, anc_state=None) -> DensityMatrix:
    """Attach a pure ancilla to party A (as the leading factor) or B (trailing).

    The result is bipartite with dims ``(anc_dim*d_A, d_B)`` or
    ``(d_A, d_B*anc_dim)``.
    """
    _require_bipartite(rho)
    if anc_state is None:
        anc_state = np.zeros(anc_dim, dtype=complex)
        anc_state[0] = 1
    v = np.asarray(anc_state, dtype=complex).ravel()
    if v.size != anc_dim:
        raise DimensionError(f"ancilla vector has length {v.size}, expected {anc_dim}")
    if abs(np.linalg.norm(v) - 1) > 1e-10:
        raise ValueError("ancilla state must be normalized")
    p = np.outer(v, v.conj())
    dA, dB = rho.dims
    if side == "A":
        m = np.kron(p, rho.matrix)
        dims = (anc_dim * dA, dB)
    elif side == "B":
        m = np.kron(rho.matrix, p)
        dims = (dA, dB * anc_dim)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return DensityMatrix._trusted(m, dims, f"{rho.label}+ancilla{side}")


def tensor_states(rho: DensityMatrix, sigma: DensityMatrix) -> DensityMatrix:
    """``rho_AB (x) sigma_A'B'`` regrouped as ``AA' | BB'``."""
    _require_bipartite(rho)
    _require_bipartite(sigma)
    (dA, dB), (dA2, dB2) = rho.dims, sigma.dims
    m = np.kron(rho.matrix, sigma.matrix)
    m = permute_subsystems(m, (dA, dB, dA2, dB2), (0, 2, 1, 3))
    return DensityMatrix._trusted(m, (dA * dA2, dB * dB2), f"{rho.label}(x){sigma.label}")


def regroup(rho: DensityMatrix, partition: Bipartition) -> DensityMatrix:
    """Merge the subsystems of a multiparty state into two parties."""
    partition.validate(len(rho.dims))
    perm = list(partition.A) + list(partition.B)
    m = permute_subsystems(rho.matrix, rho.dims, perm)
    dA = int(np.prod([rho.dims[i] for i in partition.A]))
    dB = int(np.prod([rho.dims[i] for i in partition.B]))
    return DensityMatrix._trusted(m, (dA, dB), rho.label)


# -- fixed Hamiltonians -------------------------------------------------------

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def alternating_diag(d: int) -> np.ndarray:
    """``diag(+1, -1, +1, -1, ...)`` of size d."""
    return np.diag([(-1.0) ** k for k in range(d)]).astype(complex)


def paired_levels(d: int, m: int) -> np.ndarray:
    """``sum_{pairs} |n><n| - |n+1><n+1|`` on the first m levels (m even)."""
    v = np.zeros(d)
    for k in range(0, m - m % 2, 2):
        v[k], v[k + 1] = 1.0, -1.0
    return np.diag(v).astype(complex)


def paired_flips(d: int, s: int) -> np.ndarray:
    """``sum_{pairs} |+><+| - |-><-|`` on levels (1,2), (3,4), ... up to the
    largest even number not above s; i.e. a sigma_x on every pair."""
    h = np.zeros((d, d), dtype=complex)
    for k in range(0, s - s % 2, 2):
        h[k, k + 1] = h[k + 1, k] = 1.0
    return h


def ancilla_coupling() -> np.ndarray:
    """The ancilla/qutrit operator of the single-ancilla example (6x6).

    First factor is the qubit ancilla, second the qutrit A:
    ``(9/20)(2 sx + sz) (x) |0><0| + I (x) (|2><2| - |1><1|)``.
    """
    P0 = np.diag([1.0, 0, 0])
    D21 = np.diag([0, -1.0, 1.0])
    return 9 / 20 * np.kron(2 * SIGMA_X + SIGMA_Z, P0) + np.kron(np.eye(2), D21)


def paper_hamiltonian(name: str, **params) -> LocalHamiltonian:
    """Fixed local Hamiltonians of the worked examples.

    ``me_d`` (d)
        ``D (x) I + I (x) D`` with D the alternating diagonal.
    ``anc_3x3``
        ``1.2 C_aA + D_B`` on ``(aA | B)`` = ``(6 | 3)``.
    ``tc_3x3``
        ``D_A D_A' + D_B D_B'`` on ``(AA' | BB')`` = ``(9 | 9)``.
    ``singlet_1``
        ``Z_A - Z_B``.
    ``singlet_2``
        ``Z_A Z_A' + Z_B Z_B'`` on ``(4 | 4)``.
    ``cluster_4``
        ``jz (x) jy + jy (x) jz`` on qubit pairs (12 | 34).
    ``ghz_opt`` (N, d, m)
        Paired-level operator on each of N parties.
    ``schmidt_obs3`` (sigma, d_A=None, d_B=None)
        sigma_x on consecutive Schmidt-level pairs of both parties.
    """
    D3 = alternating_diag(3)
    if name == "me_d":
        d = int(params.get("d", 3))
        D = alternating_diag(d)
        return LocalHamiltonian((D, D))
    if name == "anc_3x3":
        return LocalHamiltonian((1.2 * ancilla_coupling(), D3))
    if name == "tc_3x3":
        DD = np.kron(D3, D3)
        return LocalHamiltonian((DD, DD))
    if name == "singlet_1":
        return LocalHamiltonian((SIGMA_Z, -SIGMA_Z))
    if name == "singlet_2":
        ZZ = np.kron(SIGMA_Z, SIGMA_Z)
        return LocalHamiltonian((ZZ, ZZ))
    if name == "cluster_4":
        jy, jz = SIGMA_Y / 2, SIGMA_Z / 2
        return LocalHamiltonian((np.kron(jz, jy), np.kron(jy, jz)))
    if name == "ghz_opt":
        N, d, m = int(params["N"]), int(params["d"]), int(params["m"])
        if m % 2 or m > d:
            raise ValueError("m must be even and not exceed d")
        return LocalHamiltonian((paired_levels(d, m),) * N)
    if name == "schmidt_obs3":
        sigma = params["sigma"]
        if not isinstance(sigma, SchmidtVector):
            sigma = SchmidtVector(tuple(sigma))
        s = sigma.rank
        d_A = params.get("d_A") or len(sigma)
        d_B = params.get("d_B") or len(sigma)
        if s < 2:
            raise ValueError("needs Schmidt rank at least 2")
        return LocalHamiltonian((paired_flips(d_A, s), paired_flips(d_B, s)))
    raise KeyError(f"unknown Hamiltonian {name!r}")


# -- pure states ----------------------------------------------------------------

def obs3_qfi(sigma) -> float:
    """``8 sum_{pairs} (s_n + s_{n+1})^2`` over consecutive coefficient pairs."""
    s = np.asarray(sigma, dtype=float)
    s = s[s > 0]
    even = len(s) - len(s) % 2
    return float(8 * np.sum((s[0:even:2] + s[1:even:2]) ** 2))


def _compositions(n: int, s: int):
    for cut in itertools.combinations(range(n + s - 1), s - 1):
        prev, ks = -1, []
        for c in cut:
            ks.append(c - prev - 1)
            prev = c
        ks.append(n + s - 1 - prev - 1)
        yield tuple(ks)


def _multinomial(n: int, ks) -> int:
    out = math.factorial(n)
    for k in ks:
        out //= math.factorial(k)
    return out


def _log_multinomial(n: int, ks) -> float:
    return math.lgamma(n + 1) - sum(math.lgamma(k + 1) for k in ks)


def _ncopy_groups(sigma, n: int):
    """(value, multiplicity) of the n-copy Schmidt coefficients, one entry per
    composition of n, sorted by descending value."""
    s = np.asarray(sigma, dtype=float)
    s = s[s > 0]
    # rounded inputs such as (0.9, 0.436) would otherwise push the limit past 16
    s = s / np.linalg.norm(s)
    groups = []
    for ks in _compositions(n, len(s)):
        if n <= 20:
            mult = _multinomial(n, ks)
        else:
            mult = _log_multinomial(n, ks)
        logv = sum(k * math.log(x) for k, x in zip(ks, s))
        groups.append((logv, mult, ks))
    groups.sort(key=lambda g: -g[0])
    return groups, n <= 20


def ncopy_qfi_bound_grouped(sigma, n: int) -> float:
    """``8 sum_k floor(multinom(n; k)/2) (2 prod_i s_i^k_i)^2``.

    Pairs n-copy Schmidt coefficients only inside groups of equal value, so
    it vanishes for n = 1.
    """
    groups, exact = _ncopy_groups(sigma, n)
    total = 0.0
    for logv, mult, _ in groups:
        if exact:
            total += (mult // 2) * 4 * math.exp(2 * logv)
        else:
            # floor(m/2) ~ m/2 once counts are this large; mult holds log(m)
            total += 2 * math.exp(mult + 2 * logv)
    return 8 * total


def ncopy_qfi_bound(sigma, n: int) -> float:
    """QFI lower bound for n copies of a pure state with Schmidt vector `sigma`.

    The pair construction is applied to the full, descending n-copy Schmidt
    spectrum; equal coefficients come in multinomially sized blocks, so the
    pairing is done block by block without enumerating ``s**n`` values.
    `sigma` is rescaled to unit norm first. For n = 1 this is :func:`obs3_qfi`
    of the rescaled vector.
    """
    groups, exact = _ncopy_groups(sigma, n)
    total = 0.0
    carry = None
    for logv, mult, _ in groups:
        if not exact:
            # mult holds log(m); pairing across block edges is negligible here
            total += 2 * math.exp(mult + 2 * logv)
            continue
        v = math.exp(logv)
        if carry is not None:
            total += (carry + v) ** 2
            mult -= 1
            carry = None
        total += (mult // 2) * 4 * v * v
        if mult % 2:
            carry = v
    return 8 * total
