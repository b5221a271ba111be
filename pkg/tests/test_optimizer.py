import math

import numpy as np
import pytest

from metrogain.activation import add_ancilla, paper_hamiltonian, tensor_states
from metrogain.linalg import random_hermitian, random_unitary
from metrogain.metrology import LocalHamiltonian, gain_for_H, qfi, sld
from metrogain.optimizer import (
    BisectionConfig,
    BracketError,
    SeeSawConfig,
    c2_update,
    optimal_H_for_M,
    optimize_gain,
    party_operators,
    random_measurement,
    robustness_threshold,
    see_saw,
)
from metrogain.states import (
    DensityMatrix,
    maximally_entangled,
    noisy_max_entangled,
    noisy_singlet,
    nonwhite_noise_singlet,
    random_mixed,
    random_product_pure,
)

FAST = SeeSawConfig(trials=4, steps=60)


def _objective(A, terms):
    return sum(np.trace(a @ h).real for a, h in zip(A, terms))


# -- config -------------------------------------------------------------------------

@pytest.mark.parametrize("kw", [{"trials": 0}, {"steps": 0}, {"damping": 0}, {"c2": -1.0}, {"c2": "x"}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SeeSawConfig(**kw)


def test_bisection_config_validation():
    with pytest.raises(ValueError):
        BisectionConfig(0.5, 0.4)


# -- Hamiltonian step ---------------------------------------------------------------

def test_optimal_H_white_noise_gives_identity():
    rho = DensityMatrix(np.eye(9) / 9, (3, 3))
    H = optimal_H_for_M(rho, random_hermitian(9, np.random.default_rng(0)), 1.0, 2.0)
    assert np.allclose(H.H1, np.eye(3))
    assert np.allclose(H.H2, 2 * np.eye(3))


def test_optimal_H_recovers_alternating_diagonal_objective():
    rho = maximally_entangled(3)
    D = paper_hamiltonian("me_d", d=3)
    M = sld(rho, D)
    H = optimal_H_for_M(rho, M)
    A = party_operators(rho, M)
    for h in H.terms:
        w = np.sort(np.linalg.eigvalsh(h))
        assert np.allclose(np.abs(w), 1, atol=1e-9)
    # the SLD phase convention makes -D the maximizer; H -> -H leaves every gain unchanged
    assert abs(_objective(A, H.terms) + _objective(A, D.terms)) < 1e-9
    assert abs(_objective(A, H.terms) - qfi(rho, D)) < 1e-9


def test_optimal_H_monte_carlo_optimality():
    rng = np.random.default_rng(5)
    rho = random_mixed((2, 2), 17)
    M = random_hermitian(4, rng)
    H = optimal_H_for_M(rho, M, 1.0, 1.0)
    A = party_operators(rho, M)
    best = [np.trace(a @ h).real for a, h in zip(A, H.terms)]
    for _ in range(10_000):
        for n, a in enumerate(A):
            x = random_hermitian(2, rng)
            x /= np.max(np.abs(np.linalg.eigvalsh(x)))
            x *= rng.uniform()
            assert np.trace(a @ x).real <= best[n] + 1e-12


def test_optimal_H_spectrum_saturation():
    rng = np.random.default_rng(6)
    for s in range(20):
        rho = random_mixed((2, 3), s)
        c1, c2 = rng.uniform(0.2, 2.0, 2)
        H = optimal_H_for_M(rho, random_hermitian(6, rng), c1, c2)
        for h, c in zip(H.terms, (c1, c2)):
            assert np.allclose(np.abs(np.linalg.eigvalsh(h)), c, atol=1e-9)


def test_optimal_H_dimension_mismatch():
    with pytest.raises(ValueError):
        optimal_H_for_M(maximally_entangled(2), np.eye(9))


# -- c2 update ----------------------------------------------------------------------

def test_c2_update_symmetric_state():
    rho = maximally_entangled(3)
    D = paper_hamiltonian("me_d", d=3)
    M = sld(rho, D)
    H = optimal_H_for_M(rho, M)
    assert abs(c2_update(rho, M, H.H1, H.H2) - 1) < 1e-9


def test_c2_update_degenerate_denominator():
    rho = DensityMatrix(np.eye(4) / 4, (2, 2))
    assert c2_update(rho, random_hermitian(4, np.random.default_rng(0)), np.eye(2), np.eye(2)) is None


def test_c2_update_is_line_search_optimum():
    """The updated c2 maximizes the error-propagation gain for fixed M and unit H_n."""
    rng = np.random.default_rng(8)
    for s in range(10):
        rho = random_mixed((2, 3), 100 + s)
        M = random_hermitian(6, rng)
        H = optimal_H_for_M(rho, M, 1.0, 1.0)
        c_new = c2_update(rho, M, H.H1, H.H2)
        if c_new is None:
            continue

        def g(c):
            h = LocalHamiltonian((H.H1, c * H.H2), (1.0, c)).full()
            r = rho.matrix
            signal = np.trace(r @ (1j * (M @ h - h @ M))).real
            var = np.trace(r @ M @ M).real - np.trace(r @ M).real ** 2
            return signal**2 / var / (4 * (1 + c * c))

        grid = np.linspace(0.05, 5, 400)
        assert g(c_new) >= max(g(c) for c in grid) - 1e-9
        assert g(c_new) >= g(1.0) - 1e-9


# -- see-saw ------------------------------------------------------------------------

def test_see_saw_maximally_entangled_d3():
    assert abs(see_saw(maximally_entangled(3), FAST).gain - 16 / 9) < 1e-6


def test_see_saw_singlet():
    res = see_saw(noisy_singlet(0.0), FAST)
    assert abs(res.gain - 2) < 1e-6
    ref = qfi(noisy_singlet(0.0), paper_hamiltonian("singlet_1"))
    assert abs(res.qfi - ref) < 1e-6


def test_see_saw_white_noise():
    assert see_saw(DensityMatrix(np.eye(9) / 9, (3, 3)), FAST).gain == 0


def test_gain_result_invariants():
    res = optimize_gain(random_mixed((3, 3), 4), FAST)
    assert abs(res.gain - res.qfi / res.sep_bound) < 1e-12
    assert abs(res.sep_bound - 4 * sum(c * c for c in res.hamiltonian.bounds)) < 1e-12
    assert abs(res.qfi - qfi(random_mixed((3, 3), 4), res.hamiltonian)) < 1e-8


def test_monotone_traces():
    for s in range(10):
        rho = random_mixed((2, 3), s)
        for cfg in (SeeSawConfig(trials=3, steps=50, c2=1.0, seed=s), SeeSawConfig(trials=3, steps=50, seed=s)):
            res = see_saw(rho, cfg)
            assert np.all(np.diff(res.gain_trace) >= -1e-9)
            if not cfg.auto_c2:
                assert np.all(np.diff(res.trace) >= -1e-9)


def test_seed_determinism():
    rho = random_mixed((3, 3), 9)
    a, b = optimize_gain(rho, FAST), optimize_gain(rho, FAST)
    assert a.gain == b.gain and a.trial == b.trial
    assert np.array_equal(a.measurement, b.measurement)
    assert a.trace == b.trace


def test_product_state_not_useful():
    for s in range(5):
        assert optimize_gain(random_product_pure((3, 3), s), FAST).gain <= 1 + 1e-6


def test_random_measurement_normalized():
    m = random_measurement(5, np.random.default_rng(0))
    assert np.allclose(m, m.conj().T) and abs(np.linalg.norm(m) - 1) < 1e-12


@pytest.mark.parametrize(
    "rho_fn, name",
    [
        (lambda: noisy_max_entangled(3, 0.3), "me_d"),
        (lambda: add_ancilla(noisy_max_entangled(3, 0.37)), "anc_3x3"),
        (lambda: noisy_singlet(0.2), "singlet_1"),
    ],
)
def test_optimized_gain_dominates_fixed(rho_fn, name):
    rho = rho_fn()
    assert optimize_gain(rho).gain >= gain_for_H(rho, paper_hamiltonian(name)) - 1e-6


def test_nonwhite_noise_single_copy():
    res = see_saw(nonwhite_noise_singlet(), SeeSawConfig(c2=1.0))
    assert abs(res.qfi - 8) < 2e-3 and abs(res.gain - 1) < 2e-3


def test_nonwhite_noise_ancilla_c2_fixed_and_optimized():
    rho = add_ancilla(nonwhite_noise_singlet(), "B")
    fixed = see_saw(rho, SeeSawConfig(c2=1.0))
    assert abs(fixed.qfi - 8.4) < 2e-3 and abs(fixed.gain - 8.4 / 8) < 2e-3
    res = optimize_gain(rho)
    assert abs(res.gain - 3 * (5 + math.sqrt(5)) / 20) < 2e-3
    assert abs(res.c2 - (1 + math.sqrt(5)) / 2) < 1e-3


def test_gain_monotone_under_extension():
    for s in range(3):
        rho = random_mixed((2, 2), 40 + s)
        g = optimize_gain(rho, FAST).gain
        assert optimize_gain(add_ancilla(rho, "A"), FAST).gain >= g - 2e-3
        assert optimize_gain(add_ancilla(rho, "B"), FAST).gain >= g - 2e-3
    rho, sigma = noisy_singlet(0.2), random_mixed((2, 2), 3)
    g_ts = optimize_gain(tensor_states(rho, sigma)).gain
    assert g_ts >= max(optimize_gain(rho).gain, optimize_gain(sigma).gain) - 2e-3


def test_gain_convexity():
    rng = np.random.default_rng(12)
    for s in range(8):
        r1 = noisy_singlet(rng.uniform(0, 0.3)).matrix
        u = np.kron(random_unitary(2, rng), random_unitary(2, rng))
        r1 = u @ r1 @ u.conj().T
        r2 = random_mixed((2, 2), 200 + s).matrix
        p = rng.uniform()
        mix = DensityMatrix(p * r1 + (1 - p) * r2, (2, 2))
        g = [optimize_gain(DensityMatrix(r, (2, 2)), FAST).gain for r in (r1, r2)]
        assert optimize_gain(mix, FAST).gain <= p * g[0] + (1 - p) * g[1] + 2e-3


# -- bisection ----------------------------------------------------------------------

def test_bracket_error():
    with pytest.raises(BracketError):
        robustness_threshold(lambda p: noisy_max_entangled(3, p), BisectionConfig(0.4, 0.5, 1e-3, FAST))


def test_threshold_singlet_fixed_hamiltonian():
    H = paper_hamiltonian("singlet_1")
    pm = robustness_threshold(noisy_singlet, BisectionConfig(0.3, 0.45, 1e-6), lambda r: gain_for_H(r, H))
    assert abs(pm - (7 - math.sqrt(17)) / 8) < 1e-5
