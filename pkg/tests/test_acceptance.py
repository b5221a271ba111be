"""Acceptance criteria, each checked at its stated tolerance.

Every test appends one PASS/FAIL line to ``REPORT``; the lines are printed
in the pytest terminal summary (and immediately with ``-s``).
"""

import math

import numpy as np
import pytest

from metrogain.activation import (
    Bipartition,
    add_ancilla,
    ncopy_qfi_bound,
    obs3_qfi,
    paper_hamiltonian,
    regroup,
    tensor_states,
)
from metrogain.analytic import iso_gain, werner_gain
from metrogain.experiments import survey
from metrogain.linalg import random_hermitian
from metrogain.metrology import error_propagation, gain_for_H, qfi, sld
from metrogain.optimizer import (
    BisectionConfig,
    SeeSawConfig,
    optimal_H_for_M,
    optimize_gain,
    robustness_threshold,
    see_saw,
)
from metrogain.states import (
    DensityMatrix,
    SchmidtVector,
    ghz_state,
    noisy_max_entangled,
    noisy_singlet,
    nonwhite_noise_singlet,
    pure_from_schmidt,
    random_mixed,
    ring_cluster_4,
    werner_state,
)

REPORT: list = []
CFG = SeeSawConfig()


class Criterion:
    def __init__(self, number, title):
        self.number, self.title, self.items = number, title, []

    def close(self, label, value, target, tol):
        ok = bool(abs(value - target) <= tol)
        self.items.append((ok, f"{label}: {value:.6g} vs {target:.6g} +- {tol:g}"))
        return ok

    def holds(self, label, ok, detail=""):
        self.items.append((bool(ok), f"{label}{': ' + detail if detail else ''}"))
        return ok

    def finish(self):
        ok = all(o for o, _ in self.items)
        failed = [t for o, t in self.items if not o]
        summary = "; ".join(failed) if failed else "; ".join(t for _, t in self.items)
        line = f"criterion {self.number:>2} {'PASS' if ok else 'FAIL'}  {self.title} | {summary}"
        REPORT.append(line)
        print(line)
        assert ok, line


def _me3(p):
    return noisy_max_entangled(3, p)


def _me3_anc(p):
    return add_ancilla(noisy_max_entangled(3, p))


def _me3_two(p):
    r = noisy_max_entangled(3, p)
    return tensor_states(r, r)


def _singlets(p):
    r = noisy_singlet(p)
    return tensor_states(r, r)


def _fixed(name):
    H = paper_hamiltonian(name)
    return lambda rho: gain_for_H(rho, H)


def test_criterion_01_single_copy_threshold():
    c = Criterion(1, "single-copy 3x3 threshold")
    target = (25 - math.sqrt(177)) / 32
    pm = robustness_threshold(_me3, BisectionConfig(0.30, 0.45, 1e-4, CFG))
    c.close("p_m", pm, target, 5e-4)
    c.finish()


def test_criterion_02_fixed_ancilla():
    c = Criterion(2, "ancilla activation, fixed H")
    pm = robustness_threshold(_me3_anc, BisectionConfig(0.30, 0.45, 1e-5), _fixed("anc_3x3"))
    c.close("p_m", pm, 0.3752, 5e-4)
    c.finish()


def test_criterion_03_fixed_two_copy():
    c = Criterion(3, "two-copy activation, fixed H")
    pm = robustness_threshold(_me3_two, BisectionConfig(0.30, 0.45, 1e-5), _fixed("tc_3x3"))
    c.close("p_m", pm, 0.4164, 5e-4)
    c.finish()


def test_criterion_04_optimized_ancilla():
    c = Criterion(4, "ancilla activation, optimized")
    pm = robustness_threshold(_me3_anc, BisectionConfig(0.37, 0.42, 1e-4, CFG))
    c.close("p_m", pm, 0.3941, 3e-3)
    c.finish()


def test_criterion_05_optimized_two_copy():
    c = Criterion(5, "two-copy activation, optimized")
    pm = robustness_threshold(_me3_two, BisectionConfig(0.40, 0.43, 1e-4, CFG))
    c.close("p_m", pm, 0.4170, 3e-3)
    c.finish()


def test_criterion_06_two_qubit_suite():
    c = Criterion(6, "two-qubit suite")
    p_limit = (7 - math.sqrt(17)) / 8
    pm = robustness_threshold(noisy_singlet, BisectionConfig(0.30, 0.45, 1e-4, CFG))
    c.close("p_limit", pm, p_limit, 5e-4)
    c.close("two-copy QFI at p_limit", qfi(_singlets(p_limit), paper_hamiltonian("singlet_2")), 8.1530, 1e-3)
    pm2 = robustness_threshold(_singlets, BisectionConfig(0.33, 0.40, 1e-4, CFG))
    c.close("two-copy threshold", pm2, 0.3675, 1e-3)
    rho = nonwhite_noise_singlet()
    fixed = SeeSawConfig(c2=1.0)
    c.close("non-white QFI single", see_saw(rho, fixed).qfi, 8.0, 2e-3)
    c.close("non-white QFI two ancillas", see_saw(add_ancilla(add_ancilla(rho, "A"), "B"), fixed).qfi, 9.0, 2e-3)
    c.close("non-white QFI two copies", see_saw(tensor_states(rho, rho), fixed).qfi, 10.0, 2e-3)
    c.close("non-white QFI one ancilla c2=1", see_saw(add_ancilla(rho, "B"), fixed).qfi, 8.4, 2e-3)
    res = optimize_gain(add_ancilla(rho, "B"), CFG)
    c.close("non-white gain one ancilla", res.gain, 3 * (5 + math.sqrt(5)) / 20, 2e-3)
    c.close("optimal c2", res.c2, (1 + math.sqrt(5)) / 2, 1e-2)
    c.finish()


def test_criterion_07_analytic_numeric_agreement():
    c = Criterion(7, "analytic vs see-saw, isotropic and Werner")
    for d in (3, 4, 5):
        dev_iso = max(abs(optimize_gain(noisy_max_entangled(d, 1 - p), CFG).gain - iso_gain(d, p))
                      for p in np.linspace(0.05, 1.0, 20))
        dev_w = max(abs(optimize_gain(werner_state(d, phi), CFG).gain - werner_gain(d, phi))
                    for phi in np.linspace(-1.0, -0.05, 20))
        c.close(f"isotropic d={d} max deviation", dev_iso, 0.0, 1e-3)
        c.close(f"Werner d={d} max deviation", dev_w, 0.0, 1e-3)
    c.finish()


def test_criterion_08_pure_states():
    c = Criterion(8, "pure-state properties")
    rng = np.random.default_rng(2024)
    min_gain, max_dev = np.inf, 0.0
    for _ in range(100):
        s = SchmidtVector.normalized(rng.uniform(0.01, 1.0, size=int(rng.integers(2, 6))))
        d = len(s.coefficients)
        rho = pure_from_schmidt(s, d, d)
        H = paper_hamiltonian("schmidt_obs3", sigma=s)
        # independent oracle: 4 Var(H) on the pure state
        h = H.full()
        var = np.trace(rho.matrix @ h @ h).real - np.trace(rho.matrix @ h).real ** 2
        max_dev = max(max_dev, abs(obs3_qfi(s.coefficients) - 4 * var), abs(qfi(rho, H) - 4 * var))
        min_gain = min(min_gain, gain_for_H(rho, H))
    c.holds("100 Schmidt vectors useful", min_gain > 1, f"min gain {min_gain:.6f}")
    c.close("closed-form QFI vs qfi, max deviation", max_dev, 0.0, 1e-8)
    for N in (2, 3, 4):
        for d in (2, 4):
            for m in sorted({2, d}):
                g = gain_for_H(ghz_state(N, d, m), paper_hamiltonian("ghz_opt", N=N, d=d, m=m))
                c.close(f"GHZ N={N} d={d} m={m}", g, float(N), 2e-3)
    c.finish()


def test_criterion_09_structural_invariants():
    c = Criterion(9, "structural invariants")
    rng = np.random.default_rng(99)
    worst_bound, worst_sat = -np.inf, 0.0
    for s in np.random.SeedSequence(9).spawn(200):
        rho = random_mixed((2, 3), s).matrix
        h, m = random_hermitian(6, rng), random_hermitian(6, rng)
        f = qfi(rho, h)
        worst_bound = max(worst_bound, 1 / error_propagation(rho, h, m) - f)
        worst_sat = max(worst_sat, abs(1 / error_propagation(rho, h, sld(rho, h)) - f) / f)
    c.holds("error propagation bound", worst_bound <= 1e-8, f"max excess {worst_bound:.2e}")
    c.holds("SLD saturation", worst_sat <= 1e-7, f"max rel. deviation {worst_sat:.2e}")

    drop, spread = 0.0, 0.0
    for k in range(10):
        rho = random_mixed((3, 3), 300 + k)
        for cfg in (SeeSawConfig(trials=3, seed=k, c2=1.0), SeeSawConfig(trials=3, seed=k)):
            res = see_saw(rho, cfg)
            drop = max(drop, -np.min(np.diff(res.gain_trace), initial=0.0))
            if not cfg.auto_c2:
                drop = max(drop, -np.min(np.diff(res.trace), initial=0.0))
        c1, c2 = rng.uniform(0.2, 2, 2)
        H = optimal_H_for_M(rho, random_hermitian(9, rng), c1, c2)
        for t, cn in zip(H.terms, (c1, c2)):
            spread = max(spread, np.max(np.abs(np.abs(np.linalg.eigvalsh(t)) - cn)))
    c.holds("monotone see-saw traces", drop <= 1e-9, f"max decrease {drop:.2e}")
    c.holds("optimal H spectrum saturation", spread <= 1e-9, f"max deviation {spread:.2e}")

    worst_ext = np.inf
    for k in range(4):
        rho = random_mixed((2, 2), 400 + k) if k % 2 else noisy_singlet(0.1 * k)
        g = optimize_gain(rho, CFG).gain
        for ext in (add_ancilla(rho, "A"), add_ancilla(rho, "B"), tensor_states(rho, noisy_singlet(0.3))):
            worst_ext = min(worst_ext, optimize_gain(ext, CFG).gain - g)
    c.holds("gain monotone under extension", worst_ext >= -2e-3, f"min change {worst_ext:.2e}")

    worst_cvx = -np.inf
    for k in range(10):
        r1, r2 = noisy_singlet(rng.uniform(0, 0.3)).matrix, random_mixed((2, 2), 500 + k).matrix
        p = rng.uniform()
        g1, g2 = (optimize_gain(DensityMatrix(r, (2, 2)), CFG).gain for r in (r1, r2))
        gm = optimize_gain(DensityMatrix(p * r1 + (1 - p) * r2, (2, 2)), CFG).gain
        worst_cvx = max(worst_cvx, gm - (p * g1 + (1 - p) * g2))
    c.holds("convexity", worst_cvx <= 2e-3, f"max excess {worst_cvx:.2e}")

    cluster = regroup(ring_cluster_4(), Bipartition((0, 1), (2, 3)))
    c.close("ring cluster united (12|34)", optimize_gain(cluster, CFG).gain, 2.0, 2e-3)
    c.finish()


def test_criterion_10_ncopy_bound():
    c = Criterion(10, "n-copy QFI bound")
    seq = [ncopy_qfi_bound((0.9, 0.436), n) for n in range(1, 16)]
    steps = np.diff(seq)
    c.holds("non-decreasing for n <= 15", np.all(steps >= -1e-12), f"min step {steps.min():.3e}")
    c.holds("exceeds 15.9 at n = 15", seq[-1] > 15.9, f"{seq[-1]:.6f}")
    c.finish()


def test_criterion_11_survey():
    c = Criterion(11, "random 3x3 survey")
    pure = survey((3, 3), 500, seed=11, kind="pure", cfg=CFG)
    mixed = survey((3, 3), 500, seed=12, kind="mixed", cfg=CFG)
    fp, fm = pure.fraction_useful(), mixed.fraction_useful()
    c.holds("pure states useful >= 99%", fp >= 0.99, f"{fp:.3f}")
    c.holds("mixed states useful <= 5%", fm <= 0.05, f"{fm:.3f}")
    c.finish()


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
