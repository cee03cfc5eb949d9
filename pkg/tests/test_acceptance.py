"""Acceptance criteria, each at its stated tolerance.

Every check records one PASS/FAIL line, printed in the "acceptance criteria"
section of the pytest summary.
"""
import json
import math

import numpy as np
import pytest

import oracles
from witnesslab.bell_basis import bell_coefficients, covariance_residual
from witnesslab.cli import main
from witnesslab.optimality import (SubtractionProbe, appendix_a_kernels, appendix_inequalities,
                                   class1_det_factorized, class2_contraction,
                                   class2_contraction_terms, class2_probe_det,
                                   lambda_star_bisect, probe_directions,
                                   probe_leading_coefficient_formula, subtract_rank1,
                                   theorem1_projector, verify_decomposition_classI,
                                   verify_decomposition_classII)
from witnesslab.positivity import (NOT_BLOCK_POSITIVE, numeric_zero_search, product_expectation,
                                   seesaw_minimize, span_analysis, zero_locus_families)
from witnesslab.tensor_core import min_eigenvalue
from witnesslab.witness_factory import (FamilyParam, class1_witness, class2_witness,
                                        class4_identities, family_params, family_witness,
                                        n3_identities, validate_alpha)

pytestmark = pytest.mark.slow

PI = math.pi
THIRDS = (PI / 4, PI / 2, 3 * PI / 4)


def test_c1_constraint_identities(criterion):
    worst = 0.0
    for fam in ("classI", "classII"):
        for t in np.linspace(0, PI, 64):
            a = family_params(FamilyParam(fam, float(t)))
            rep = validate_alpha(a)
            worst = max(worst, rep.sum_residual, rep.gram_residual, *class4_identities(a).values())
    for phi in np.linspace(0, 2 * PI, 64, endpoint=False):
        a = family_params(FamilyParam("n3", float(phi)))
        rep = validate_alpha(a)
        worst = max(worst, rep.sum_residual, rep.gram_residual, *n3_identities(a).values())
    criterion("C1", worst <= 1e-12, f"constraint identities on 64-point grids: max residual {worst:.2e}")


def test_c2_bell_diagonal_and_covariant(criterion):
    rng = np.random.default_rng(2)
    off = cov = 0.0
    witnesses = [(class1_witness(t), 4) for t in np.linspace(0, PI, 5)]
    witnesses += [(class2_witness(t), 4) for t in np.linspace(0, PI, 5)]
    witnesses += [(family_witness(FamilyParam("n3", p)), 3) for p in (0.0, 1.0, 5 * PI / 3)]
    for w, n in witnesses:
        off = max(off, bell_coefficients(w, n).offdiag_residual)
        for _ in range(100):
            cov = max(cov, covariance_residual(w, rng.uniform(0, 2 * PI, n)))
    criterion("C2", off <= 1e-12 and cov <= 1e-12,
              f"Bell off-diagonal {off:.2e}, covariance over 100 unitaries {cov:.2e}")


def test_c3_seesaw_block_positivity(criterion):
    worst_min, worst_eig = math.inf, -math.inf
    for t in np.linspace(0, PI, 9):
        for w in (class1_witness(t), class2_witness(t)):
            worst_min = min(worst_min, seesaw_minimize(w, starts=200, seed=0).min_value)
            worst_eig = max(worst_eig, min_eigenvalue(w))
    criterion("C3", worst_min >= -1e-9 and worst_eig < -1e-3,
              f"see-saw min over 9 angles x 2 classes {worst_min:.2e}; "
              f"largest min eigenvalue {worst_eig:.3f}")


SPAN_CASES = [
    ("classI", t, False, 15) for t in THIRDS
] + [("classI", t, False, 13) for t in (0.0, PI)] + [
    ("classI", t, True, 16) for t in THIRDS
] + [("classII", t, False, 14) for t in THIRDS] + [
    ("classII", PI, False, 16), ("n3", 5 * PI / 3, False, 7), ("n3", PI / 2, False, 9)]


def test_c4_span_ranks(criterion):
    bad = []
    for fam, t, optimized, expected in SPAN_CASES:
        rep = span_analysis(zero_locus_families(FamilyParam(fam, t), optimized=optimized),
                            rel_tol=1e-8)
        if rep.rank != expected or rep.gap < 1e3:
            bad.append(f"{fam}({t:.3f}{',opt' if optimized else ''}) rank {rep.rank} gap {rep.gap:.1e}")
    criterion("C4", not bad, f"{len(SPAN_CASES)} span ranks at rel_tol 1e-8, gap >= 1e3"
              + (": " + "; ".join(bad) if bad else ""))


def test_c5_lambda_star(criterion):
    stars, certs = [], []
    for t in THIRDS:
        rep = lambda_star_bisect(FamilyParam("classI", t), tol=1e-4, starts=200, seed=0)
        stars.append(rep.lambda_star)
        w = subtract_rank1(class1_witness(t), SubtractionProbe(theorem1_projector(), 2.05))
        cert = seesaw_minimize(w, starts=200, seed=0)
        certs.append((cert.verdict, product_expectation(w, cert.argmin)))
    ok_star = all(abs(s - 2) <= 1e-3 for s in stars)
    ok_cert = all(v == NOT_BLOCK_POSITIVE and e < -1e-6 for v, e in certs)
    criterion("C5", ok_star and ok_cert,
              f"lambda* {['%.5f' % s for s in stars]}; lambda=2.05 re-verified "
              f"{['%.4f' % e for _, e in certs]}")


def test_c6_decomposition_certificates(criterion):
    a, b = verify_decomposition_classI(), verify_decomposition_classII()
    ok = all(r.residual <= 1e-12 and r.min_eigenvalue >= -1e-12 for r in (a, b))
    criterion("C6", ok, f"residuals {a.residual:.1e}, {b.residual:.1e}; "
              f"min eigenvalues {a.min_eigenvalue:.1e}, {b.min_eigenvalue:.1e}")


def test_c7a_factorized_determinant(criterion):
    rng = np.random.default_rng(7)
    worst = worst_float = 0.0
    for _ in range(10_000):
        t = rng.uniform(0, PI)
        m = rng.uniform(0, 1, 4)
        psi = m * np.exp(1j * rng.uniform(0, 2 * PI, 4))
        exact = oracles.det("classI", t, psi, subtract_psi=True)
        worst = max(worst, abs(class1_det_factorized(t, m, dps=40) - exact) / abs(exact))
        worst_float = max(worst_float, abs(class1_det_factorized(t, m) - exact) / abs(exact))
    criterion("C7a", worst <= 1e-9,
              f"factorized vs dense det, 10^4 samples: max rel {worst:.1e} "
              f"(float64 path {worst_float:.1e}, see ledger)")


def test_c7b_inequality_grid(criterion):
    min_lhs, mismatches = math.inf, 0
    for t in np.linspace(0, PI, 256):
        for phi in np.linspace(0, PI / 2, 256):
            r = appendix_inequalities(float(t), float(phi))
            min_lhs = min(min_lhs, r["main_ineq1_lhs"])
            # saturation: zero LHS exactly where 2 phi - theta is a multiple of pi
            mismatches += (abs(r["main_ineq1_lhs"]) <= 1e-12) != r["saturated"]
    criterion("C7b", min_lhs >= -1e-12 and mismatches == 0,
              f"256x256 grid: min LHS {min_lhs:.1e}, saturation mismatches {mismatches}")


def test_c7c_kernel_families(criterion):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(200):
        res = appendix_a_kernels(rng.uniform(0, PI), rng.uniform(0, 2 * PI), rng.uniform(0, 1),
                                 rng.uniform(0, 2 * PI, 3))
        worst = max(worst, *res.values())
    criterion("C7c", worst <= 1e-9, f"kernel residuals over 200 draws of all five families {worst:.1e}")


def test_c8a_s_decomposition(criterion):
    rng = np.random.default_rng(8)
    worst = min_term = 0.0
    for _ in range(10_000):
        t = rng.uniform(0, PI)
        X = rng.uniform(0, 1, 4)
        psi = np.sqrt(X) * np.exp(1j * rng.uniform(0, 2 * PI, 4))
        exact = oracles.det("classII", t, psi)
        terms = class2_contraction_terms(t, X)
        worst = max(worst, abs(terms.total - exact) / abs(exact))
        min_term = min(min_term, terms.S1, terms.S2, terms.S3)
    criterion("C8a", worst <= 1e-9 and min_term >= -1e-12,
              f"S1+S2+S3 vs dense det, 10^4 samples: max rel {worst:.1e}; min term {min_term:.1e}")


def test_c8b_reduction_point_singular(criterion):
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(1000):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        worst = max(worst, abs(np.linalg.det(class2_contraction(PI, psi))))
    criterion("C8b", worst <= 1e-10, f"theta = pi contraction determinant max {worst:.1e}")


def test_c8c_numeric_zero_moduli(criterion):
    worst, count = 0.0, 0
    for t in THIRDS:
        for pv in numeric_zero_search(class2_witness(t), count=200, seed=1):
            count += 1
            for f in (pv.psi, pv.phi):
                m = np.abs(f) ** 2
                worst = max(worst, abs(m[0] - m[2]), abs(m[1] - m[3]))
    criterion("C8c", count > 0 and worst <= 1e-6,
              f"{count} numeric zeros of W_II: max moduli deviation {worst:.1e}")


def _probe_grid():
    return [(t, class2_probe_det(t, 1e-4, None, x, y)) for t in THIRDS
            for x, y in probe_directions(12)]


def test_c9a_probe_determinant_negative(criterion):
    dets = [r.det for _, r in _probe_grid()]
    criterion("C9a", max(dets) < -1e-18,
              f"36 probe determinants at lambda=1e-4: largest {max(dets):.2e}")


def _weight(r):
    return abs(r.y) if r.shifted else abs(r.x)


def test_c9b_cubic_coefficient_printed_prefactor(criterion):
    ratios, worst = [], 0.0
    for t, r in _probe_grid():
        printed = probe_leading_coefficient_formula(t, r.k, _weight(r), factor=8.0)
        worst = max(worst, abs(r.leading_coeff - printed) / abs(printed))
        ratios.append(r.leading_coeff / printed)
    criterion("C9b", worst <= 1e-6,
              f"lambda^3 coefficient vs 8k^2(...): max rel {worst:.2e}, "
              f"fitted/printed in [{min(ratios):.6f}, {max(ratios):.6f}] (see ledger)")


def test_c9b_exact_prefactor(criterion):
    worst = 0.0
    for t, r in _probe_grid():
        exact = probe_leading_coefficient_formula(t, r.k, _weight(r), factor=16.0)
        worst = max(worst, abs(r.leading_coeff - exact) / abs(exact))
    criterion("C9b*", worst <= 1e-6, f"lambda^3 coefficient vs 16k^2(...): max rel {worst:.1e}")


DETERMINISM_COMMANDS = [
    ["witness", "classI:theta=0"],
    ["witness", "classII:theta=pi"],
    ["witness", "n3:phi=0"],
    ["certify", "classI:theta=1.0"],
    ["certify", "classI:theta=1.0", "--subtract-lambda", "2.5"],
    ["span", "classII:theta=1.2"],
    ["span", "classI:theta=pi/2", "--optimized"],
    ["optimize", "classI:theta=pi/2"],
    ["verify-cert"],
    ["appendix", "A"],
    ["appendix", "B"],
    ["appendix", "C", "--theta", "pi/4"],
    ["sweep", "classII", "--points", "9"],
]


def test_c10_determinism(criterion, capsys):
    differing = []
    for argv in DETERMINISM_COMMANDS:
        outs = []
        for _ in range(2):
            main([*argv, "--seed", "3", "--payload-only"])
            outs.append(capsys.readouterr().out)
        json.loads(outs[0])
        if outs[0] != outs[1]:
            differing.append(" ".join(argv))
    criterion("C10", not differing,
              f"{len(DETERMINISM_COMMANDS)} commands run twice with --seed 3"
              + (": differing " + ", ".join(differing) if differing else ": byte-identical"))
