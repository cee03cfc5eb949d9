import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from witnesslab.bell_basis import max_entangled_projector
from witnesslab.positivity import (BLOCK_POSITIVE, NOT_BLOCK_POSITIVE, ProductVector,
                                   choi_map_apply, contract_first, contract_second,
                                   numeric_zero_search, phase_family, product_expectation,
                                   projective_distance, seesaw_minimize, span_analysis,
                                   two_level_pair, zero_locus_families)
from witnesslab.optimality import theorem1_projector
from witnesslab.tensor_core import outer
from witnesslab.witness_factory import (FamilyParam, class1_witness, class2_witness,
                                        family_params, family_witness)

component = st.floats(-1, 1, allow_nan=False)
vec4 = st.lists(component, min_size=8, max_size=8).filter(lambda v: np.linalg.norm(v) > 1e-3)


def as_complex(v):
    v = np.asarray(v)
    return v[:4] + 1j * v[4:]


def test_product_vector_normalizes():
    pv = ProductVector.normalized(np.array([2, 0]), np.array([0, 3j]))
    assert np.isclose(np.linalg.norm(pv.vector), 1)
    with pytest.raises(ValueError):
        ProductVector(np.array([2.0, 0]), np.array([1.0, 0]))


@settings(max_examples=100, deadline=None)
@given(vec4, vec4, st.floats(0, math.pi))
def test_contractions_agree_with_expectation(a, b, theta):
    w = class1_witness(theta)
    pv = ProductVector.normalized(as_complex(a), as_complex(b))
    e = product_expectation(w, pv)
    via_second = np.vdot(pv.psi, contract_second(w, pv.phi) @ pv.psi).real
    via_first = np.vdot(pv.phi, contract_first(w, pv.psi) @ pv.phi).real
    assert np.isclose(e, via_second, atol=1e-12)
    assert np.isclose(e, via_first, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(vec4, st.floats(0, math.pi))
def test_positive_map_images_match_contractions(a, theta):
    w = class2_witness(theta)
    chi = as_complex(a)
    x = outer(chi)
    assert np.allclose(choi_map_apply(w, x, "first"), contract_first(w, chi.conj()), atol=1e-12)
    assert np.allclose(choi_map_apply(w, x, "second"), contract_second(w, chi.conj()), atol=1e-12)


def test_positive_map_of_identity_witness_is_trace():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(3, 3))
    assert np.allclose(choi_map_apply(np.eye(9), x), np.trace(x) * np.eye(3))


def test_seesaw_identity():
    rep = seesaw_minimize(np.eye(16), starts=5, seed=0)
    assert rep.verdict == BLOCK_POSITIVE
    assert rep.min_value == pytest.approx(1.0)


def test_seesaw_finds_entangled_projector_violation():
    # <ab|P+|ab> <= 1/n, attained at b = a*
    rep = seesaw_minimize(-max_entangled_projector(3), starts=20, seed=1)
    assert rep.verdict == NOT_BLOCK_POSITIVE
    assert rep.recomputed_value == pytest.approx(-1 / 3, abs=1e-9)
    bound = seesaw_minimize(np.eye(9) / 3 - max_entangled_projector(3), starts=20, seed=1)
    assert bound.min_value >= -1e-9


@pytest.mark.parametrize("fam,theta", [("classI", 0.9), ("classII", 2.0), ("n3", 1.0)])
def test_family_witnesses_pass_seesaw(fam, theta):
    rep = seesaw_minimize(family_witness(FamilyParam(fam, theta)), starts=40, seed=3)
    assert rep.min_value >= -1e-9
    assert rep.verdict == BLOCK_POSITIVE


def test_seesaw_certificate_is_recomputed():
    w = class1_witness(math.pi / 3) - 2.1 * outer(theorem1_projector())
    rep = seesaw_minimize(w, starts=40, seed=0)
    assert rep.verdict == NOT_BLOCK_POSITIVE
    assert product_expectation(w, rep.argmin) == pytest.approx(rep.recomputed_value, abs=1e-15)
    assert rep.recomputed_value < -1e-6


def test_seesaw_deterministic():
    w = class2_witness(1.1)
    a = seesaw_minimize(w, starts=30, seed=11).to_dict()
    b = seesaw_minimize(w, starts=30, seed=11).to_dict()
    assert a == b


def test_seesaw_rejects_zero_starts():
    with pytest.raises(ValueError):
        seesaw_minimize(np.eye(4), starts=0)


@pytest.mark.parametrize("fam,theta", [("classI", 0.0), ("classI", 1.3), ("classI", math.pi),
                                       ("classII", 0.4), ("classII", math.pi),
                                       ("n3", 0.0), ("n3", 2.0)])
def test_analytic_zero_families_vanish(fam, theta):
    p = FamilyParam(fam, theta)
    w = family_witness(p)
    for pv in zero_locus_families(p):
        assert abs(product_expectation(w, pv)) <= 1e-12


@pytest.mark.parametrize("theta", [0.0, 0.7, math.pi / 2, math.pi])
def test_optimized_family_vanishes(theta):
    w = class1_witness(theta) - 2 * outer(theorem1_projector())
    for pv in zero_locus_families(FamilyParam("classI", theta), optimized=True):
        assert abs(product_expectation(w, pv)) <= 1e-12


def test_optimized_flag_rejected_outside_class1():
    with pytest.raises(ValueError):
        zero_locus_families(FamilyParam("classII", 1.0), optimized=True)


def test_phase_family_span_is_n2_minus_n_plus_1():
    for n in (3, 4):
        assert span_analysis(phase_family(n)).rank == n * n - n + 1


def test_two_level_pair_requires_tangency():
    # class I always satisfies alpha_0 + sqrt(alpha_1 alpha_3) = 1 on some shift
    alpha = family_params(FamilyParam("classI", 1.0))
    assert two_level_pair(alpha, 0) is not None
    assert two_level_pair(np.array([1.5, 0.25, 0.25]), 0) is None


@pytest.mark.parametrize("fam,theta,rank", [("classI", math.pi / 3, 15), ("classI", 0.0, 13),
                                            ("classII", 1.2, 14), ("classII", math.pi, 16),
                                            ("n3", 5 * math.pi / 3, 7), ("n3", math.pi / 2, 9)])
def test_span_ranks(fam, theta, rank):
    rep = span_analysis(zero_locus_families(FamilyParam(fam, theta)))
    assert rep.rank == rank
    if rank < rep.singular_values.size:
        assert rep.gap >= 1e3


def test_theorem1_projector_orthogonal_to_class1_zero_locus():
    psi = theorem1_projector()
    for pv in zero_locus_families(FamilyParam("classI", 1.1)):
        assert abs(np.vdot(psi, pv.vector)) <= 1e-12


def test_numeric_zero_search_class2_moduli():
    w = class2_witness(1.0)
    zeros = numeric_zero_search(w, count=60, seed=5)
    assert len(zeros) >= 10
    for pv in zeros:
        m = np.abs(pv.psi) ** 2
        assert abs(m[0] - m[2]) <= 1e-6 and abs(m[1] - m[3]) <= 1e-6
        assert abs(product_expectation(w, pv)) <= 1e-9


def test_numeric_zeros_lie_in_analytic_span():
    p = FamilyParam("classI", math.pi / 3)
    basis = np.array([pv.vector for pv in zero_locus_families(p)])
    u, s, vh = np.linalg.svd(basis)
    span = vh[: int(np.sum(s > 1e-8 * s[0]))]
    for pv in numeric_zero_search(family_witness(p), count=40, seed=2):
        captured = np.linalg.norm(span.conj() @ pv.vector)
        assert captured >= 1 - 1e-6


def test_projective_distance_ignores_phases():
    rng = np.random.default_rng(4)
    a = ProductVector.normalized(rng.normal(size=4) + 0j, rng.normal(size=4) + 0j)
    b = ProductVector(a.psi * np.exp(0.3j), a.phi * np.exp(-1.2j))
    assert projective_distance(a, b) <= 1e-7
