import math

import numpy as np
import pytest

from relaycap import SnrVector, capacity, rates
from relaycap.errors import InvalidInputError
from relaycap.optimize import optimize_relay
from relaycap.qcverify import (
    CLAIMS,
    LEMMA6_IDS,
    bordered_hessian,
    concavity_sample_test,
    cs_equivalence_check,
    function_spec,
    hessian_fd,
    interior_destination_check,
    leading_minors,
    lemma1_eigen_check,
    lemma5_composition_checks,
    lemma6_certify,
    logdet_ratio,
    logdet_ratio_concavity,
    minor_sign_test,
    printed_bordered_hessian,
    quasiconcavity_sample_test,
)
from relaycap.scenario import preset


def test_hessian_square():
    H = hessian_fd(lambda x: x[0] ** 2, [1.0], step=1e-4)
    assert H.shape == (1, 1)
    assert H[0, 0] == pytest.approx(2.0, abs=1e-6)


def test_hessian_product():
    H = hessian_fd(lambda x: x[0] * x[1], [0.7, 2.3])
    assert np.allclose(H, [[0.0, 1.0], [1.0, 0.0]], atol=1e-6)
    assert np.array_equal(H, H.T)


def test_hessian_fj_rank_one_at_unit_point():
    def f(x):
        return rates.f_j(1.0, SnrVector(0.0, [x[0]], [x[1]]), 0)

    eig = np.linalg.eigvalsh(hessian_fd(f, [1.0, 1.0]))
    assert eig[0] == pytest.approx(-1.0, abs=1e-4)
    assert eig[1] == pytest.approx(0.0, abs=1e-4)


def test_hessian_domain_and_step_checks():
    with pytest.raises(InvalidInputError):
        hessian_fd(lambda x: x[0], [1.0], step=0.0)
    with pytest.raises(InvalidInputError):
        hessian_fd(lambda x: x[0], [0.01], step=0.01, domain=((0.0, 1.0),))


def test_bordered_product():
    B = bordered_hessian(lambda x: x[0] * x[1], [1.0, 2.0])
    assert np.allclose(B, [[0, 2, 1], [2, 0, 1], [1, 1, 0]], atol=1e-6)
    (k2, d2), (k3, d3) = leading_minors(B)
    assert (k2, k3) == (2, 3)
    assert d2 == pytest.approx(-4.0, abs=1e-5)
    assert d3 == pytest.approx(4.0, abs=1e-5)


def test_bordered_constant_is_zero():
    assert np.allclose(bordered_hessian(lambda x: 3.0, [1.0, 2.0, 3.0]), 0.0)


def test_coherent_sum_printed_matrix_at_ones():
    B = printed_bordered_hessian("coherent_sum", [1.0, 1.0, 1.0])
    assert B.shape == (4, 4)
    assert np.allclose(B[0, 1:], [2.0, 2.0, 1.0])
    signs = dict(leading_minors(B))
    assert signs[2] < 0 and signs[3] > 0 and signs[4] < 0


def test_printed_ab_matrix_with_scale():
    B = printed_bordered_hessian("ab", [1.0, 2.0, 3.0])
    assert np.allclose(B, [[0, 6, 3], [6, 0, 3], [3, 3, 0]])
    assert minor_sign_test(B).passed


@pytest.mark.parametrize("fid", LEMMA6_IDS)
def test_printed_matrices_match_finite_differences(fid):
    rng = np.random.default_rng(3)
    spec = function_spec(fid)
    for _ in range(20):
        lo = np.array([b[0] for b in spec.domain_box]) + 0.05
        hi = np.array([b[1] for b in spec.domain_box]) - 0.05
        x = lo + (hi - lo) * rng.random(lo.size)
        printed = printed_bordered_hessian(fid, x)
        fd = bordered_hessian(spec, x)
        assert np.allclose(printed, fd, rtol=1e-5, atol=1e-5 * max(1.0, np.abs(printed).max()))


def test_minor_sign_test_product_passes():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a, b = rng.uniform(0.1, 10, 2)
        assert minor_sign_test(bordered_hessian(lambda x: x[0] * x[1], [a, b])).passed


def test_minor_sign_test_linear_is_indeterminate():
    r = minor_sign_test(bordered_hessian(lambda x: x[0] + x[1], [1.0, 2.0]))
    assert r.verdict == "indeterminate"
    assert not r.passed


def test_minor_sign_test_quasiconvex_block_fails():
    spec = function_spec("one_minus_b")
    r = minor_sign_test(bordered_hessian(spec, [2.0, 0.5]))
    assert r.verdict == "fail"
    assert lemma6_certify("one_minus_b", trials=50, seed=1).verdict == "fail"


@pytest.mark.parametrize("fid", LEMMA6_IDS)
def test_building_block_sign_pattern(fid):
    r = lemma6_certify(fid, trials=300, seed=1)
    assert r.passed, r.summary()
    assert r.trials == 300


def test_building_blocks_other_constants():
    assert lemma6_certify("ab_over_sum_k", {"k": 3.0}, trials=200, seed=2).passed
    assert lemma6_certify("k1_over_a_plus_sqrt", {"k1": 0.5, "k2": 4.0}, trials=200, seed=2).passed
    with pytest.raises(InvalidInputError):
        lemma6_certify("f_j")
    with pytest.raises(InvalidInputError):
        function_spec("ab_over_sum_k", {"k": -1.0})


def test_certify_deterministic():
    a = lemma6_certify("coherent_sum", trials=50, seed=5)
    b = lemma6_certify("coherent_sum", trials=50, seed=5)
    assert a == b


def test_sampling_tent_and_square():
    assert quasiconcavity_sample_test(lambda x: min(x[0], 2 - x[0]), ((0.0, 2.0),)).passed
    r = concavity_sample_test(lambda x: x[0] ** 2, ((-1.0, 1.0),), trials=200)
    assert r.verdict == "fail"
    x1, x2, lam = r.violations[0][0]
    assert 0.0 <= lam <= 1.0


def test_sampling_capacity_concave():
    assert concavity_sample_test(lambda x: capacity(x[0]), ((0.0, 100.0),)).passed


def test_sampling_fj_concave_in_snr():
    def f(x):
        return rates.f_j(0.6, SnrVector(0.0, [x[0]], [x[1]]), 0)

    assert concavity_sample_test(f, ((0.0, 10.0), (0.0, 10.0))).passed


def test_gstar_and_gtilde_claims():
    assert CLAIMS["gstar_qc_rho2_snr"].run(trials=1000, seed=1).passed
    r = CLAIMS["gtilde"].run(trials=1000, seed=1)
    assert r.verdict == "fail"
    assert r.violations[0][1] == "quasiconcave_gap"


def test_mix_mask_holds_coordinates():
    seen = []

    def f(x):
        seen.append(x[1])
        return x[0]

    quasiconcavity_sample_test(f, ((0.0, 1.0), (0.0, 1.0)), trials=5, mix=(True, False))
    for k in range(0, 15, 3):
        assert seen[k] == seen[k + 1] == seen[k + 2]
    with pytest.raises(InvalidInputError):
        quasiconcavity_sample_test(f, ((0.0, 1.0),), trials=1, mix=(True, False))


def test_logdet_ratio_scalar():
    Q = np.array([[2.0, 0.5], [0.5, 1.0]])
    assert logdet_ratio(Q, (0,)) == pytest.approx(math.log(1.75 / 2.0))
    assert logdet_ratio(np.array([[3.0]]), ()) == pytest.approx(math.log(3.0))


@pytest.mark.parametrize("dim", [1, 2, 3, 4])
def test_logdet_concavity(dim):
    assert logdet_ratio_concavity(dim, trials=300, seed=1).passed


def test_logdet_minor_choices_and_negation():
    assert logdet_ratio_concavity(3, trials=200, seed=1, minor=(0, 2)).passed
    assert logdet_ratio_concavity(2, trials=200, seed=1, negate=True).verdict == "fail"
    with pytest.raises(InvalidInputError):
        logdet_ratio_concavity(5)
    with pytest.raises(InvalidInputError):
        logdet_ratio_concavity(2, minor=(3,))


def test_composition_checks():
    r = lemma5_composition_checks(trials=300, seed=1)
    assert r.passed, r.summary()
    assert set(r.details) == {"affine_rescale", "minimum", "nondecreasing_outer", "supremum",
                              "convex_inner"}


def test_fj_hessian_eigen_structure():
    assert lemma1_eigen_check(trials=100, seed=1).passed


def test_cs_equivalence():
    assert cs_equivalence_check(trials=300, seed=1).passed
    assert cs_equivalence_check(trials=100, seed=2, mode=rates.RateMode.LOW_SNR).passed


@pytest.mark.parametrize("name", ["cs_qc_rho2_S", "df_qc_rho2_S_low_snr", "df_qc_rho2_r_line",
                                  "df_qc_rho2_r_square_low_snr", "cs_concave_rho",
                                  "qf_qc_relay_snrs", "fj_qc_rho2_r_square"])
def test_selected_claims(name):
    assert CLAIMS[name].run(trials=300, seed=2).passed


def test_interior_destinations_poly():
    cfg = preset("poly_3d")
    res = optimize_relay("df_noncoherent", cfg.layout, cfg.params, cfg.box, resolution=(9, 9, 9))
    assert interior_destination_check(cfg.layout, res.argmax, cfg.params, trials=300, seed=1).passed
