import cmath
import math

import numpy as np
import pytest

from sixdma_isac.channel import (
    SPEED_OF_LIGHT,
    PoseBatchEvaluator,
    Scenario,
    aperture_gain,
    build_channels,
    comm_channel,
    path_gain,
    sensing_channels,
    ula_steering,
    upa_steering,
)
from sixdma_isac.geometry import CoincidentNodesError, Pose6D, incidence_angle

from conftest import random_unit


def test_path_gain_frozen_bs_target(scenario):
    # frozen from an mpmath oracle at 50 digits
    a = path_gain(scenario.p_B, scenario.p_T, 2.2, scenario)
    assert a.real == pytest.approx(0.00058921889796412838417, rel=1e-12)
    assert a.imag == pytest.approx(-0.0010129273268179634091, rel=1e-12)
    assert abs(a) == pytest.approx(0.0011718364557960497204, rel=1e-12)


def test_path_gain_symmetric_and_coincident(scenario):
    p, q = [1.0, 2.0, 3.0], [40.0, -7.0, 150.0]
    assert path_gain(p, q, 3.0, scenario) == path_gain(q, p, 3.0, scenario)
    with pytest.raises(CoincidentNodesError):
        path_gain(p, p, 2.2, scenario)


def test_ula_steering_broadside_and_modulus(scenario):
    np.testing.assert_allclose(ula_steering(0.0, 8, scenario), np.ones(8))
    a = ula_steering(0.37, 16, scenario)
    np.testing.assert_allclose(np.abs(a), 1.0)
    assert a[0] == 1.0
    np.testing.assert_allclose(a[3], np.exp(1j * np.pi * 3 * 0.37))
    with pytest.raises(ValueError):
        ula_steering(1.5, 4, scenario)


def test_upa_steering_index_order(scenario):
    te, ta = 1.1, 0.4
    a = upa_steering(te, ta, 3, 5, scenario)
    assert a.shape == (15,)
    for kx in range(3):
        for ky in range(5):
            phase = np.pi * (kx * np.sin(te) * np.cos(ta) + ky * np.sin(te) * np.sin(ta))
            assert a[kx * 5 + ky] == pytest.approx(np.exp(1j * phase), abs=1e-13)


def test_aperture_gain_values():
    assert aperture_gain(0.0, 0.0) == 1.0
    assert aperture_gain(np.pi / 3, 0.0) == pytest.approx(0.5)
    assert aperture_gain(2.0, 0.1) == 0.0
    assert aperture_gain(0.1, np.pi) == 0.0


def test_channel_shapes(scenario):
    cs = build_channels(scenario, scenario.fixed_pose)
    N = scenario.N
    assert cs.h_BU.shape == (scenario.N_t,)
    assert cs.H_BR.shape == (N, scenario.N_t)
    assert cs.h_RU.shape == (N,)
    assert cs.h_RT.shape == (N,)
    assert cs.hbar_TB.shape == (scenario.N_r,)
    assert cs.hbar_TR.shape == (N,)
    assert cs.Hbar_RB.shape == (scenario.N_r, N)


def test_bs_irs_blocks_are_rank_one(scenario):
    cs = build_channels(scenario, Pose6D([60, 80, 150], [0.2, 0.3, 1.0]))
    for M in (cs.H_BR, cs.Hbar_RB):
        s = np.linalg.svd(M, compute_uv=False)
        assert s[1] < 1e-10 * s[0]


def test_reciprocal_bs_irs_link():
    scen = Scenario(N_t=8, N_r=8)
    cs = build_channels(scen, Pose6D([60, 80, 150], [0.2, 0.3, 1.0]))
    assert cs.alpha["BR"] == cs.alpha["RB"]
    a = cs.alpha["BR"]
    np.testing.assert_allclose(cs.Hbar_RB, a * np.conj(cs.H_BR / a).T, atol=1e-18)


def test_sensing_aperture_factors_equal(scenario):
    cs = build_channels(scenario, Pose6D([60, 80, 150], [0.2, 0.1, 1.0]))
    assert cs.F_st == cs.F_sr


def test_aperture_zero_when_node_behind(scenario):
    pose = Pose6D([75, 75, 150], [np.pi, 0, 0])
    cs = build_channels(scenario, pose)
    assert cs.F_cu == 0.0 and cs.F_st == 0.0
    v = np.ones(scenario.N)
    np.testing.assert_allclose(comm_channel(cs, v), cs.h_BU)


def test_single_element_scalar_oracle():
    scen = Scenario(N_t=1, N_r=1, N_x=1, N_y=1)
    pose = Pose6D([70, 60, 150], [0.1, -0.2, 0.5])
    v = cmath.exp(0.7j)
    lam = SPEED_OF_LIGHT / scen.f_c

    def alpha(p, q, eta):
        d = math.dist(p, q)
        return math.sqrt(1e-3 * d ** (-eta)) * cmath.exp(-2j * math.pi * d / lam)

    pB, pU, pT, pR = scen.p_B, scen.p_U, scen.p_T, tuple(pose.p_R)
    cB = math.cos(incidence_angle(pose, pB))
    cU = math.cos(incidence_angle(pose, pU))
    cT = math.cos(incidence_angle(pose, pT))
    h_c = alpha(pB, pU, 3) + math.sqrt(cB * cU) * alpha(pR, pU, 3) * alpha(pB, pR, 2.2) * v
    h_st = alpha(pB, pT, 2.2) + math.sqrt(cB * cT) * alpha(pR, pT, 2.2) * alpha(pB, pR, 2.2) * v
    h_sr = alpha(pT, pB, 2.2) + math.sqrt(cB * cT) * alpha(pR, pB, 2.2) * alpha(pT, pR, 2.2) * v

    cs = build_channels(scen, pose)
    st_, sr_, Hs = sensing_channels(cs, [v])
    assert comm_channel(cs, [v])[0] == pytest.approx(h_c, rel=1e-12)
    assert st_[0] == pytest.approx(h_st, rel=1e-12)
    assert sr_[0] == pytest.approx(h_sr, rel=1e-12)
    assert Hs[0, 0] == pytest.approx(h_sr * h_st, rel=1e-12)


def test_sensing_matrix_is_outer_product(scenario, rng):
    cs = build_channels(scenario, scenario.fixed_pose)
    h_st, h_sr, Hs = sensing_channels(cs, random_unit(rng, scenario.N))
    np.testing.assert_allclose(Hs, np.outer(h_sr, h_st))


def test_batch_evaluator_matches_build_channels(rng):
    scen = Scenario(N_t=6, N_r=5, N_x=3, N_y=4)
    ev = PoseBatchEvaluator(scen)
    poses = np.column_stack([rng.uniform(0, 100, (40, 2)), np.full(40, 150.0), rng.uniform(0, 2 * np.pi, (40, 3))])
    v = random_unit(rng, scen.N)
    h_c, h_st, h_sr, viol = ev.evaluate(poses, v)
    for m in range(40):
        cs = build_channels(scen, Pose6D.from_vector(poses[m]))
        st_, sr_, _ = sensing_channels(cs, v)
        scale = np.linalg.norm(cs.h_BU)
        np.testing.assert_allclose(h_c[m], comm_channel(cs, v), atol=1e-12 * scale)
        np.testing.assert_allclose(h_st[m], st_, atol=1e-12 * np.linalg.norm(st_))
        np.testing.assert_allclose(h_sr[m], sr_, atol=1e-12 * np.linalg.norm(sr_))
        assert np.all(viol[m] >= 0)


def test_ue_links_use_comm_exponent(scenario):
    assert scenario.eta("R", "U") == 3.0
    assert scenario.eta("B", "U") == 3.0
    assert scenario.eta("B", "T") == 2.2
    assert scenario.eta("R", "T") == 2.2
    assert scenario.eta("B", "R") == 2.2


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario(N_x=0)
    with pytest.raises(ValueError):
        Scenario(sigma_c2=0.0)
    with pytest.raises(ValueError):
        Scenario(H=100.0)
