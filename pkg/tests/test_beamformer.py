import numpy as np
import pytest

from sixdma_isac.beamformer import BeamformerInfeasible, solve_beamformer
from sixdma_isac.channel import Scenario
from sixdma_isac.metrics import db

from conftest import crandn

SCEN = Scenario(sigma_c2=1.0, sigma_s2=1.0)


def _channels(rng, n=6, corr=0.6):
    h_c = crandn(rng, n)
    h_st = corr * h_c * np.exp(0.4j) + np.sqrt(1 - corr**2) * crandn(rng, n)
    return h_st, h_c


def _grid_oracle(h_st, h_c, g0, n=2000):
    """Brute force over unit-norm f in span{h_c^H, h_st^H} built from a QR basis."""
    Qb, _ = np.linalg.qr(np.column_stack([h_c.conj(), h_st.conj()]))
    c_st = h_st @ Qb
    c_c = h_c @ Qb
    mag = np.linspace(0.0, 1.0, n)[:, None]
    ph = np.linspace(0.0, 2 * np.pi, n, endpoint=False)[None, :]
    a, b = mag, np.sqrt(1 - mag**2) * np.exp(1j * ph)
    s = np.abs(c_st[0] * a + c_st[1] * b) ** 2
    c = np.abs(c_c[0] * a + c_c[1] * b) ** 2
    return float(np.max(np.where(c >= g0, s, -np.inf)))


@pytest.mark.parametrize("gamma_frac", [0.05, 0.5, 0.9, 0.99])
def test_matches_grid_oracle(rng, gamma_frac):
    h_st, h_c = _channels(rng)
    g0 = gamma_frac * np.linalg.norm(h_c) ** 2
    sol = solve_beamformer(h_st, 1.0, h_c, SCEN, float(db(g0)))
    oracle = _grid_oracle(h_st, h_c, g0)
    got = abs(h_st @ sol.f) ** 2
    assert got >= oracle * (1 - 1e-9)
    assert db(got) - db(oracle) < 0.01
    assert np.linalg.norm(sol.f) == pytest.approx(1.0)
    assert abs(h_c @ sol.f) ** 2 >= g0 * (1 - 1e-9)


def test_inactive_constraint_gives_matched_filter(rng):
    h_st, h_c = _channels(rng)
    sol = solve_beamformer(h_st, 2.0, h_c, SCEN, -np.inf)
    assert not sol.constraint_active
    np.testing.assert_allclose(sol.f, h_st.conj() / np.linalg.norm(h_st))
    assert sol.snr_s_dB == pytest.approx(db(2.0 * np.linalg.norm(h_st) ** 2))


def test_active_constraint_is_tight(rng):
    h_st, h_c = _channels(rng)
    g0_dB = float(db(0.9 * np.linalg.norm(h_c) ** 2))
    sol = solve_beamformer(h_st, 1.0, h_c, SCEN, g0_dB)
    assert sol.constraint_active
    assert sol.snr_c_dB == pytest.approx(g0_dB, abs=1e-9)


def test_sensing_snr_nonincreasing_in_threshold(rng):
    h_st, h_c = _channels(rng)
    top = float(db(np.linalg.norm(h_c) ** 2))
    prev = np.inf
    for g in np.linspace(top - 30, top, 61):
        s = solve_beamformer(h_st, 1.0, h_c, SCEN, g).snr_s_dB
        assert s <= prev + 1e-9
        prev = s


def test_restriction_optimal_against_random_full_space(rng):
    h_st, h_c = _channels(rng, n=5)
    g0 = 0.7 * np.linalg.norm(h_c) ** 2
    sol = solve_beamformer(h_st, 1.0, h_c, SCEN, float(db(g0)))
    best = abs(h_st @ sol.f) ** 2
    f = crandn(rng, 200000, 5)
    f /= np.linalg.norm(f, axis=1, keepdims=True)
    ok = np.abs(f @ h_c) ** 2 >= g0
    assert ok.any()
    assert np.max(np.abs(f[ok] @ h_st) ** 2) <= best * (1 + 1e-9)


def test_infeasible_threshold(rng):
    h_st, h_c = _channels(rng)
    top = float(db(np.linalg.norm(h_c) ** 2))
    with pytest.raises(BeamformerInfeasible) as info:
        solve_beamformer(h_st, 1.0, h_c, SCEN, top + 0.5)
    assert info.value.max_snr_c_dB == pytest.approx(top)
    solve_beamformer(h_st, 1.0, h_c, SCEN, top - 1e-9)


def test_collinear_channels(rng):
    h_c = crandn(rng, 4)
    sol = solve_beamformer(3j * h_c, 1.0, h_c, SCEN, float(db(0.5 * np.linalg.norm(h_c) ** 2)))
    assert abs(h_c @ sol.f) ** 2 == pytest.approx(np.linalg.norm(h_c) ** 2)


def test_zero_channel_rejected():
    with pytest.raises(ValueError):
        solve_beamformer(np.zeros(3), 1.0, np.ones(3), SCEN)
