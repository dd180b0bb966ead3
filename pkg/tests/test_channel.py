import numpy as np
import pytest

from abcsim.channel import (ChannelRealization, cscg, draw_channel, link_budget, received_symbol,
                            sample_cscg, synthesize_frame)
from abcsim.config import SystemConfig, db_to_linear
from abcsim.ml_detector import covariance_matrices
from abcsim.rng import substream


def test_sample_cscg_moments():
    assert sample_cscg(0, np.random.default_rng(0)).shape == (0,)
    z = sample_cscg(10**6, np.random.default_rng(1))
    assert abs(np.mean(np.abs(z) ** 2) - 1) < 0.01
    assert abs(np.mean(z.real * z.imag)) < 0.01
    assert abs(np.var(z.real) - 0.5) < 0.01


def test_link_budget():
    assert link_budget(1, 1, 1, 1, 2, 4 * np.pi) == pytest.approx(1.0)
    assert link_budget(1, 1, 1, 10, 2, 4 * np.pi) == pytest.approx(0.01)
    kappa = (0.125 / (4 * np.pi)) ** 2
    assert link_budget(10, 1, 1, 5, 2, 0.125) == pytest.approx(kappa * 10 / 25, rel=1e-12)
    with pytest.raises(ValueError):
        link_budget(1, 1, 1, 0, 2, 1.0)


def test_draw_channel_shape_and_determinism():
    cfg = SystemConfig(M=1)
    ch = draw_channel(cfg, substream(3))
    assert ch.f_t.shape == ch.f_j.shape == ch.f_b.shape == (1,)
    again = draw_channel(cfg, substream(3))
    np.testing.assert_array_equal(ch.f_b, again.f_b)
    assert ch.g_j == again.g_j


def test_draw_channel_unit_variance():
    cfg = SystemConfig(M=1)
    rng = np.random.default_rng(7)
    fb = np.array([draw_channel(cfg, rng).f_b[0] for _ in range(10**5)])
    assert abs(np.mean(np.abs(fb) ** 2) - 1) < 0.02


def test_pure_noise_when_no_sources():
    cfg = SystemConfig(M=4, N=50000, alpha_tr=0.0, alpha_jr=0.0)
    ch = draw_channel(cfg, substream(1))
    y = received_symbol(cfg, ch, 0, substream(2))
    assert y.shape == (50000, 4)
    np.testing.assert_allclose(np.mean(np.abs(y) ** 2, axis=0), 1.0, atol=0.03)


def test_no_backscatter_path_makes_states_identical():
    cfg = SystemConfig(M=3, N=20, alpha_t_rel=0.0, alpha_j_rel=0.0)
    ch = draw_channel(cfg, substream(1))
    y0 = received_symbol(cfg, ch, 0, substream(2))
    y1 = received_symbol(cfg, ch, 1, substream(2))
    np.testing.assert_array_equal(y0, y1)


def test_received_symbol_matches_formula():
    cfg = SystemConfig(M=2, N=3, alpha_tr=2.0, alpha_jr=3.0, alpha_t_rel=0.5, alpha_j_rel=0.25)
    ch = draw_channel(cfg, substream(9))
    y = received_symbol(cfg, ch, 1, substream(10))
    # replay the draws in the documented order: s_t, s_j, noise
    rec = substream(10)
    s_t, s_j, noise = cscg(3, rec), cscg(3, rec), cscg((3, 2), rec)
    for n in range(3):
        for m in range(2):
            ref = (ch.f_t[m] * np.sqrt(2.0) * s_t[n] + ch.f_j[m] * np.sqrt(3.0) * s_j[n]
                   + ch.f_b[m] * 1 * (ch.g_t * np.sqrt(1.0) * s_t[n] + ch.g_j * np.sqrt(0.75) * s_j[n])
                   + noise[n, m])
            assert y[n, m] == pytest.approx(ref, abs=1e-14)


def test_received_symbol_rejects_bad_state():
    cfg = SystemConfig(M=1, N=1)
    with pytest.raises(ValueError):
        received_symbol(cfg, draw_channel(cfg, substream(0)), 2, substream(1))


def test_frame_with_one_symbol_is_received_symbol():
    cfg = SystemConfig(M=3, N=7, I=1, P=0)
    ch = draw_channel(cfg, substream(0))
    blk = synthesize_frame(cfg, ch, [1], substream(5))
    np.testing.assert_array_equal(blk.samples[0], received_symbol(cfg, ch, 1, substream(5)))


def test_frame_shape_and_determinism():
    cfg = SystemConfig(M=2)
    ch = draw_channel(cfg, substream(0))
    e = np.random.default_rng(0).integers(0, 2, cfg.I)
    a = synthesize_frame(cfg, ch, e, substream(1))
    b = synthesize_frame(cfg, ch, e, substream(1))
    assert a.samples.shape == (100, 50, 2)
    np.testing.assert_array_equal(a.samples, b.samples)
    with pytest.raises(ValueError):
        synthesize_frame(cfg, ch, e[:-1], substream(1))


@pytest.mark.parametrize("state", [0, 1])
def test_sample_statistics_match_covariance(state):
    cfg = SystemConfig(M=3, N=10**5, alpha_t_rel=db_to_linear(-3), alpha_j_rel=db_to_linear(-3))
    ch = draw_channel(cfg, substream(4))
    pair = covariance_matrices(ch, cfg)
    K = pair.K1 if state else pair.K0
    y = received_symbol(cfg, ch, state, substream(5))
    var = np.mean(np.abs(y) ** 2, axis=0)
    np.testing.assert_allclose(var, np.diag(K).real, rtol=0.03)
    S = y.T @ y.conj() / len(y)
    scale = np.sqrt(np.outer(np.diag(K).real, np.diag(K).real))
    assert np.max(np.abs(S - K) / scale) < 0.05


def test_seed_and_config_fix_everything():
    cfg = SystemConfig(M=2, N=5, I=4, P=2)
    out = []
    for _ in range(2):
        rng = substream(cfg.seed, 11)
        ch = draw_channel(cfg, rng)
        out.append(synthesize_frame(cfg, ch, [1, 0, 1, 1], rng).samples)
    np.testing.assert_array_equal(out[0], out[1])


def test_realization_dataclass():
    ch = ChannelRealization(np.ones(2), np.ones(2), np.ones(2), 1.0, 1.0)
    assert ch.M == 2
