"""Acceptance gate: ten end-to-end criteria at their full trial counts.

Each test prints one PASS/FAIL line (also repeated in the pytest summary).
The whole module takes roughly 40 minutes on one core.  Run it alone with
``pytest -m acceptance`` or ``python3 tests/test_acceptance.py``.
"""
import io
import math
import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from abcsim.bench import ExperimentSpec, run_ber_experiment, run_rate_experiment, run_training, write_csv
from abcsim.capacity import mutual_information, theta_grid
from abcsim.channel import draw_channel
from abcsim.config import SystemConfig
from abcsim.dl.detector import TrainConfig
from abcsim.dl.lstm import backward, cross_entropy, forward, init_model
from abcsim.ml_detector import CovariancePair, covariance_matrices, decision_statistic, detect_symbol
from abcsim.rng import substream
from acceptance_log import record
from oracles import likelihood_product_rule, scalar_mi_quadrature

pytestmark = pytest.mark.acceptance

DEFAULTS = SystemConfig()
JR_DB = tuple(float(v) for v in range(1, 11))


def metric(rows, name):
    return [r for r in rows if r.metric == name]


def test_rate_peaks_at_balanced_prior():
    spec = ExperimentSpec(kind="rate-vs-theta0", system=DEFAULTS, sweep_name="theta0",
                          sweep_values=tuple(theta_grid(0.01)), trials=10_000, realizations=100)
    t0 = time.perf_counter()
    rows = run_rate_experiment(spec)
    best = max(rows, key=lambda r: r.value)
    ok = abs(best.swept_value - 0.5) <= 0.05
    record(1, "rate peak at balanced prior", ok,
           f"argmax theta0 = {best.swept_value:.2f}, rate {best.value:.4f} bits ({time.perf_counter() - t0:.0f} s)")
    assert ok


def test_rate_increases_with_jammer_power():
    spec = ExperimentSpec(kind="rate-vs-snr", system=DEFAULTS, sweep_name="alpha_jr_db", sweep_values=JR_DB,
                          trials=10_000, realizations=100)
    t0 = time.perf_counter()
    rows = metric(run_rate_experiment(spec), "max_rate_bits")
    rho = spearmanr([r.swept_value for r in rows], [r.value for r in rows])[0]
    ok = rho >= 0.95
    record(2, "rate monotone in jammer power", ok,
           f"Spearman {rho:.3f}; rates {', '.join(f'{r.value:.3f}' for r in rows)} "
           f"({time.perf_counter() - t0:.0f} s)")
    assert ok


def test_rate_grows_with_antennas():
    spec = ExperimentSpec(kind="rate-vs-snr", system=DEFAULTS, sweep_name="M", sweep_values=(2.0, 5.0, 10.0),
                          trials=10_000, realizations=100)
    t0 = time.perf_counter()
    rows = metric(run_rate_experiment(spec), "max_rate_bits")
    gaps = [(b.value - a.value) / math.hypot(a.stderr, b.stderr) for a, b in zip(rows, rows[1:])]
    ok = all(g > 3 for g in gaps)
    record(3, "rate grows with antennas", ok,
           f"M=2,5,10 rates {', '.join(f'{r.value:.4f}+-{r.stderr:.4f}' for r in rows)}; "
           f"gaps {', '.join(f'{g:.1f}' for g in gaps)} SE ({time.perf_counter() - t0:.0f} s)")
    assert ok


def test_ml_ber_monotone():
    t0 = time.perf_counter()
    jr = metric(run_ber_experiment(ExperimentSpec(kind="ber-vs-snr", system=DEFAULTS, sweep_name="alpha_jr_db",
                                                  sweep_values=JR_DB, trials=10_000)), "ber")
    nn = metric(run_ber_experiment(ExperimentSpec(kind="ber-vs-N", system=DEFAULTS, sweep_name="N",
                                                  sweep_values=(1.0, 10.0, 25.0, 50.0, 100.0),
                                                  trials=10_000)), "ber")
    rho_jr = spearmanr([r.swept_value for r in jr], [r.value for r in jr])[0]
    rho_n = spearmanr([r.swept_value for r in nn], [r.value for r in nn])[0]
    ok = rho_jr <= -0.95 and rho_n <= -0.95
    record(4, "ML BER falls with jammer power and N", ok,
           f"Spearman {rho_jr:.3f} (BER {jr[0].value:.4g} -> {jr[-1].value:.4g}), "
           f"{rho_n:.3f} over N (BER {nn[0].value:.4g} -> {nn[-1].value:.4g}) ({time.perf_counter() - t0:.0f} s)")
    assert ok


def test_ml_matches_likelihood_product():
    rng = substream(5, 0)
    agree = checked = 0
    for k in range(10_000):
        M = int(rng.integers(1, 4))
        N = int(rng.integers(1, 6))
        cfg = DEFAULTS.with_(M=M, N=N)
        pair = covariance_matrices(draw_channel(cfg, rng), cfg)
        L = np.linalg.cholesky(pair.K1 if rng.random() < 0.5 else pair.K0)
        z = (rng.standard_normal((N, M)) + 1j * rng.standard_normal((N, M))) * math.sqrt(0.5)
        Y = z @ L.T
        stat, thr = decision_statistic(Y, pair)
        if abs(stat - thr) < 1e-9:
            continue
        checked += 1
        agree += detect_symbol(Y, pair) == likelihood_product_rule(Y, pair.K0, pair.K1)
    ok = agree == checked and checked > 9_000
    record(5, "ML rule equals likelihood-product rule", ok, f"{agree}/{checked} agree")
    assert ok


def test_mutual_information_quadrature():
    details, ok = [], True
    for k1 in (2.0, 10.0, 100.0):
        pair = CovariancePair(np.array([[1.0 + 0j]]), np.array([[k1 + 0j]]))
        est, se = mutual_information(0.5, pair, 1_000_000, substream(6, int(k1)))
        ref = scalar_mi_quadrature(1.0, k1, 0.5)
        z = abs(est - ref) / se
        ok &= z <= 3
        details.append(f"K1={k1:g}: MC {est:.5f} vs {ref:.5f} ({z:.1f} SE)")
    record(6, "mutual information vs quadrature", ok, "; ".join(details))
    assert ok


def test_gradient_check():
    rng = substream(7)
    m = init_model(4, rng)
    m.b[:] = rng.normal(scale=0.3, size=m.b.shape)
    X = rng.standard_normal((2, 8, 3))
    y = np.array([1, 0])
    grads = backward(m, y, forward(m, X)[1])
    worst = 0.0
    h = 1e-6
    for name, p in m.params().items():
        num = np.zeros_like(p)
        for idx in np.ndindex(p.shape):
            old = p[idx]
            p[idx] = old + h
            up = cross_entropy(forward(m, X)[0], y)
            p[idx] = old - h
            dn = cross_entropy(forward(m, X)[0], y)
            p[idx] = old
            num[idx] = (up - dn) / (2 * h)
        worst = max(worst, np.linalg.norm(grads[name] - num) / np.linalg.norm(num))
    ok = worst < 1e-5
    record(7, "BPTT gradient vs finite differences", ok, f"max relative error {worst:.2e}")
    assert ok


def test_dl_close_to_ml(tmp_path):
    t0 = time.perf_counter()
    ckpt = tmp_path / "lstm.npz"
    run_training(ExperimentSpec(kind="train-dl", system=DEFAULTS, trials=10_000, checkpoint=str(ckpt),
                                train=TrainConfig(hidden=64, epochs=4, seed=DEFAULTS.seed), symbols_per_frame=10))
    t_train = time.perf_counter() - t0
    ml = metric(run_ber_experiment(ExperimentSpec(kind="ber-vs-snr", system=DEFAULTS, trials=10_000)), "ber")[0]
    dl = metric(run_ber_experiment(ExperimentSpec(kind="eval-dl", system=DEFAULTS, trials=10_000,
                                                  checkpoint=str(ckpt))), "ber")[0]
    ok = dl.value <= 2 * ml.value
    bound = dl.value >= ml.value - 3 * math.hypot(ml.stderr, dl.stderr)
    record(8, "DL BER within 2x of ML", ok,
           f"DL {dl.value:.5f}+-{dl.stderr:.5f}, ML {ml.value:.5f}+-{ml.stderr:.5f}, ratio "
           f"{dl.value / ml.value:.2f}; ML lower bound holds: {bound} "
           f"(train {t_train:.0f} s, total {time.perf_counter() - t0:.0f} s)")
    assert bound
    assert ok


def test_determinism(tmp_path):
    small = DEFAULTS.with_(M=4)
    specs = [
        ExperimentSpec(kind="rate-vs-theta0", system=small, sweep_name="theta0", sweep_values=(0.3, 0.5),
                       trials=500, realizations=4),
        ExperimentSpec(kind="rate-vs-snr", system=small, sweep_name="alpha_jr_db", sweep_values=(2.0, 8.0),
                       trials=500, realizations=4, grid_step=0.05),
        ExperimentSpec(kind="ber-vs-snr", system=small, sweep_name="alpha_jr_db", sweep_values=(2.0, 8.0),
                       trials=50),
        ExperimentSpec(kind="ber-vs-backscatter-snr", system=small, sweep_name="alpha_j_rel_db",
                       sweep_values=(-20.0, -10.0), trials=50),
        ExperimentSpec(kind="ber-vs-N", system=small, sweep_name="N", sweep_values=(1.0, 10.0), trials=50),
    ]

    def metrics(rows):
        # CSV text without the wall-time column; nan cells compare equal as text
        buf = io.StringIO()
        write_csv(rows, buf)
        return [line.rsplit(",", 1)[0] for line in buf.getvalue().splitlines()]

    ok = all(metrics(run_rate_experiment(s) if s.kind.startswith("rate") else run_ber_experiment(s))
             == metrics(run_rate_experiment(s) if s.kind.startswith("rate") else run_ber_experiment(s))
             for s in specs)
    ckpts = []
    for tag in "ab":
        ckpt = tmp_path / f"{tag}.npz"
        run_training(ExperimentSpec(kind="train-dl", system=small, trials=20, checkpoint=str(ckpt),
                                    train=TrainConfig(hidden=8, epochs=1), symbols_per_frame=5))
        ckpts.append(metrics(run_ber_experiment(ExperimentSpec(kind="eval-dl", system=small, trials=20,
                                                               checkpoint=str(ckpt)))))
    ok &= ckpts[0] == ckpts[1]
    record(9, "bit-exact reruns", ok, f"{len(specs)} sweep kinds plus train/eval reproduced")
    assert ok


def test_degenerate_channel_ber():
    cfg = DEFAULTS.with_(alpha_t_rel=0.0, alpha_j_rel=0.0)
    ber = metric(run_ber_experiment(ExperimentSpec(kind="ber-vs-snr", system=cfg, trials=10_000)), "ber")[0]
    ok = abs(ber.value - 0.5) <= 0.02
    record(10, "no backscatter gives coin-flip BER", ok, f"BER {ber.value:.4f}+-{ber.stderr:.4f}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
