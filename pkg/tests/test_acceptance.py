"""Exit criteria for the package, one test per criterion.

Each test records a one-line verdict; the summary is printed at the end of the
pytest run under "acceptance criteria".
"""

import math
import time

import numpy as np
import pytest

import oracles
from conftest import record_verdict
from denoisebench.bench import Cell, ResultGrid, SweepConfig, emit_csv, run_sweep
from denoisebench.cli import main
from denoisebench.filters import (
    adaptive_median,
    adaptive_wiener,
    gaussian_filter,
    mean_filter,
    median_filter,
)
from denoisebench.image import GrayImage, load_pgm, save_pgm
from denoisebench.metrics import QualityReport, evaluate, mse, psnr
from denoisebench.noise import NoiseKind, add_gaussian_noise, add_salt_pepper, add_speckle, density_to_params
from denoisebench.synthetic import saturn_like

SWEEP_SEED = 0x5A7_0C0DE
TRIALS = 5
TREND_TOLERANCE_DB = 0.05

# central 99.9% binomial intervals, n = 16384 (scipy.stats.binom.ppf at 0.0005 / 0.9995)
SPN_INTERVALS = {
    0.1: (1513, 1766),
    0.2: (3109, 3446),
    0.3: (4723, 5109),
    0.4: (6348, 6760),
    0.5: (7981, 8403),
    0.6: (9624, 10036),
}


@pytest.fixture(scope="module")
def sweep():
    start = time.perf_counter()
    grid = run_sweep(SweepConfig(saturn_like(256, 256), master_seed=SWEEP_SEED, trials=TRIALS))
    return grid, time.perf_counter() - start


def psnr_row(grid, kind, label):
    return grid.series(kind, label, "psnr")


def fmt(values):
    return "[" + ", ".join(f"{v:.2f}" for v in values) + "]"


# 1 --------------------------------------------------------------------------

def test_c1_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    exact_mismatch = []
    awf_worst = 0
    for i in range(100):
        img = GrayImage(rng.integers(0, 256, (16, 16)))
        rows = oracles.to_rows(img)
        noisy = add_salt_pepper(img, density_to_params("spn", 0.4).params, i)
        noisy_rows = oracles.to_rows(noisy)
        checks = {
            "mean3": (mean_filter(img, 3), oracles.convolve(rows, oracles.uniform_weights(3))),
            "median3": (median_filter(img, 3), oracles.median(rows, 3)),
            "gauss3": (gaussian_filter(img, 3, 0.5), oracles.convolve(rows, oracles.gaussian_weights(3, 0.5))),
            "gauss5": (gaussian_filter(img, 5, 1.0), oracles.convolve(rows, oracles.gaussian_weights(5, 1.0))),
            "amf5": (adaptive_median(noisy, 5), oracles.adaptive_median(noisy_rows, 5)),
            "amf7": (adaptive_median(noisy, 7), oracles.adaptive_median(noisy_rows, 7)),
        }
        for name, (got, want) in checks.items():
            if got.data.tolist() != want:
                exact_mismatch.append((i, name))
        got = adaptive_wiener(img, 3).data.astype(int)
        want = np.array(oracles.adaptive_wiener(rows, 3))
        awf_worst = max(awf_worst, int(np.max(np.abs(got - want))))
    elapsed = time.perf_counter() - start
    ok = not exact_mismatch and awf_worst <= 1 and elapsed < 10.0
    record_verdict(1, ok, f"exact mismatches={len(exact_mismatch)}, AWF max |diff|={awf_worst}, {elapsed:.1f} s")
    assert not exact_mismatch, exact_mismatch[:5]
    assert awf_worst <= 1
    assert elapsed < 10.0


# 2 --------------------------------------------------------------------------

def test_c2_metric_exactness():
    a = GrayImage.from_pixels(2, 2, [0, 255, 0, 0])
    zeros = GrayImage(np.zeros((2, 2)))
    twos = GrayImage(np.full((2, 2), 2))
    ref = GrayImage(np.full((8, 8), 50))
    cases = [
        (mse(a, a), 0.0),
        (mse(zeros, twos), 4.0),
        (mse(a, zeros), 16256.25),
        (psnr(1).psnr_db, 48.130803609),
        (evaluate(ref, GrayImage(np.full((8, 8), 52))).psnr_db, 10 * math.log10(65025 / 4)),
    ]
    rel_ok = all(abs(got - want) <= 1e-9 * max(abs(want), 1e-300) for got, want in cases)
    zero_db = psnr(65025).psnr_db == 0.0
    inf_ok = evaluate(ref, ref) == QualityReport(0.0, math.inf)
    ok = rel_ok and zero_db and inf_ok
    record_verdict(2, ok, f"closed forms within 1e-9 rel: {rel_ok}; psnr(65025) == 0: {zero_db}")
    assert ok


# 3 --------------------------------------------------------------------------

def test_c3_noise_statistics():
    gray = GrayImage(np.full((128, 128), 128))
    counts = {}
    for i, (d, (lo, hi)) in enumerate(sorted(SPN_INTERVALS.items())):
        out = add_salt_pepper(gray, density_to_params("spn", d).params, 1000 + i)
        counts[d] = int(np.sum(out.data != 128))
    spn_ok = all(SPN_INTERVALS[d][0] <= c <= SPN_INTERVALS[d][1] for d, c in counts.items())

    rvin = add_gaussian_noise(gray, density_to_params("rvin", 0.01).params, 77).data.astype(float)
    target = 255 * math.sqrt(0.01)
    rvin_ok = abs(rvin.std() - target) <= 0.15 * target

    rng = np.random.default_rng(3)
    mixed = rng.integers(0, 256, (128, 128))
    mixed[rng.random((128, 128)) < 0.3] = 0
    mixed = GrayImage(mixed)
    zeros = mixed.data == 0
    spkn_ok = all(
        np.all(add_speckle(mixed, density_to_params("spkn", d).params, 5 + i).data[zeros] == 0)
        for i, d in enumerate(sorted(SPN_INTERVALS))
    )
    ok = spn_ok and rvin_ok and spkn_ok
    record_verdict(3, ok, f"SPN counts {counts}; RVIN sigma {rvin.std():.2f} vs {target:.2f}; "
                          f"SPKN zeros kept: {spkn_ok}")
    assert spn_ok, counts
    assert rvin_ok
    assert spkn_ok


# 4 --------------------------------------------------------------------------

def test_c4_trend_reproduction(sweep):
    grid, elapsed = sweep
    bad = []
    for kind in grid.noise_kinds:
        for label in grid.filters:
            row = psnr_row(grid, kind, label)
            if any(b > a + TREND_TOLERANCE_DB for a, b in zip(row, row[1:])):
                bad.append(f"{kind.value}/{label} {fmt(row)}")
    ok = not bad and elapsed < 60.0
    record_verdict(4, ok, f"{len(bad)} rising sequences; sweep {elapsed:.1f} s" + (f"; {bad}" if bad else ""))
    assert not bad, bad
    assert elapsed < 60.0


# 5 --------------------------------------------------------------------------

def test_c5_spn_ranking(sweep):
    grid, _ = sweep
    failures = []
    for d in (0.1, 0.2, 0.3, 0.4):
        amf, smf, mf = (grid.cell("spn", d, f).report.psnr_db for f in ("amf", "smf", "mf"))
        if not amf > smf > mf:
            failures.append(f"{d:g}: AMF {amf:.2f}, SMF {smf:.2f}, MF {mf:.2f}")
    record_verdict(5, not failures, "AMF > SMF > MF at 0.1-0.4" + (f"; violated at {failures}" if failures else ""))
    assert not failures, failures


# 6 --------------------------------------------------------------------------

def test_c6_rvin_ranking(sweep):
    grid, _ = sweep
    failures = []
    for d in grid.densities:
        smf = grid.cell("rvin", d, "smf").report.psnr_db
        others = {f: grid.cell("rvin", d, f).report.psnr_db for f in ("mf", "awf", "gf")}
        if not smf < min(others.values()):
            failures.append(f"{d:g}: SMF {smf:.2f} vs " + ", ".join(f"{k} {v:.2f}" for k, v in others.items()))
    record_verdict(6, not failures, "SMF below MF/AWF/GF under RVIN" + (f"; violated at {failures}" if failures else ""))
    assert not failures, failures


# 7 --------------------------------------------------------------------------

def test_c7_speckle_ranking(sweep):
    grid, _ = sweep
    failures = []
    for d in grid.densities:
        scores = {f: grid.cell("spkn", d, f).report.psnr_db for f in ("mf", "awf", "gf", "smf")}
        if not (scores["awf"] > scores["smf"] and scores["awf"] == max(scores.values())):
            failures.append(f"{d:g}: " + ", ".join(f"{k} {v:.2f}" for k, v in scores.items()))
    record_verdict(7, not failures, "AWF best of MF/AWF/GF/SMF under speckle"
                   + (f"; violated at {failures}" if failures else ""))
    assert not failures, failures


# 8 --------------------------------------------------------------------------

def _dir_bytes(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_c8_determinism(tmp_path, capsys):
    outputs = []
    for name, workers in (("a", 1), ("b", 1), ("c", 4)):
        out = tmp_path / name
        code = main(["bench", "--gen-test-image", "--seed", "0xC0FFEE", "--workers", str(workers),
                     "--out-dir", str(out)])
        assert code == 0
        outputs.append(_dir_bytes(out))
    capsys.readouterr()
    same_seed = outputs[0] == outputs[1]
    workers_ok = outputs[0] == outputs[2]
    ok = same_seed and workers_ok and len(outputs[0]) == 8
    record_verdict(8, ok, f"repeat identical: {same_seed}; 1 vs 4 workers identical: {workers_ok}; "
                          f"{len(outputs[0])} files")
    assert ok


# 9 --------------------------------------------------------------------------

def test_c9_round_trip_and_format():
    rng = np.random.default_rng(9)
    failures = 0
    for _ in range(1000):
        h, w = rng.integers(1, 33, size=2)
        img = GrayImage(rng.integers(0, 256, (h, w)))
        data = save_pgm(img)
        if load_pgm(data) != img or save_pgm(load_pgm(data)) != data:
            failures += 1

    densities = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
    rows = {
        "mf": [33.65, 31.92, 30.77, 29.90, 29.23, 28.65],
        "smf": [34.30, 32.58, 31.34, 30.40, 29.62, 28.95],
    }
    grid = ResultGrid({"noise_kinds": ["spn"], "densities": densities, "filters": list(rows)})
    for label, values in rows.items():
        for d, v in zip(densities, values):
            grid.cells[(NoiseKind.SPN, d, label)] = Cell(
                NoiseKind.SPN, d, label, QualityReport(65025 / 10 ** (v / 10), v), (0,))
    expected = (b"filter,10%,20%,30%,40%,50%,60%\n"
                b"mf,33.65,31.92,30.77,29.90,29.23,28.65\n"
                b"smf,34.30,32.58,31.34,30.40,29.62,28.95\n")
    single = ResultGrid({"noise_kinds": ["spn"], "densities": [0.1], "filters": ["mf"]})
    single.cells[(NoiseKind.SPN, 0.1, "mf")] = Cell(NoiseKind.SPN, 0.1, "mf", psnr(65025 / 10 ** 4.211), (0,))
    csv_ok = emit_csv(grid, "psnr") == expected and emit_csv(single, "psnr") == b"filter,10%\nmf,42.11\n"
    ok = failures == 0 and csv_ok
    record_verdict(9, ok, f"round-trip failures {failures}/1000; CSV layout exact: {csv_ok}")
    assert failures == 0
    assert csv_ok
