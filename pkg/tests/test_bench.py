from prosparse.bench import COLUMNS, provenance, run_bench, to_csv


def test_inside_cells_recover_everything():
    rows = run_bench([64], [1, 3], [2, 5], trials=100, timing=False)
    assert len(rows) == 4
    for r in rows:
        assert 2 * r["kp"] * r["kq"] < 64 and r["inside_bound"] == 1
        assert r["exact_recovery_rate"] == 1.0


def test_picket_tight_cells_recover_nothing():
    rows = run_bench([64], [2, 4], [16, 8], trials=10, spikes="picket", timing=False)
    tight = [r for r in rows if 2 * r["kp"] * r["kq"] == 64]
    assert len(tight) == 2
    for r in tight:
        assert r["inside_bound"] == 0 and r["exact_recovery_rate"] == 0.0


def test_timing_grows_with_n():
    rows = run_bench([16, 64, 256], [2], [2], trials=5)
    ms = [r["median_ms"] for r in rows]
    assert ms == sorted(ms)


def test_csv_layout_and_determinism():
    a = to_csv(run_bench([32], [1, 2], [1, 2], trials=3, timing=False), provenance(seed=0))
    b = to_csv(run_bench([32], [1, 2], [1, 2], trials=3, timing=False, threads=4), provenance(seed=0))
    assert a == b
    header = [line for line in a.splitlines() if not line.startswith("#")][0]
    assert header.split(",") == COLUMNS


def test_generalized_bench():
    rows = run_bench([64], [2], [3], trials=5, dict_kind="dct-canonical", timing=False)
    assert rows[0]["inside_bound"] == 1 and rows[0]["exact_recovery_rate"] == 1.0
