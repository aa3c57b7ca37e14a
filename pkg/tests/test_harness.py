import csv
import itertools

import pytest

from dpsubkmeans import cli
from dpsubkmeans.harness import (
    ConfigError,
    SweepConfig,
    aggregate,
    cell_seed,
    emit_results,
    read_agg,
    read_raw,
    report_ratios,
    run_sweep,
    sweep_cells,
    write_agg,
)
from dpsubkmeans.metrics import CostGapRecord, GapSummary


def small_cfg(tmp_path, **kw):
    base = dict(dataset="synthetic", k=3, eps_grid=(0.5, 1.0), internal_k=(2,), repeats=2,
                iters=3, seed=7, out=str(tmp_path / "out"), synthetic_n=20)
    base.update(kw)
    return SweepConfig(**base)


def test_single_cell_sweep(tmp_path):
    out = run_sweep(small_cfg(tmp_path, algorithms=("baseline",), eps_grid=(1.0,), repeats=1))
    assert len(out.records) == 1 and not out.failures


def test_row_count_formula(tmp_path):
    cfg = small_cfg(tmp_path, internal_k=(2, 3, 4))
    out = run_sweep(cfg)
    assert len(out.records) == 2 * 2 + 2 * 3 * 2


def test_wine_cell_count_arithmetic():
    cfg = SweepConfig(dataset="wine.csv", repeats=30, internal_k=(4,)).resolved()
    assert cfg.k == 3
    assert len(sweep_cells(cfg)) == 8 * 2 * 30


def test_named_defaults():
    cfg = SweepConfig(dataset="x/digits.csv").resolved()
    assert (cfg.k, cfg.internal_k, cfg.repeats) == (10, (5,), 10)


def test_cell_seeds_injective():
    seen = set()
    for cell in itertools.product(range(2), range(2), range(8), range(4), range(30)):
        s = cell_seed(*cell)
        assert s not in seen
        seen.add(s)
    with pytest.raises(ValueError):
        cell_seed(0, 2, 0, 0, 0)


def test_sweep_is_deterministic_and_sorted(tmp_path):
    a = run_sweep(small_cfg(tmp_path))
    b = run_sweep(small_cfg(tmp_path))
    assert a.records == b.records
    assert a.records == sorted(a.records, key=CostGapRecord.sort_key)
    assert all(r.invariant_violations == 0 for r in a.records)


def test_parallel_matches_serial(tmp_path):
    a = run_sweep(small_cfg(tmp_path))
    b = run_sweep(small_cfg(tmp_path, workers=2))
    assert a.records == b.records


def test_failed_cells_are_recorded_not_fatal(tmp_path):
    # k larger than N fails every cell, but the sweep still returns
    out = run_sweep(small_cfg(tmp_path, k=100, synthetic_n=5, repeats=1, eps_grid=(1.0,)))
    assert not out.records and len(out.failures) == 2


def test_config_validation():
    for bad in (dict(eps_grid=()), dict(eps_grid=(0.0,)), dict(repeats=0), dict(rho=1.0),
                dict(algorithms=("kmeans",)), dict(internal_k=(1,))):
        with pytest.raises(ConfigError):
            SweepConfig(**bad).resolved()
    with pytest.raises(ConfigError):
        SweepConfig.from_mapping({"bogus": 1})


def test_emit_single_record(tmp_path):
    r = CostGapRecord("baseline", "wine", 1.0, None, 0, 2.0, 1.0, 1.0)
    paths = emit_results([r], tmp_path)
    assert len(paths["raw"].read_text().splitlines()) == 2
    assert len(paths["agg"].read_text().splitlines()) == 2


def test_plot_table_sixteen_rows(tmp_path):
    eps = [0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 1.5, 2.0]
    recs = [CostGapRecord(a, "wine", e, ik, 0, 2.0, 1.0, 1.0)
            for e in eps for a, ik in (("baseline", None), ("subcluster", 4))]
    paths = emit_results(recs, tmp_path)
    (plot,) = paths["plots"]
    with open(plot) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 16
    assert [float(r["epsilon"]) for r in rows] == sorted(float(r["epsilon"]) for r in rows)


def test_raw_aggregate_round_trip(tmp_path):
    out = run_sweep(small_cfg(tmp_path, internal_k=(2, 3)))
    paths = emit_results(out.records, tmp_path / "o")
    again = tmp_path / "again.csv"
    write_agg(aggregate(read_raw(paths["raw"])), again)
    assert again.read_bytes() == paths["agg"].read_bytes()
    assert read_raw(paths["raw"]) == out.records


def test_report_ratios():
    summ = [GapSummary("wine", "baseline", None, e, 1, 0.8, 0.0) for e in (0.5, 1.0)]
    summ += [GapSummary("wine", "subcluster", 4, e, 1, 0.2, 0.0) for e in (0.5, 1.0)]
    summ += [GapSummary("iris", "baseline", None, 1.0, 1, 0.3, 0.0)]
    ratios = report_ratios(summ)
    assert ratios == {"wine": {"subcluster-k4": pytest.approx(4.0)}}
    same = [GapSummary("x", "baseline", None, 1.0, 1, 0.3, 0.0), GapSummary("x", "subcluster", 2, 1.0, 1, 0.3, 0.0)]
    assert report_ratios(same) == {"x": {"subcluster-k2": 1.0}}


# -- CLI -------------------------------------------------------------------

def test_cli_run_with_config_and_override(tmp_path, capsys):
    cfg = tmp_path / "sweep.yaml"
    cfg.write_text("dataset: synthetic\nk: 3\neps_grid: [0.5, 1.0]\ninternal_k: 2\nrepeats: 2\n"
                   f"iters: 2\nseed: 1\nout: {tmp_path / 'ignored'}\nsynthetic_n: 15\n")
    out = tmp_path / "res"
    assert cli.main(["run", "--config", str(cfg), "--out", str(out), "--repeats", "1"]) == cli.EXIT_OK
    rows = (out / "raw.csv").read_text().splitlines()
    assert rows[0] == "dataset,algorithm,internalK,epsilon,repeat,seed,cost_dp,cost_lloyd,cost_gap,invariant_violations"
    assert len(rows) == 1 + 2 * 2
    assert (out / "plot_synthetic.csv").exists()
    assert not (tmp_path / "ignored").exists()
    assert "ratio" in capsys.readouterr().out


def test_cli_config_error(tmp_path):
    assert cli.main(["run", "--dataset", "synthetic", "--rho", "2", "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    bad = tmp_path / "c.yaml"
    bad.write_text("nonsense_key: 1\n")
    assert cli.main(["run", "--config", str(bad)]) == cli.EXIT_CONFIG


def test_cli_data_error(tmp_path):
    assert cli.main(["run", "--dataset", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == cli.EXIT_DATA
    p = tmp_path / "wine.csv"
    p.write_text("1,2\n3,4\n")
    assert cli.main(["run", "--dataset", str(p), "--out", str(tmp_path / "o")]) == cli.EXIT_DATA


def test_cli_partial_failure_exit_code(tmp_path):
    code = cli.main(["run", "--dataset", "synthetic", "--k", "2", "--eps-grid", "1.0", "--repeats", "1",
                     "--internal-k", "2", "--iters", "1", "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_OK
    cfg = tmp_path / "c.yaml"
    cfg.write_text("synthetic_n: 1\nk: 3\neps_grid: [1.0]\nrepeats: 1\n")
    # N = 3 points, k = 3: runs fine; k = 4 fails every cell
    assert cli.main(["run", "--config", str(cfg), "--k", "4", "--out", str(tmp_path / "p")]) == cli.EXIT_PARTIAL


def test_cli_ratios_and_blobs(tmp_path, capsys):
    summ = [GapSummary("wine", "baseline", None, 1.0, 1, 0.8, 0.0), GapSummary("wine", "subcluster", 4, 1.0, 1, 0.2, 0.0)]
    write_agg(summ, tmp_path / "agg.csv")
    assert cli.main(["ratios", str(tmp_path)]) == cli.EXIT_OK
    text = capsys.readouterr().out
    assert "4.000" in text and "4.13" in text
    assert read_agg(tmp_path / "agg.csv") == summ
    out = tmp_path / "blobs.csv"
    assert cli.main(["blobs", "--n-per-blob", "5", "--out", str(out)]) == cli.EXIT_OK
    assert len(out.read_text().splitlines()) == 16
