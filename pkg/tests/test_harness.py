import math
from pathlib import Path

import numpy as np
import pytest

from ccgsa import cli, harness
from ccgsa.benchmarks import GroupStructure, make_structured
from ccgsa.errors import ConfigurationError
from ccgsa.harness import (
    ExperimentConfig, RunRecord, SummaryRow, TraceRecorder, compare_table, emit_convergence, load_config,
    parse_compare_tsv, parse_config_text, read_groups, read_summary, read_trace, run_experiment,
)


def quick(tmp_path, name="out", **kw):
    base = dict(algorithm="gsa", function="F1", dim=5, runs=3, seed=7, fe_budget=3000, pop=10,
                max_iter=50, trace_stride=100, out=str(tmp_path / name))
    base.update(kw)
    return ExperimentConfig(**base)


def test_parse_config_text():
    vals = parse_config_text("algorithm = gsa  # plain\nfe-budget = 2e5\nmax_iter = auto\nrefresh_best = yes\n\n")
    assert vals == {"algorithm": "gsa", "fe_budget": 200000, "max_iter": None, "refresh_best": True}
    with pytest.raises(ConfigurationError):
        parse_config_text("bogus = 1")
    with pytest.raises(ConfigurationError):
        parse_config_text("dim = ten")
    with pytest.raises(ConfigurationError):
        parse_config_text("just words")


def test_load_config_overrides(tmp_path):
    p = tmp_path / "a.cfg"
    p.write_text("function = F9\ndim = 40\nruns = 4\n")
    cfg = load_config(p, dim=12, runs=None, seed="3")
    assert (cfg.function, cfg.dim, cfg.runs, cfg.seed) == ("F9", 12, 4, 3)
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "missing.cfg")
    with pytest.raises(ConfigurationError):
        ExperimentConfig(runs=0)
    with pytest.raises(ConfigurationError):
        ExperimentConfig(algorithm="pso")


def test_fingerprint_ignores_output_location():
    a = ExperimentConfig(out="x", workers=1)
    b = ExperimentConfig(out="y", workers=4)
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != ExperimentConfig(seed=1).fingerprint()
    assert [a.run_seed(r) for r in range(3)] == [0, 1, 2]


def test_auto_max_iter_fills_budget():
    cfg = ExperimentConfig(pop=50, fe_budget=200_000, max_iter=None)
    assert cfg.gsa_params().max_iter == 3999


def test_trace_recorder_stride_and_improvement():
    rec = TraceRecorder(stride=100)
    for e, b in [(10, 5.0), (20, 5.0), (30, 4.0), (30, 3.5), (150, 3.5), (160, 3.5), (400, 3.5)]:
        rec(e, b)
    assert rec.finish() == [(10, 5.0), (30, 3.5), (150, 3.5), (400, 3.5)]


def test_run_experiment_is_byte_reproducible(tmp_path):
    a = quick(tmp_path, "a")
    b = quick(tmp_path, "b")
    run_experiment(a)
    run_experiment(b)
    for name in ["summary.tsv", "convergence.tsv", "run_7.trace", "run_8.trace", "run_9.trace"]:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    rec_a = (tmp_path / "a" / "run_8.record").read_text()
    assert '"fingerprint": "%s"' % a.fingerprint() in rec_a


def test_run_files_respect_budget_and_ordering(tmp_path):
    cfg = quick(tmp_path, algorithm="ccgsa-dg", function="F9", dim=6, cycles=2, fe_budget=2500)
    records, row = run_experiment(cfg)
    assert row.best <= row.median <= row.worst
    for rec in harness.load_records(cfg.out):
        assert rec.evaluations_used <= cfg.fe_budget
        tr = rec.trace
        assert all(e1 < e2 and b1 >= b2 for (e1, b1), (e2, b2) in zip(tr, tr[1:]))
        assert tr[-1][1] == rec.best_fitness
    assert read_summary(Path(cfg.out) / "summary.tsv") == [row]
    assert harness.summarize_dir(cfg.out) == row


def test_convergence_columns_nonincreasing(tmp_path):
    cfg = quick(tmp_path, runs=4)
    run_experiment(cfg)
    lines = (Path(cfg.out) / "convergence.tsv").read_text().splitlines()
    assert lines[0].startswith("# evaluations\tseed_7")
    mat = np.array([[float(v) for v in ln.split("\t")] for ln in lines[1:]])
    assert np.all(np.diff(mat[:, 0]) > 0)
    assert np.all(np.diff(mat[:, 1:], axis=0) <= 0)


def _record(seed, trace):
    return RunRecord("fp", seed, trace[-1][1], trace[-1][0], 100, 0.0, trace)


def test_emit_convergence_examples():
    tr = [(10, 5.0), (20, 4.0), (30, 3.0), (40, 2.0), (50, 1.0)]
    text = emit_convergence([_record(0, tr)])
    assert len(text.splitlines()) == 6
    text = emit_convergence([_record(0, tr), _record(1, tr), _record(2, tr)])
    for ln in text.splitlines()[1:]:
        vals = ln.split("\t")
        assert vals[1] == vals[2] == vals[3] == vals[4]
    with pytest.raises(ConfigurationError):
        emit_convergence([])


def test_emit_convergence_forward_fills():
    text = emit_convergence([_record(0, [(10, 5.0), (30, 1.0)]), _record(1, [(10, 4.0), (20, 2.0)])])
    rows = [ln.split("\t") for ln in text.splitlines()[1:]]
    assert rows == [["10", "5.0", "4.0", "4.5"], ["20", "5.0", "2.0", "3.5"], ["30", "1.0", "2.0", "1.5"]]


def _row(f, d, algo, med):
    return SummaryRow(f, d, algo, med, med, med, med, 100.0, 1)


def test_compare_table_layouts():
    pretty, tsv = compare_table([_row("F1", 30, "gsa", 2.6e-17)])
    assert pretty.splitlines()[0].split() == ["function", "dim", "gsa"]
    assert "2.60e-17" in pretty

    rows = [_row("F1", d, a, v) for d, a, v in
            [(30, "gsa", 2.6e-17), (30, "ccgsa-dg", 1.234567e-20), (500, "gsa", 36561.0), (500, "ccgsa-dg", 0.0)]]
    pretty, tsv = compare_table(rows)
    lines = pretty.splitlines()
    assert lines[0].split() == ["function", "dim", "ccgsa-dg", "gsa"] and len(lines) == 3
    assert lines[2].split() == ["F1", "500", "0.00e+00", "3.66e+04"]
    parsed = parse_compare_tsv(tsv)
    assert parsed == {(r.function, r.dim, r.algorithm): r.median for r in rows}


def test_compare_table_gaps():
    pretty, tsv = compare_table([_row("F1", 30, "gsa", 1.0), _row("F9", 30, "ccgsa-dg", 2.0)])
    assert "-" in pretty.splitlines()[1].split()
    assert len(parse_compare_tsv(tsv)) == 2


def test_summary_row_round_trip():
    row = SummaryRow("F9", 200, "gsa", 0.1, 1 / 3, math.pi, 7.0, 199999.5, 5, 1, "0,1|2")
    assert SummaryRow.from_tsv(row.to_tsv()) == row


def test_structured_grouping_matches_truth(tmp_path):
    cfg = ExperimentConfig(algorithm="ccgsa-dg", function="structured", category="ten-group", base="rastrigin",
                           dim=100, group_size=5, problem_seed=4, runs=1, fe_budget=12000, cycles=1, pop=10,
                           emit_groups=True, out=str(tmp_path / "s"))
    _, row = run_experiment(cfg)
    truth = make_structured("ten-group", 100, 5, "rastrigin", 4).truth
    assert GroupStructure(harness.parse_groups(row.grouping)).same_partition(truth)
    assert read_groups(tmp_path / "s" / "groups.txt").structure.same_partition(truth)


def test_failed_run_is_recorded(tmp_path):
    # grouping alone needs more than this budget
    cfg = quick(tmp_path, algorithm="ccgsa-dg", dim=30, fe_budget=100, runs=2)
    records, row = run_experiment(cfg)
    assert all(r.error and "BudgetExhausted" in r.error for r in records)
    assert row.failed == 2 and math.isnan(row.median)


def test_parallel_workers_match_sequential(tmp_path):
    run_experiment(quick(tmp_path, "seq"))
    run_experiment(quick(tmp_path, "par", workers=2))
    assert (tmp_path / "seq" / "summary.tsv").read_bytes() == (tmp_path / "par" / "summary.tsv").read_bytes()


def test_cli_run_summarize_compare(tmp_path, capsys):
    out = tmp_path / "cli"
    code = cli.main(["run", "--algorithm", "gsa", "--function", "F4", "--dim", "4", "--runs", "2",
                     "--fe-budget", "500", "--pop", "10", "--set", "max_iter=20", "--out", str(out)])
    assert code == 0
    assert cli.main(["summarize", "--in", str(out)]) == 0
    assert cli.main(["compare", "--in", str(out), "--out", str(tmp_path / "cmp.tsv")]) == 0
    assert parse_compare_tsv((tmp_path / "cmp.tsv").read_text())[("F4", 4, "gsa")] == \
        read_summary(out / "summary.tsv")[0].median
    assert read_trace(out / "run_0.trace")


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("dimension = 3\n")
    assert cli.main(["run", "--config", str(bad)]) == 2
    assert cli.main(["run", "--function", "F77", "--out", str(tmp_path / "x")]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["run", "--runs", "1", "--out", str(blocker / "sub")]) == 3
    assert not list(tmp_path.glob("**/*.record"))
    assert "error" in capsys.readouterr().err
