import dataclasses
import io
from fractions import Fraction

import pytest

from pdivstats import curves, predict
from pdivstats.errors import InvalidSpec
from pdivstats.ffq import field_create
from pdivstats.harness import ExperimentSpec, chi_square, emit, parse, run, thread_count
from pdivstats.harness.cli import main
from pdivstats.harness.runner import _exhaustive_ranges
from pdivstats.harness.tables import CSV_COLUMNS, DistTable, TooFewBuckets

HEADER = "q,p,m,genus_or_degree,kind,statistic,value,count,proportion,predicted,stderr,z,seed,samples"


@pytest.mark.parametrize("kw", [
    dict(kind="nope", p=3),
    dict(kind="constants", p=4),
    dict(kind="model-sim", p=3, genus=3),                       # no samples
    dict(kind="model-sim", p=3, samples=10),                    # no genus
    dict(kind="hyper-survey", p=2, genus=2, samples=10),
    dict(kind="plane-survey", p=3, genus=2, samples=10),        # 2 is not (d-1)(d-2)/2
    dict(kind="model-sim", p=3, genus=2, samples=10, stats=("bogus",)),
    dict(kind="constants", p=3, tol=0),
    dict(kind="model-sim", p=3, genus=2, samples=0),
])
def test_invalid_specs(kw):
    with pytest.raises(InvalidSpec):
        ExperimentSpec(**kw)


def test_degree_resolution():
    assert ExperimentSpec("hyper-survey", 3, genus=4, samples=1).curve_degree() == 9
    assert ExperimentSpec("hyper-survey", 3, genus=4, samples=1, degree_parity="even").curve_degree() == 10
    assert ExperimentSpec("plane-survey", 3, genus=15, samples=1).curve_degree() == 7
    assert ExperimentSpec("plane-survey", 3, degree=7, samples=1).curve_genus() == 15


def test_thread_env(monkeypatch):
    monkeypatch.setenv("PDIVSTATS_THREADS", "3")
    assert thread_count(ExperimentSpec("constants", 3)) == 3
    assert thread_count(ExperimentSpec("constants", 3, threads=2)) == 2
    monkeypatch.setenv("PDIVSTATS_THREADS", "zero")
    with pytest.raises(InvalidSpec):
        thread_count(ExperimentSpec("constants", 3))


def test_csv_header_and_empty_table():
    assert ",".join(CSV_COLUMNS) == HEADER
    empty = DistTable("constants", 3, 3, 1, None, 0, 0)
    assert emit(empty, "csv") == HEADER + "\n"


def test_constants_row():
    t = run(ExperimentSpec("constants", 3, seed=11))
    lines = emit(t, "csv").splitlines()
    assert lines[0] == HEADER
    assert "3,3,1,-,constants,MG_a0,0,-,-,0.639005,-,-,11,0" in lines
    assert t.row("TMG_b1", 1).predicted == Fraction(2, 3)
    assert t.row("PD_d0", 0).predicted == float(predict.point_dim_prob(3, 0, 1e-9).value)


def test_json_round_trip():
    t = run(ExperimentSpec("model-sim", 3, genus=4, samples=500, seed=2,
                           stats=("a", "joint", "points", "moments"), threads=1))
    assert parse(emit(t, "json")) == t
    t2 = run(ExperimentSpec("model-exhaustive", 2, genus=1))
    back = parse(emit(t2, "json"))
    assert back == t2 and isinstance(back.rows[0].proportion, Fraction)


def test_emit_to_file_and_stream(tmp_path):
    t = run(ExperimentSpec("constants", 5))
    path = tmp_path / "c.csv"
    emit(t, "csv", str(path))
    buf = io.StringIO()
    emit(t, "csv", buf)
    assert path.read_text() == buf.getvalue()


@pytest.mark.parametrize("q,g", [(2, 1), (3, 1), (2, 2)])
def test_exhaustive_chi_square_is_exactly_zero(q, g):
    t = run(ExperimentSpec("model-exhaustive", q, genus=g))
    c = chi_square(t, "a")
    assert c.value == 0 and isinstance(c.value, Fraction)
    for r in t.select("a"):
        assert r.proportion == predict.finite_g_anumber_prob(q, g, int(r.value))


def test_chi_square_detects_swapped_prediction():
    t = run(ExperimentSpec("model-sim", 3, genus=6, samples=100_000, seed=4, threads=1))
    assert chi_square(t, "a").p_value > 1e-4
    rows = list(t.rows)
    i0 = next(i for i, r in enumerate(rows) if r.statistic == "a" and r.value == "0")
    i1 = next(i for i, r in enumerate(rows) if r.statistic == "a" and r.value == "1")
    p0, p1 = rows[i0].predicted, rows[i1].predicted
    rows[i0] = dataclasses.replace(rows[i0], predicted=p1)
    rows[i1] = dataclasses.replace(rows[i1], predicted=p0)
    wrong = dataclasses.replace(t, rows=tuple(rows))
    assert chi_square(wrong, "a").p_value < 1e-6


def test_chi_square_needs_two_buckets():
    t = run(ExperimentSpec("constants", 3))
    with pytest.raises(TooFewBuckets):
        chi_square(t)


def test_thread_count_does_not_change_output():
    kw = dict(kind="hyper-survey", p=3, genus=3, samples=5000, seed=9, stats=("a", "points"))
    one = run(ExperimentSpec(threads=1, **kw))
    two = run(ExperimentSpec(threads=2, **kw))
    assert one.rows == two.rows and one.chi == two.chi
    assert emit(one, "csv") == emit(two, "csv")


def test_predictions_come_from_predict():
    t = run(ExperimentSpec("model-sim", 3, genus=5, samples=2000, seed=1,
                           stats=("a", "corank", "prank", "points", "joint", "moments"), threads=1))
    g, tol = 5, t.spec["tol"]
    for r in t.rows:
        s, v = r.statistic, r.value
        if s == "a":
            want = float(predict.mg(3, int(v), tol).value)
        elif s == "corank":
            want = float(predict.corank_prob(3, int(v), tol).value)
        elif s == "prank":
            want = float(predict.corank_prob(3, g - int(v), tol).value)
        elif s == "points":
            want = float(predict.point_dim_prob(3, int(v), tol).value)
        elif s == "joint":
            a, c = map(int, v.split(":"))
            want = float(predict.corank_joint_prob(3, a, c, tol).value)
        elif v.startswith("inj_m"):
            want = predict.moment_prediction(3, int(v[5:])).value
        else:
            want = predict.surjection_moment_prediction(3, 1).value
        assert r.predicted == want


def test_counts_sum_to_samples():
    t = run(ExperimentSpec("plane-survey", 2, degree=4, samples=300, seed=3,
                           stats=("a", "prank", "points"), threads=1))
    for s in ("a", "prank", "points"):
        rows = t.select(s)
        assert sum(r.count for r in rows) == 300
        assert sum(r.proportion for r in rows) == 1


def test_hyper_exhaustive_shards_cover_everything():
    for q, d, w in [(3, 5, 1), (5, 7, 4), (3, 9, 16)]:
        rs = _exhaustive_ranges(q, d, w)
        assert rs[0][0] == 0 and rs[-1][1] == q ** d
        assert all(a[1] == b[0] for a, b in zip(rs, rs[1:]))
    t = run(ExperimentSpec("hyper-exhaustive", 3, genus=2, stats=("a", "prank", "points"), threads=2))
    direct = curves.hyper_exhaustive(field_create(3), 5, full=True)
    assert t.samples == sum(direct.values())
    for r in t.select("a"):
        assert r.count == sum(c for k, c in direct.items() if k[0] == int(r.value))


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["constants", "--p", "3"]) == 0
    assert capsys.readouterr().out.startswith(HEADER)
    assert main(["hyper-survey", "--p", "2", "--genus", "2", "--samples", "5"]) == 2
    assert main(["model-sim", "--p", "3"]) == 2
    assert main(["hyper-exhaustive", "--p", "5", "--genus", "5", "--budget", "1000"]) == 3
    assert main(["constants", "--out", str(tmp_path / "missing" / "x.csv")]) == 4
    out = tmp_path / "t.json"
    assert main(["model-exhaustive", "--p", "2", "--genus", "1", "--format", "json",
                 "--out", str(out)]) == 0
    assert parse(out.read_text()).samples == 9
    with pytest.raises(SystemExit) as exc:
        main(["bogus-kind"])
    assert exc.value.code == 2


def test_selftest_passes():
    t = run(ExperimentSpec("selftest", 3))
    assert t.rows and all(r.count == 1 for r in t.rows)
