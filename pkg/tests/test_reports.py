import pytest

from qaoa_mvc.errors import ContractViolation
from qaoa_mvc.harness import RunRecord
from qaoa_mvc.reports import (
    boxplot_svg,
    boxplot_table,
    boxplot_table_csv,
    curve_csv,
    curve_svg,
    depth_curve,
    success_curve,
)


def rec(**kw):
    base = dict(graph_id="g", depth=1, optimizer="spsa", backend="shots", trial=0,
                seed=1, final_expectation=1.0, success_prob=None, evals_used=10, wall_ms=0)
    base.update(kw)
    return RunRecord(**base)


FIVE = [rec(final_expectation=v, trial=i) for i, v in enumerate([1.0, 2.0, 3.0, 4.0, 5.0])]


def test_boxplot_single_group_quartiles():
    rows = boxplot_table(FIVE, ("optimizer",))
    assert len(rows) == 1
    assert rows[0]["q1"] == 2.0 and rows[0]["median"] == 3.0 and rows[0]["q3"] == 4.0
    csv = boxplot_table_csv(FIVE, ("optimizer",))
    lines = csv.strip().splitlines()
    assert lines[0].startswith("optimizer,count,mean")
    assert lines[1].startswith("spsa,5,3,")


def test_boxplot_svg_is_byte_stable():
    a = boxplot_svg(FIVE, ("optimizer",))
    b = boxplot_svg(FIVE, ("optimizer",))
    assert a == b
    assert a.startswith("<svg") and a.rstrip().endswith("</svg>")
    assert "<rect" in a and "<line" in a and "<text" in a


def test_depth_curve_grouping_and_order():
    records = []
    for depth in (2, 1):
        for backend in ("statevector", "noisy"):
            for t in range(3):
                records.append(rec(depth=depth, backend=backend, trial=t,
                                   final_expectation=float(depth + t)))
    points = depth_curve([vars_of(r) for r in records])
    assert [(p["backend"], p["depth"]) for p in points] == [
        ("noisy", 1), ("noisy", 2), ("statevector", 1), ("statevector", 2)]
    assert points[0]["mean"] == pytest.approx(2.0)
    csv = curve_csv(points)
    assert csv.splitlines()[0] == "backend,depth,mean,stderr,count"
    svg = curve_svg(points, "final expectation")
    assert svg == curve_svg(points, "final expectation")
    assert "polyline" in svg


def vars_of(r):
    from dataclasses import asdict

    return asdict(r)


def test_success_curve_requires_success_column():
    records = [vars_of(rec())]
    with pytest.raises(ContractViolation, match="success_prob"):
        success_curve(records)
    ok = [vars_of(rec(success_prob=0.25)), vars_of(rec(success_prob=0.75, trial=1))]
    points = success_curve(ok)
    assert points[0]["mean"] == pytest.approx(0.5)
