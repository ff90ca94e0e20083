import numpy as np
import pytest

from elaselect.report import box_stats, boxplot_svg, portfolio_table, size_table


def test_box_stats():
    s = box_stats([1, 2, 3, 4, 100])
    assert s["median"] == 3 and s["q1"] == 2 and s["q3"] == 4
    assert s["whisker_hi"] == 4 and s["outliers"] == [100.0]
    with pytest.raises(ValueError):
        box_stats([])


def test_svg_structure_and_determinism():
    groups = [("F1", np.arange(30.0)), ("F2", np.ones(30))]
    a = boxplot_svg(groups, "t", "y")
    assert a == boxplot_svg(groups, "t", "y")
    assert a.startswith("<svg") and a.count('class="box"') == 2
    assert 'data-n="30"' in a


def test_tables():
    t = portfolio_table([(5, 250, [("lr2", "qr2")]), (10, 650, [])])
    lines = t.splitlines()
    assert "lr2" in lines[0] and lines[2].count("X") == 2 and "-" in lines[3]
    s = size_table({(5, 250): 4, (5, 650): None}, [5], [250, 650])
    assert [c.strip() for c in s.splitlines()[-1].split("|")] == ["5", "4", "-"]
