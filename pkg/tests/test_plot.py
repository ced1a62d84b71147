import xml.etree.ElementTree as ET

import pytest

from eurcoh.errors import MalformedCsv
from eurcoh.plotting import build_panels, plot_csv_text, render_svg
from eurcoh.sweep import SweepConfig, read_sweep_csv, rows_to_csv, run_sweep

NS = {"svg": "http://www.w3.org/2000/svg"}


def sweep_text(**kw):
    cfg = SweepConfig(**kw).resolved()
    return rows_to_csv(run_sweep(cfg), cfg)


@pytest.fixture(scope="module")
def theta_svg():
    return plot_csv_text(sweep_text(sweep_kind="theta"))


def test_four_panels(theta_svg):
    root = ET.fromstring(theta_svg)
    ids = [g.get("id") for g in root.findall("svg:g", NS)]
    assert ids == ["panel-a1", "panel-a2", "panel-b1", "panel-b2"]
    assert len(theta_svg) > 1000


def test_analytic_lines(theta_svg):
    root = ET.fromstring(theta_svg)
    lines = root.findall(".//svg:polyline[@class='analytic']", NS)
    assert len(lines) == 12
    assert all(len(l.get("points").split()) > 50 for l in lines)


def test_no_error_bars_without_std(theta_svg):
    assert "errorbar" not in theta_svg


def test_error_bars_match_rows():
    text = sweep_text(sweep_kind="p", fixed_values=(30.0, 45.0), grid=(0.0, 0.5, 1.0),
                      pipeline="tomographic", mc_samples=2, seed=1)
    root = ET.fromstring(plot_csv_text(text))
    n_rows = len(read_sweep_csv(text).rows)
    bars = root.findall(".//svg:line[@class='errorbar']", NS)
    # one bar per row for each of the six plotted quantities
    assert len(bars) == 6 * n_rows


def test_panel_contents():
    panels = build_panels(read_sweep_csv(sweep_text(sweep_kind="p")))
    assert [p.tag for p in panels] == ["(a1)", "(a2)", "(b1)", "(b2)"]
    assert [p.branch_value for p in panels] == [30.0, 30.0, 45.0, 45.0]
    assert panels[0].series == ("elhs", "erhs1", "erhs2")
    assert panels[1].series == ("clhs", "crhs1", "crhs2")
    # the dense analytic curve passes through the computed points
    b1 = panels[2]
    assert b1.dense_y["elhs"][0] == pytest.approx(b1.ys["elhs"][0], abs=1e-12)
    assert b1.dense_y["elhs"][-1] == pytest.approx(b1.ys["elhs"][-1], abs=1e-12)


def test_markers_per_row(theta_svg):
    root = ET.fromstring(theta_svg)
    panel = root.find("svg:g[@id='panel-a1']", NS)
    circles = panel.findall("svg:circle", NS)
    # 11 elhs points plus one legend marker
    assert len(circles) == 12


def test_empty_csv():
    with pytest.raises(MalformedCsv):
        plot_csv_text("")


def test_missing_series():
    with pytest.raises(MalformedCsv):
        plot_csv_text("theta_deg,p,elhs,clhs\n0,1,2,2\n")


def test_unknown_kind():
    text = sweep_text(sweep_kind="theta").replace("kind=theta", "kind=phi")
    with pytest.raises(MalformedCsv):
        render_svg(read_sweep_csv(text))


def test_deterministic():
    text = sweep_text(sweep_kind="theta")
    assert plot_csv_text(text) == plot_csv_text(text)
