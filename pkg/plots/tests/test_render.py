"""End-to-end: drive the simulator CLI, then render its files.

The rendering scripts must consume only the documented CSV/JSON formats,
so these tests produce real inputs by invoking the ``raman-cavity``
command line (never the Python API) and then render them.
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest

PLOTS_DIR = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(PLOTS_DIR))

from render_purity import RenderInputError, read_sweep_csv, render_purity
from render_qfunc import render_qfunc
import render_qfunc as qfunc_module


def run_simulator(*argv):
    cmd = [sys.executable, "-m", "ramancavity.cli", *argv]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def cli_outputs(tmp_path_factory):
    base = tmp_path_factory.mktemp("cli")
    sweep_coh = base / "sweep_coherent.csv"
    sweep_sq = base / "sweep_squeezed.csv"
    times = base / "times.json"
    qfunc = base / "qfunc.csv"
    run_simulator("purity-sweep", "--nbar1", "9", "--nbar2", "3", "--gt-max", "6",
                  "--steps", "30", "--out", str(sweep_coh))
    run_simulator("purity-sweep", "--family", "squeezed", "--r", "0.8", "--nbar1", "9",
                  "--nbar2", "3", "--gt-max", "6", "--steps", "30", "--out", str(sweep_sq))
    run_simulator("times", "--kappa", "3", "--j-max", "1", "--k", "1", "--l", "3",
                  "--out", str(times))
    run_simulator("qfunc", "--nbar1", "9", "--nbar2", "3", "--resolution", "15",
                  "--j", "0", "--out", str(qfunc))
    return {"sweep_coh": sweep_coh, "sweep_sq": sweep_sq, "times": times, "qfunc": qfunc}


def test_render_purity_two_families(cli_outputs, tmp_path):
    out = tmp_path / "fig2.png"
    fig = render_purity(
        [str(cli_outputs["sweep_coh"]), str(cli_outputs["sweep_sq"])],
        str(cli_outputs["times"]),
        str(out),
        title="atomic purity",
    )
    assert out.exists() and out.stat().st_size > 0
    ax = fig.axes[0]
    labels = [line.get_label() for line in ax.get_lines() if not line.get_label().startswith("_")]
    assert any("coherent" in lab for lab in labels)
    assert any("squeezed" in lab for lab in labels)
    # Marker lines sit exactly at the emitted times.
    payload = json.loads(cli_outputs["times"].read_text())
    expected = set(payload["disentanglement_times"]) | set(payload["revivals"]["times"])
    marker_x = {
        line.get_xdata()[0]
        for line in ax.get_lines()
        if len(set(line.get_xdata())) == 1 and len(set(line.get_ydata())) > 1
    }
    assert expected <= marker_x


def test_render_purity_mode_kind(cli_outputs, tmp_path):
    sweep = tmp_path / "modes.csv"
    run_simulator("purity-sweep", "--kind", "mode", "--nbar1", "9", "--nbar2", "3",
                  "--gt-max", "4", "--steps", "10", "--out", str(sweep))
    out = tmp_path / "fig34.png"
    fig = render_purity([str(sweep)], str(cli_outputs["times"]), str(out))
    assert out.exists()
    labels = [line.get_label() for line in fig.axes[0].get_lines()]
    assert any("psi" in lab for lab in labels)
    assert any("conditional" in lab for lab in labels)


def test_render_purity_single_row_no_crash(cli_outputs, tmp_path):
    sweep = tmp_path / "single.csv"
    run_simulator("purity-sweep", "--nbar1", "4", "--nbar2", "2", "--gt-max", "0",
                  "--steps", "0", "--out", str(sweep))
    out = tmp_path / "single.png"
    render_purity([str(sweep)], str(cli_outputs["times"]), str(out))
    assert out.exists()


def test_render_purity_missing_column_named(tmp_path, cli_outputs):
    bad = tmp_path / "bad.csv"
    bad.write_text("# comment\nfoo,bar\n1,2\n")
    with pytest.raises(RenderInputError, match="gt"):
        read_sweep_csv(str(bad))
    out = tmp_path / "bad.png"
    code = __import__("render_purity").main([str(bad), "--times", str(cli_outputs["times"]),
                                             "--out", str(out)])
    assert code == 1
    assert not out.exists()


def test_render_qfunc_panels(cli_outputs, tmp_path):
    out = tmp_path / "fig5.png"
    fig = render_qfunc(str(cli_outputs["qfunc"]), str(out), title="Q functions")
    assert out.exists() and out.stat().st_size > 0
    # 2 times x (2 modes x 2 branches) panels.
    assert len(fig.axes) >= 8


def test_render_qfunc_empty_grid_rejected(tmp_path):
    bad = tmp_path / "empty.csv"
    bad.write_text("gt,mode,branch,re,im,q\n")
    with pytest.raises(qfunc_module.RenderInputError):
        render_qfunc(str(bad), str(tmp_path / "x.png"))


def test_render_qfunc_missing_column_rejected(tmp_path):
    bad = tmp_path / "cols.csv"
    bad.write_text("gt,mode,re,im,q\n0,1,0,0,1\n")
    with pytest.raises(qfunc_module.RenderInputError, match="branch"):
        render_qfunc(str(bad), str(tmp_path / "x.png"))
