import subprocess
import sys

import pytest

from sepcont.cli import (EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_PRECONDITION, load_config,
                         main)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def cfg(tmp_path):
    def make(body, name="build.ini"):
        return write(tmp_path, name, body)
    return make


def test_extend_diagonal_summary(cfg, capsys):
    assert main(["extend", "--config", cfg("[function]\ngallery = identity\n")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "case=FunctionallyClosedX1" in out


def test_unknown_gallery_is_config_error(cfg, capsys):
    assert main(["extend", "--config", cfg("[function]\ngallery = nope\n")]) == EXIT_CONFIG
    assert "nope" in capsys.readouterr().err


@pytest.mark.parametrize("body", ["[build]\ncase = Weird\n", "[build]\ntol = -1\n",
                                  "[domain]\ninterval = 0.5, 0.2\n", "[set]\nkind = blob\n",
                                  "not an ini", "[set]\nkind = graph\n",
                                  "[function]\ngallery = arctan_step\nc = 2\n"])
def test_bad_configs(cfg, body):
    assert main(["extend", "--config", cfg(body)]) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert main(["extend", "--config", str(tmp_path / "absent.ini")]) == EXIT_CONFIG


def test_dyadic_set_is_precondition_violation(cfg, capsys):
    body = "[set]\nkind = dyadic\ndepth = 1\nrequire_onepointed = true\n"
    assert main(["extend", "--config", cfg(body)]) == EXIT_PRECONDITION
    err = capsys.readouterr().err
    assert "(0.5, 0.5), (0.5, 0.75)" in err


def test_grid_constant(cfg, tmp_path):
    out = tmp_path / "g.csv"
    body = "[function]\ngallery = constant\nvalue = 0.5\n"
    assert main(["grid", "--config", cfg(body), "--resolution", "2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x,y,value"
    assert len(lines) == 5
    assert all(line.split(",")[2] == "0.5" for line in lines[1:])


def test_grid_identity_row(cfg, tmp_path):
    out = tmp_path / "g.csv"
    main(["grid", "--config", cfg("[function]\ngallery = identity\n"), "--resolution", "5",
          "--out", str(out)])
    rows = [r.split(",") for r in out.read_text().splitlines()[1:]]
    assert ["0.25", "0.75", "0.5"] in rows


def test_grid_bit_stable(cfg, tmp_path):
    c = cfg("[function]\ngallery = arctan_step\nc = 0.4\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["grid", "--config", c, "--resolution", "9", "--out", str(a)])
    main(["grid", "--config", c, "--resolution", "9", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_grid_resolution_one_rejected(cfg):
    assert main(["grid", "--config", cfg("[function]\ngallery = identity\n"),
                 "--resolution", "1"]) == EXIT_CONFIG


def test_graph_config(cfg, capsys):
    body = ("[set]\nkind = graph\nbase = 0..0.4, 0.6..1\nbreakpoints = 0:1, 1:0\n"
            "[function]\ngallery = identity\n[build]\ncase = FunctionallyClosedE\n")
    assert main(["extend", "--config", cfg(body)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "X1=[0.0..0.4, 0.6..1.0]" in out and "case=FunctionallyClosedE" in out


def test_inline_piecewise_linear(cfg):
    c = load_config(cfg("[function]\nbreakpoints = 0:0.2, 0.4:0.9, 1:0.1\n"))
    assert c.function == "piecewise_linear"
    assert c.params["breakpoints"] == [(0.0, 0.2), (0.4, 0.9), (1.0, 0.1)]


def test_verify_constant_all_pass(cfg, capsys):
    body = "[function]\ngallery = constant\nvalue = 0.5\n[verify]\nsamples = 200\n"
    assert main(["verify", "--config", cfg(body)]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert all(line.startswith("PASS") for line in out[:-1])
    assert any(" closed_form " in line for line in out)


def test_verify_pow_includes_joint_probe(cfg, capsys):
    body = "[function]\ngallery = pow_limit\n[verify]\nsamples = 300\n"
    assert main(["verify", "--config", cfg(body)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS joint_discontinuity" in out and "witness=(1,1)" in out
    assert "FAIL" not in out


def test_verify_nonconvergent(cfg, capsys):
    body = "[function]\ngallery = alternating\n[build]\nmax_stages = 5000\n"
    assert main(["verify", "--config", cfg(body)]) == EXIT_NUMERIC
    assert "did not stabilise" in capsys.readouterr().err


def test_verify_seed_override_reported(cfg, capsys):
    body = "[function]\ngallery = identity\n[verify]\nsamples = 50\n"
    main(["verify", "--config", cfg(body), "--seed", "11"])
    assert capsys.readouterr().out.strip().endswith("seed=11")


def test_counterexample_depth_one(capsys):
    assert main(["counterexample", "--depth", "1"]) == EXIT_PRECONDITION
    out = capsys.readouterr().out
    assert "Violation(vertical, x=0.5, (0.5, 0.5), (0.5, 0.75))" in out


def test_counterexample_depth_three_spacing(capsys):
    main(["counterexample", "--depth", "3"])
    assert "x-projection net spacing: 0.125" in capsys.readouterr().out


def test_counterexample_depth_zero_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["counterexample", "--depth", "0"])
    assert info.value.code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "sepcont.cli", "counterexample", "--depth", "2"],
                       capture_output=True, text=True)
    assert r.returncode == EXIT_PRECONDITION
    assert "(0.25, 0.375)" in r.stdout
