import json
import math

import numpy as np
import pytest

from scalesq import Geometry, l2_norm, load_field_csv, mean_subtract, random_band_field, save_field_csv
from scalesq.cli import main
from scalesq.config import ConfigError, equivalence_config_from_dict

HAAR_SYMBOL = 4.0 * math.log(2.0)

SMALL = {"grid": {"n_samples": 256, "half_length": 16.0}}


def write_config(tmp_path, name="cfg.json", **fields):
    path = tmp_path / name
    path.write_text(json.dumps(fields))
    return str(path)


def read_report(path):
    with open(path) as fh:
        payload = json.load(fh)
    payload.pop("generated_at")
    return payload


def stdout_json(capsys):
    payload = json.loads(capsys.readouterr().out)
    payload.pop("generated_at")
    return payload


# ---------------------------------------------------------------------------
# config loading

def test_config_defaults():
    cfg = equivalence_config_from_dict({"operator": "gfun", "kernel": "haar"})
    assert cfg.p == 2.0
    assert cfg.weight == "const"
    assert cfg.seed == 0
    assert cfg.spread_bound == 50.0
    assert cfg.profile == "ball"
    assert cfg.grid.geometry().n_samples == 4096
    cfg2 = equivalence_config_from_dict({"operator": "sobolev", "order": 0.5, "grid": {"dim": 2}})
    assert cfg2.grid.geometry().n_samples == 512
    assert cfg2.grid.geometry().half_length == 16.0


@pytest.mark.parametrize("bad", [
    {"operator": "gfun", "kernel": "haar", "unknown_key": 1},
    {"operator": "nope", "kernel": "haar"},
    {"operator": "gfun"},
    {"operator": "sobolev"},
    {"operator": "sobolev", "order": -1.0},
    {"operator": "gfun", "kernel": "haar", "p": 0.5},
    {"operator": "gfun", "kernel": "haar", "seed": True},
    {"operator": "gfun", "kernel": "haar", "spread_bound": 1.0},
    {"operator": "gfun", "kernel": "haar", "time": {"t_min": 0.5}},
    {"operator": "gfun", "kernel": "haar", "time": {"t_min": 2.0, "t_max": 1.0}},
    {"operator": "gfun", "kernel": "haar", "grid": {"n_samples": 7}},
    {"operator": "gfun", "kernel": "haar", "dyadic": {"k_min": 3, "k_max": -3}},
])
def test_config_rejections(bad):
    with pytest.raises(ConfigError):
        equivalence_config_from_dict(bad)


def test_config_error_names_field():
    with pytest.raises(ConfigError, match="config field 'operator'"):
        equivalence_config_from_dict({"operator": "nope"})


def test_forced_operator_wins():
    cfg = equivalence_config_from_dict(
        {"operator": "gfun", "kernel": "haar", "order": 0.5}, forced_operator="sobolev"
    )
    assert cfg.operator == "sobolev"


# ---------------------------------------------------------------------------
# kernel-info and conditions

def test_kernel_info_stdout(capsys):
    assert main(["kernel-info", "haar"]) == 0
    payload = stdout_json(capsys)
    assert payload["name"] == "haar"
    assert payload["support_radius"] == 1.0
    assert payload["has_spatial"] is True


def test_kernel_info_unknown_kernel(capsys):
    assert main(["kernel-info", "warble:3"]) == 2
    assert "error" in capsys.readouterr().err


def test_conditions_divergence_report(tmp_path):
    out = str(tmp_path / "cond.json")
    assert main(["conditions", "--kernel", "gm:0.75", "--out", out]) == 0
    payload = read_report(out)
    assert payload["majorant_l1"] == {"value": None, "divergent": True}
    assert payload["nondegeneracy"]["continuous"]["pass"] is True


# ---------------------------------------------------------------------------
# symbol tabulation

SYMBOL_ARGS = [
    "symbol", "--kernel", "haar", "--mode", "continuous",
    "--grid-n", "256", "--grid-l", "16",
    "--t-min", "1e-4", "--t-max", "1e4", "--nodes-per-octave", "32",
]


def test_symbol_csv_and_sidecar(tmp_path, capsys):
    out = str(tmp_path / "sym.csv")
    assert main(SYMBOL_ARGS + ["--out", out]) == 0
    assert "wrote" in capsys.readouterr().out

    data = np.loadtxt(out, delimiter=",", skiprows=2)
    assert data.shape == (256, 3)
    xi, re, im = data.T
    assert np.max(np.abs(im)) < 1e-15
    dc = int(np.argmin(np.abs(xi)))
    assert re[dc] == 0.0
    at_one = int(np.argmin(np.abs(xi - 1.0)))
    assert math.isclose(re[at_one], HAAR_SYMBOL, rel_tol=1e-4)

    side = read_report(out + ".json")
    assert side["mode"] == "continuous"
    assert math.isclose(side["annulus_min_modulus"], HAAR_SYMBOL, rel_tol=1e-4)
    assert side["homogeneity_defect"] < 1e-4


def test_symbol_dyadic_mode(tmp_path):
    out = str(tmp_path / "dsym.csv")
    args = ["symbol", "--kernel", "haar", "--mode", "dyadic",
            "--grid-n", "256", "--grid-l", "16", "--out", out]
    assert main(args) == 0
    side = read_report(out + ".json")
    assert side["mode"] == "dyadic"
    assert side["annulus_min_modulus"] > 0.1


def test_symbol_determinism(tmp_path):
    out_a = str(tmp_path / "a.csv")
    out_b = str(tmp_path / "b.csv")
    assert main(SYMBOL_ARGS + ["--out", out_a]) == 0
    assert main(SYMBOL_ARGS + ["--out", out_b]) == 0
    assert open(out_a).read() == open(out_b).read()
    assert read_report(out_a + ".json") == read_report(out_b + ".json")


# ---------------------------------------------------------------------------
# gfun

def parse_gfun_line(capsys):
    line = capsys.readouterr().out.strip().splitlines()[-1]
    return {k: float(v) for k, v in (tok.split("=") for tok in line.split())}


def test_gfun_seeded_field(tmp_path, capsys):
    out = str(tmp_path / "g.csv")
    args = ["gfun", "--kernel", "haar", "--grid-n", "256", "--grid-l", "16",
            "--t-min", "1e-3", "--t-max", "1e3", "--seed", "2", "--out", out]
    assert main(args) == 0
    vals = parse_gfun_line(capsys)
    assert math.isclose(vals["ratio"], math.sqrt(HAAR_SYMBOL), rel_tol=1e-3)
    g = load_field_csv(out)
    assert g.geometry.n_samples == 256


def test_gfun_input_file(tmp_path, capsys):
    geom = Geometry(1, 256, 16.0)
    f = mean_subtract(random_band_field(geom, seed=9))
    path = str(tmp_path / "field.csv")
    save_field_csv(f, path)
    assert main(["gfun", "--kernel", "haar", "--input", path,
                 "--t-min", "1e-3", "--t-max", "1e3"]) == 0
    vals = parse_gfun_line(capsys)
    assert math.isclose(vals["input_l2"], l2_norm(f), rel_tol=1e-10)


def test_gfun_missing_input_file(capsys):
    assert main(["gfun", "--kernel", "haar", "--input", "/nonexistent/f.csv"]) == 2
    assert "error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# equivalence and sobolev experiments

def test_equivalence_pass(tmp_path, capsys):
    cfg = write_config(
        tmp_path, operator="gfun", kernel="haar",
        time={"t_min": 1e-3, "t_max": 1e3, "nodes_per_octave": 8}, **SMALL,
    )
    out = str(tmp_path / "rep.json")
    assert main(["equivalence", "--config", cfg, "--out", out]) == 0
    assert "PASS" in capsys.readouterr().out
    payload = read_report(out)
    assert payload["pass"] is True
    assert payload["members"] == 20
    assert payload["grid"]["n_samples"] == 256


def test_equivalence_fail_exit_code(tmp_path, capsys):
    # a one-octave scale window cannot see the low-frequency members, so the
    # ratios disperse far beyond a tight bound
    cfg = write_config(
        tmp_path, operator="gfun", kernel="haar", spread_bound=2.0,
        time={"t_min": 0.5, "t_max": 2.0, "nodes_per_octave": 8}, **SMALL,
    )
    assert main(["equivalence", "--config", cfg]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_equivalence_degenerate_kernel(tmp_path, capsys):
    cfg = write_config(tmp_path, operator="dyadic", kernel="band:1.5:1.6", **SMALL)
    out = str(tmp_path / "rep.json")
    assert main(["equivalence", "--config", cfg, "--out", out]) == 1
    assert "nondegeneracy" in capsys.readouterr().err
    payload = read_report(out)
    assert payload["error"] == "nondegeneracy check failed"
    assert payload["nondegeneracy"]["pass"] is False


def test_equivalence_rejects_sobolev_operator(tmp_path, capsys):
    cfg = write_config(tmp_path, operator="sobolev", order=0.5, **SMALL)
    assert main(["equivalence", "--config", cfg]) == 2
    assert "sobolev" in capsys.readouterr().err


def test_equivalence_config_errors(tmp_path, capsys):
    assert main(["equivalence", "--config", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["equivalence", "--config", str(bad)]) == 2
    cfg = write_config(tmp_path, operator="gfun", kernel="warble:3", **SMALL)
    assert main(["equivalence", "--config", cfg]) == 2
    capsys.readouterr()


def test_equivalence_seed_override(tmp_path):
    cfg = write_config(
        tmp_path, operator="gfun", kernel="haar",
        time={"t_min": 1e-2, "t_max": 1e2, "nodes_per_octave": 8}, **SMALL,
    )
    out_a = str(tmp_path / "a.json")
    out_b = str(tmp_path / "b.json")
    main(["equivalence", "--config", cfg, "--out", out_a])
    main(["equivalence", "--config", cfg, "--seed", "5", "--out", out_b])
    a, b = read_report(out_a), read_report(out_b)
    assert a["seed"] == 0 and b["seed"] == 5
    assert a["ratios"] != b["ratios"]


def test_equivalence_determinism(tmp_path):
    cfg = write_config(
        tmp_path, operator="gfun", kernel="haar",
        time={"t_min": 1e-2, "t_max": 1e2, "nodes_per_octave": 8}, **SMALL,
    )
    out_a = str(tmp_path / "a.json")
    out_b = str(tmp_path / "b.json")
    main(["equivalence", "--config", cfg, "--out", out_a])
    main(["equivalence", "--config", cfg, "--out", out_b])
    assert read_report(out_a) == read_report(out_b)


def test_sobolev_command(tmp_path, capsys):
    cfg = write_config(
        tmp_path, order=0.5, dyadic={"k_min": -3, "k_max": 3}, **SMALL,
    )
    out = str(tmp_path / "rep.json")
    assert main(["sobolev", "--config", cfg, "--out", out]) == 0
    assert "PASS" in capsys.readouterr().out
    payload = read_report(out)
    assert payload["operator"] == "sobolev"
    assert payload["order"] == 0.5


# ---------------------------------------------------------------------------
# mar-scan

def test_mar_scan_cli(tmp_path, capsys):
    out = str(tmp_path / "scan.json")
    assert main(["mar-scan", "--alpha", "1.0", "--no-refine", "--out", out]) == 0
    assert "PASS" in capsys.readouterr().out
    payload = read_report(out)
    assert math.isclose(payload["max_ratio"], 14.0 / 9.0, rel_tol=1e-9)
    assert payload["refinement_delta"] is None  # nan: no refinement pass


def test_mar_scan_bad_alpha(capsys):
    assert main(["mar-scan", "--alpha", "0.2"]) == 2
    assert "alpha" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# argparse-level usage errors

def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["symbol", "--kernel", "haar"])  # --out is required
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["gfun", "--kernel", "haar", "--mode", "sideways"])
    assert exc.value.code == 2
