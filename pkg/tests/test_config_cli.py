import json
import textwrap

import pytest

from condlab.cli import main
from condlab.config import ExperimentConfig, load_config, parse_config
from condlab.errors import ConfigError
from condlab.experiments import load_manifest, report, run


def _write(tmp_path, text, name="config.toml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return path


SMALL_FORMULATIONS = """\
    experiment = "formulations"
    seed = 3

    [formulations]
    grid_cells = 41
    draws = 200
"""

SMALL_HIERARCHY = """\
    experiment = "hierarchy"

    [hierarchy]
    lambda_points = 500
"""


# --- parsing and validation ---------------------------------------------------


def test_parse_minimal_sphere_fills_defaults():
    config = parse_config(
        {
            "experiment": "sphere",
            "sphere": {"geometry": "wedge", "domain": "half_meridian", "half_width": 0.01},
        }
    )
    assert config.experiment == "sphere"
    assert config.seed == 0
    assert config.output_dir is None
    assert config.params["bins"] == 36
    assert config.params["samples"] == 10_000_000
    assert config.params["schedule"] is None


def test_parse_rejects_unknown_top_level_key():
    with pytest.raises(ConfigError, match="unknown key 'typo'"):
        parse_config(
            {
                "experiment": "hierarchy",
                "typo": 1,
            }
        )


def test_parse_rejects_unknown_table_key():
    with pytest.raises(ConfigError, match="unknown key 'hierarchy.sgima'"):
        parse_config({"experiment": "hierarchy", "hierarchy": {"sgima": 1.0}})


def test_parse_rejects_table_for_other_experiment():
    with pytest.raises(ConfigError, match="unknown key 'map_demo'"):
        parse_config({"experiment": "hierarchy", "map_demo": {}})


def test_parse_requires_experiment():
    with pytest.raises(ConfigError, match="experiment"):
        parse_config({"seed": 1})
    with pytest.raises(ConfigError, match="must be one of"):
        parse_config({"experiment": "frobnicate"})


def test_parse_names_missing_required_key():
    with pytest.raises(ConfigError, match="sphere.half_width"):
        parse_config({"experiment": "sphere", "sphere": {"geometry": "wedge", "domain": "full_circle"}})


def test_parse_reports_violated_constraint():
    with pytest.raises(ConfigError, match="sigma > 0"):
        parse_config({"experiment": "formulations", "formulations": {"sigma": -1}})
    with pytest.raises(ConfigError, match="bins >= 2"):
        parse_config(
            {
                "experiment": "sphere",
                "sphere": {"geometry": "tube", "domain": "full_circle", "half_width": 0.1, "bins": 1},
            }
        )
    with pytest.raises(ConfigError, match="strictly decreasing"):
        parse_config(
            {
                "experiment": "sphere",
                "sphere": {
                    "geometry": "tube",
                    "domain": "full_circle",
                    "half_width": 0.1,
                    "schedule": [0.1, 0.3],
                },
            }
        )
    with pytest.raises(ConfigError, match="distinct and nonzero"):
        parse_config({"experiment": "hierarchy", "hierarchy": {"k_list": [1.0, 1.0]}})


def test_parse_rejects_bad_seed():
    with pytest.raises(ConfigError, match="seed >= 0"):
        parse_config({"experiment": "hierarchy", "seed": -1})
    with pytest.raises(ConfigError, match="expected an integer"):
        parse_config({"experiment": "hierarchy", "seed": True})


def test_parse_rejects_wrong_types():
    with pytest.raises(ConfigError, match="expected a number"):
        parse_config({"experiment": "formulations", "formulations": {"sigma": "0.1"}})
    with pytest.raises(ConfigError, match="expected an integer"):
        parse_config({"experiment": "formulations", "formulations": {"grid_cells": 41.0}})
    with pytest.raises(ConfigError, match="expected exactly 3"):
        parse_config({"experiment": "formulations", "formulations": {"d_obs": [0.5, 0.3]}})


def test_load_config_round_trip(tmp_path):
    path = _write(tmp_path, SMALL_FORMULATIONS)
    config = load_config(path)
    assert isinstance(config, ExperimentConfig)
    assert config.seed == 3
    assert config.params["grid_cells"] == 41
    assert config.params["sigma"] == 0.1  # default kept for unlisted keys


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.toml")


def test_load_config_invalid_toml(tmp_path):
    path = _write(tmp_path, "experiment = \n")
    with pytest.raises(ConfigError, match="invalid TOML"):
        load_config(path)


# --- CLI ----------------------------------------------------------------------


def test_cli_run_passing(tmp_path, capsys):
    config = _write(tmp_path, SMALL_FORMULATIONS)
    out = tmp_path / "out"
    code = main(["run", str(config), "--out", str(out)])
    captured = capsys.readouterr()
    assert code == 0
    assert "formulations: pass" in captured.out
    assert (out / "manifest.json").exists()
    assert (out / "posterior.csv").exists()


def test_cli_run_check_failure(tmp_path, capsys):
    # on a 5-cell grid the cubing map shifts the argmax by exactly one cell,
    # under the "more than five cells" requirement
    config = _write(
        tmp_path,
        """\
        experiment = "map_demo"

        [map_demo]
        cells = 5
        """,
    )
    code = main(["run", str(config), "--out", str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert code == 1
    assert "map_demo: FAIL" in captured.out
    assert "[BAD] cube_noninvariance" in captured.out


def test_cli_run_runtime_error(tmp_path, capsys):
    config = _write(
        tmp_path,
        """\
        experiment = "sphere"

        [sphere]
        geometry = "wedge"
        domain = "half_meridian"
        half_width = 0.01
        samples = 0
        """,
    )
    code = main(["run", str(config), "--out", str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert code == 1
    assert captured.err.startswith("error: sphere: empty band")


def test_cli_run_config_error(tmp_path, capsys):
    config = _write(tmp_path, "experiment = \"formulations\"\nbogus = 1\n")
    code = main(["run", str(config)])
    captured = capsys.readouterr()
    assert code == 2
    assert captured.err.startswith("config error:")


def test_cli_run_missing_config(tmp_path, capsys):
    code = main(["run", str(tmp_path / "absent.toml")])
    assert code == 2
    assert "cannot read" in capsys.readouterr().err


def test_cli_run_rejects_negative_seed(tmp_path, capsys):
    config = _write(tmp_path, SMALL_HIERARCHY)
    code = main(["run", str(config), "--seed", "-1"])
    assert code == 2
    assert "seed >= 0" in capsys.readouterr().err


def test_cli_overrides_recorded_in_manifest(tmp_path, capsys):
    config = _write(tmp_path, SMALL_HIERARCHY)
    out = tmp_path / "override"
    code = main(["run", str(config), "--seed", "7", "--out", str(out)])
    capsys.readouterr()
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 7
    assert manifest["config"]["output_dir"] == str(out)


def test_cli_report(tmp_path, capsys):
    config = _write(tmp_path, SMALL_HIERARCHY)
    out = tmp_path / "out"
    assert main(["run", str(config), "--out", str(out)]) == 0
    capsys.readouterr()

    code = main(["report", str(out / "manifest.json")])
    captured = capsys.readouterr()
    assert code == 0
    assert "## hierarchy" in captured.out
    assert "All checks passed." in captured.out


def test_cli_report_flags_failures(tmp_path, capsys):
    config = _write(tmp_path, 'experiment = "map_demo"\n\n[map_demo]\ncells = 5\n')
    out = tmp_path / "out"
    assert main(["run", str(config), "--out", str(out)]) == 1
    capsys.readouterr()

    code = main(["report", str(out / "manifest.json")])
    captured = capsys.readouterr()
    assert code == 1
    assert "**FAIL**" in captured.out


def test_cli_report_without_manifests(capsys):
    code = main(["report"])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out.startswith("warning: no manifests given")


def test_cli_report_missing_manifest(tmp_path, capsys):
    code = main(["report", str(tmp_path / "manifest.json")])
    assert code == 2
    assert "manifest not found" in capsys.readouterr().err


def test_report_function_corrupt_manifest(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError, match="corrupt manifest"):
        report([str(path)])
    path.write_text('{"experiment": "hierarchy"}')
    with pytest.raises(ConfigError, match="missing required fields"):
        load_manifest(path)


def test_run_uses_default_output_dir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = parse_config({"experiment": "hierarchy", "hierarchy": {"lambda_points": 500}})
    result = run(config)
    assert result.passed
    assert result.manifest_path.resolve() == tmp_path / "runs" / "hierarchy" / "manifest.json"


def test_repeated_runs_are_byte_identical(tmp_path):
    config = parse_config(
        {
            "experiment": "hierarchy",
            "seed": 11,
            "output_dir": str(tmp_path / "out"),
            "hierarchy": {"lambda_points": 500},
        }
    )

    def snapshot():
        result = run(config)
        csv_bytes = {
            name: (tmp_path / "out" / rel).read_bytes()
            for name, rel in result.manifest["artifacts"].items()
        }
        manifest = json.loads(result.manifest_path.read_text())
        manifest.pop("wall_clock_s")
        return csv_bytes, manifest

    first_csv, first_manifest = snapshot()
    second_csv, second_manifest = snapshot()
    assert first_csv == second_csv
    assert first_manifest == second_manifest
