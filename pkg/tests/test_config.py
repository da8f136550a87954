# -*- coding: utf-8 -*-

import numpy as np
import pytest
from numpy.testing import assert_allclose

from senbd_methods.errors import ConfigError
from senbd_methods.model import Family, SECTORS_13
from senbd_methods.estimation import EdgeSelection
from senbd_methods.config import RunConfig, parse_override, load_yaml


def test_defaults():
    config = RunConfig()
    assert config.seed is None
    assert config.section("fit")["multistart"] == 16
    spec = config.model_spec()
    assert spec.family is Family.SE_NBD
    assert config.sector_names() == ("line1",)


def test_parse_override():
    assert parse_override("fit.multistart=4") == ("fit", "multistart", 4)
    assert parse_override("model.decay=[0.5, 0.3]") == (
        "model", "decay", [0.5, 0.3])
    with pytest.raises(ConfigError):
        parse_override("multistart=4")
    with pytest.raises(ConfigError):
        parse_override("fit.multistart")


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigError):
        RunConfig({"fit": {"iterations": 3}})
    with pytest.raises(ConfigError):
        RunConfig({"plot": {}})
    with pytest.raises(ConfigError):
        RunConfig(overrides=["run.colour=blue"])


def test_load_yaml(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(
        "run:\n"
        "  seed: 42\n"
        "model:\n"
        "  family: MD_SE_NBD\n"
        "  sectors: [building, leisure]\n"
        "  baseline_mean: [0.34, 0.29]\n"
        "  dispersion_shape: [0.41, 0.35]\n"
        "  reproduction: [[0.21, 0.25], [0.0, 0.20]]\n"
        "  decay: [0.5, 0.5]\n",
        encoding="utf-8"
    )
    config = RunConfig.load(path, overrides=["fit.multistart=2"])
    assert config.require_seed("fit") == 42
    spec = config.model_spec()
    assert spec.dimension == 2
    assert np.isinf(spec.interaction_scale[1, 0])
    assert config.sector_names() == ("building", "leisure")

    fit_config = config.fit_config()
    assert fit_config.family is Family.MD_SE_NBD
    assert fit_config.multistart == 2
    assert fit_config.seed == 42


def test_load_yaml_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_yaml(tmp_path / "absent.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("- a\n- b\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_yaml(bad)


def test_interaction_scale_with_infinite_entries():
    config = RunConfig({"model": {
        "family": "MD_HAWKES",
        "baseline_mean": [1.0, 1.0],
        "dispersion_shape": ["inf", "inf"],
        "interaction_scale": [[4.0, "inf"], [8.0, 4.0]],
        "decay": [0.5, 0.5]
    }})
    spec = config.model_spec()
    assert np.isinf(spec.interaction_scale[0, 1])
    assert_allclose(spec.excitation[1, 0], 0.125)


def test_preset():
    config = RunConfig({"model": {"preset": "sectors13", "decay": [0.4]}})
    spec = config.model_spec()
    assert spec.dimension == 13
    assert_allclose(spec.decay, 0.4)
    assert config.sector_names() == SECTORS_13

    with pytest.raises(ConfigError):
        RunConfig({"model": {"preset": "sectors99"}}).model_spec()


def test_invalid_model_is_a_config_error():
    config = RunConfig({"model": {"decay": [1.5]}})
    with pytest.raises(ConfigError):
        config.model_spec()
    config = RunConfig({"model": {"sectors": ["a", "b"]}})
    with pytest.raises(ConfigError):
        config.model_spec()


def test_seed_is_required():
    with pytest.raises(ConfigError):
        RunConfig().require_seed("simulate")
    with pytest.raises(ConfigError):
        RunConfig({"run": {"seed": "abc"}}).require_seed("simulate")


def test_fit_config_bounds():
    config = RunConfig({"run": {"seed": 1},
                        "fit": {"bounds": {"decay": [0.0, 0.5]},
                                "edge_selection": "diagonal_only"}})
    fit_config = config.fit_config()
    assert fit_config.bound("decay") == (0.0, 0.5)
    assert fit_config.edge_selection is EdgeSelection.DIAGONAL_ONLY

    config = RunConfig({"run": {"seed": 1},
                        "fit": {"bounds": {"gain": [0.0, 0.5]}}})
    with pytest.raises(ConfigError):
        config.fit_config()


def test_input_path(tmp_path):
    config = RunConfig()
    assert config.input_path(required=False) is None
    with pytest.raises(ConfigError):
        config.input_path()
    config.set("run", "input", str(tmp_path / "absent.csv"))
    with pytest.raises(ConfigError):
        config.input_path()
