import json
import math
import pathlib

import pytest

import asymmap

CONFIGS = pathlib.Path(__file__).resolve().parents[2] / "configs"


def trivial():
    return json.loads((CONFIGS / "trivial.json").read_text())


def test_r_transform_mp():
    ens = asymmap.MatrixEnsemble.marcenko_pastur(0.5)
    assert ens.r_transform(-1.0) == pytest.approx(0.5 / 1.5, abs=1e-14)
    assert ens.r_transform(0.0) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(asymmap.DomainError):
        ens.r_transform(0.5)


def test_effective_params():
    ens = asymmap.MatrixEnsemble.marcenko_pastur(0.5)
    theta, theta0 = asymmap.effective_params(ens, 0.2, 0.05, 0.1, 0.01)
    assert theta == pytest.approx(0.1 + 0.2 / 0.5, abs=1e-12)
    assert theta0 == pytest.approx(0.01 + 0.05 / 0.5, abs=1e-12)


def test_scalar_map_hard_threshold():
    t = math.sqrt(2 * 0.5 * 1.0)
    assert asymmap.scalar_map("zero_norm", 0.5, 1.0, t) == 0.0
    assert asymmap.scalar_map("zero_norm", 0.5, 1.0, 1.5) == 1.5
    assert asymmap.scalar_map("l1", 0.5, 1.0, 1.5) == pytest.approx(1.0)


def test_block_sizes():
    assert asymmap.block_sizes([0.4, 0.3, 0.3], 10) == [4, 3, 3]


def test_predict_trivial():
    out = asymmap.predict(trivial())
    assert out["exit_code"] == 0
    assert out["prediction"]["mse"] == pytest.approx(0.06, abs=1e-10)
    assert "csv" in out


def test_config_error():
    cfg = trivial()
    cfg["model"]["blocks"][0]["fraction"] = 0.3
    with pytest.raises(asymmap.ConfigError, match="sum to 1"):
        asymmap.predict(cfg)


def test_normalize_config_round_trip():
    text = (CONFIGS / "example1.json").read_text()
    once = asymmap.normalize_config(text)
    assert asymmap.normalize_config(once) == once
