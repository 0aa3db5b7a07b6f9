import json
import warnings

import pytest

from shimlab import cli, modforms as mf


def test_config_validation():
    cli.ExperimentConfig().validate()
    with pytest.raises(cli.ConfigError, match="squarefree"):
        cli.ExperimentConfig(N=4).validate()
    with pytest.raises(cli.ConfigError):
        cli.ExperimentConfig(p=9).validate()
    with pytest.raises(cli.ConfigError, match="prime to 2p"):
        cli.ExperimentConfig(N=15).validate()
    with pytest.raises(cli.ConfigError, match="not a square"):
        cli.ExperimentConfig(pairs=[(3, 1)]).validate()


def test_cache_roundtrip(tmp_path):
    key = cli.cache_key("space", 12, 1, "1:", 40)
    obj = {"a": [1, 2, "3/4"], "b": None}
    path = cli.cache_put(key, obj, tmp_path)
    before = path.read_bytes()
    got = cli.cache_get(key, tmp_path)
    assert cli.canonical_bytes(got) == cli.canonical_bytes(obj)
    cli.cache_put(key, got, tmp_path)
    assert path.read_bytes() == before


def test_cache_version_bump_misses(tmp_path):
    key = cli.cache_key("space", 12, 1, "1:", 40)
    cli.cache_put(key, {"x": 1}, tmp_path, version="0.0.1")
    assert cli.cache_get(key, tmp_path) is None


def test_cache_corrupt_entry_recomputed(tmp_path):
    key = cli.cache_key("space", 4, 5, "5:0", 30)
    (tmp_path / f"{key}.json").write_text("{not json")
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        out = cli.cached("space", 4, 5, "5:0", 30, lambda: {"v": 7}, tmp_path)
    assert out == {"v": 7} and any("corrupt" in str(x.message) for x in w)
    assert cli.cache_get(key, tmp_path) == {"v": 7}


def test_cached_space_is_bit_identical_to_recomputation(tmp_path):
    first = cli.cached_space(12, 1, B=40, root=tmp_path)
    again = cli.cached_space(12, 1, B=40, root=tmp_path)
    fresh = mf.cusp_space(12, 1, B=40).to_json()
    assert cli.canonical_bytes(first.to_json()) == cli.canonical_bytes(fresh)
    assert cli.canonical_bytes(again.to_json()) == cli.canonical_bytes(fresh)


def test_run_unknown_experiment():
    with pytest.raises(cli.ConfigError):
        cli.run("nope")


def test_run_is_deterministic():
    a = cli.run("fiber-dimension")
    b = cli.run("fiber-dimension")
    assert cli.canonical_bytes(a) == cli.canonical_bytes(b)
    assert a["schema"] == cli.REPORT_SCHEMA and a["pass"]


def test_main_space(capsys, tmp_path):
    assert cli.main(["space", "--weight", "12", "--level", "1", "--cache-dir", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["basis"][0]["coefficients"][2] == "-24"


def test_main_config_error(capsys):
    assert cli.main(["run", "fiber-dimension", "--N", "4"]) == 2


def test_main_slopes(capsys):
    assert cli.main(["slopes", "--weight", "12", "--d", "12"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["slopes"][0] == "1"


def test_main_newforms(capsys):
    assert cli.main(["newforms", "--weight", "4", "--level", "5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out) == 1 and out[0]["embedding"]["poly"]
