import json
import subprocess
import sys

import pytest

from legalnet import cli
from legalnet.mesoclust import Clustering


def run(*argv):
    return cli.run([str(a) for a in argv])


def exit_code(*argv):
    with pytest.raises(SystemExit) as info:
        cli.main([str(a) for a in argv])
    return info.value.code


@pytest.fixture(scope="module")
def pipeline_out(synthetic_root, tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    assert run("pipeline", "--input-root", synthetic_root, "--out", out, "--seed", 4, "--runs", 6) == 0
    return out


def test_pipeline_outputs(pipeline_out):
    manifest = json.loads((pipeline_out / "manifest.json").read_text())
    assert manifest["command"] == "pipeline"
    assert manifest["config"]["seed"] == 4 and manifest["config"]["runs"] == 6
    assert "jobs" not in manifest["config"]
    for rel in manifest["outputs"]:
        assert (pipeline_out / rel).is_file(), rel
    for part in ("store/manifest.json", "growth/growth.csv", "connectivity/components.csv",
                 "families/US-graph.json", "families/DE-classes.csv", "estimate/extraction.csv",
                 "graphs/US/2000/quotient.graphml", "clusters/DE-2001.csv"):
        assert (pipeline_out / part).is_file(), part
    text = (pipeline_out / "growth" / "growth.csv").read_bytes()
    assert text.startswith(b"country,scope,metric,year,value,relative\r\n")


def test_eval_subcommand(pipeline_out, capsys):
    a = pipeline_out / "clusters" / "US-2000.csv"
    assert run("eval", "both", a, a) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["nmi"] == 1.0 and result["ari"] == 1.0
    assert run("eval", "ari", a, a) == 0
    assert set(json.loads(capsys.readouterr().out)) == {"ari", "diagnostics"}
    assert len(Clustering.read_csv(a).labels) > 0


def test_single_stage_with_config_file(synthetic_root, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('seed = 2\nruns = 3\ncountries = ["US"]\nyears = [2000, 2001]\n')
    out = tmp_path / "o"
    assert run("cluster", "--input-root", synthetic_root, "--out", out, "--config", cfg, "--seed", 99) == 0
    manifest = json.loads((out / "manifest-cluster.json").read_text())
    assert manifest["config"]["seed"] == 2          # the file wins over the flag
    assert sorted(p.name for p in (out / "clusters").iterdir()) == ["US-2000.csv", "US-2001.csv"]


def test_json_config_and_env_root(synthetic_root, tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"countries": ["DE"], "min_size": 3}))
    monkeypatch.setenv("LEGALNET_INPUT_ROOT", str(synthetic_root))
    assert run("stars", "--out", tmp_path / "o", "--config", cfg) == 0
    assert (tmp_path / "o" / "stars" / "DE-2000.csv").is_file()


def test_profile_unit(synthetic_root, tmp_path):
    assert run("profile", "--input-root", synthetic_root, "--out", tmp_path, "--country", "US",
               "--unit", "USC12-ch1") == 0
    ego = json.loads((tmp_path / "profiles" / "US" / "USC12-ch1-ego.json").read_text())
    assert ego["reliance"]["center"] == "USC12-ch1"


def test_profile_unit_from_one_of_several_countries(synthetic_root, tmp_path):
    # the German snapshots lack this unit; that alone is not an error
    assert run("profile", "--input-root", synthetic_root, "--out", tmp_path, "--unit", "USC12-ch1") == 0
    assert (tmp_path / "profiles" / "US" / "USC12-ch1.csv").is_file()
    assert not (tmp_path / "profiles" / "DE").exists()


def test_errors_exit_with_code_two(synthetic_root, tmp_path, capsys):
    assert exit_code("cluster", "--input-root", synthetic_root, "--out", tmp_path) == 2
    assert "seed" in capsys.readouterr().err
    bad = tmp_path / "bad.toml"
    bad.write_text("colour = 1\n")
    assert exit_code("growth", "--input-root", synthetic_root, "--out", tmp_path, "--config", bad) == 2
    assert exit_code("growth", "--input-root", tmp_path / "missing", "--out", tmp_path) == 2
    assert exit_code("profile", "--input-root", synthetic_root, "--out", tmp_path, "--country", "US",
                     "--unit", "nope") == 2
    assert exit_code("growth", "--years", "20x0") == 2     # argparse usage error
    assert exit_code("cluster", "--input-root", synthetic_root, "--out", tmp_path, "--seed", 1,
                     "--agreement", 1.5) == 2


def test_console_script_help():
    res = subprocess.run([sys.executable, "-m", "legalnet.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "pipeline" in res.stdout


def test_synth_is_deterministic(tmp_path):
    run("synth", "--out", tmp_path / "a", "--seed", 5, "--years", 2)
    run("synth", "--out", tmp_path / "b", "--seed", 5, "--years", 2)
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    assert files
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
