"""Command-line workflows: exit codes, echoes, artifact wiring."""

import json

import numpy as np
import pytest

from touchdream.cli import main

TINY_TRAIN_CFG = """
steps = 2
batch_size = 2
log_every = 1
policy.d_model = 32
policy.encoder_layers = 1
policy.decoder_layers = 1
policy.heads = 2
policy.image_tokens = 2
policy.state_tokens = 1
policy.tactile_tokens = 2
policy.ee_tokens = 2
policy.torso_tokens = 1
policy.velocity_tokens = 1
policy.hand_tokens = 2
policy.latent_dim = 8
policy.tactile_channels = 2
policy.tactile_fusion_hidden = 16
policy.feature_dim = 16
"""


def _gen(out, episodes=2, seed=0, image_size=16, length=30):
    return main(
        [
            "gen-data",
            "--episodes", str(episodes),
            "--seed", str(seed),
            "--out", str(out),
            "--episode-length", str(length),
            "--image-size", str(image_size),
        ]
    )


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Dataset + tiny trained checkpoint shared by the slower CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    assert _gen(root / "data") == 0
    cfg = root / "tiny.cfg"
    cfg.write_text(TINY_TRAIN_CFG)
    rc = main(
        [
            "train",
            "--dataset", str(root / "data"),
            "--out", str(root / "run"),
            "--variant", "dream-latent",
            "--config", str(cfg),
            "--seed", "1",
        ]
    )
    assert rc == 0
    return root


def test_gen_data_requires_out(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("TOUCHDREAM_OUT", raising=False)
    rc = main(["gen-data", "--episodes", "1"])
    assert rc == 2
    assert "--out" in capsys.readouterr().err


def test_gen_data_env_default_root(tmp_path, monkeypatch):
    monkeypatch.setenv("TOUCHDREAM_OUT", str(tmp_path))
    rc = main(
        ["gen-data", "--episodes", "1", "--episode-length", "20", "--image-size", "16"]
    )
    assert rc == 0
    assert (tmp_path / "gen-data" / "manifest.json").exists()


def test_gen_data_rejects_zero_episodes(tmp_path, capsys):
    rc = main(["gen-data", "--episodes", "0", "--out", str(tmp_path / "d")])
    assert rc == 2
    assert "--episodes" in capsys.readouterr().err


def test_gen_data_is_reproducible(tmp_path):
    assert _gen(tmp_path / "a", episodes=2, seed=3) == 0
    assert _gen(tmp_path / "b", episodes=2, seed=3) == 0
    names_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    names_b = sorted(p.name for p in (tmp_path / "b").iterdir())
    assert names_a == names_b
    for name in names_a:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_gen_data_mix_flag(tmp_path, capsys):
    rc = main(
        [
            "gen-data", "--episodes", "3", "--out", str(tmp_path / "d"),
            "--episode-length", "20", "--image-size", "16",
            "--mix", "bimanual=1",
        ]
    )
    assert rc == 0
    assert "bimanual: 3 episodes" in capsys.readouterr().out

    rc = main(
        [
            "gen-data", "--episodes", "1", "--out", str(tmp_path / "e"),
            "--mix", "bimanual",
        ]
    )
    assert rc == 2


def test_no_subcommand_is_usage_error(capsys):
    assert main([]) == 2


def test_train_unknown_variant_is_usage_error(tmp_path, capsys):
    rc = main(
        [
            "train", "--dataset", str(tmp_path / "missing"),
            "--out", str(tmp_path / "r"), "--variant", "sometimes-dream",
        ]
    )
    assert rc == 2


def test_train_missing_dataset_is_domain_error(tmp_path, capsys):
    rc = main(
        ["train", "--dataset", str(tmp_path / "missing"), "--out", str(tmp_path / "r")]
    )
    assert rc == 1


def test_train_echoes_config_and_writes_run(workspace, capsys):
    run = workspace / "run"
    assert (run / "checkpoint_final" / "manifest.json").exists()
    assert (run / "metrics.csv").exists()
    assert (run / "summary.json").exists()
    summary = json.loads((run / "summary.json").read_text())
    assert summary["steps"] == 2


def test_train_no_dream_echo_zeroes_lambdas(workspace, tmp_path, capsys):
    cfg = tmp_path / "tiny.cfg"
    cfg.write_text(TINY_TRAIN_CFG)
    rc = main(
        [
            "train",
            "--dataset", str(workspace / "data"),
            "--out", str(tmp_path / "run_nd"),
            "--variant", "no-dream",
            "--config", str(cfg),
        ]
    )
    assert rc == 0
    echoed = capsys.readouterr().out
    config_json = echoed.split("config: ", 1)[1].rsplit("trained", 1)[0]
    parsed = json.loads(config_json)
    assert parsed["policy"]["lambda_force"] == 0.0
    assert parsed["policy"]["lambda_tactile"] == 0.0
    assert parsed["policy"]["dream_mode"] == "none"


def test_train_bad_config_file_is_usage_error(workspace, tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no equals sign")
    rc = main(
        [
            "train", "--dataset", str(workspace / "data"),
            "--out", str(tmp_path / "r"), "--config", str(cfg),
        ]
    )
    assert rc == 2
    assert "config" in capsys.readouterr().err


def test_eval_writes_reports(workspace, tmp_path, capsys):
    out = tmp_path / "eval"
    rc = main(
        [
            "eval",
            "--checkpoint", str(workspace / "run" / "checkpoint_final"),
            "--dataset", str(workspace / "data"),
            "--out", str(out),
            "--finger", "right.middle",
            "--stride", "3",
        ]
    )
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["finger"] == "right.middle"
    assert report["num_steps"] > 0
    assert set(report["force_mae"]) == {"left", "right"}
    assert (out / "trace.csv").exists()
    assert any(p.name.startswith("dream_right.middle_") for p in out.iterdir())


def test_eval_schema_mismatch_refused(workspace, tmp_path, capsys):
    other = tmp_path / "data32"
    assert _gen(other, image_size=32) == 0
    rc = main(
        [
            "eval",
            "--checkpoint", str(workspace / "run" / "checkpoint_final"),
            "--dataset", str(other),
            "--out", str(tmp_path / "eval"),
        ]
    )
    assert rc == 1
    err = capsys.readouterr().err
    assert "image_size" in err and "refusing" in err


def test_eval_ablation_table(workspace, tmp_path):
    out = tmp_path / "eval"
    rc = main(
        [
            "eval",
            "--checkpoint", str(workspace / "run" / "checkpoint_final"),
            "--dataset", str(workspace / "data"),
            "--out", str(out),
            "--stride", "5",
            "--runs-root", str(workspace),
        ]
    )
    assert rc == 0
    table = (out / "ablation.tsv").read_text()
    assert table.splitlines()[0].startswith("variant\t")
    assert "run" in table  # the single run directory appears as a row


def test_lbc_check_bundled_cases(capsys):
    rc = main(["lbc-check", "--draws", "2000"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "FAIL" not in out
    assert out.count("PASS") >= 35


def test_lbc_check_corrupted_case(tmp_path, capsys):
    cases = {
        "cases": [
            {"kind": "reward", "name": "stance_ok", "expected_total": 6.0},
            {"kind": "reward", "name": "stance_bad", "expected_total": 5.0},
        ]
    }
    path = tmp_path / "cases.json"
    path.write_text(json.dumps(cases))
    rc = main(["lbc-check", "--cases", str(path), "--draws", "1000"])
    out = capsys.readouterr().out
    assert rc == 1
    assert "FAIL stance_bad" in out
    assert "PASS stance_ok" in out


def test_lbc_check_empty_file_is_usage_error(tmp_path, capsys):
    path = tmp_path / "cases.json"
    path.write_text(json.dumps({"cases": []}))
    rc = main(["lbc-check", "--cases", str(path)])
    assert rc == 2
    assert "no cases" in capsys.readouterr().err
