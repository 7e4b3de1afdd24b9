import filecmp
import json
import os

import pytest

from renlab.cli import EXIT_CONFIG, EXIT_INCONCLUSIVE, EXIT_NUMERIC, EXIT_OK, main

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


def cfg(name):
    return os.path.join(CONFIGS, name)


def write(tmp_path, text):
    p = tmp_path / "c.toml"
    p.write_text(text)
    return str(p)


def same_tree(a, b):
    names = sorted(os.listdir(a))
    assert names == sorted(os.listdir(b))
    match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    return not mismatch and not errors


@pytest.mark.parametrize("command, name", [("expand", "hm_expand.toml"), ("rena", "h3_cap.toml")])
def test_commands_deterministic(tmp_path, command, name):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([command, "--config", cfg(name), "--out", str(a)]) == EXIT_OK
    assert main([command, "--config", cfg(name), "--out", str(b)]) == EXIT_OK
    assert same_tree(a, b)
    assert (a / "MANIFEST.sha256").exists()
    resolved = json.loads((a / "resolved_config.json").read_text())
    assert resolved["tolerance_profile"] == "strict"


def test_flow_outputs(tmp_path):
    out = tmp_path / "f"
    assert main(["flow", "--config", cfg("hm_slice.toml"), "--out", str(out)]) == EXIT_OK
    for name in ("rena_t.csv", "variation.csv", "evolution.csv", "riccati.csv", "rena_t.gp"):
        assert (out / name).exists()


def test_scan_workers_do_not_change_results(tmp_path):
    text = '[model]\nkind = "horowitz_myers"\n[scan]\nn_samples = 4\n'
    c = write(tmp_path, text)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["scan", "--config", c, "--out", str(a)]) == EXIT_OK
    assert main(["scan", "--config", c, "--out", str(b), "--workers", "2"]) == EXIT_OK
    assert filecmp.cmp(a / "profile.csv", b / "profile.csv", shallow=False)


@pytest.mark.parametrize(
    "text",
    [
        '[model]\nkind = "horowitz_myers"\nbogus = 1\n',
        '[model]\nkind = "hyperbolic3"\n[surface]\nshape = 2\n',
        '[model]\nkind = "horowitz_myers"\n[scan]\ns_values = [0.0, 0.5, 1.0, 1.5]\n',
        "[model\n",
    ],
)
def test_config_errors(tmp_path, text):
    command = "scan" if "scan" in text else "rena"
    assert main([command, "--config", write(tmp_path, text), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_numeric_failure(tmp_path):
    c = write(tmp_path, '[model]\nkind = "hyperbolic3"\n[ladder]\nepsilons = [1e-7, 2e-7, 4e-7, 8e-7]\n')
    assert main(["rena", "--config", c, "--out", str(tmp_path / "o")]) == EXIT_NUMERIC


def test_inconclusive_finite_differences(tmp_path):
    text = '[model]\nkind = "hyperbolic3"\n[surface]\nbase = 1.0471975511965976\n[flow]\nT = 0.01\nK = 2\ndelta = 1e-9\nsecond_variation = false\n'
    assert main(["flow", "--config", write(tmp_path, text), "--out", str(tmp_path / "o")]) == EXIT_INCONCLUSIVE


def test_unknown_profile_rejected_by_parser(tmp_path):
    with pytest.raises(SystemExit):
        main(["rena", "--config", cfg("h3_cap.toml"), "--tolerance-profile", "sloppy"])
