import json

import numpy as np
import pytest
import yaml

from qdenoise.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, dataset_statistics, main
from qdenoise.dataset import read_qds
from qdenoise.nn import load_checkpoint


@pytest.fixture
def data_file(tmp_path):
    path = tmp_path / "data.qds"
    code = main([
        "generate", "--qubits", "3", "--samples", "40", "--depth-min", "2", "--depth-max", "4",
        "--levels", "0.05,0.1,0.15,0.2", "--kinds", "all", "--seed", "42", "--threads", "1",
        "--out", str(path),
    ])
    assert code == EXIT_OK
    return path


def test_generate_writes_dataset_and_echo(tmp_path, capsys):
    path = tmp_path / "data.qds"
    assert main([
        "generate", "--qubits", "3", "--samples", "40", "--depth-min", "2", "--depth-max", "4",
        "--levels", "0.05,0.1,0.15,0.2", "--kinds", "all", "--seed", "42", "--threads", "1",
        "--out", str(path),
    ]) == EXIT_OK
    out = capsys.readouterr().out
    assert "bitflip@0.05" in out
    dataset = read_qds(path)
    assert len(dataset) == 40
    assert dataset.manifest.global_seed == 42
    echo = yaml.safe_load(path.with_name("data.qds.config.yaml").read_text())
    assert echo['dataset']['samples'] == 40
    assert echo['threads'] == 1


def test_generate_is_independent_of_threads(data_file, tmp_path):
    other = tmp_path / "other.qds"
    assert main([
        "generate", "--qubits", "3", "--samples", "40", "--depth-min", "2", "--depth-max", "4",
        "--levels", "0.05,0.1,0.15,0.2", "--kinds", "all", "--seed", "42", "--threads", "3",
        "--out", str(other),
    ]) == EXIT_OK
    assert other.read_bytes() == data_file.read_bytes()


def test_generate_without_out_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["generate", "--qubits", "3"])
    assert info.value.code == EXIT_USAGE


def test_generate_with_bad_kind_is_usage_error(tmp_path):
    code = main(["generate", "--kinds", "thermal", "--out", str(tmp_path / "x.qds")])
    assert code == EXIT_USAGE
    assert not (tmp_path / "x.qds").exists()


def test_config_file_is_honoured(tmp_path):
    config = tmp_path / "run.yaml"
    config.write_text("dataset:\n  qubits: 2\n  samples: 10\n  depth_min: 1\n  depth_max: 2\n")
    out = tmp_path / "small.qds"
    assert main(["generate", "--config", str(config), "--threads", "1", "--out", str(out)]) == EXIT_OK
    assert read_qds(out).manifest.num_qubits == 2


def test_train_eval_inspect_pipeline(data_file, tmp_path, capsys):
    model = tmp_path / "model.qnn"
    assert main([
        "train", "--data", str(data_file), "--epochs", "2", "--batch-size", "8", "--lr", "1e-3",
        "--lambda", "1.0", "--filters", "4,8,16", "--seed", "7", "--split-seed", "3", "--out", str(model),
    ]) == EXIT_OK
    _, config, run = load_checkpoint(model)
    assert config.filters == (4, 8, 16)
    assert run['split_seed'] == 3 and run['test_fraction'] == 0.2
    log_lines = (tmp_path / "model.qnn.log.jsonl").read_text().splitlines()
    assert len(log_lines) == 2
    assert (tmp_path / "model.qnn.config.yaml").exists()
    assert not list(tmp_path.glob("*.partial"))

    reports = tmp_path / "reports"
    assert main([
        "eval", "--data", str(data_file), "--model", str(model), "--heatmaps", "2", "--out", str(reports),
    ]) == EXIT_OK
    assert (reports / "by_noise_type.csv").exists()
    assert (reports / "by_noise_level.csv").exists()
    summary = json.loads((reports / "summary.json").read_text())
    assert summary['test_samples'] == 8
    assert len(list((reports / "heatmaps").glob("*.pgm"))) == 12
    echo = yaml.safe_load((reports / "config.yaml").read_text())
    assert echo['train']['split_seed'] == 3

    capsys.readouterr()
    assert main(["inspect", "--data", str(data_file)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "correlation" in out
    assert "phase_damping@0.2" in out


def test_eval_baselines(data_file, tmp_path):
    for name in ("identity", "oracle"):
        out = tmp_path / name
        assert main(["eval", "--data", str(data_file), "--baseline", name, "--out", str(out)]) == EXIT_OK
        overall = json.loads((out / "summary.json").read_text())['overall']
        if name == "identity":
            assert overall['improvement'] == 0.0
        else:
            assert overall['corrected_fidelity'] == pytest.approx(1.0, abs=1e-8)


def test_eval_rejects_mismatched_checkpoint(data_file, tmp_path):
    small = tmp_path / "two.qds"
    assert main([
        "generate", "--qubits", "4", "--samples", "20", "--depth-min", "1", "--depth-max", "2",
        "--threads", "1", "--out", str(small),
    ]) == EXIT_OK
    model = tmp_path / "m.qnn"
    assert main([
        "train", "--data", str(data_file), "--epochs", "0", "--filters", "4,8,16", "--out", str(model),
    ]) == EXIT_OK
    code = main(["eval", "--data", str(small), "--model", str(model), "--out", str(tmp_path / "r")])
    assert code == EXIT_FAILURE


def test_eval_checks_checkpoint_against_config_model_section(data_file, tmp_path):
    model = tmp_path / "m.qnn"
    assert main([
        "train", "--data", str(data_file), "--epochs", "0", "--filters", "4,8,16", "--out", str(model),
    ]) == EXIT_OK
    other = tmp_path / "other.yaml"
    other.write_text("model:\n  filters: [8, 16, 32]\n")
    code = main(["eval", "--config", str(other), "--data", str(data_file), "--model", str(model),
                 "--out", str(tmp_path / "r1")])
    assert code == EXIT_FAILURE
    assert not (tmp_path / "r1" / "summary.json").exists()

    same = tmp_path / "same.yaml"
    same.write_text("model:\n  filters: [4, 8, 16]\n")
    assert main(["eval", "--config", str(same), "--data", str(data_file), "--model", str(model),
                 "--out", str(tmp_path / "r2")]) == EXIT_OK


def test_missing_data_file_fails(tmp_path):
    assert main(["inspect", "--data", str(tmp_path / "nope.qds")]) == EXIT_FAILURE


def test_dataset_statistics(data_file):
    stats = dataset_statistics(read_qds(data_file))
    assert len(stats['cells']) == 20
    assert stats['correlation'] < 0
    for row in stats['cells'].values():
        assert 0.0 <= row['noisy_fidelity'] <= 1.0
        assert 0.0 < row['purity'] <= 1.0 + 1e-12


@pytest.mark.slow
def test_scaled_trend_experiment(tmp_path):
    data = tmp_path / "data.qds"
    model = tmp_path / "model.qnn"
    assert main([
        "generate", "--qubits", "3", "--samples", "2000", "--depth-min", "6", "--depth-max", "9",
        "--levels", "0.05,0.1,0.15,0.2", "--kinds", "all", "--seed", "42", "--out", str(data),
    ]) == EXIT_OK
    assert main([
        "train", "--data", str(data), "--epochs", "30", "--batch-size", "16", "--lr", "1e-3",
        "--lambda", "1.0", "--seed", "7", "--out", str(model),
    ]) == EXIT_OK

    results = {}
    runs = {"model": ["--model", str(model)], "identity": ["--baseline", "identity"], "oracle": ["--baseline", "oracle"]}
    for name, args in runs.items():
        out = tmp_path / f"reports-{name}"
        assert main(["eval", "--data", str(data), *args, "--out", str(out)]) == EXIT_OK
        results[name] = json.loads((out / "summary.json").read_text())

    trained = results["model"]
    assert trained['overall']['improvement'] >= 0.05
    assert trained['level_fidelity_correlation'] < 0
    by_kind = {row['group']: row['noisy_fidelity'] for row in trained['by_noise_type']}
    assert max(by_kind, key=by_kind.get) == "phase_damping"
    assert results["identity"]['overall']['improvement'] == 0.0
    assert all(
        row['corrected_fidelity'] >= 0.999 for row in results["oracle"]['by_noise_type']
    )
    assert np.isfinite(trained['mae'])
