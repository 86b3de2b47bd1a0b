import json

import numpy as np
import pytest

from monomlp.cli import main
from monomlp.datasets import synthetic_monotone, write_csv
from monomlp.network import load_model, certify_monotone


@pytest.fixture
def synth_config(tmp_path):
    header, rows, kwargs = synthetic_monotone(n=120, seed=1)
    csv_path = tmp_path / "synth.csv"
    write_csv(csv_path, header, rows)
    config = {
        "dataset": {
            "csv": str(csv_path),
            "target": "target",
            "task": "regression",
            "increasing": list(kwargs["increasing"]),
            "decreasing": list(kwargs["decreasing"]),
        },
        "network": {"kind": "switch_post", "activation": {"name": "relu"},
                    "mono_layers": 2, "mono_width": 8, "free_layers": 1,
                    "free_width": 4},
        "train": {"learning_rate": 0.01, "epochs": 20, "batch_size": 16,
                  "seed": 0},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path


def test_train_eval_verify_roundtrip(synth_config, tmp_path, capsys):
    model = tmp_path / "model.json"
    metrics = tmp_path / "metrics.json"
    assert main(["train", str(synth_config), "--out", str(model),
                 "--metrics", str(metrics)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert "mse" in out["test"]
    net = load_model(model)
    assert certify_monotone(net).ok

    assert main(["eval", str(model), str(synth_config)]) == 0
    evaluated = json.loads(capsys.readouterr().out)
    assert evaluated["mse"] == pytest.approx(out["test"]["mse"])

    report = tmp_path / "report.json"
    assert main(["verify", str(model), "--pairs", "5000",
                 "--out", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert doc["certificate"]["ok"] is True
    assert doc["fuzz_monotone"]["violations"] == 0


def test_construct_command(tmp_path, capsys):
    points = tmp_path / "points.csv"
    write_csv(points, ["x0", "y"], [[0.0, 0.0], [1.0, 1.0], [2.0, 4.0]])
    model = tmp_path / "constructed.json"
    report = tmp_path / "resid.json"
    assert main(["construct", str(points), "--out", str(model),
                 "--report", str(report), "--tol", "1e-6"]) == 0
    doc = json.loads(report.read_text())
    assert doc["residual"] <= 1e-6 and doc["certificate"] is True
    net = load_model(model)
    pred = net.forward(np.array([[0.0], [1.0], [2.0]]))[:, 0]
    assert np.allclose(pred, [0.0, 1.0, 4.0], atol=1e-6)


def test_construct_inconsistent_points_exit_2(tmp_path):
    points = tmp_path / "points.csv"
    write_csv(points, ["x0", "x1", "y"], [[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert main(["construct", str(points)]) == 2


def test_missing_file_exit_2(tmp_path):
    assert main(["construct", str(tmp_path / "absent.csv")]) == 2


def test_usage_error_exit_1():
    with pytest.raises(SystemExit) as err:
        main(["definitely-not-a-command"])
    assert err.value.code == 1


def test_numeric_abort_exit_3(synth_config, tmp_path):
    import json as _json

    config = _json.loads(synth_config.read_text())
    config["train"]["learning_rate"] = 1e300
    config["train"]["epochs"] = 5
    bad = tmp_path / "bad.json"
    bad.write_text(_json.dumps(config))
    assert main(["train", str(bad), "--out", str(tmp_path / "m.json")]) == 3


def test_diagnose_init(tmp_path, capsys):
    out = tmp_path / "init.csv"
    assert main(["diagnose", "init", "--widths", "4", "--depths", "2",
                 "--samples", "20", "--out", str(out)]) == 0
    assert out.exists()


def test_demo_heaviside(tmp_path, capsys):
    out = tmp_path / "heaviside.csv"
    assert main(["demo-heaviside", "--alpha", "1e6", "--grid", "101",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 102
    first = lines[1].split(",")
    assert float(first[1]) == 0.0  # far left of the step


def test_diagnose_grads(tmp_path, capsys):
    out = tmp_path / "grads.csv"
    assert main(["diagnose", "grads", "--depths", "4", "--width", "8",
                 "--seeds", "2", "--out", str(out)]) == 0
    assert out.exists()
    text = capsys.readouterr().out
    assert "constrained_relu" in text


def test_toy_command(tmp_path, capsys):
    assert main(["toy", "--epochs", "3", "--width", "8",
                 "--out-dir", str(tmp_path / "toy")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out["final_mse"]) == {"unconstrained", "nonneg_relu",
                                     "nonneg_sigmoid", "switch_relu"}
