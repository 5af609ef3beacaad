import numpy as np

from enkfda.cli import main

SMALL_CONFIG = """
model:
  kind: lorenz96
  dim: 12
  substeps: 10
observation:
  operator: every_third
  eps: 0.1
filter:
  n_members: 8
  inflation: 1.0
  ball_radius: none
experiment:
  n_trials: 2
  horizon: 2.0
  burn_in: 1.0
  seed: 3
"""


def write_config(tmp_path, text=SMALL_CONFIG, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_simulate_writes_truth_and_observations(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["simulate", "-c", cfg, "-o", str(out)]) == 0
    truth = np.genfromtxt(out / "truth.csv", delimiter=",", names=True)
    obs = np.genfromtxt(out / "observations.csv", delimiter=",", names=True)
    assert len(truth) == 20 and len(obs) == 20
    assert len(obs.dtype.names) == 1 + 8


def test_filter_single_trial(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["filter", "-c", cfg, "-o", str(out), "--means"]) == 0
    assert (out / "trial_0000.csv").exists()
    means = np.genfromtxt(out / "means_trial_0000.csv", delimiter=",", names=True)
    assert len(means) == 20 and len(means.dtype.names) == 2 + 12
    assert "steady-state error" in capsys.readouterr().out


def test_experiment_single_kind(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["experiment", "-c", cfg, "-o", str(out)]) == 0
    assert (out / "aggregate.csv").exists()


def test_experiment_noise_scaling_config(tmp_path, capsys):
    text = SMALL_CONFIG.replace("eps: 0.1", "eps: [0.5, 0.005]").replace(
        "n_trials: 2", "n_trials: 2\n  kind: noise_scaling"
    )
    cfg = write_config(tmp_path, text)
    out = tmp_path / "out"
    assert main(["experiment", "-c", cfg, "-o", str(out)]) == 0
    assert (out / "noise_scaling.csv").exists()
    assert "slope" in capsys.readouterr().out


def test_estimate_delta_and_alpha(tmp_path, capsys):
    text = SMALL_CONFIG + """
surrogate:
  kind: perturbed_forcing
  forcing_offset: 1.0
"""
    cfg = write_config(tmp_path, text)
    assert main(["estimate-delta", "-c", cfg, "-n", "50"]) == 0
    out = capsys.readouterr().out
    assert "delta_hat=" in out
    assert main(["estimate-alpha", "-c", cfg, "-n", "120"]) == 0
    assert "alpha_hat=" in capsys.readouterr().out


def test_train_data(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out_file = tmp_path / "pairs.csv"
    assert main(["train-data", "-c", cfg, "-n", "40", "-o", str(out_file)]) == 0
    assert sum(1 for _ in open(out_file)) == 41


def test_config_error_exit_code(tmp_path, capsys):
    bad = write_config(tmp_path, "model:\n  kind: unknown_model\n")
    assert main(["experiment", "-c", bad, "-o", str(tmp_path / "o")]) == 2
    assert "config error" in capsys.readouterr().err


def test_unknown_key_exit_code(tmp_path, capsys):
    bad = write_config(tmp_path, SMALL_CONFIG + "\nfrobnicate:\n  x: 1\n")
    assert main(["filter", "-c", bad, "-o", str(tmp_path / "o")]) == 2


def test_blowup_exit_code(tmp_path, capsys):
    text = SMALL_CONFIG.replace("seed: 3", "seed: 3\n  truth_init_std: 1.0e+200")
    cfg = write_config(tmp_path, text)
    assert main(["filter", "-c", cfg, "-o", str(tmp_path / "o")]) == 3
    assert "numerical blow-up" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert main(["filter", "-c", str(tmp_path / "nope.yaml"), "-o", str(tmp_path)]) == 2
