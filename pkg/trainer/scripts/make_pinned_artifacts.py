#!/usr/bin/env python3
"""Regenerate the pinned cross-package artifacts.

Produces, in this order:
  1. training pairs from the filter package CLI (lorenz96 d=60),
  2. the medium-preset trained weight file,
  3. 100 random probe inputs and the trainer-side reference outputs.

The weight file and probe CSVs are copied into trainer/tests/data/ and
the filter package's tests/data/ so both suites can assert parity against
the same bytes. Training takes a while on CPU; everything is seeded.
"""
import pathlib
import shutil
import subprocess
import sys

import numpy as np

from enkf_trainer.reference import forward_reference, write_states_csv
from enkf_trainer.train import PRESETS, train_from_csv

HERE = pathlib.Path(__file__).resolve().parent
TRAINER_DATA = HERE.parent / "tests" / "data"
PRIMARY_DATA = HERE.parent.parent / "tests" / "data"

CONFIG = """\
model:
  kind: lorenz96
  dim: 60
  forcing: 8.0
  dt_obs: 0.1
  substeps: 100
observation:
  operator: every_third
  eps: 0.1
experiment:
  seed: 42
"""


def main(workdir):
    workdir = pathlib.Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    cfg = workdir / "l96.yaml"
    cfg.write_text(CONFIG)
    pairs = workdir / "pairs.csv"
    subprocess.run(
        [sys.executable, "-m", "enkfda.cli", "train-data", "-c", str(cfg),
         "-n", "10000", "-o", str(pairs)],
        check=True,
    )
    weights = workdir / "medium_weights.json"
    history = train_from_csv(pairs, weights, run=PRESETS["medium"])
    print(f"trained {len(history)} epochs, final loss {history[-1]:.5g}")

    rng = np.random.default_rng(2718)
    probes = 3.5 * rng.standard_normal((100, 60))
    inputs = workdir / "pinned_inputs.csv"
    write_states_csv(inputs, probes, prefix="x")
    outputs = workdir / "pinned_outputs.csv"
    write_states_csv(outputs, forward_reference(weights, probes), prefix="y")

    for dest in (TRAINER_DATA, PRIMARY_DATA):
        dest.mkdir(parents=True, exist_ok=True)
        for path in (weights, inputs, outputs):
            shutil.copy(path, dest / path.name)
    print(f"pinned artifacts -> {TRAINER_DATA} and {PRIMARY_DATA}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "/tmp/pinned_build")
