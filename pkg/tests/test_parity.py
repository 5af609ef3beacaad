"""Cross-implementation parity on the pinned weight file.

tests/data holds a weight file exported by the trainer package together
with probe inputs and the trainer's own reference outputs (see
trainer/scripts/make_pinned_artifacts.py). The executor here must
reproduce those outputs to within float32 round-off.
"""
import pathlib

import numpy as np
import pytest

from enkfda.network import forward, load_weights
from enkfda.surrogate import NeuralSurrogate

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def pinned():
    weights = load_weights(DATA / "medium_weights.json")

    def read_states(path):
        rows = np.genfromtxt(path, delimiter=",", names=True)
        return np.vstack([rows[n] for n in rows.dtype.names]).T

    return (weights, read_states(DATA / "pinned_inputs.csv"),
            read_states(DATA / "pinned_outputs.csv"))


def test_pinned_weight_file_validates(pinned):
    weights, inputs, outputs = pinned
    assert weights.spatial_dim == 60
    assert inputs.shape == (100, 60) and outputs.shape == (100, 60)


def test_forward_matches_trainer_reference(pinned):
    weights, inputs, outputs = pinned
    ours = forward(weights, inputs.T).T
    scale = np.abs(outputs).max()
    rel = np.abs(ours - outputs).max() / scale
    assert rel <= 1e-6
    print(f"PASS cross-language parity: max relative difference {rel:.2e} (<=1e-6) "
          f"over {len(inputs)} inputs")


def test_neural_surrogate_runs_pinned_network(pinned):
    weights, inputs, _ = pinned
    surrogate = NeuralSurrogate(str(DATA / "medium_weights.json"), dt_obs=0.1)
    one = surrogate.flow(inputs[0])
    batch = surrogate.flow(inputs[:3].T)
    assert one.shape == (60,)
    # batched BLAS products differ from single-column ones only in round-off
    assert np.abs(batch[:, 0] - one).max() <= 1e-12 * max(1.0, np.abs(one).max())
