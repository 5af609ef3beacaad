"""Reference forward pass: execute a weight file, not a live network.

Serves as the trainer-side oracle for cross-implementation parity: the
network is rebuilt from the interchange payload in float64 and evaluated
on given inputs, independent of any training state.
"""
import csv

import numpy as np
import torch

from . import weights_io


def forward_reference(weight_path, inputs):
    """Evaluate the stored network on (n, d) inputs; returns (n, d)."""
    payload = weights_io.load(weight_path)
    net = weights_io.net_from_payload(payload, dtype=torch.float64)
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    if inputs.shape[1] != payload["spatial_dim"]:
        raise ValueError(
            f"inputs have dimension {inputs.shape[1]}, weight file declares "
            f"{payload['spatial_dim']}"
        )
    with torch.no_grad():
        out = net(torch.from_numpy(inputs).unsqueeze(1))
    return out.squeeze(1).numpy()


def read_states_csv(path):
    """Read a headered CSV of states (one state per row, any column names)."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    return np.vstack([data[n] for n in data.dtype.names]).T


def write_states_csv(path, states, prefix="x"):
    states = np.atleast_2d(np.asarray(states, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"{prefix}_{i}" for i in range(states.shape[1])])
        for row in states:
            writer.writerow([repr(float(v)) for v in row])


def forward_reference_files(weight_path, inputs_path, outputs_path):
    """File-to-file reference forward: inputs CSV in, outputs CSV out."""
    outputs = forward_reference(weight_path, read_states_csv(inputs_path))
    write_states_csv(outputs_path, outputs, prefix="y")
    return outputs_path
