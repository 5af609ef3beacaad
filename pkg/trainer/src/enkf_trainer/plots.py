"""Figures from the filter package's CSV outputs.

Error-versus-time curves carry shaded two-standard-error bands; the state
panel renders truth, observations, filter mean and their difference as
space-time heat maps. Rendering is deterministic: fixed DPI, no embedded
timestamps.
"""
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

SAVEFIG = {"dpi": 150, "metadata": {"Software": "enkf-trainer"}}


def _read_csv_columns(path, required):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows) < 2:
        raise ValueError(f"{path} holds no data rows")
    header = rows[0]
    missing = [c for c in required if c not in header]
    if missing:
        raise ValueError(f"{path} is missing columns {missing}")
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    return {name: data[:, i] for i, name in enumerate(header)}


def plot_error_bands(csv_paths, labels, out_path, title="Filter error",
                     log_scale=True):
    """Mean error curves with shaded 2-SE bands from aggregate CSVs."""
    if len(csv_paths) != len(labels):
        raise ValueError("need one label per CSV")
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for path, label in zip(csv_paths, labels):
        cols = _read_csv_columns(path, ["time", "mean_error", "band_lo", "band_hi"])
        ax.plot(cols["time"], cols["mean_error"], label=label, linewidth=1.2)
        ax.fill_between(cols["time"], cols["band_lo"], cols["band_hi"], alpha=0.3)
    if log_scale:
        ax.set_yscale("log")
    ax.set_xlabel("time")
    ax.set_ylabel("error")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, **SAVEFIG)
    plt.close(fig)
    return out_path


def plot_open_loop(csv_paths, labels, out_path, title="Forecast divergence"):
    """Forecast-only error growth curves (open-loop CSVs)."""
    if len(csv_paths) != len(labels):
        raise ValueError("need one label per CSV")
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    for path, label in zip(csv_paths, labels):
        cols = _read_csv_columns(path, ["time", "mean_error", "stderr"])
        mean, se = cols["mean_error"], cols["stderr"]
        ax.plot(cols["time"], mean, label=label, linewidth=1.2)
        ax.fill_between(cols["time"], mean - 2 * se, mean + 2 * se, alpha=0.3)
    ax.set_xlabel("time")
    ax.set_ylabel("forecast error")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, **SAVEFIG)
    plt.close(fig)
    return out_path


def _states_matrix(path, prefix):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ValueError(f"{path} holds no data rows")
    header = rows[0]
    cols = [i for i, name in enumerate(header) if name.startswith(prefix)]
    if not cols:
        raise ValueError(f"{path} has no {prefix}* columns")
    data = np.array([[float(row[i]) for i in cols] for row in rows[1:]])
    times = None
    if "time" in header:
        t = header.index("time")
        times = np.array([float(row[t]) for row in rows[1:]])
    return data, times


def plot_state_panel(truth_csv, means_csv, out_path, observations_csv=None):
    """Space-time heat maps: truth, filter mean, absolute difference, and
    (optionally) the observed data."""
    truth, times = _states_matrix(truth_csv, "u_")
    means, _ = _states_matrix(means_csv, "m_")
    if truth.shape != means.shape:
        raise ValueError(
            f"truth {truth.shape} and means {means.shape} shapes differ"
        )
    panels = [("truth", truth), ("filter mean", means),
              ("absolute difference", np.abs(truth - means))]
    if observations_csv is not None:
        obs, _ = _states_matrix(observations_csv, "y_")
        panels.insert(1, ("observations", obs))
    extent = None
    if times is not None:
        extent = [times[0], times[-1], 0, truth.shape[1]]
    fig, axes = plt.subplots(len(panels), 1, figsize=(7.0, 2.2 * len(panels)),
                             sharex=True)
    vmax = np.abs(truth).max()
    for ax, (name, field) in zip(np.atleast_1d(axes), panels):
        im = ax.imshow(field.T, aspect="auto", origin="lower", extent=extent,
                       cmap="RdBu_r", vmin=-vmax, vmax=vmax)
        ax.set_ylabel("component")
        ax.set_title(name, fontsize=9)
        fig.colorbar(im, ax=ax, pad=0.01)
    np.atleast_1d(axes)[-1].set_xlabel("time")
    fig.tight_layout()
    fig.savefig(out_path, **SAVEFIG)
    plt.close(fig)
    return out_path
