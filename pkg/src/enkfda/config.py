"""YAML experiment configuration.

A config file holds up to five sections: model, observation, filter,
surrogate and experiment. Unknown sections or keys are rejected so a
typo cannot silently fall back to a default. See the README for the full
schema and an annotated example.
"""
import math

import yaml

from .experiments import ExperimentConfig
from .validation import ConfigError

_MODEL_KEYS = {"kind", "dim", "forcing", "dt_obs", "substeps", "sigma", "b", "rho"}
_OBS_KEYS = {"operator", "indices", "eps", "noise_scale"}
_FILTER_KEYS = {
    "kind", "n_members", "n_samples", "inflation", "inflation_mode",
    "init_mean", "init_cov", "ball_radius", "ball_horizon", "beta",
}
_SURROGATE_KEYS = {
    "kind", "name", "substeps", "forcing_offset", "weights_path",
    "n_pairs", "window", "regularization", "seed", "n_trajectories",
}
_EXPERIMENT_KEYS = {
    "kind", "n_trials", "horizon", "burn_in", "truth_init_std",
    "seed", "n_jobs", "output_dir",
}


def _check_keys(section, mapping, allowed):
    if not isinstance(mapping, dict):
        raise ConfigError(f"section {section!r} must be a mapping")
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(
            f"unknown keys in section {section!r}: {sorted(unknown)}; allowed: {sorted(allowed)}"
        )


def load_config(path):
    """Parse a YAML file into an ExperimentConfig."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file is not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a mapping of sections")
    unknown = set(raw) - {"model", "observation", "filter", "surrogate", "experiment"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    return config_from_dict(raw)


def config_from_dict(raw):
    cfg = ExperimentConfig()

    model = dict(raw.get("model", {}))
    _check_keys("model", model, _MODEL_KEYS)
    if "kind" in model:
        cfg.model_kind = str(model.pop("kind"))
    cfg.model_params = model

    obs = dict(raw.get("observation", {}))
    _check_keys("observation", obs, _OBS_KEYS)
    cfg.obs_operator = str(obs.get("operator", cfg.obs_operator))
    if "indices" in obs:
        cfg.obs_indices = tuple(obs["indices"])
    if "eps" in obs:
        cfg.eps = obs["eps"]

    filt = dict(raw.get("filter", {}))
    _check_keys("filter", filt, _FILTER_KEYS)
    cfg.filter_kind = str(filt.get("kind", cfg.filter_kind))
    for key in ("n_members", "n_samples"):
        if key in filt:
            setattr(cfg, key, int(filt[key]))
    for key in ("inflation", "init_mean", "init_cov", "beta", "ball_horizon"):
        if key in filt:
            setattr(cfg, key, float(filt[key]))
    if "inflation_mode" in filt:
        cfg.inflation_mode = str(filt["inflation_mode"])
    if "ball_radius" in filt:
        radius = filt["ball_radius"]
        if radius in (None, "none"):
            cfg.ball_radius = None
        elif radius == "auto":
            cfg.ball_radius = "auto"
        else:
            cfg.ball_radius = float(radius)

    surr = raw.get("surrogate", ())
    if isinstance(surr, dict):
        surr = [surr]
    specs = []
    for i, spec in enumerate(surr or ()):
        _check_keys(f"surrogate[{i}]", spec, _SURROGATE_KEYS)
        specs.append(dict(spec))
    cfg.surrogates = tuple(specs)

    exp = dict(raw.get("experiment", {}))
    _check_keys("experiment", exp, _EXPERIMENT_KEYS)
    if "kind" in exp:
        cfg.experiment_kind = str(exp["kind"])
    for key in ("n_trials", "seed", "n_jobs"):
        if key in exp:
            setattr(cfg, key, int(exp[key]))
    for key in ("horizon", "burn_in", "truth_init_std"):
        if key in exp:
            setattr(cfg, key, float(exp[key]))
    if "output_dir" in exp:
        cfg.output_dir = exp["output_dir"]

    if not isinstance(cfg.eps, (int, float)):
        try:
            cfg.eps = [float(e) for e in cfg.eps]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"eps must be a number or list of numbers: {exc}") from exc
    if isinstance(cfg.truth_init_std, float) and not math.isfinite(cfg.truth_init_std):
        raise ConfigError("truth_init_std must be finite")
    return cfg.validate()
