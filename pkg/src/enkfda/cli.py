"""Command-line entry points.

Exit codes: 0 on success, 2 for configuration errors, 3 for numerical
blow-up during integration.
"""
import argparse
import os
import sys

from .config import load_config
from .experiments import (
    emit_training_data,
    estimate_alpha,
    noise_scaling_experiment,
    preset_config,
    run_monte_carlo,
    run_trial,
    simulate_truth,
    surrogate_fidelity_experiment,
)
from .observation import ObservationSetup, write_observations_csv
from .rng import trial_seed
from .surrogate import estimate_model_error, sample_attractor
from .validation import BlowUpError, ConfigError


def _write_truth_csv(path, truth, dt_obs):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "time"] + [f"u_{i}" for i in range(truth.shape[1])])
        for j, row in enumerate(truth):
            writer.writerow([j + 1, repr(float((j + 1) * dt_obs))] + [repr(float(v)) for v in row])


def _cmd_simulate(args):
    cfg = load_config(args.config)
    model = cfg.build_model()
    h = cfg.build_h(model)
    tseed = trial_seed(cfg.seed, args.trial)
    n_steps = int(round(cfg.horizon / model.dt_obs))
    truth = simulate_truth(model, n_steps, tseed, cfg.truth_init_std)
    obs = ObservationSetup(h, cfg.scalar_eps(), seed=tseed)
    ys = obs.observe_sequence(truth)
    os.makedirs(args.out, exist_ok=True)
    _write_truth_csv(os.path.join(args.out, "truth.csv"), truth, model.dt_obs)
    write_observations_csv(os.path.join(args.out, "observations.csv"), ys)
    print(f"wrote {n_steps} steps to {args.out}")
    return 0


def _cmd_filter(args):
    cfg = load_config(args.config)
    surrogate = None
    if cfg.surrogates:
        surrogate = cfg.build_surrogate(cfg.build_model(), cfg.surrogates[0])
    series = run_trial(cfg, args.trial, surrogate=surrogate)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"trial_{args.trial:04d}.csv")
    series.write_csv(path)
    if args.means:
        series.write_means_csv(os.path.join(args.out, f"means_trial_{args.trial:04d}.csv"))
    print(f"trial {args.trial}: steady-state error {series.steady_error(cfg.burn_in):.6g} "
          f"-> {path}")
    return 0


def _cmd_experiment(args):
    if args.preset:
        cfg = preset_config(args.preset, output_dir=args.out, n_trials=args.trials,
                            n_jobs=args.jobs)
    else:
        if not args.config:
            raise ConfigError("experiment needs --config or --preset")
        cfg = load_config(args.config)
        if args.trials is not None:
            cfg.n_trials = args.trials
        if args.jobs is not None:
            cfg.n_jobs = args.jobs
        cfg.output_dir = args.out
    os.makedirs(args.out, exist_ok=True)
    if cfg.experiment_kind == "noise_scaling":
        result = noise_scaling_experiment(cfg)
        for i, eps in enumerate(result.eps):
            print(f"eps={eps:g}: steady error {result.steady_errors[i]:.6g} "
                  f"+- {result.steady_stderrs[i]:.2g}")
        print(f"log-log slope over {result.slope_eps_count} smallest eps: {result.slope:.4f}")
    elif cfg.experiment_kind == "surrogate_fidelity":
        result = surrogate_fidelity_experiment(cfg)
        for i, name in enumerate(result.names):
            print(f"{name}: delta_hat={result.delta_hats[i]:.4g} "
                  f"steady error {result.steady_errors[i]:.6g} +- {result.steady_stderrs[i]:.2g}")
        print(f"control: steady error {result.control_steady:.6g} "
              f"+- {result.control_stderr:.2g}")
    else:
        surrogate = None
        if cfg.surrogates:
            surrogate = cfg.build_surrogate(cfg.build_model(), cfg.surrogates[0])
        stats, _ = run_monte_carlo(cfg, surrogate=surrogate)
        print(f"steady-state error {stats.steady_mean:.6g} +- {stats.steady_stderr:.2g} "
              f"over {stats.n_trials} trials")
    return 0


def _cmd_estimate_delta(args):
    cfg = load_config(args.config)
    if not cfg.surrogates:
        raise ConfigError("estimate-delta needs a surrogate section")
    model = cfg.build_model()
    h = cfg.build_h(model)
    samples = sample_attractor(model, args.samples, burn_in=200, stride=2, seed=cfg.seed)
    for i, spec in enumerate(cfg.surrogates):
        surrogate = cfg.build_surrogate(model, spec)
        est = estimate_model_error(model, surrogate, samples, h)
        name = spec.get("name", spec.get("kind", f"surrogate{i}"))
        print(f"{name}: kappa_hat={est.kappa_hat!r} delta_hat={est.delta_hat!r} "
              f"(n={est.n_samples})")
    return 0


def _cmd_estimate_alpha(args):
    cfg = load_config(args.config)
    model = cfg.build_model()
    h = cfg.build_h(model)
    alpha = estimate_alpha(model, h, n_pairs=args.pairs, seed=cfg.seed, beta=cfg.beta)
    print(f"alpha_hat={alpha!r}" + ("  (no contraction detected)" if alpha >= 1 else ""))
    return 0


def _cmd_train_data(args):
    cfg = load_config(args.config)
    model = cfg.build_model()
    emit_training_data(model, args.pairs, cfg.seed, args.out,
                       steps_per_trajectory=args.steps_per_trajectory)
    print(f"wrote {args.pairs} training pairs to {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="enkfda",
        description="Ensemble Kalman filtering experiments on chaotic systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a truth trajectory and observations")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--trial", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("filter", help="run a single filter trial")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--means", action="store_true",
                   help="also write the analysis-mean trajectory CSV")
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    p.add_argument("-c", "--config")
    p.add_argument("--preset", choices=["fig1", "fig4", "mean_field"])
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("estimate-delta", help="surrogate one-step error over the attractor")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-n", "--samples", type=int, default=1000)
    p.set_defaults(func=_cmd_estimate_delta)

    p = sub.add_parser("estimate-alpha", help="empirical unobserved-subspace contraction factor")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-n", "--pairs", type=int, default=400)
    p.set_defaults(func=_cmd_estimate_alpha)

    p = sub.add_parser("train-data", help="emit (state, image) training pairs as CSV")
    p.add_argument("-c", "--config", required=True)
    p.add_argument("-n", "--pairs", type=int, required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--steps-per-trajectory", type=int, default=1000)
    p.set_defaults(func=_cmd_train_data)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BlowUpError as exc:
        print(f"numerical blow-up: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
