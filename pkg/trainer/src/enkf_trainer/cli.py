"""Trainer command line: train / forward / plot."""
import argparse
import sys

import yaml

from .plots import plot_error_bands, plot_open_loop, plot_state_panel
from .reference import forward_reference_files
from .train import PRESETS, TrainingRun, train_from_csv


def _load_run(args):
    if args.config:
        with open(args.config) as fh:
            raw = yaml.safe_load(fh) or {}
        fields = {k: raw[k] for k in (
            "epochs", "learning_rate", "beta1", "batch_size", "seed",
            "group_channels", "hidden_channels", "kernel_size", "merge_variant",
        ) if k in raw}
        run = TrainingRun(**fields) if fields else PRESETS[raw.get("preset", "medium")]
        return run, raw.get("max_pairs")
    if args.preset:
        return PRESETS[args.preset], None
    return None, None


def _cmd_train(args):
    import dataclasses

    run, max_pairs = _load_run(args)
    if args.epochs is not None:
        run = dataclasses.replace(run or PRESETS["medium"], epochs=args.epochs)
    history = train_from_csv(args.data, args.out, run=run,
                             preset=args.preset or "medium",
                             max_pairs=args.max_pairs or max_pairs)
    print(f"trained {len(history)} epochs; final loss {history[-1]:.6g}; "
          f"weights -> {args.out}")
    return 0


def _cmd_forward(args):
    forward_reference_files(args.weights, args.inputs, args.out)
    print(f"reference outputs -> {args.out}")
    return 0


def _cmd_plot(args):
    if args.kind == "error-bands":
        plot_error_bands(args.csv, args.labels or args.csv, args.out)
    elif args.kind == "open-loop":
        plot_open_loop(args.csv, args.labels or args.csv, args.out)
    else:
        if not args.truth or not args.means:
            raise ValueError("state-panel needs --truth and --means")
        plot_state_panel(args.truth, args.means, args.out,
                         observations_csv=args.observations)
    print(f"figure -> {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="enkf-trainer")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the surrogate on a pair CSV")
    p.add_argument("--data", required=True)
    p.add_argument("-o", "--out", required=True)
    p.add_argument("-c", "--config")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--epochs", type=int)
    p.add_argument("--max-pairs", type=int)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("forward", help="reference forward pass of a weight file")
    p.add_argument("--weights", required=True)
    p.add_argument("--inputs", required=True)
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_forward)

    p = sub.add_parser("plot", help="render figures from experiment CSVs")
    p.add_argument("kind", choices=["error-bands", "open-loop", "state-panel"])
    p.add_argument("--csv", nargs="*", default=[])
    p.add_argument("--labels", nargs="*")
    p.add_argument("--truth")
    p.add_argument("--means")
    p.add_argument("--observations")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=_cmd_plot)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
