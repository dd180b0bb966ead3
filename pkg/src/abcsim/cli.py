"""Command-line entry point: ``abcsim {rate,ber,train,eval,describe}``.

Values are resolved in order: built-in defaults, ``--config`` file, flags.
"""
from __future__ import annotations

import argparse
import logging
import sys

from .bench import describe, read_config_file, run, run_training, write_csv
from .bench.spec import KINDS, SpecError, build_spec

# subcommand -> default experiment kind
_KIND = {"rate": "rate-vs-snr", "ber": "ber-vs-snr", "train": "train-dl", "eval": "eval-dl"}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value configuration file")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--trials", type=int, help="trials per point (MC samples, frames or training frames)")
    p.add_argument("--out", help="output CSV path (stdout if omitted)")
    p.add_argument("--sweep", help="swept parameter, e.g. alpha_jr_db=1,2,3")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a system parameter, e.g. M=5 or alpha_jr_db=3 (repeatable)")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abcsim", description="Backscatter anti-jamming simulation bench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="maximum achievable backscatter rate")
    _common(p)
    p.add_argument("--realizations", type=int, help="channel realisations per point")
    p.add_argument("--grid-step", type=float, dest="grid_step", help="prior grid step")

    p = sub.add_parser("ber", help="bit error rate of a detector")
    _common(p)
    p.add_argument("--detector", choices=("ml", "dl"))
    p.add_argument("--checkpoint", help="trained model for --detector dl")

    p = sub.add_parser("train", help="train the recurrent detector")
    _common(p)
    p.add_argument("--checkpoint", required=True, help="checkpoint output path")
    p.add_argument("--hidden", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--lr", type=float)
    p.add_argument("--symbols-per-frame", type=int, dest="symbols_per_frame")

    p = sub.add_parser("eval", help="BER of a trained checkpoint")
    _common(p)
    p.add_argument("--checkpoint", required=True)

    p = sub.add_parser("describe", help="print the resolved configuration")
    _common(p)
    p.add_argument("--kind", choices=KINDS, default="ber-vs-snr")
    p.add_argument("--realizations", type=int)
    p.add_argument("--detector", choices=("ml", "dl"))
    p.add_argument("--checkpoint")
    return parser


_SKIP = {"command", "config", "set", "verbose", "kind"}


def resolve_spec(args: argparse.Namespace):
    values: dict = read_config_file(args.config) if args.config else {}
    for item in args.set:
        if "=" not in item:
            raise SpecError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        values[k.strip()] = v.strip()
    for k, v in vars(args).items():
        if k not in _SKIP and v is not None:
            values[k] = v
    if args.command == "train" and args.out:
        # the CSV of a training run is its epoch log
        values["train_log"] = values.pop("out")
    kind = args.kind if args.command == "describe" else _KIND[args.command]
    if args.command in ("rate", "ber") and "kind" not in values:
        kind = _infer_kind(args.command, values.get("sweep"))
    if args.command in ("train", "eval"):
        values.pop("kind", None)
    return build_spec(kind, values)


def _infer_kind(command: str, sweep: str | None) -> str:
    name = sweep.split("=", 1)[0].strip() if sweep else ""
    if command == "rate":
        return "rate-vs-theta0" if name == "theta0" else "rate-vs-snr"
    if name == "N":
        return "ber-vs-N"
    if name in ("alpha_t_rel_db", "alpha_j_rel_db"):
        return "ber-vs-backscatter-snr"
    return "ber-vs-snr"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = resolve_spec(args)
        if args.command == "describe":
            print(describe(spec))
            return 0
        if args.command == "train":
            _, history = run_training(spec)
            last = history[-1]
            print(f"trained {spec.train.epochs} epochs: loss {last.loss:.5f} accuracy {last.accuracy:.4f}; "
                  f"checkpoint {spec.checkpoint}")
            return 0
        rows = run(spec)
        write_csv(rows, spec.out or sys.stdout)
        return 0
    except (ValueError, OSError, KeyError) as exc:
        print(f"abcsim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
