"""Train the recurrent detector, then compare its BER with ML on the same held-out frames."""
from dataclasses import replace
from pathlib import Path

from _common import emit, parser

from abcsim.bench import ExperimentSpec, run_ber_experiment, run_training
from abcsim.config import SystemConfig
from abcsim.dl.detector import TrainConfig

p = parser(__doc__, trials=10_000)
p.add_argument("--train-frames", type=int, default=10_000)
p.add_argument("--symbols-per-frame", type=int, default=10)
p.add_argument("--hidden", type=int, default=64)
p.add_argument("--epochs", type=int, default=4)
p.add_argument("--checkpoint", type=Path, default=Path("lstm.npz"))
args = p.parse_args()

cfg = SystemConfig(seed=args.seed)
if not args.checkpoint.exists():
    run_training(ExperimentSpec(kind="train-dl", system=cfg, trials=args.train_frames,
                                checkpoint=str(args.checkpoint), train_log=str(args.checkpoint.with_suffix(".csv")),
                                train=TrainConfig(hidden=args.hidden, epochs=args.epochs, seed=args.seed),
                                symbols_per_frame=args.symbols_per_frame))
rows = []
for det in ("ml", "dl"):
    spec = ExperimentSpec(kind="ber-vs-snr", system=cfg, trials=args.trials, detector=det,
                          checkpoint=str(args.checkpoint), workers=args.workers)
    rows += [replace(r, swept_name=f"detector={det}") for r in run_ber_experiment(spec)]
emit(rows, args.out)
