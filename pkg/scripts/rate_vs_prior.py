"""Channel-averaged mutual information against the prior, for several antenna counts."""
from dataclasses import replace

from _common import emit, parser

from abcsim.bench import ExperimentSpec, run_rate_experiment
from abcsim.capacity import theta_grid
from abcsim.config import SystemConfig

p = parser(__doc__, trials=10_000)
p.add_argument("--realizations", type=int, default=100)
p.add_argument("--antennas", default="2,5,10")
args = p.parse_args()

rows = []
for M in (int(m) for m in args.antennas.split(",")):
    spec = ExperimentSpec(kind="rate-vs-theta0", system=SystemConfig(M=M, seed=args.seed), sweep_name="theta0",
                          sweep_values=tuple(theta_grid(0.01)), trials=args.trials,
                          realizations=args.realizations, workers=args.workers)
    rows += [replace(r, swept_name=f"theta0@M={M}") for r in run_rate_experiment(spec)]
emit(rows, args.out)
