"""Maximum achievable backscatter rate against jammer SNR."""
from _common import emit, parser

from abcsim.bench import ExperimentSpec, run_rate_experiment
from abcsim.config import SystemConfig

p = parser(__doc__, trials=10_000)
p.add_argument("--realizations", type=int, default=100)
p.add_argument("--antennas", type=int, default=10)
args = p.parse_args()

spec = ExperimentSpec(kind="rate-vs-snr", system=SystemConfig(M=args.antennas, seed=args.seed),
                      sweep_name="alpha_jr_db", sweep_values=tuple(float(v) for v in range(1, 11)),
                      trials=args.trials, realizations=args.realizations, workers=args.workers)
emit(run_rate_experiment(spec), args.out)
