"""ML-detector BER and bits per RF symbol against the spreading factor N."""
from _common import emit, parser

from abcsim.bench import ExperimentSpec, run_ber_experiment
from abcsim.config import SystemConfig

p = parser(__doc__, trials=10_000)
p.add_argument("--antennas", type=int, default=10)
args = p.parse_args()

spec = ExperimentSpec(kind="ber-vs-N", system=SystemConfig(M=args.antennas, seed=args.seed), sweep_name="N",
                      sweep_values=(1.0, 10.0, 25.0, 50.0, 100.0), trials=args.trials, workers=args.workers)
emit(run_ber_experiment(spec), args.out)
