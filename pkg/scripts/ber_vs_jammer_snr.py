"""ML-detector BER against jammer SNR."""
from _common import emit, parser

from abcsim.bench import ExperimentSpec, run_ber_experiment
from abcsim.config import SystemConfig

p = parser(__doc__, trials=10_000)
p.add_argument("--antennas", type=int, default=10)
args = p.parse_args()

spec = ExperimentSpec(kind="ber-vs-snr", system=SystemConfig(M=args.antennas, seed=args.seed),
                      sweep_name="alpha_jr_db", sweep_values=tuple(float(v) for v in range(1, 11)),
                      trials=args.trials, workers=args.workers)
emit(run_ber_experiment(spec), args.out)
