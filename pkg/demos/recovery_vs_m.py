"""Recovery quality against the number of measurements.

A shortened version of the main sweep (n = 500, 20 trials, ideal
parameters) so it runs in well under a minute.  Pass a trial count on
the command line for a longer run.
"""

import sys

from onebitcs.experiment import ExperimentConfig, run_sweep

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 20
cfg = ExperimentConfig(n=500, m=[200, 500, 1000], k=10, trials=trials, param_mode="ideal")
res = run_sweep(cfg)

print(f"{'m':>6} " + " ".join(f"{m:>10}" for m in cfg.methods))
means = {meth: res.mean(meth, "ideal", "snr_db") for meth in cfg.methods}
for m in cfg.sweep_values:
    row = [means[meth][m] for meth in cfg.methods]
    print(f"{m:>6} " + " ".join(f"{s:10.2f}" for s in row))
print("(mean SNR in dB over", trials, "trials)")
