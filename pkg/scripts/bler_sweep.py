"""Block error rate against n at a fixed fraction of capacity.

    python scripts/bler_sweep.py --flip-prob 0.01 --fraction 0.7 --trials 2000 --out out/sweep
"""

import argparse

from nhuncc.config import RunConfig
from nhuncc.pipeline import run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--flip-prob", type=float, default=0.01)
    ap.add_argument("--fraction", type=float, default=0.7, help="effective rate as a fraction of capacity")
    ap.add_argument("--ns", default="12,16,20,24")
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--codebooks", type=int, default=20)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="out/bler_sweep")
    a = ap.parse_args()
    cfg = RunConfig.from_dict(
        dict(
            num_links=10, flip_prob=a.flip_prob, eve_links=2, msg_bits=4, eps_bits=1,
            cipher_rand_bits=2, cipher_expand_bits=2, experiment="bler_sweep", sweep_axis="n",
            sweep_values=[int(x) for x in a.ns.split(",")], rate_fraction=a.fraction,
            trials=a.trials, codebooks=a.codebooks, workers=a.workers, output=a.out,
        )
    )
    res = run_experiment(cfg)
    print(res["files"]["csv"].read_text())


if __name__ == "__main__":
    main()
