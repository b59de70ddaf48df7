"""Theoretical exponent table and an empirical decay fit at one code rate.

    python scripts/exponent_table.py --flip-prob 0.05 --rate 0.5 --trials 4000
"""

import argparse

import numpy as np

from nhuncc.exponent import ExponentProfile, error_exponent
from nhuncc.params import SystemParams
from nhuncc.pipeline import empirical_exponent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--flip-prob", type=float, default=0.05)
    ap.add_argument("--rate", type=float, default=0.5)
    ap.add_argument("--trials", type=int, default=4000)
    ap.add_argument("--codebooks", type=int, default=50)
    ap.add_argument("--skip-sim", action="store_true")
    a = ap.parse_args()
    prof = ExponentProfile.of(a.flip_prob)
    print(f"p={prof.p}  H={prof.shannon:.6f}  H_1/2={prof.renyi_half:.6f}  H_min={prof.min_entropy:.6f}  "
          f"x*={prof.x_star:.6f}  C={prof.capacity:.6f}")
    print("R,eps")
    for R in np.linspace(0.05, prof.capacity - 1e-3, 12):
        print(f"{R:.4f},{error_exponent(R, a.flip_prob):.6f}")
    if a.skip_sim:
        return
    base = SystemParams(num_links=10, flip_prob=a.flip_prob, eve_links=1, msg_bits=4, secure_bits=2,
                        eps_bits=0, cipher_rand_bits=2, cipher_expand_bits=2)
    fit, rows = empirical_exponent(base, [12, 16, 20, 24], a.trials, rate=a.rate, codebooks=a.codebooks)
    print("n,k_u,column_bler,column_errors")
    for r in rows:
        print(f"{r['n']},{r['msg_bits']},{r['column_bler']:.5f},{r['column_errors']}")
    print(f"fitted slope {fit.slope:.4f} [{fit.slope_low:.4f}, {fit.slope_high:.4f}]  theory {fit.theory:.4f}  "
          f"ratio {fit.ratio:.2f}")
    for w in fit.warnings:
        print("warning:", w)


if __name__ == "__main__":
    main()
