"""Tabulate the rank-one probe determinants for class II witnesses.

Prints theta, direction, det at the chosen lambda, the fitted cubic
coefficient and its ratio to the closed form with prefactors 8 and 16.
"""
import argparse
import math

from witnesslab.optimality import (class2_probe_det, probe_directions,
                                   probe_leading_coefficient_formula)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=1e-4)
    ap.add_argument("--directions", type=int, default=12)
    args = ap.parse_args()
    print("theta,x_abs,y_abs,shifted,det,cubic,ratio8,ratio16")
    for t in (math.pi / 4, math.pi / 2, 3 * math.pi / 4):
        for x, y in probe_directions(args.directions):
            r = class2_probe_det(t, args.lam, None, x, y)
            w = abs(r.y) if r.shifted else abs(r.x)
            c8 = probe_leading_coefficient_formula(t, r.k, w, factor=8.0)
            c16 = probe_leading_coefficient_formula(t, r.k, w, factor=16.0)
            print(f"{t!r},{abs(x)!r},{abs(y)!r},{r.shifted},{r.det!r},{r.leading_coeff!r},"
                  f"{r.leading_coeff / c8:.9f},{r.leading_coeff / c16:.9f}")


if __name__ == "__main__":
    main()
