"""Bisect the largest removable projector weight for class I witnesses.

Usage: python3 scripts/reproduce_lambda_star.py [--points 5] [--starts 200]
"""
import argparse
import json
import math

import numpy as np

from witnesslab import FamilyParam, lambda_star_bisect


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=5)
    ap.add_argument("--starts", type=int, default=200)
    ap.add_argument("--tol", type=float, default=1e-4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    # interior angles only; the endpoints are decomposable
    for t in np.linspace(0, math.pi, args.points + 2)[1:-1]:
        rep = lambda_star_bisect(FamilyParam("classI", float(t)), tol=args.tol,
                                 starts=args.starts, seed=args.seed)
        print(json.dumps({"theta": float(t), "lambda_star": rep.lambda_star,
                          "bracket": list(rep.bracket), "consistent": rep.consistent}))


if __name__ == "__main__":
    main()
