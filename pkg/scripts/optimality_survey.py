"""Write the full optimality report for a grid of witnesses to a JSON file.

Usage: python3 scripts/optimality_survey.py --out survey.json [--starts 100]
"""
import argparse
import math

from witnesslab import FamilyParam, optimality_report
from witnesslab.cli import dumps


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True)
    ap.add_argument("--starts", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-bisect", action="store_true")
    args = ap.parse_args()
    params = [FamilyParam(fam, k * math.pi / 4) for fam in ("classI", "classII") for k in range(5)]
    params += [FamilyParam("n3", k * math.pi / 3) for k in range(6)]
    reports = [optimality_report(p, starts=args.starts, seed=args.seed, bisect=not args.no_bisect)
               for p in params]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dumps({"reports": reports}) + "\n")


if __name__ == "__main__":
    main()
