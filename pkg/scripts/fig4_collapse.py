"""COP discrepancy against the adiabaticity parameter (K-1)/(MT).

Reads a sweep table (from fig3_cop_map.py or ``qzeno sweep``) and prints the
discrepancy binned by decade of the parameter, with signed and absolute means.
"""
import argparse
import csv
import math
from collections import defaultdict


def main(path: str):
    with open(path, newline="") as fh:
        rows = [r for r in csv.DictReader(fh) if r.get("failed_cycles", "0") == "0"]
    bins = defaultdict(list)
    for r in rows:
        p = float(r["adiab_param"])
        bins[math.floor(math.log10(p))].append(float(r["gap"]))
    print("decade,n,mean_gap,mean_abs_gap")
    for d in sorted(bins):
        g = bins[d]
        print(f"1e{d},{len(g)},{sum(g) / len(g):.3e},{sum(map(abs, g)) / len(g):.3e}")
    low = [float(r["gap"]) for r in rows if float(r["adiab_param"]) < 0.1]
    high = [float(r["gap"]) for r in rows if float(r["adiab_param"]) > 10]
    for label, g in (("param < 0.1", low), ("param > 10", high)):
        if g:
            print(f"{label}: {len(g)} points, mean gap {sum(g) / len(g):.3e}, "
                  f"mean |gap| {sum(map(abs, g)) / len(g):.3e}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("sweep_csv", nargs="?", default="out/fig3/sweep.csv")
    main(ap.parse_args().sweep_csv)
