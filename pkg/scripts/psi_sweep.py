"""Print soft targets for every true class across the smoothing-width sweep."""

import argparse

from ordinaldet.ordinal_targets import PSI_SWEEP, SoftTargetConfig, soft_targets


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k", default="inf", help="truncation radius or 'inf'")
    parser.add_argument("--s", type=float, default=1.0)
    args = parser.parse_args()
    k = None if args.k == "inf" else int(args.k)
    for psi in PSI_SWEEP:
        print(f"psi={psi}")
        for c in range(5):
            t = soft_targets(c, args.s, SoftTargetConfig(psi, k)).targets
            print(f"  DS{c}: " + " ".join(f"{v:.4f}" for v in t))


if __name__ == "__main__":
    main()
