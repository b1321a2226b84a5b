#!/usr/bin/env python3
"""Path gain at every UE for the none / simple / focused sub-cases of one hallway.

    python3 scripts/ordering.py --hallway T --rays 4000000
"""

import argparse

from lfrsim.experiments import OrderingConfig, format_rows, ordering


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--hallway", choices=("L", "T"), default=OrderingConfig.hallway)
    p.add_argument("--rays", type=int, default=OrderingConfig.n_rays)
    p.add_argument("--bounces", type=int, default=OrderingConfig.max_bounces)
    a = p.parse_args()
    cfg = OrderingConfig(hallway=a.hallway, n_rays=a.rays, max_bounces=a.bounces)
    print(f"# {cfg}")
    print(format_rows(ordering(cfg)))


if __name__ == "__main__":
    main()
