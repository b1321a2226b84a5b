#!/usr/bin/env python3
"""Ray-count convergence of the simple and focused readouts at one UE.

    python3 scripts/convergence.py --hallway T --ue 9
"""

import argparse

from lfrsim.experiments import ConvergenceConfig, convergence, format_rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--hallway", choices=("L", "T"), default=ConvergenceConfig.hallway)
    p.add_argument("--ue", type=int, default=ConvergenceConfig.ue_index)
    p.add_argument("--rays", type=int, nargs="+", default=list(ConvergenceConfig.ray_counts))
    a = p.parse_args()
    cfg = ConvergenceConfig(hallway=a.hallway, ue_index=a.ue, ray_counts=tuple(a.rays))
    print(f"# {cfg}")
    print(format_rows(convergence(cfg)))


if __name__ == "__main__":
    main()
