#!/usr/bin/env python3
"""RSS (dBm, 10 W transmitter) at the nine UEs: free space, none, simple, focused.

    python3 scripts/rss_table.py --hallway L --mode coherent
"""

import argparse

from lfrsim.experiments import RssConfig, rss


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--hallway", choices=("L", "T"), default=RssConfig.hallway)
    p.add_argument("--mode", choices=("coherent", "incoherent"), default=RssConfig.mode)
    p.add_argument("--rays", type=int, default=RssConfig.n_rays)
    a = p.parse_args()
    cfg = RssConfig(hallway=a.hallway, mode=a.mode, n_rays=a.rays)
    table = rss(cfg)
    cols = table["columns"]
    print(f"# {cfg}")
    print("ue  " + "  ".join(f"{c:>10}" for c in cols))
    for r in table["rows"]:
        print(f"{r['ue']:<3} " + "  ".join(f"{r[c]:>10.2f}" for c in cols))


if __name__ == "__main__":
    main()
