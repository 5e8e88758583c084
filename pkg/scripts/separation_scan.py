"""Separation of the diagonal entries of h(theta_1, theta' - i t u) for large t.

    python scripts/separation_scan.py [--draws 5] [--samples 10000]
"""
import argparse

from spectra.errors import HypothesisFailed
from spectra.fermi_complex import draw_admissible, separation_scan
from spectra.lattice import make_lattice


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--draws", type=int, default=5)
    ap.add_argument("--samples", type=int, default=10_000)
    args = ap.parse_args()
    t_grid = [0.05, 0.1, 0.25, 0.5] + list(range(1, 13))

    lat = make_lattice([[2, 1], [0, 2]])
    for u in ([1], [-1]):
        for seed in range(args.draws):
            theta = draw_admissible(lat, u, seed)
            rep = separation_scan(lat, theta, u, t_grid, args.samples, seed)
            print(f"u={u} theta2={theta[0]:.4f} t0={rep.t0} violations={rep.violations[:5]}...")
    try:
        separation_scan(make_lattice([[1, 3], [1, 0]]), [0.3], [-1], t_grid)
    except HypothesisFailed as exc:
        print(f"span{{(1,1),(3,0)}}, u=[-1]: {exc.reason}: {exc}")


if __name__ == "__main__":
    main()
