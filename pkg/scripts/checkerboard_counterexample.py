"""Gap opened by a checkerboard potential +-eps, and the box-counting slope of
the level sets at the two internal band edges.

    python scripts/checkerboard_counterexample.py [--eps 0.05 0.1 0.5]
"""
import argparse

from spectra.bands import compute_band_summary
from spectra.fermi_complex import internal_edges, levelset_dimension_probe
from spectra.lattice import make_lattice
from spectra.potential import checkerboard


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--eps", type=float, nargs="+", default=[0.05, 0.1, 0.5])
    ap.add_argument("--resolution", type=int, default=128)
    args = ap.parse_args()

    lat = make_lattice([[1, 1], [1, -1]])
    print("eps      gap                         slopes")
    for eps in args.eps:
        pot = checkerboard(lat, -eps, eps)
        s = compute_band_summary(lat, pot, args.resolution)
        slopes = [levelset_dimension_probe(lat, pot, j, sg, summary=s).slope for j, sg in internal_edges(s)]
        gaps = ", ".join(f"({a:+.9f}, {b:+.9f})" for a, b in s.gaps)
        print(f"{eps:<8g} {gaps:27s} {' '.join(f'{x:.3f}' for x in slopes)}")


if __name__ == "__main__":
    main()
