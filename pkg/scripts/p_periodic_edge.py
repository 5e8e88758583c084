"""Top of the lowest band for V(n) = V[(n1 - n2) mod p] on span{(1,1),(p,0)}.

When V_0 is well below the other values the band edge sits exactly at V_0 and
its level set is a curve; the script prints the edge and the box-counting slope.

    python scripts/p_periodic_edge.py [--p 3 5] [--gap 3]
"""
import argparse

from spectra.bands import compute_band_summary
from spectra.fermi_complex import levelset_dimension_probe
from spectra.lattice import make_lattice
from spectra.potential import direction_periodic


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, nargs="+", default=[3, 5])
    ap.add_argument("--gap", type=float, nargs="+", default=[1.0, 3.0], help="V_j - V_0 for j != 0")
    args = ap.parse_args()

    print("p  V_j-V_0  E1+                 slope")
    for p in args.p:
        lat = make_lattice([[1, p], [1, 0]])
        for g in args.gap:
            pot = direction_periodic(lat, (1, -1), p, [0.0] + [g] * (p - 1))
            s = compute_band_summary(lat, pot, 128 if p <= 3 else 64)
            est = levelset_dimension_probe(lat, pot, 0, 1, summary=s)
            print(f"{p:<2d} {g:<8g} {s.edges[0].upper:+.3e}          {est.slope:.3f}")


if __name__ == "__main__":
    main()
