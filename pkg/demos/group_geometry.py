"""Walk through the Moebius geometry underlying the laboratory.

Shows how the three one-parameter subgroups move points and intervals of
the compactified line, how an arbitrary group element factorizes, and how
every bounded interval is reached from the reference half line.

Run:  python demos/group_geometry.py [--interval A B]
"""

import argparse

import numpy as np

from modloc.mobius import (
    INFINITY,
    Interval,
    act_interval,
    act_point,
    dilation,
    dilation_matrix,
    iwasawa,
    map_halfline_to,
    rotation,
    special_conformal,
    translation,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--interval", type=float, nargs=2, default=(1.0, 2.0),
                    metavar=("A", "B"))
    args = ap.parse_args()
    a, b = args.interval

    print("one-parameter subgroups acting on x = 1:")
    for name, g in (("T(0.5)      ", translation(0.5)),
                    ("Lambda(0.1) ", dilation(0.1)),
                    ("P(0.3)      ", special_conformal(0.3)),
                    ("R(pi)       ", rotation(np.pi))):
        print(f"  {name} 1 -> {act_point(g, 1.0):+.6f}")

    print("\ndilations scale translations (the positive-inclusion relation):")
    bb, t = 0.2, 1.0
    lhs = dilation(bb) @ translation(t) @ dilation(-bb)
    print(f"  Lambda({bb}) T({t}) Lambda({-bb}) maps 0 to "
          f"{act_point(lhs, 0.0):.6f}; e^(2 pi {bb}) t = "
          f"{np.exp(2 * np.pi * bb) * t:.6f}")

    print("\nIwasawa factorization of a generic element:")
    g = translation(0.7) @ dilation_matrix(1.3) @ special_conformal(-0.4)
    f = iwasawa(g)
    print(f"  g = T({f.x:.4f}) Lambda({f.y:.4f}) P({f.z:.4f})")
    print(f"  recomposition matches g: "
          f"{f.recompose().projectively_equal(g, tol=1e-10)}")

    print(f"\ntransporting the half line onto [{a}, {b}]:")
    iv = Interval(a, b)
    gmap = map_halfline_to(iv)
    print(f"  g 0  = {act_point(gmap, 0.0):.6f}")
    print(f"  g oo = {act_point(gmap, INFINITY):.6f}")
    img = act_interval(dilation_matrix(2.0), iv)
    print(f"  Lambda-type push by diag(2, 1/2): [{a}, {b}] -> "
          f"[{img.lo:.4f}, {img.hi:.4f}]  (x -> 4x)")


if __name__ == "__main__":
    main()
