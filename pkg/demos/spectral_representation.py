"""Build the truncated positive-energy representation and inspect it.

Assembles the generator triple (H, D, C) for a lowest weight k, the
squared-coordinate companion triple, and the modular coordinate operator
T = (1/2) log(2 C~); prints the structural identities that make the
truncation trustworthy.

Run:  python demos/spectral_representation.py [--k K] [--M M]
"""

import argparse

import numpy as np
from scipy.linalg import eigh

from modloc.laguerre import BasisSpec
from modloc.spectral import (
    build_generators,
    build_T,
    build_tilde_generators,
    interior_residual,
    rotation_generator,
    unitary_flow,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, default=1.0)
    ap.add_argument("--M", type=int, default=256)
    args = ap.parse_args()

    spec = BasisSpec(k=args.k, beta=1.0, M=args.M)
    g = build_generators(spec)
    gt = build_tilde_generators(g)
    print(f"built (H, D, C) at k={args.k}, M={args.M}; quadrature order "
          f"{g.build_asymmetry['quad_order']}, worst pre-Hermitization "
          f"asymmetry {max(g.build_asymmetry[n] for n in 'HDC'):.2e}")

    lo = eigh(g.rotation(), eigvals_only=True, subset_by_index=(0, 0))[0]
    lo_t = eigh(gt.rotation(), eigvals_only=True, subset_by_index=(0, 0))[0]
    print(f"\nlowest rotation eigenvalues (the representation labels):")
    print(f"  plain triple: {lo:.10f}   (lowest weight k = {args.k})")
    print(f"  tilde triple: {lo_t:.10f}   (k/2 + 1/4 = "
          f"{0.5 * args.k + 0.25})")

    print("\ninterior-projected sl(2,R) commutators (relative residuals):")
    for tag, trip in (("plain", g), ("tilde", gt)):
        H, D, C = trip.H, trip.D, trip.C
        print(f"  {tag}: [H,D]-iH {interior_residual(H@D-D@H, 1j*H):.2e}, "
              f"[C,D]+iC {interior_residual(C@D-D@C, -1j*C):.2e}, "
              f"[H,C]-2iD {interior_residual(H@C-C@H, 2j*D):.2e}")

    R = unitary_flow(rotation_generator(g), np.pi)
    print(f"\nrotation by pi swaps H and C: residual "
          f"{interior_residual(R @ g.H @ R.conj().T, g.C):.2e}")

    T = build_T(gt)
    evals_T = np.sort(eigh(T.matrix, eigvals_only=True))
    evals_C = np.sort(eigh(2.0 * gt.C, eigvals_only=True))
    print(f"\nmodular coordinate T = (1/2) log(2 C~):")
    print(f"  spectrum range [{evals_T[0]:.4f}, {evals_T[-1]:.4f}]")
    print(f"  affinity max |spec T - log(spec 2C~)/2| = "
          f"{np.max(np.abs(evals_T - 0.5 * np.log(evals_C))):.2e}")


if __name__ == "__main__":
    main()
