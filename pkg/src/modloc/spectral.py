"""Truncated Hermitian matrices for the sl(2,R) generator triples, the
modular objects, and the coordinate operators.

All operators are compressions P_M X P_M onto the first M basis vectors.
The generator matrices are assembled by Gauss-Laguerre quadrature in the
variable x = 2 beta E with weight exponent 2k-1; with that choice every
integrand is weight times a polynomial of degree <= 2M, so the quadrature
is exact and the compressions carry only round-off asymmetry.

Identities that hold for the infinite-dimensional operators are corrupted
by truncation only near the boundary rows, so they are tested under an
interior projection (default fraction 0.8).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .errors import OverflowAbort, QuadratureUnderResolved, SpectrumOutOfDomain
from .laguerre import BasisSpec, gauss_laguerre, laguerre_rows_logscale

__all__ = [
    "GeneratorSet",
    "HermitianOperator",
    "UnitaryFlow",
    "build_generators",
    "build_tilde_generators",
    "matrix_function",
    "build_T",
    "build_Th_Tc",
    "unitary_flow",
    "conjugation_J",
    "j_conjugate_matrix",
    "translate_generators",
    "interior_block",
    "interior_residual",
    "rotation_generator",
    "half_modular_power_apply",
]

ASYMMETRY_GATE = 1e-8
INTERIOR_FRACTION = 0.8


@dataclass(frozen=True)
class HermitianOperator:
    """Hermitian complex matrix tagged with the basis it lives in."""

    matrix: np.ndarray
    basis: str = "Z"

    def __post_init__(self):
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(m))):
            raise ValueError("matrix is not Hermitian")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eig(self):
        return eigh(self.matrix)

    def expectation(self, v: np.ndarray) -> float:
        return float(np.real(np.vdot(v, self.matrix @ v)))


@dataclass(frozen=True)
class GeneratorSet:
    """Hermitian matrices for one sl(2,R) triple (H, D, C) in the Z basis.

    variant is "plain" for the triple built from (A.1)-type generators,
    "tilde" for the squared-Hamiltonian triple.
    """

    H: np.ndarray
    D: np.ndarray
    C: np.ndarray
    spec: BasisSpec
    variant: str = "plain"
    build_asymmetry: dict = field(default_factory=dict)

    @property
    def M(self) -> int:
        return self.H.shape[0]

    def rotation(self) -> np.ndarray:
        """Generator of rotations (H + C)/2."""
        return 0.5 * (self.H + self.C)

    def as_operators(self):
        tag = self.variant
        return (
            HermitianOperator(self.H, tag),
            HermitianOperator(self.D, tag),
            HermitianOperator(self.C, tag),
        )


def _weighted_rows(spec: BasisSpec, rule):
    """sqrt(weight)-scaled rows of p_n, p_n', p_n'' on the quadrature nodes.

    p_n = L_n^(a) with the basis exponent a = 2k-1, which need not match
    the rule's weight exponent; the derivative identities are
    d/dx L_n^(a) = -L_{n-1}^(a+1) and d2/dx2 L_n^(a) = L_{n-2}^(a+2).  The
    half log-weight rides through the recurrences in log space, so the rows
    stay finite when the weight alone underflows.
    """
    M = spec.M
    x = rule.nodes
    lw2 = 0.5 * rule.log_weights
    a = 2.0 * spec.k - 1.0
    c = np.exp(spec.log_norm(np.arange(M)))
    B = c[:, None] * laguerre_rows_logscale(M, a, x, lw2)
    B1 = np.zeros_like(B)
    if M > 1:
        B1[1:] = -c[1:, None] * laguerre_rows_logscale(M - 1, a + 1.0, x, lw2)
    B2 = np.zeros_like(B)
    if M > 2:
        B2[2:] = c[2:, None] * laguerre_rows_logscale(M - 2, a + 2.0, x, lw2)
    return B, B1, B2


def _hermitize(A: np.ndarray):
    """Symmetric average; returns (matrix, relative pre-average asymmetry)."""
    asym = np.max(np.abs(A - A.conj().T))
    scale = max(1.0, np.max(np.abs(A)))
    return 0.5 * (A + A.conj().T), float(asym / scale)


def build_generators(spec: BasisSpec, quad_order: int | None = None) -> GeneratorSet:
    """Assemble (H, D, C) for the plain triple by exact quadrature.

    Matrix elements <Z_m, X Z_n> are evaluated on the Gauss-Laguerre rule
    with weight exponent 2k-1 in x = 2 beta E.  Derivatives of the basis
    polynomials use d/dx L_n^(a) = -L_{n-1}^(a+1); the inverse-coordinate
    potential (k^2 - k)/E cancels exactly against the k(k-1) term of the
    expanded kinetic part, leaving polynomial integrands throughout.
    """
    k, beta, M = spec.k, spec.beta, spec.M
    if quad_order is None:
        quad_order = int(np.ceil(2 * M + 2 * k + 4))
    rule = gauss_laguerre(quad_order, 2 * k - 1.0)
    x = rule.nodes
    B, B1, B2 = _weighted_rows(spec, rule)

    S = B @ B.T
    H = (B * x) @ B.T / (2.0 * beta)
    # D = -i (E d/dE + 1/2):  E dZ_n/dE -> (k-1/2) p_n + x p_n' - (x/2) p_n
    Q = (k - 0.5) * B + x * B1 - 0.5 * x * B
    K = B @ Q.T + 0.5 * S
    # C Z_n -> 2 beta x [k p_n - 2k p_n' - x (p_n/4 - p_n' + p_n'')]
    T = k * B - 2.0 * k * B1 - x * (0.25 * B - B1 + B2)
    C = 2.0 * beta * (B @ T.T)

    H, asym_h = _hermitize(H.astype(complex))
    C, asym_c = _hermitize(C.astype(complex))
    D, asym_d = _hermitize((-1j) * K.astype(complex))
    gram_dev = float(np.max(np.abs(S - np.eye(M))))
    asymmetry = {
        "H": asym_h,
        "D": asym_d,
        "C": asym_c,
        "gram": gram_dev,
        "quad_order": quad_order,
    }
    worst = max(asym_h, asym_d, asym_c)
    if worst > ASYMMETRY_GATE:
        raise QuadratureUnderResolved(
            f"pre-Hermitization asymmetry {worst:.3e} exceeds {ASYMMETRY_GATE:.0e}"
        )
    return GeneratorSet(H=H, D=D, C=C, spec=spec, variant="plain",
                        build_asymmetry=asymmetry)


def build_tilde_generators(g: GeneratorSet) -> GeneratorSet:
    """Squared-coordinate triple (H^2/2, D/2, H^{-1/2} C H^{-1/2} / 2).

    The matrices are written in the companion basis (basis_eval family
    "Ztilde": argument 2 beta E^2, weight parameter k~ = k/2 + 1/4), the
    orthonormal eigenbasis of the triple's rotation generator.  Under the
    square-coordinate unitary u = E^2, psi -> sqrt(2E) psi(E^2), the triple
    maps onto the standard generator form with lowest weight k~ and scale
    2 beta, so its matrices there are exactly a plain build at (k~, 2 beta).
    In the plain basis the entries of the third operator diverge with the
    truncation; this basis is the one where all three are finite.
    """
    if g.variant != "plain":
        raise ValueError("tilde triple is built from the plain one")
    spec = g.spec
    tilde_spec = BasisSpec(k=0.5 * spec.k + 0.25, beta=2.0 * spec.beta, M=spec.M)
    built = build_generators(tilde_spec)
    return GeneratorSet(H=built.H, D=built.D, C=built.C, spec=spec,
                        variant="tilde",
                        build_asymmetry=dict(built.build_asymmetry))


_SPECTRAL_FUNCTIONS = {"sqrt", "inv_sqrt", "log", "exp_scaled", "power"}


def matrix_function(A: HermitianOperator, f: str, param: float | None = None,
                    eps_factor: float = 1e-10) -> HermitianOperator:
    """Apply f to the eigenvalues of A, preserving eigenvectors.

    For log and inv_sqrt the eigenvalues must exceed eps_factor times the
    largest one; anything below raises rather than being clamped, since a
    silent clamp would corrupt the bounds on the coordinate operator.
    """
    if f not in _SPECTRAL_FUNCTIONS:
        raise ValueError(f"unknown matrix function {f!r}")
    evals, vecs = eigh(A.matrix)
    eps = eps_factor * max(evals.max(), 0.0)
    if f in ("sqrt", "log", "inv_sqrt") or (f == "power" and param is not None
                                            and not float(param).is_integer()):
        if evals.min() < -eps:
            raise SpectrumOutOfDomain(
                f"{f} needs a positive semidefinite matrix; min eigenvalue "
                f"{evals.min():.3e}"
            )
    if f in ("log", "inv_sqrt") or (f == "power" and param is not None and param < 0):
        if evals.min() <= eps:
            raise SpectrumOutOfDomain(
                f"{f} needs eigenvalues above the cut {eps:.3e}; got "
                f"{evals.min():.3e}"
            )
    if f == "sqrt":
        fe = np.sqrt(np.maximum(evals, 0.0))
    elif f == "inv_sqrt":
        fe = evals ** -0.5
    elif f == "log":
        fe = np.log(evals)
    elif f == "exp_scaled":
        if param is None:
            raise ValueError("exp_scaled needs a scale parameter")
        fe = np.exp(param * evals)
    else:
        if param is None:
            raise ValueError("power needs an exponent")
        fe = evals ** float(param)
    out, _ = _hermitize((vecs * fe) @ vecs.conj().T)
    return HermitianOperator(out, A.basis)


def build_T(gt: GeneratorSet) -> HermitianOperator:
    """Modular coordinate T = (1/2) log(2 C~) from the tilde triple."""
    if gt.variant != "tilde":
        raise ValueError("T is built from the tilde triple")
    logC = matrix_function(HermitianOperator(2.0 * gt.C, "tilde"), "log")
    return HermitianOperator(0.5 * logC.matrix, "Z")


def build_Th_Tc(g: GeneratorSet):
    """The two logarithmic coordinates T_h = log H and T_c = log C."""
    if g.variant != "plain":
        raise ValueError("T_h, T_c are built from the plain triple")
    Th = matrix_function(HermitianOperator(g.H, "Z"), "log")
    Tc = matrix_function(HermitianOperator(g.C, "Z"), "log")
    return Th, Tc


@dataclass
class UnitaryFlow:
    """One-parameter unitary group exp(i sign t A) from a Hermitian generator."""

    generator: HermitianOperator
    parameter_name: str = "t"
    sign: int = 1
    _eig: tuple | None = None

    def _decomposition(self):
        if self._eig is None:
            self._eig = eigh(self.generator.matrix)
        return self._eig

    def __call__(self, t: float) -> np.ndarray:
        evals, vecs = self._decomposition()
        phases = np.exp(1j * self.sign * t * evals)
        return (vecs * phases) @ vecs.conj().T


def unitary_flow(A: HermitianOperator, t: float, sign: int = 1) -> np.ndarray:
    """exp(i sign t A) via full eigendecomposition; unitary to round-off."""
    return UnitaryFlow(A, sign=sign)(t)


def conjugation_J(v: np.ndarray) -> np.ndarray:
    """Modular conjugation on spectral coefficients: componentwise conjugate.

    The basis functions are real-valued, so J acts as plain complex
    conjugation of the coefficient vector.
    """
    return np.conj(v)


def j_conjugate_matrix(A: np.ndarray) -> np.ndarray:
    """Matrix of J A J for antiunitary J = componentwise conjugation."""
    return np.conj(A)


def translate_generators(g: GeneratorSet, a: float) -> GeneratorSet:
    """Closed-form conjugation by exp(-i a H): (H, D + aH, C + 2aD + a^2 H).

    With [H, D] = iH and [H, C] = 2iD the flow of exp(-i a H) adds aH to D
    and 2aD + a^2 H to C; the positive sign of a pairs with the negative
    flow direction.
    """
    if g.variant != "plain":
        raise ValueError("translation conjugation applies to the plain triple")
    return GeneratorSet(
        H=g.H.copy(),
        D=g.D + a * g.H,
        C=g.C + 2.0 * a * g.D + a * a * g.H,
        spec=g.spec,
        variant="plain",
        build_asymmetry=dict(g.build_asymmetry),
    )


def rotation_generator(g: GeneratorSet) -> HermitianOperator:
    return HermitianOperator(g.rotation(), g.variant)


def interior_block(A: np.ndarray, fraction: float = INTERIOR_FRACTION) -> np.ndarray:
    """Compression onto the first ceil(fraction * M) basis vectors."""
    m = int(np.ceil(fraction * A.shape[0]))
    return A[:m, :m]


def interior_residual(lhs: np.ndarray, rhs: np.ndarray,
                      fraction: float = INTERIOR_FRACTION) -> float:
    """|| P (lhs - rhs) P ||_2 / || P rhs P ||_2 on the interior block."""
    diff = interior_block(lhs - rhs, fraction)
    ref = interior_block(rhs, fraction)
    return float(np.linalg.norm(diff, 2) / np.linalg.norm(ref, 2))


def half_modular_power_apply(D: np.ndarray, v: np.ndarray,
                             guard: float = 1e12) -> np.ndarray:
    """Apply exp(-pi D) (the truncated Delta^{1/2}) to a coefficient vector.

    Works in log space component-by-component in the eigenbasis of D; if the
    reconstructed norm would exceed the guard, the truncation artifact
    dominates and OverflowAbort is raised (the caller reports inconclusive).
    """
    evals, vecs = eigh(D)
    a = vecs.conj().T @ v
    mag = np.abs(a)
    with np.errstate(divide="ignore"):
        logmag = np.where(mag == 0.0, -np.inf, np.log(mag)) - np.pi * evals
    peak = np.max(logmag)
    ref = max(float(np.linalg.norm(v)), 1e-300)
    if peak > np.log(guard * ref):
        raise OverflowAbort(
            f"exp(-pi D) amplifies components to e^{peak:.1f}; truncated "
            "half-modular power is unreliable here"
        )
    scaled = np.where(np.isfinite(logmag), np.exp(logmag), 0.0)
    phases = np.where(mag == 0.0, 0.0, a / np.where(mag == 0.0, 1.0, mag))
    return vecs @ (scaled * phases)
