"""The difference Lame operator, its double-Bloch eigenfunctions, and the
commuting operator that closes the hyperelliptic relation.

Two gauges of the same operator act on functions of a complex variable:

    (L Psi)(x)  = theta1(x - l*eta)/theta1(x) * Psi(x + eta)
                + theta1(x + l*eta)/theta1(x) * Psi(x - eta)

    (Lt psi)(x) = psi(x + eta)
                + theta1(x + l*eta) theta1(x - (l+1)*eta)
                  / (theta1(x) theta1(x - eta)) * psi(x - eta)

related by Lt = f^-1 L f with f(x) = prod_{j=1..l} theta1(x - j*eta).

Eigenfunctions are sought in the double-Bloch class built from the
elementary kernel Phi(x, zeta) = theta1(zeta + x)/(theta1(x) theta1(zeta)):

    psi(x) = K^(x/eta) * sum_{j=1..l} s_j Phi(x - j*eta, zeta)

Matching residues of (Lt - E) psi at x = 0..l*eta gives an (l+1) x l linear
system M s = 0; the two determinants obtained by deleting the first or the
second row cut out the spectral curve in (zeta, K, E).
"""

import cmath
from dataclasses import dataclass, field

import numpy as np

from .enumbers import ebracket, ebinom
from .errors import ConsistencyError, PoleProximityError, TorsionEtaError
from .theta import ThetaEvaluator, theta
from .util import halton, is_close_to_lattice

__all__ = [
    "LameContext",
    "CurvePoint",
    "BlochCoeffs",
    "phi",
    "apply_L",
    "apply_Ltilde",
    "gauge_factor",
    "build_M",
    "residual",
    "scaled_residual",
    "solve_bloch_coeffs",
    "build_psi",
    "build_Psi",
    "apply_W",
    "w_eigenvalue",
]


@dataclass(frozen=True)
class LameContext:
    """Degree l plus a theta evaluator; prefills the bracket cache.

    N = l(l+1)/2 is the genus-fixing count that recurs in every curve
    formula.  Construction fails with TorsionEtaError if any bracket
    [1..2l+2] vanishes, since all residue formulas divide by them.
    """

    ell: int
    ev: ThetaEvaluator

    def __post_init__(self):
        if self.ell < 0:
            raise ValueError(f"ell must be a non-negative integer, got {self.ell}")
        for j in range(1, 2 * self.ell + 3):
            val = ebracket(j, self.ev)
            if abs(val) < self.ev.tol:
                raise TorsionEtaError(f"[{j}] ~ 0: eta={self.ev.eta} is a torsion point")

    @property
    def N(self) -> int:
        return self.ell * (self.ell + 1) // 2


@dataclass(frozen=True)
class CurvePoint:
    """Spectral parameters (zeta, K, E) with derived Bloch multipliers.

    K^(x/eta) always uses the principal logarithm of K; the multipliers
    B1 = K^(1/eta) and Btau = K^(tau/eta) e^(-2i*pi*zeta) inherit it.
    """

    zeta: complex
    K: complex
    E: complex

    def __post_init__(self):
        if self.K == 0:
            raise ValueError("K must be nonzero")

    @property
    def log_K(self) -> complex:
        return cmath.log(self.K)

    def B1(self, ev: ThetaEvaluator) -> complex:
        return cmath.exp(self.log_K / ev.eta)

    def Btau(self, ev: ThetaEvaluator) -> complex:
        return cmath.exp(self.log_K * ev.tau / ev.eta) * cmath.exp(-2j * cmath.pi * self.zeta)


@dataclass(frozen=True)
class BlochCoeffs:
    """Null vector s of the residue system, largest entry normalized to 1."""

    s: np.ndarray
    smallest_sv: float = 0.0
    second_sv: float = field(default=float("inf"))


def _t1(x, ev):
    return theta(1, x, ev)


def _guarded_t1(x, ev):
    val = theta(1, x, ev)
    if np.min(np.abs(val)) < ev.zero_threshold:
        raise PoleProximityError(f"theta1({x}) within tol of zero")
    return val


def phi(x: complex, zeta: complex, ev: ThetaEvaluator) -> complex:
    """Elementary double-Bloch kernel theta1(zeta+x)/(theta1(x) theta1(zeta)).

    Periodic in x -> x+1, picks up exp(-2i*pi*zeta) under x -> x+tau, and
    has a single simple pole (residue 1/theta1'(0)) per lattice cell.
    """
    return _t1(zeta + x, ev) / (_guarded_t1(x, ev) * _guarded_t1(zeta, ev))


def apply_L(psi, x: complex, ctx: LameContext) -> complex:
    """Act with the symmetric-gauge operator on a callable psi at x."""
    ev = ctx.ev
    den = _guarded_t1(x, ev)
    a = _t1(x - ctx.ell * ev.eta, ev) / den
    c = _t1(x + ctx.ell * ev.eta, ev) / den
    return a * psi(x + ev.eta) + c * psi(x - ev.eta)


def apply_Ltilde(psi, x: complex, ctx: LameContext) -> complex:
    """Act with the elliptic-coefficient gauge on a callable psi at x."""
    ev = ctx.ev
    l = ctx.ell
    den = _guarded_t1(x, ev) * _guarded_t1(x - ev.eta, ev)
    coeff = _t1(x + l * ev.eta, ev) * _t1(x - (l + 1) * ev.eta, ev) / den
    return psi(x + ev.eta) + coeff * psi(x - ev.eta)


def gauge_factor(x: complex, ctx: LameContext) -> complex:
    """f(x) = prod_{j=1..l} theta1(x - j*eta), intertwining the two gauges."""
    ev = ctx.ev
    out = 1 + 0j
    for j in range(1, ctx.ell + 1):
        out *= _t1(x - j * ev.eta, ev)
    return out


def _build_M_with_magnitudes(pt: CurvePoint, ctx: LameContext):
    ev = ctx.ev
    l = ctx.ell
    eta = ev.eta
    t1z = _guarded_t1(pt.zeta, ev)
    t1e = _guarded_t1(eta, ev)
    Kinv = 1.0 / pt.K
    M = np.zeros((l + 1, l), dtype=complex)
    mag = np.zeros((l + 1, l))
    for j in range(1, l + 1):
        M[j - 1, j - 1] += pt.K
        mag[j - 1, j - 1] += abs(pt.K)
        M[j, j - 1] += -pt.E
        mag[j, j - 1] += abs(pt.E)
        if j + 1 <= l:
            num = _t1((j + l + 1) * eta, ev) * _t1((j - l) * eta, ev)
            den = _guarded_t1((j + 1) * eta, ev) * _guarded_t1(j * eta, ev)
            M[j + 1, j - 1] += Kinv * num / den
            mag[j + 1, j - 1] += abs(Kinv * num / den)
        for i in (0, 1):
            sgn = 1.0 if i == 0 else -1.0
            num = _t1(pt.zeta - (j - i + 1) * eta, ev) * _t1((i + l) * eta, ev) * _t1((i - l - 1) * eta, ev)
            den = t1z * t1e * _guarded_t1((j - i + 1) * eta, ev)
            M[i, j - 1] += sgn * Kinv * num / den
            mag[i, j - 1] += abs(Kinv * num / den)
    return M, mag


def build_M(pt: CurvePoint, ctx: LameContext) -> np.ndarray:
    """The (l+1) x l residue-matching matrix at (zeta, K, E).

    Rows i = 0..l, columns j = 1..l:

        M_ij = K d(i, j-1) - E d(i, j)
             + K^-1 theta1((j+l+1) eta) theta1((j-l) eta)
                    / (theta1((j+1) eta) theta1(j eta)) * d(i, j+1)
             + K^-1 theta1(zeta - (j-i+1) eta)/theta1(zeta)
                    * theta1((i+l) eta) theta1((i-l-1) eta)
                    / (theta1(eta) theta1((j-i+1) eta)) * (d(i,0) - d(i,1))

    Rows i >= 2 are banded; rows 0 and 1 carry the dense correction pair.
    """
    M, _ = _build_M_with_magnitudes(pt, ctx)
    return M


def _hadamard_magnitude(mag: np.ndarray) -> float:
    norms = np.linalg.norm(mag, axis=1)
    return float(np.prod(np.maximum(norms, 1e-300)))


def residual(pt: CurvePoint, ctx: LameContext):
    """(det M0, det M1): determinants after deleting row 0 and row 1.

    Both vanish exactly when (zeta, K, E) lies on the spectral curve.
    """
    M = build_M(pt, ctx)
    d0 = complex(np.linalg.det(np.delete(M, 0, axis=0)))
    d1 = complex(np.linalg.det(np.delete(M, 1, axis=0)))
    return d0, d1


def scaled_residual(pt: CurvePoint, ctx: LameContext):
    """Residual determinants in units of their term-magnitude Hadamard bounds.

    The bounds come from the entry-wise sums of term magnitudes, which never
    cancel on the curve, so the scaled values measure how far below the
    conditioning floor the determinants sit.
    """
    M, mag = _build_M_with_magnitudes(pt, ctx)
    r0 = abs(np.linalg.det(np.delete(M, 0, axis=0))) / _hadamard_magnitude(np.delete(mag, 0, axis=0))
    r1 = abs(np.linalg.det(np.delete(M, 1, axis=0))) / _hadamard_magnitude(np.delete(mag, 1, axis=0))
    return r0, r1


def solve_bloch_coeffs(pt: CurvePoint, ctx: LameContext, rank_tol: float = 1e-6) -> BlochCoeffs:
    """Null vector of M via the smallest singular direction.

    Raises ConsistencyError if M has full numerical rank l (the point is not
    on the curve); rank deficiency is judged against the term-magnitude
    scale of the matrix, which survives the on-curve cancellations.  The
    returned vector is normalized so its largest entry is exactly 1; the gap
    to the second singular value certifies uniqueness.
    """
    M, mag = _build_M_with_magnitudes(pt, ctx)
    _, sv, vh = np.linalg.svd(M)
    scale = float(np.linalg.norm(mag, axis=1).max())
    if sv[-1] > rank_tol * scale:
        raise ConsistencyError(
            f"no null space: smallest singular value {sv[-1]:.3e} vs scale {scale:.3e}"
        )
    if ctx.ell == 1:
        return BlochCoeffs(s=np.array([1.0 + 0j]), smallest_sv=float(sv[-1]))
    s = vh[-1].conj()
    pivot = np.argmax(np.abs(s))
    s = s / s[pivot]
    return BlochCoeffs(s=s, smallest_sv=float(sv[-1]), second_sv=float(sv[-2]))


def build_psi(pt: CurvePoint, coeffs: BlochCoeffs, x: complex, ctx: LameContext) -> complex:
    """The meromorphic eigenfunction K^(x/eta) sum_j s_j Phi(x - j*eta, zeta)."""
    ev = ctx.ev
    out = 0j
    for j in range(1, ctx.ell + 1):
        out += coeffs.s[j - 1] * phi(x - j * ev.eta, pt.zeta, ev)
    return cmath.exp(pt.log_K * x / ev.eta) * out


def build_Psi(pt: CurvePoint, coeffs: BlochCoeffs, x: complex, ctx: LameContext) -> complex:
    """psi(x) * prod_{j=1..l} theta1(x - j*eta), evaluated in its entire form.

    The poles of psi cancel against the product zeros term by term, so each
    summand below is entire and the value is finite for every x:

        Psi(x) = K^(x/eta) sum_m s_m theta1(zeta + x - m*eta)/theta1(zeta)
                 * prod_{k != m} theta1(x - k*eta)
    """
    ev = ctx.ev
    t1z = _guarded_t1(pt.zeta, ev)
    out = 0j
    for m in range(1, ctx.ell + 1):
        prod = 1 + 0j
        for k in range(1, ctx.ell + 1):
            if k != m:
                prod *= _t1(x - k * ev.eta, ev)
        out += coeffs.s[m - 1] * (_t1(pt.zeta + x - m * ev.eta, ev) / t1z) * prod
    return cmath.exp(pt.log_K * x / ev.eta) * out


def apply_W(Psi, x: complex, ctx: LameContext) -> complex:
    """Act with the commuting operator of order 2l+1 on a callable Psi.

    W = phi_l(x) sum_{k=0}^{2l+1} (-1)^k ebinom(2l+1, k)
        theta1(x + (2l-2k+1) eta)
        / (prod_{j=0}^{2l-k+1} theta1(x + j eta) prod_{j'=1}^{k} theta1(x - j' eta))
        * shift by (2l-2k+1) eta,

    with phi_l(x) = prod_{j=0}^{2l} theta1(x + (j-l) eta).  Its eigenvalue w
    on a joint eigenfunction closes w^2 = prod_i (E^2 - E_i^2).
    """
    ev = ctx.ev
    l = ctx.ell
    eta = ev.eta
    pref = 1 + 0j
    for j in range(0, 2 * l + 1):
        pref *= _t1(x + (j - l) * eta, ev)
    out = 0j
    for k in range(0, 2 * l + 2):
        den = 1 + 0j
        for j in range(0, 2 * l - k + 2):
            den *= _guarded_t1(x + j * eta, ev)
        for jp in range(1, k + 1):
            den *= _guarded_t1(x - jp * eta, ev)
        shift = (2 * l - 2 * k + 1) * eta
        term = (-1) ** k * ebinom(2 * l + 1, k, ev) * _t1(x + shift, ev) / den
        out += term * Psi(x + shift)
    return pref * out


def _sample_points(ctx: LameContext, n: int, avoid_margin: float = 1e-3):
    """Halton points in a window, away from every theta1 zero the W formula hits."""
    ev = ctx.ev
    l = ctx.ell
    shifts = [j * ev.eta for j in range(-(2 * l + 2), 2 * l + 3)]
    pts = []
    i = 0
    re = halton(200, 2)
    im = halton(200, 3)
    while len(pts) < n and i < 200:
        x = complex(0.05 + 0.9 * re[i], 0.02 + 0.25 * im[i])
        i += 1
        if any(is_close_to_lattice(x + s, ev.tau, avoid_margin) for s in shifts):
            continue
        pts.append(x)
    if len(pts) < n:
        raise ConsistencyError("could not find enough pole-free sample points")
    return pts


def w_eigenvalue(pt: CurvePoint, coeffs: BlochCoeffs, ctx: LameContext,
                 n_samples: int = 10, rel_tol: float = 1e-7) -> complex:
    """Eigenvalue w with W Psi = w Psi, as a consistency-checked ratio.

    Evaluates W Psi / Psi at ``n_samples`` Halton-sampled points away from
    the theta zeros, rejects outliers beyond 5x the median deviation, and
    requires the surviving spread to be below ``rel_tol`` relative; a larger
    spread means Psi is not a joint eigenfunction and raises
    ConsistencyError.
    """
    xs = _sample_points(ctx, n_samples)
    ratios = []
    for x in xs:
        denom = build_Psi(pt, coeffs, x, ctx)
        if abs(denom) < ctx.ev.tol:
            continue
        ratios.append(apply_W(lambda y: build_Psi(pt, coeffs, y, ctx), x, ctx) / denom)
    if len(ratios) < 3:
        raise ConsistencyError("too few usable sample points for the W ratio")
    arr = np.array(ratios)
    med = complex(np.median(arr.real), np.median(arr.imag))
    dev = np.abs(arr - med)
    cut = 5 * max(float(np.median(dev)), ctx.ev.tol * max(abs(med), 1.0))
    keep = arr[dev <= cut]
    if len(keep) < 3:
        keep = arr
    w = complex(keep.mean())
    spread = float(np.max(np.abs(keep - w)))
    if spread > rel_tol * max(abs(w), 1.0):
        raise ConsistencyError(
            f"W ratio spread {spread:.3e} exceeds {rel_tol:.1e} * |w|: "
            "not a joint eigenfunction"
        )
    return w
