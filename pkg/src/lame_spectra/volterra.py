"""Isospectral pole dynamics: the first Volterra flow on elliptic
coefficients written through their pole configurations.

A coefficient c(x) = rho(x+eta) rho(x-2eta) / (rho(x) rho(x-eta)) with
rho(x) = prod_j theta1(x - x_j) solves the flow

    dc/dt = -c(x) (c(x + eta) - c(x - eta))

exactly when the poles move by either of the two residue systems

    theta1'(0)/theta1(2 eta) * dx_j/dt
        = prod_{k != j} theta1(D+2eta) theta1(D-eta) / (theta1(D+eta) theta1(D)),
        = prod_{k != j} theta1(D-2eta) theta1(D+eta) / (theta1(D-eta) theta1(D)),

D = x_j - x_k.  Consistency of the two systems is the locus condition

    prod_{k != j} theta1(D+2eta) theta1^2(D-eta)
                / (theta1(D-2eta) theta1^2(D+eta)) = 1,

whose eta -> 0 expansion reproduces the equilibrium condition
sum_{k != j} P'(x_j - x_k) = 0 of the continuum pole dynamics.

The special configuration with rho zeros at -(j+k-l-1)*eta, 1<=j<=k<=l,
collapses c(x) to the elliptic-coefficient gauge of the difference Lame
operator; its pairwise differences sit exactly on the singular set, so it is
a boundary point of the locus and is rejected by the margin guard.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import LocusError, MarginViolationError, PoleProximityError
from .theta import ThetaEvaluator, theta, theta1_prime

__all__ = [
    "PoleConfig",
    "LocusReport",
    "FlowResult",
    "degenerate_poles",
    "c_from_poles",
    "volterra_rhs_c",
    "pole_rhs",
    "locus_residual",
    "integrate_flow",
    "find_locus_config",
]

MARGIN_TOL = 1e-6


@dataclass(frozen=True)
class PoleConfig:
    """M = l(l+1)/2 pole positions at a flow time."""

    xs: tuple
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(complex(x) for x in self.xs))

    @property
    def M(self) -> int:
        return len(self.xs)

    def translated(self, c: complex) -> "PoleConfig":
        return PoleConfig(xs=tuple(x + c for x in self.xs), t=self.t)


@dataclass(frozen=True)
class LocusReport:
    """Per-pole deviation of the consistency products from 1."""

    residuals: np.ndarray
    max_norm: float


@dataclass(frozen=True)
class FlowResult:
    trajectory: list
    locus_gaps: np.ndarray
    margins: np.ndarray


def degenerate_poles(ell: int, ev: ThetaEvaluator) -> PoleConfig:
    """The boundary configuration whose c(x) is the difference-Lame coefficient."""
    xs = [-(j + k - ell - 1) * ev.eta for j in range(1, ell + 1) for k in range(j, ell + 1)]
    return PoleConfig(xs=tuple(xs))


def _rho(cfg: PoleConfig, x: complex, ev: ThetaEvaluator, guarded: bool = False) -> complex:
    out = 1 + 0j
    for xj in cfg.xs:
        f = theta(1, x - xj, ev)
        if guarded and abs(f) < ev.zero_threshold:
            raise PoleProximityError(f"x={x} within tol of the pole lattice of x_j={xj}")
        out *= f
    return out


def c_from_poles(cfg: PoleConfig, x: complex, ev: ThetaEvaluator) -> complex:
    """rho(x+eta) rho(x-2eta) / (rho(x) rho(x-eta)); elliptic in x."""
    den = _rho(cfg, x, ev, guarded=True) * _rho(cfg, x - ev.eta, ev, guarded=True)
    return _rho(cfg, x + ev.eta, ev) * _rho(cfg, x - 2 * ev.eta, ev) / den


def volterra_rhs_c(cfg: PoleConfig, x: complex, ev: ThetaEvaluator) -> complex:
    """-c(x) (c(x+eta) - c(x-eta)), the flow derivative of the coefficient."""
    c0 = c_from_poles(cfg, x, ev)
    return -c0 * (c_from_poles(cfg, x + ev.eta, ev) - c_from_poles(cfg, x - ev.eta, ev))


def check_margins(cfg: PoleConfig, ev: ThetaEvaluator, margin: float = MARGIN_TOL) -> float:
    """Smallest |theta1(x_j - x_k - s)| over pairs and shifts s in {0,+-eta,+-2eta},
    in units of theta1'(0) (so roughly the distance to the singular set).

    Raises MarginViolationError below ``margin``: some factor of the residue
    systems is (numerically) singular there.
    """
    eta = ev.eta
    shifts = (0.0, eta, -eta, 2 * eta, -2 * eta)
    worst = float("inf")
    for j in range(cfg.M):
        for k in range(cfg.M):
            if j == k:
                continue
            d = cfg.xs[j] - cfg.xs[k]
            for s in shifts:
                worst = min(worst, abs(theta(1, d - s, ev)) / abs(ev.theta1_prime0))
    if cfg.M > 1 and worst < margin:
        raise MarginViolationError(
            f"pole differences within {margin:g} of the singular set "
            f"(min |theta1| = {worst:.3e}); boundary of the locus"
        )
    return worst if cfg.M > 1 else float("inf")


def pole_rhs(cfg: PoleConfig, ev: ThetaEvaluator):
    """Velocities from both residue systems, scaled by theta1(2eta)/theta1'(0).

    Returns (v_first, v_second); the flow integrates the first system, the
    second is retained as the on-locus consistency monitor (their gap is the
    locus diagnostic).  Depends only on pairwise differences.
    """
    check_margins(cfg, ev)
    eta = ev.eta
    scale = theta(1, 2 * eta, ev) / theta1_prime(0.0, ev)
    v1 = np.empty(cfg.M, dtype=complex)
    v2 = np.empty(cfg.M, dtype=complex)
    for j in range(cfg.M):
        p1 = 1 + 0j
        p2 = 1 + 0j
        for k in range(cfg.M):
            if k == j:
                continue
            d = cfg.xs[j] - cfg.xs[k]
            td = theta(1, d, ev)
            p1 *= theta(1, d + 2 * eta, ev) * theta(1, d - eta, ev) / (theta(1, d + eta, ev) * td)
            p2 *= theta(1, d - 2 * eta, ev) * theta(1, d + eta, ev) / (theta(1, d - eta, ev) * td)
        v1[j] = scale * p1
        v2[j] = scale * p2
    return v1, v2


def locus_residual(cfg: PoleConfig, ev: ThetaEvaluator) -> LocusReport:
    """Consistency products minus 1, one entry per pole.

    An on-locus configuration has max norm below tolerance; the degenerate
    boundary configuration trips the margin guard instead of reporting.
    """
    check_margins(cfg, ev)
    eta = ev.eta
    res = np.zeros(cfg.M, dtype=complex)
    for j in range(cfg.M):
        p = 1 + 0j
        for k in range(cfg.M):
            if k == j:
                continue
            d = cfg.xs[j] - cfg.xs[k]
            p *= (
                theta(1, d + 2 * eta, ev)
                * theta(1, d - eta, ev) ** 2
                / (theta(1, d - 2 * eta, ev) * theta(1, d + eta, ev) ** 2)
            )
        res[j] = p - 1
    return LocusReport(residuals=res, max_norm=float(np.abs(res).max()) if cfg.M else 0.0)


def integrate_flow(cfg0: PoleConfig, t_end: float, dt: float, ev: ThetaEvaluator,
                   tol_locus: float = 1e-8, gap_factor: float = 100.0) -> FlowResult:
    """Classical fixed-step 4th-order integration of the first residue system.

    Preconditions: margins hold and the two systems agree within
    ``tol_locus`` at cfg0 (otherwise LocusError with the measured gap).
    At every step the locus gap and the margin are recorded; the flow halts
    with a structured error if the gap exceeds ``gap_factor * tol_locus`` or
    a margin is violated.
    """
    v1, v2 = pole_rhs(cfg0, ev)
    gap0 = float(np.abs(v1 - v2).max())
    if cfg0.M > 1 and gap0 > tol_locus * max(1.0, float(np.abs(v1).max())):
        raise LocusError(
            f"configuration is off-locus: residue systems differ by {gap0:.3e}",
            gap=gap0,
        )

    def rhs(xs):
        v, _ = pole_rhs(PoleConfig(xs=tuple(xs)), ev)
        return v

    n_steps = max(1, round(abs(t_end) / abs(dt))) if t_end != 0 else 0
    h = t_end / n_steps if n_steps else 0.0
    xs = np.array(cfg0.xs, dtype=complex)
    t = cfg0.t
    traj = [PoleConfig(xs=tuple(xs), t=t)]
    gaps = [gap0]
    margins = [check_margins(cfg0, ev)]
    for _ in range(n_steps):
        k1 = rhs(xs)
        k2 = rhs(xs + 0.5 * h * k1)
        k3 = rhs(xs + 0.5 * h * k2)
        k4 = rhs(xs + h * k3)
        xs = xs + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        cfg = PoleConfig(xs=tuple(xs), t=t)
        margins.append(check_margins(cfg, ev))
        v1, v2 = pole_rhs(cfg, ev)
        gap = float(np.abs(v1 - v2).max())
        gaps.append(gap)
        traj.append(cfg)
        if cfg.M > 1 and gap > gap_factor * tol_locus * max(1.0, float(np.abs(v1).max())):
            raise LocusError(
                f"locus consistency degraded to {gap:.3e} at t={t:.6g}", gap=gap
            )
    return FlowResult(trajectory=traj, locus_gaps=np.array(gaps), margins=np.array(margins))


def find_locus_config(ell: int, ev: ThetaEvaluator, rng, n_attempts: int = 40,
                      newton_steps: int = 60, target: float = 1e-10):
    """Damped Gauss-Newton search for a non-trivial on-locus configuration.

    Seeds are random perturbations of the degenerate boundary configuration,
    pushed just outside the singular margins.  There is no guarantee of
    success; returns the first configuration with locus residual below
    ``target``, or None if every attempt fails (failures are the caller's to
    report, not to hide).
    """
    base = np.array(degenerate_poles(ell, ev).xs, dtype=complex)

    def recenter(xs):
        # translations are a null direction of the residuals; pin the centroid
        return xs - xs.mean()

    def res_vec(xs):
        rep = locus_residual(PoleConfig(xs=tuple(xs)), ev)
        return rep.residuals

    for _ in range(n_attempts):
        spread = 0.35 + 0.4 * rng.random()
        xs = base + spread * (rng.standard_normal(len(base)) + 1j * rng.standard_normal(len(base)))
        try:
            f = res_vec(xs)
        except (MarginViolationError, PoleProximityError):
            continue
        ok = True
        for _ in range(newton_steps):
            if np.abs(f).max() < target:
                break
            J = np.zeros((len(f), len(xs)), dtype=complex)
            h = 1e-7
            try:
                for c in range(len(xs)):
                    dxs = xs.copy()
                    dxs[c] += h
                    J[:, c] = (res_vec(dxs) - f) / h
            except (MarginViolationError, PoleProximityError):
                ok = False
                break
            step, *_ = np.linalg.lstsq(J, -f, rcond=None)
            lam = 1.0
            base_norm = np.abs(f).max()
            for _ in range(10):
                try:
                    f_try = res_vec(xs + lam * step)
                except (MarginViolationError, PoleProximityError):
                    lam /= 2
                    continue
                if np.abs(f_try).max() < base_norm:
                    xs = recenter(xs + lam * step)
                    f = f_try
                    break
                lam /= 2
            else:
                ok = False
                break
        if ok and np.abs(f).max() < target:
            return PoleConfig(xs=tuple(recenter(xs)))
    return None
