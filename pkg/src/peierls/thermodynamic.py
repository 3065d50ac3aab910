"""The infinite-ring limit: quadrature free energy, theta_c(mu), bifurcation.

The mode sum of the finite ring becomes an integral over [0, 2pi]; by
symmetry every integral here is taken over [0, pi/2]. The critical
temperature solves the same two-equation system as the finite case, with
the strictly increasing J(x) obtained by subtracting the equations. Around
theta_c the dimerization amplitude bifurcates like sqrt(theta_c - theta),
with a coefficient assembled from three h'' moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .finite_chain import CriticalPoint, DimerState, ModelParams, _minimize_dimer
from .kernels import h_eval, h_theta
from .numerics import Bracket, Tolerance, integrate_adaptive, solve_increasing

__all__ = [
    "BifurcationData",
    "AsymptoticConstants",
    "g_thermo",
    "minimize_dimer_thermo",
    "J_thermo",
    "theta_critical_thermo",
    "asymptotic_constants",
    "bifurcation_data",
    "phase_diagram",
]

_HALF_PI = math.pi / 2
# quadrature accuracy for all integrals in this module
_QUAD_TOL = Tolerance(abs_tol=1e-12, rel_tol=1e-12, max_iter=4000)
# c1 tail: (tanh u - 1)/u ~ -2 e^{-2u}, below 1e-30 beyond u = 40
_C1_CUTOFF = 40.0


def _tanh_ratio(x: float, c: float) -> float:
    # tanh(x c)/c, series for small cos to dodge the 0/0 at the band center
    if c < 1e-6:
        u = x * c
        u2 = u * u
        return x * (1.0 - u2 / 3.0 + 2.0 * u2 * u2 / 15.0)
    return math.tanh(x * c) / c


def _tanh_integral(f, x: float, tol) -> float:
    """Integrate f over [0, pi/2] with a split at the tanh crossover.

    tanh(x cos s) bends within ~1/x of s = pi/2; for large x that layer
    hides between the outermost quadrature node and the endpoint where the
    error estimator cannot see it, so the interval is split just outside.
    """
    if x > 16.0:
        cut = _HALF_PI - 8.0 / x
        return (integrate_adaptive(f, 0.0, cut, tol)
                + integrate_adaptive(f, cut, _HALF_PI, tol))
    return integrate_adaptive(f, 0.0, _HALF_PI, tol)


def g_thermo(s: DimerState, p: ModelParams, tol: Tolerance | None = None) -> float:
    """Energy per atom of the infinite ring at theta > 0."""
    if p.theta <= 0:
        raise ValueError("g_thermo needs theta > 0")
    return _g_thermo_raw(s.W, s.delta, p.mu, p.theta, tol or _QUAD_TOL)


def _g_thermo_raw(W, delta, mu, theta, tol):
    w2, d2 = 4.0 * W * W, 4.0 * delta * delta
    # the kernel bends where the band argument crosses theta^2, within
    # ~theta/W of s = pi/2; same endpoint blind spot as the tanh integrals
    integral = _tanh_integral(
        lambda u: h_theta(w2 * math.cos(u) ** 2 + d2 * math.sin(u) ** 2, theta),
        W / theta if W > 0 else 0.0, tol)
    return 0.5 * mu * ((W - 1.0) ** 2 + delta * delta) - (2.0 / math.pi) * integral


def minimize_dimer_thermo(p: ModelParams, init=None,
                          tol: Tolerance | None = None):
    """Minimize g_thermo over W, delta >= 0; delta < 1e-8 snaps to 0.

    ``init`` seeds the search (useful for continuation along a temperature
    sweep). Returns (DimerState, value).
    """
    if p.theta <= 0:
        raise ValueError("minimize_dimer_thermo needs theta > 0")
    g2 = lambda W, d: _g_thermo_raw(W, d, p.mu, p.theta, _QUAD_TOL)
    W, delta, val = _minimize_dimer(g2, 1.0 + 4.0 / (math.pi * p.mu), init, tol)
    return DimerState(W=W, delta=delta), val


def J_thermo(x: float, tol: Tolerance | None = None) -> float:
    """-(4/pi) int_0^{pi/2} tanh(x cos s) cos(2s)/cos(s) ds.

    Strictly increasing from 0 to infinity; the apparent s = pi/2 blowup
    cancels against tanh and is evaluated through the series form.
    """
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0:
        return 0.0
    val = _tanh_integral(
        lambda s: _tanh_ratio(x, math.cos(s)) * math.cos(2.0 * s), x, tol or _QUAD_TOL)
    return -4.0 / math.pi * val


def _first_integral(x: float, tol) -> float:
    # (4/pi) int tanh(x cos s) cos s ds
    return 4.0 / math.pi * _tanh_integral(
        lambda s: math.tanh(x * math.cos(s)) * math.cos(s), x, tol)


def _second_integral(x: float, tol) -> float:
    # (4/pi) int tanh(x cos s) sin^2 s / cos s ds
    return 4.0 / math.pi * _tanh_integral(
        lambda s: _tanh_ratio(x, math.cos(s)) * math.sin(s) ** 2, x, tol)


def theta_critical_thermo(mu: float, tol: Tolerance | None = None) -> CriticalPoint:
    """Critical temperature of the infinite ring; positive for every mu.

    x inverts J_thermo at mu (the bracket doubles until it straddles,
    guaranteed to end since J is onto [0, inf)); the cos^2 equation yields
    theta_c = [mu + (4/pi) int tanh(x cos s) cos s ds] / (mu x), and the
    sin^2 equation is asserted to 1e-8.
    """
    if mu <= 0:
        raise ValueError(f"stiffness must be positive, got {mu}")
    if mu > 800:
        # theta_c ~ e^{-pi mu/4} underflows double precision near mu ~ 900
        raise ValueError(f"stiffness {mu} too large to resolve in double precision")
    qtol = _QUAD_TOL if tol is None else tol
    hi = max(1.0, mu)
    while J_thermo(hi, qtol) < mu:
        hi *= 2.0
    x = solve_increasing(lambda z: J_thermo(z, qtol), mu, Bracket(0.0, hi),
                         Tolerance(abs_tol=1e-12, rel_tol=0.0, max_iter=300))
    theta = (mu + _first_integral(x, qtol)) / (mu * x)
    W = x * theta
    residual = mu * W - _second_integral(x, qtol)
    if abs(residual) > 1e-8:
        raise RuntimeError(
            f"critical-point equations inconsistent (residual {residual:.3e})")
    return CriticalPoint(x=x, W_star=W, theta_c=theta)


@dataclass(frozen=True)
class AsymptoticConstants:
    """c1, c2 = c1 + ln 2 - 1, and the large-mu prefactor C = e^{c2 - 1}."""

    c1: float
    c2: float
    C_prefactor: float


def asymptotic_constants(tol: Tolerance | None = None) -> AsymptoticConstants:
    """Constants of the large-stiffness law theta_c ~ C e^{-pi mu / 4}."""
    qtol = tol or _QUAD_TOL
    c1 = (integrate_adaptive(lambda u: math.tanh(u) / u if u > 0 else 1.0,
                             0.0, 1.0, qtol)
          + integrate_adaptive(lambda u: (math.tanh(u) - 1.0) / u,
                               1.0, _C1_CUTOFF, qtol))
    c2 = c1 + math.log(2.0) - 1.0
    return AsymptoticConstants(c1=c1, c2=c2, C_prefactor=math.exp(c2 - 1.0))


@dataclass(frozen=True)
class BifurcationData:
    """h'' moments and derived slope of delta^2 at the critical point.

    A, B, C_int are the cos^4, sin^2 cos^2 and sin^4 moments of
    h''(W*^2 cos^2 s / theta_c^2); all negative by concavity, with
    B^2 <= A * C_int (Cauchy-Schwarz). coeff = sqrt(-delta_prime) is the
    amplitude in delta ~ coeff * sqrt(theta_c - theta).
    """

    A: float
    B: float
    C_int: float
    det_J: float
    delta_prime: float
    coeff: float

    def __post_init__(self):
        if not (self.A < 0 and self.B < 0 and self.C_int < 0):
            raise ValueError("the h'' moments must all be negative")
        if self.B * self.B > self.A * self.C_int:
            raise ValueError("Cauchy-Schwarz violated: B^2 > A*C_int")
        if self.det_J <= 0:
            raise ValueError(f"Jacobian determinant must be positive, got {self.det_J}")
        if self.delta_prime >= 0:
            raise ValueError(f"d(delta^2)/d(theta) must be negative, got {self.delta_prime}")


def bifurcation_data(mu: float, tol: Tolerance | None = None) -> BifurcationData:
    """Second-order data of the transition at theta_c(mu).

    det J <= 0 or delta_prime >= 0 would contradict the structure of the
    problem and raise as an internal-consistency failure.
    """
    qtol = tol or _QUAD_TOL
    cp = theta_critical_thermo(mu, tol)
    ratio = cp.W_star / cp.theta_c

    def moment(weight):
        # h'' transitions on the same cos s ~ 1/x layer as the tanh kernels
        return 4.0 / math.pi * _tanh_integral(
            lambda s: h_eval((ratio * math.cos(s)) ** 2).h_second * weight(s),
            ratio, qtol)

    A = moment(lambda s: math.cos(s) ** 4)
    B = moment(lambda s: (math.sin(s) * math.cos(s)) ** 2)
    C_int = moment(lambda s: math.sin(s) ** 4)

    W, th = cp.W_star, cp.theta_c
    det_J = -mu / (W * W * th) * C_int + 2.0 * W / th ** 4 * (A * C_int - B * B)
    delta_prime = (-1.0 / det_J) * (2.0 * W * mu / th ** 2) * (
        (B - A) + mu * th ** 3 / (2.0 * W ** 3))
    return BifurcationData(A=A, B=B, C_int=C_int, det_J=det_J,
                           delta_prime=delta_prime,
                           coeff=math.sqrt(-delta_prime))


def phase_diagram(mu_grid, tol: Tolerance | None = None):
    """theta_c over a stiffness grid, as (mu, theta_c) pairs.

    Per-point failures are recorded as NaN instead of aborting the sweep.
    Successful points are checked to be decreasing in mu.
    """
    rows = []
    for mu in mu_grid:
        try:
            rows.append((float(mu), theta_critical_thermo(float(mu), tol).theta_c))
        except (ValueError, RuntimeError):
            rows.append((float(mu), math.nan))
    good = [(m, t) for m, t in rows if not math.isnan(t)]
    for (m0, t0), (m1, t1) in zip(good, good[1:]):
        if m1 > m0 and not t1 < t0:
            raise RuntimeError(
                f"theta_c failed to decrease between mu={m0} and mu={m1}")
    return rows
