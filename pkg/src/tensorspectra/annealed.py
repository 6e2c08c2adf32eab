"""Large-N annealed integrals and the spiked-tensor transition.

The annealed partition function reduces to a radial integral of
rho^{-1} exp(N f(rho)) with f(rho) = ln rho - rho^2/2 + rho^{2p}/(2 p w^2)
along a tilted ray; its saddle rho_0^2 = T_p(w^{-2}) reproduces the
expected resolvent T_p(w^{-2})/w.

With a rank-one spike of strength b the angle theta between the
integration vector and the spike direction survives the large-N limit:

    f(theta, rho) = ln sin(theta) + ln rho - rho^2/2
                    + (b/(w p)) rho^p cos^p(theta) + rho^{2p}/(2 p w^2)

The saddle equations always admit theta_0 = pi/2 (no-spike saddle) and at
most one extra solution theta_1.  The detection threshold b_t and the
singular locus y_c(b) follow from the scalar function
h(v) = 1 - (p-1) v^{p-2} - b^{-2/(p-2)}/v.

All f values reported here are evaluated from the defining expression
above, never from reduced forms.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import CutContact, DomainError, QuadratureFailure, RootFindFailure
from .fuss_catalan import critical_point, fc_function, support_edge

__all__ = [
    "SaddlePoint",
    "SaddleReport",
    "ThresholdResult",
    "annealed_logZ",
    "annealed_resolvent",
    "spike_f",
    "saddle_equation_residuals",
    "spike_saddles",
    "spike_threshold",
    "singular_locus",
]

QUADRATURE_N_CAP = 10_000


# ----------------------------------------------------------------- radial

def _check_w(p, w):
    w = complex(w)
    if w == 0:
        raise CutContact("w = 0 lies on the singular locus")
    if w.imag == 0 and abs(w.real) <= support_edge(p):
        raise CutContact(
            f"w = {w.real} lies on the real cut [-{support_edge(p)}, {support_edge(p)}]"
        )
    return w


def _tilt_angle(w, p):
    """Ray angle (psi -/+ pi/2)/p per half plane; psi = 0 uses the + boundary."""
    psi = cmath.phase(w)
    return ((psi - math.pi / 2) if psi >= 0 else (psi + math.pi / 2)) / p


def _radial_f(p, w, rho):
    return np.log(rho) - rho**2 / 2 + rho ** (2 * p) / (2 * p * w**2)


def _gl_panel(func, a, b, order):
    x, wts = np.polynomial.legendre.leggauss(order)
    mid, half = (a + b) / 2, (b - a) / 2
    return half * np.sum(wts * func(mid + half * x))


def annealed_logZ(p: int, w: complex, N: int, mode: str = "saddle") -> complex:
    """(1/N) log of the annealed radial integral, constants dropped.

    Only w-derivatives are meaningful.  "saddle" returns f(rho_0) with
    rho_0^2 = T_p(w^{-2}); "quadrature" integrates rho^{-1} e^{N f} at the
    given finite N on a contour homologous to the tilted ray
    exp(i (psi -/+ pi/2)/p) R+ (deformed through the saddle, see below).
    """
    if p < 2:
        raise DomainError("p must be >= 2")
    w = _check_w(p, w)
    if mode == "saddle":
        rho0_sq = fc_function(p, 1 / w**2)
        return _radial_f(p, w, np.sqrt(complex(rho0_sq)))
    if mode != "quadrature":
        raise DomainError(f"unknown mode {mode!r}")
    if not 1 <= N <= QUADRATURE_N_CAP:
        raise DomainError(f"quadrature mode needs 1 <= N <= {QUADRATURE_N_CAP}")

    tilt = cmath.exp(1j * _tilt_angle(w, p))

    # Contour: straight from 0 to the saddle rho_0, then the prescribed
    # tilted direction out to the decay radius.  This is homologous to the
    # bare tilted ray (both ends agree, the swept sector decays) but keeps
    # the integrand's modulus maximal AT the saddle; on the bare ray the
    # value is reproduced only through O(e^{-c N}) phase cancellation,
    # which double precision cannot resolve for N beyond ~100.
    rho0 = np.sqrt(complex(fc_function(p, 1 / w**2)))
    f0 = _radial_f(p, w, rho0)
    sigma = 1.0 / math.sqrt(
        N * max(abs(_d2_real(lambda t: _radial_f(p, w, rho0 + t * tilt), 0.0)), 1e-8)
    )

    decay = (math.log(1e18) + 4.0) / N
    span = sigma
    while (_radial_f(p, w, rho0 + span * tilt).real - f0.real) > -decay:
        span *= 1.25
        if span > 1e3:
            raise QuadratureFailure("integrand failed to decay along the tilted leg")

    def leg1(t):
        # rho = rho0 * t, d(rho)/rho = dt/t
        return np.exp(N * (_radial_f(p, w, rho0 * t) - f0)) / t

    def leg2(s):
        rho = rho0 + tilt * s
        return np.exp(N * (_radial_f(p, w, rho) - f0)) * tilt / rho

    sig_t = min(sigma / abs(rho0), 0.45)
    cuts1 = sorted({0.0, 0.25, 0.5} | {max(1 - c * sig_t, 0.0) for c in (16, 8, 4, 2, 1)} | {1.0})
    cuts2 = sorted({0.0} | {min(c * sigma, span) for c in (1, 2, 4, 8, 16)} | {span})

    prev = None
    total = None
    for order in (32, 64, 128):
        total = 0.0 + 0j
        for a, b in zip(cuts1[:-1], cuts1[1:]):
            if b > a:
                total += _gl_panel(leg1, a, b, order)
        for a, b in zip(cuts2[:-1], cuts2[1:]):
            if b > a:
                total += _gl_panel(leg2, a, b, order)
        if prev is not None and abs(total - prev) <= 1e-13 * abs(total):
            prev = total
            break
        prev = total
    else:
        if abs(total - prev) > 1e-10 * abs(total):
            raise QuadratureFailure("panel refinement did not converge")
    return f0 + np.log(total) / N


def _d2_real(f, r, h=1e-4):
    return (f(r + h).real - 2 * f(r).real + f(r - h).real) / h**2


def annealed_resolvent(p: int, w: complex, N: int = 0, mode: str = "saddle") -> complex:
    """Resolvent 1/w - p d/dw [(1/N) ln <Z>]; the saddle mode is exact large N.

    In quadrature mode the derivative is a central finite difference of
    annealed_logZ, converging to the saddle value like 1/N.
    """
    w = _check_w(p, w)
    if mode == "saddle":
        return fc_function(p, 1 / w**2) / w
    h = 1e-4 * max(abs(w), 1.0)
    lp = annealed_logZ(p, w + h, N, mode="quadrature")
    lm = annealed_logZ(p, w - h, N, mode="quadrature")
    return 1 / w - p * (lp - lm) / (2 * h)


# ------------------------------------------------------------------ spiked

def spike_f(p: int, w: complex, b: float, theta: float, rho_sq: complex) -> complex:
    """f(theta, rho) evaluated from its defining expression."""
    rho = np.sqrt(complex(rho_sq))
    return (
        cmath.log(math.sin(theta))
        + np.log(rho)
        - rho_sq / 2
        + (b / (w * p)) * rho**p * math.cos(theta) ** p
        + complex(rho_sq) ** p / (2 * p * w**2)
    )


def saddle_equation_residuals(p, w, b, theta, rho_sq):
    """Residuals of the two saddle equations at (theta, rho^2).

    r1: (b/w) rho^p cos^p(theta) - cos^2/sin^2;
    r2: 1/sin^2(theta) - rho^2 + rho^{2p}/w^2.
    """
    rho = np.sqrt(complex(rho_sq))
    s, c = math.sin(theta), math.cos(theta)
    r1 = (b / w) * rho**p * c**p - (c / s) ** 2
    r2 = 1 / s**2 - rho_sq + complex(rho_sq) ** p / w**2
    return r1, r2


@dataclass(frozen=True)
class SaddlePoint:
    theta: float
    rho_sq: complex
    f_value: complex


@dataclass(frozen=True)
class SaddleReport:
    """Saddles of the spiked radial-angular integral at one (w, b)."""

    p: int
    w: complex
    b: float
    saddles: tuple
    dominant_index: int
    theta1_error: str | None = None

    @property
    def dominant(self) -> SaddlePoint:
        return self.saddles[self.dominant_index]


def _rho_sq_on_curve(p, w, s):
    """rho^2(theta) from the second saddle equation, s = sin^2(theta)."""
    u = s ** (1 - p) / w**2
    return fc_function(p, u) / s


def _theta1_objective(p, w, b, s):
    rho_sq = _rho_sq_on_curve(p, w, s)
    val = (b / w) * complex(rho_sq) ** (p / 2) * (1 - s) ** ((p - 2) / 2) * s - 1.0
    return val.real if abs(val.imag) < 1e-9 else math.nan


def spike_saddles(p: int, w: complex, b: float, n_grid: int = 400) -> SaddleReport:
    """Saddle points of the spiked model at coupling w and SNR b.

    Always contains the theta_0 = pi/2 saddle with rho_0^2 = T_p(w^{-2});
    searches (theta_min, pi/2) for the single extra saddle theta_1 when w
    is real.  The dominant saddle maximizes Re f, with f evaluated from
    its defining expression.
    """
    if p < 3:
        raise DomainError("the spiked model requires p >= 3")
    if b < 0:
        raise DomainError("b must be >= 0")
    w = _check_w(p, w)

    rho0_sq = fc_function(p, 1 / w**2)
    saddles = [SaddlePoint(math.pi / 2, rho0_sq, spike_f(p, w, b, math.pi / 2, rho0_sq))]
    theta1_error = None

    if b > 0:
        if w.imag != 0:
            theta1_error = "theta_1 search implemented for real w only"
        else:
            y = w.real
            s_min = (critical_point(p) * y * y) ** (-1.0 / (p - 1))
            try:
                s1 = _find_theta1(p, y, b, s_min, n_grid)
            except RootFindFailure as exc:
                theta1_error = str(exc)
                s1 = None
            if s1 is not None:
                theta1 = math.asin(math.sqrt(s1))
                rho1_sq = _rho_sq_on_curve(p, y, s1)
                r1, r2 = saddle_equation_residuals(p, y, b, theta1, rho1_sq)
                if max(abs(r1), abs(r2)) > 1e-8:
                    theta1_error = f"theta_1 candidate rejected (residual {max(abs(r1), abs(r2)):.2e})"
                else:
                    saddles.append(
                        SaddlePoint(theta1, rho1_sq, spike_f(p, w, b, theta1, rho1_sq))
                    )

    dominant = max(range(len(saddles)), key=lambda i: saddles[i].f_value.real)
    return SaddleReport(p, w, float(b), tuple(saddles), dominant, theta1_error)


def _find_theta1(p, y, b, s_min, n_grid):
    """Root of the reduced scalar equation in s = sin^2(theta).

    Brackets on (s_min, 1); the boundary s = s_min (where the Fuss-Catalan
    argument hits its branch point) is itself accepted when the equation
    vanishes there, which happens exactly at the detection threshold.
    """
    g_min = _theta1_objective(p, y, b, s_min)
    if math.isfinite(g_min) and abs(g_min) < 1e-10:
        return s_min
    # cluster grid points toward the s_min endpoint where T_p varies fastest
    t = np.linspace(0.0, 1.0, n_grid)
    grid = s_min + (1.0 - 1e-9 - s_min) * t**2
    vals = np.array([_theta1_objective(p, y, b, s) for s in grid])
    finite = np.isfinite(vals)
    sign_change = None
    for i in range(len(grid) - 1):
        if finite[i] and finite[i + 1] and vals[i] * vals[i + 1] < 0:
            sign_change = (grid[i], grid[i + 1])
            break
    if sign_change is None:
        raise RootFindFailure(
            f"no theta_1 bracket for p={p}, w={y}, b={b} (no real extra saddle)"
        )
    return brentq(
        lambda s: _theta1_objective(p, y, b, s), *sign_change, xtol=1e-15, rtol=1e-15
    )


# --------------------------------------------------------------- threshold

def h_function(p: int, b: float, v: float) -> float:
    """h(v) = 1 - (p-1) v^{p-2} - b^{-2/(p-2)} / v; its roots locate theta_1."""
    return 1 - (p - 1) * v ** (p - 2) - b ** (-2 / (p - 2)) / v


def _h_peak(p, b):
    """Location v_m of the maximum of h and the value h(v_m)."""
    v_m = ((p - 1) * (p - 2)) ** (-1 / (p - 1)) * b ** (-2 / ((p - 1) * (p - 2)))
    return v_m, h_function(p, b, v_m)


@dataclass(frozen=True)
class ThresholdResult:
    """Detection threshold data: b_t and the singular points on both sides."""

    p: int
    b_t: float
    y_c_below: float
    y_c_at: float
    h_root: float


def spike_threshold(p: int) -> ThresholdResult:
    """Detection threshold b_t, computed analytically and confirmed by bisection.

    b_t^2 = (p-1)^p / (p-2)^{p-2}; it is the smallest b at which
    max_v h(v) reaches zero, i.e. h develops real roots.  The double root
    v_m satisfies h(v_m) = h'(v_m) = 0 there.
    """
    if p < 3:
        raise DomainError("the detection threshold requires p >= 3")
    analytic = math.sqrt((p - 1) ** p / (p - 2) ** (p - 2))

    lo, hi = 1e-3, 10.0 * analytic
    if _h_peak(p, lo)[1] >= 0 or _h_peak(p, hi)[1] < 0:
        raise RootFindFailure("threshold bisection bracket invalid")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _h_peak(p, mid)[1] >= 0:
            hi = mid
        else:
            lo = mid
    bisected = 0.5 * (lo + hi)
    if abs(bisected - analytic) > 1e-8 * analytic:
        raise RootFindFailure(
            f"bisected threshold {bisected} disagrees with analytic {analytic}"
        )

    v_m, h_at = _h_peak(p, analytic)
    dh = (h_function(p, analytic, v_m * (1 + 1e-6)) - h_function(p, analytic, v_m * (1 - 1e-6))) / (
        2e-6 * v_m
    )
    if abs(h_at) > 1e-10 or abs(dh) > 1e-6:
        raise RootFindFailure("double-root conditions violated at the threshold")
    return ThresholdResult(
        p=p,
        b_t=analytic,
        y_c_below=support_edge(p),
        y_c_at=p ** (p / 2),
        h_root=v_m,
    )


def _y_c_from_root(p, v):
    # invert v = y^{-2/((p-1)(p-2))} (p-1)^{-2/(p-2)} p^{p/((p-1)(p-2))}
    D = (p - 1) * (p - 2)
    return v ** (-D / 2) * (p - 1) ** (-(p - 1)) * p ** (p / 2)


def singular_locus(p: int, b: float, verify_dominance: bool = True) -> float:
    """Largest non-removable singularity y_c of the spiked resolvent.

    Below the threshold the locus is the no-spike edge
    p^{p/2}/(p-1)^{(p-1)/2}; at and above b_t the smaller positive root of
    h maps to y_c, which jumps to p^{p/2} at b_t and grows with b.  Saddle
    dominance by Re f is checked at the result; a failure is recorded as a
    warning (the locus from root continuity is returned regardless).
    """
    if p < 3:
        raise DomainError("the spiked model requires p >= 3")
    if b < 0:
        raise DomainError("b must be >= 0")
    threshold = spike_threshold(p)
    if b < threshold.b_t * (1 - 1e-12):
        return threshold.y_c_below
    if abs(b - threshold.b_t) <= 1e-12 * threshold.b_t:
        return threshold.y_c_at

    v_m, h_at = _h_peak(p, b)
    if h_at < 0:
        raise RootFindFailure("h has no real roots above threshold?")
    lo = v_m
    while h_function(p, b, lo) > 0:
        lo /= 2
        if lo < 1e-300:
            raise RootFindFailure("failed to bracket the lower root of h")
    v_minus = brentq(lambda v: h_function(p, b, v), lo, v_m, xtol=1e-300, rtol=1e-15)
    y_c = _y_c_from_root(p, v_minus)

    if verify_dominance:
        if not _theta1_dominant_near(p, b, y_c):
            hi = v_m
            while h_function(p, b, hi) > 0:
                hi *= 2
                if hi > 1e300:
                    raise RootFindFailure("failed to bracket the upper root of h")
            v_plus = brentq(lambda v: h_function(p, b, v), v_m, hi, xtol=1e-300, rtol=1e-15)
            y_other = _y_c_from_root(p, v_plus)
            if _theta1_dominant_near(p, b, y_other):
                warnings.warn(
                    "continuity-selected root fails Re f dominance; the other "
                    f"h-root ({y_other}) passes and was returned instead",
                    stacklevel=2,
                )
                return y_other
            warnings.warn(
                "theta_1 saddle is subdominant by direct Re f at the singular "
                "locus for both h-roots; returning the continuity-selected root "
                f"y_c={y_c}",
                stacklevel=2,
            )
    return y_c


def _theta1_dominant_near(p, b, y_c, rel_offset=1e-3):
    # the extra saddle is real for y <= y_c (its Fuss-Catalan argument
    # reaches the branch point exactly at y_c), so probe just below
    try:
        report = spike_saddles(p, y_c * (1 - rel_offset), b)
    except (CutContact, DomainError):
        return False
    if len(report.saddles) < 2:
        return False
    return report.dominant_index == 1
