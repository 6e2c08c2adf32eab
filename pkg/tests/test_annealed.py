import math
import warnings

import numpy as np
import pytest

from tensorspectra.annealed import (
    annealed_logZ,
    annealed_resolvent,
    h_function,
    saddle_equation_residuals,
    singular_locus,
    spike_f,
    spike_saddles,
    spike_threshold,
)
from tensorspectra.errors import CutContact, DomainError
from tensorspectra.fuss_catalan import expected_resolvent, fc_function, support_edge


# ---------------------------------------------------------------- oracles

def df_dtheta(p, w, b, theta, rho):
    return math.cos(theta) / math.sin(theta) - (b / w) * rho**p * math.cos(
        theta
    ) ** (p - 1) * math.sin(theta)


def df_drho(p, w, b, theta, rho):
    return (
        1 / rho
        - rho
        + (b / w) * rho ** (p - 1) * math.cos(theta) ** p
        + rho ** (2 * p - 1) / w**2
    )


# ------------------------------------------------------------------ radial

def test_saddle_rho0_frozen():
    # rho_0^2 = T_3(0.01) = sum F_3(n) (0.01)^n = 1.010312...
    assert fc_function(3, 0.01).real == pytest.approx(1.0103125788, abs=1e-9)
    val = annealed_logZ(3, 10.0, 100, mode="saddle")
    rho0 = math.sqrt(1.010312578810108)
    expected = math.log(rho0) - rho0**2 / 2 + rho0**6 / (6 * 100.0)
    assert val.real == pytest.approx(expected, abs=1e-12)


def test_logZ_free_limit():
    # w -> infinity: rho_0^2 -> 1 and f -> -1/2, independent of w
    a = annealed_logZ(3, 1e6, 10, mode="saddle")
    b = annealed_logZ(3, 1e9, 10, mode="saddle")
    assert a.real == pytest.approx(-0.5, abs=1e-10)
    assert abs(a - b) < 1e-10


def test_quadrature_laplace_correction_scales_like_1_over_N():
    sad = annealed_logZ(3, 5.0, 1, mode="saddle")
    diffs = []
    for N in (100, 200, 400):
        quad = annealed_logZ(3, 5.0, N, mode="quadrature")
        diffs.append(abs(quad - sad))
    assert diffs[0] / diffs[1] == pytest.approx(2.0, rel=0.2)
    assert diffs[1] / diffs[2] == pytest.approx(2.0, rel=0.2)


def test_resolvent_saddle_equals_expected_resolvent():
    for p, w in [(2, 3.0), (3, 5.0), (3, 4 + 2j), (4, 10j)]:
        assert abs(annealed_resolvent(p, w, mode="saddle") - expected_resolvent(p, w)) < 1e-12


def test_resolvent_p2_frozen():
    assert annealed_resolvent(2, 3.0, mode="saddle").real == pytest.approx(
        (3 - math.sqrt(5)) / 2, abs=1e-12
    )


def test_quadrature_resolvent_near_saddle_value():
    sad = annealed_resolvent(3, 5.0, mode="saddle")
    quad = annealed_resolvent(3, 5.0, 400, mode="quadrature")
    assert abs(quad - sad) < 2e-3


def test_annealed_convergence_slope():
    sad = annealed_resolvent(3, 5.0, mode="saddle")
    Ns = [100, 200, 400, 800]
    diffs = [abs(annealed_resolvent(3, 5.0, N, mode="quadrature") - sad) for N in Ns]
    slope = np.polyfit(np.log(Ns), np.log(diffs), 1)[0]
    assert -1.2 < slope < -0.8


def test_radial_cut_contact_and_caps():
    with pytest.raises(CutContact):
        annealed_logZ(3, 1.0, 100, mode="quadrature")
    with pytest.raises(DomainError):
        annealed_logZ(3, 5.0, 10**6, mode="quadrature")


# ------------------------------------------------------------------ saddles

def test_spike_saddles_b0_reduces_to_no_spike():
    rep = spike_saddles(3, 4.0, 0.0)
    assert len(rep.saddles) == 1
    s = rep.saddles[0]
    assert s.theta == pytest.approx(math.pi / 2)
    assert s.rho_sq == pytest.approx(fc_function(3, 1 / 16), abs=1e-12)
    # resolvent of the dominant saddle matches the no-spike expectation
    omega = s.rho_sq / 4.0
    assert abs(omega - expected_resolvent(3, 4.0)) < 1e-12


def test_threshold_saddle_is_found_exactly():
    rep = spike_saddles(3, 3**1.5, math.sqrt(8.0))
    assert len(rep.saddles) == 2
    theta1 = rep.saddles[1]
    assert math.sin(theta1.theta) ** 2 == pytest.approx(0.5, abs=1e-8)
    assert theta1.rho_sq.real == pytest.approx(3.0, abs=1e-8)
    assert abs(theta1.rho_sq.imag) < 1e-10


def test_saddle_equation_residuals_at_reported_saddles():
    for (p, w, b) in [(3, 3**1.5, math.sqrt(8.0)), (3, 9.0, 4.0), (4, 17.0, 5.0)]:
        rep = spike_saddles(p, w, b)
        for s in rep.saddles:
            r1, r2 = saddle_equation_residuals(p, w, b, s.theta, s.rho_sq)
            assert abs(r1) < 1e-10
            assert abs(r2) < 1e-10
            # independent check straight from the partial derivatives of f
            rho = math.sqrt(s.rho_sq.real)
            assert abs(df_dtheta(p, w, b, s.theta, rho)) < 1e-8
            assert abs(df_drho(p, w, b, s.theta, rho)) < 1e-8


def test_reduction_consistency_rho_sq():
    # rho^2 = T_p(w^-2 sin^{2-2p} theta) / sin^2 theta at every saddle.
    # At the threshold the extra saddle sits exactly on the branch point of
    # T_p, where the root is double: a 1e-12 residual only pins the value to
    # ~sqrt(1e-12/0.2) ~ 2e-6, so the tight tolerance applies to interior
    # saddles only.
    for (p, w, b), tol in [
        ((3, 9.0, 4.0), 1e-10),
        ((4, 17.0, 5.0), 1e-10),
        ((3, 3**1.5, math.sqrt(8.0)), 5e-6),
    ]:
        rep = spike_saddles(p, w, b)
        for s in rep.saddles:
            sin2 = math.sin(s.theta) ** 2
            expected = fc_function(p, sin2 ** (1 - p) / w**2) / sin2
            assert abs(s.rho_sq - expected) < tol


def test_dominance_is_argmax_of_direct_f():
    # f is evaluated from its defining expression; at the threshold point the
    # pi/2 saddle has the larger Re f (the brute-force 2-d integral confirms
    # the integral tracks this saddle), so it is reported dominant
    rep = spike_saddles(3, 3**1.5, math.sqrt(8.0))
    f_vals = [s.f_value.real for s in rep.saddles]
    assert rep.dominant_index == int(np.argmax(f_vals))
    assert rep.saddles[0].f_value.real == pytest.approx(-0.4934452844, abs=1e-9)
    assert rep.saddles[1].f_value.real == pytest.approx(-0.7972674459, abs=1e-9)


def test_spike_f_direct_matches_independent_reduction():
    # on-saddle algebra: f = ln(T)/2 - (p-1)/(2p) T/s + (1-2s)/(2ps)
    for (p, w, b) in [(3, 3**1.5, math.sqrt(8.0)), (3, 9.0, 4.0)]:
        rep = spike_saddles(p, w, b)
        for s in rep.saddles:
            sin2 = math.sin(s.theta) ** 2
            T = (s.rho_sq * sin2).real
            reduced = (
                0.5 * math.log(T)
                - (p - 1) / (2 * p) * T / sin2
                + (1 - 2 * sin2) / (2 * p * sin2)
            )
            assert s.f_value.real == pytest.approx(reduced, abs=1e-10)


def test_spike_saddles_validation():
    with pytest.raises(DomainError):
        spike_saddles(2, 5.0, 1.0)
    with pytest.raises(CutContact):
        spike_saddles(3, 1.0, 1.0)
    rep = spike_saddles(3, 4.0, 0.5)  # below threshold, far from locus
    assert rep.theta1_error is not None
    assert len(rep.saddles) == 1


# ---------------------------------------------------------------- threshold

@pytest.mark.parametrize(
    "p,b_t",
    [(3, math.sqrt(8.0)), (4, 4.5), (5, math.sqrt(4**5 / 3**3))],
)
def test_threshold_values(p, b_t):
    res = spike_threshold(p)
    assert res.b_t == pytest.approx(b_t, rel=1e-12)
    assert res.y_c_below == pytest.approx(support_edge(p), rel=1e-12)
    assert res.y_c_at == pytest.approx(p ** (p / 2), rel=1e-12)


def test_threshold_double_root():
    for p in (3, 4, 5):
        res = spike_threshold(p)
        v_m = res.h_root
        assert abs(h_function(p, res.b_t, v_m)) < 1e-10
        h_plus = h_function(p, res.b_t, v_m * (1 + 1e-7))
        h_minus = h_function(p, res.b_t, v_m * (1 - 1e-7))
        assert abs(h_plus - h_minus) / (2e-7 * v_m) < 1e-5
        # max_v h(v) = 0 at threshold: both neighbours below zero
        assert h_plus <= 0 and h_minus <= 0


def test_threshold_requires_p3():
    with pytest.raises(DomainError):
        spike_threshold(2)


# ------------------------------------------------------------ singular locus

def test_singular_locus_below_threshold():
    assert singular_locus(3, 0.0) == pytest.approx(math.sqrt(27 / 4), rel=1e-12)
    assert singular_locus(3, 1.0) == pytest.approx(2.598076211, abs=1e-8)
    assert singular_locus(4, 2.0) == pytest.approx(support_edge(4), rel=1e-12)


def test_singular_locus_at_threshold():
    assert singular_locus(3, math.sqrt(8.0)) == pytest.approx(3**1.5, rel=1e-12)
    assert singular_locus(4, 4.5) == pytest.approx(16.0, rel=1e-12)


def test_singular_locus_continuous_from_above():
    b_t = math.sqrt(8.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        vals = [singular_locus(3, b_t * (1 + eps)) for eps in (1e-6, 1e-8)]
    for v in vals:
        assert v == pytest.approx(3**1.5, rel=1e-2)
    assert abs(vals[1] - 3**1.5) < abs(vals[0] - 3**1.5)


def test_singular_locus_monotone_above_threshold():
    b_t = math.sqrt(8.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        grid = [singular_locus(3, b) for b in np.linspace(b_t, 10 * b_t, 30)]
    assert all(b < a for b, a in zip(grid, grid[1:]))
    assert grid[-1] > 100  # grows without bound


def test_theta1_exists_below_locus_only():
    # the extra saddle's Fuss-Catalan argument reaches the branch point
    # exactly at y_c: real theta_1 for y <= y_c, gone above
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        y_c = singular_locus(3, 3.0)
    below = spike_saddles(3, y_c * (1 - 1e-3), 3.0)
    above = spike_saddles(3, y_c * (1 + 1e-3), 3.0)
    assert len(below.saddles) == 2
    assert len(above.saddles) == 1 and above.theta1_error is not None


def test_singular_locus_records_dominance_outcome():
    # with f evaluated directly, the theta_1 saddle is subdominant by Re f at
    # the locus; the implementation keeps the continuity-selected root and
    # records the event
    with pytest.warns(UserWarning, match="subdominant"):
        singular_locus(3, 4.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert singular_locus(3, 4.0) == singular_locus(3, 4.0, verify_dominance=False)
