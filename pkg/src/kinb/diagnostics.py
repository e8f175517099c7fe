"""Weighted norms, smoothing-order measurement, commutator bounds, and the
scale-induction machinery.

Everything here reads node arrays off SpectralState objects and evaluates
weighted quadratures over the grid and over the collision angles.  The
stretched-exponential weight is

    G(t, eta) = exp(beta * t * (1 + |eta|^2)^alpha),

optionally cut off at a frequency radius Lambda.  The commutator and the
hypothesis integrals all combine this weight with off-grid samples of
|fhat|, pulled through the same band-limited interpolation the collision
operator uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, NumericalFailure
from .inequalities import alpha_md, epsilon, optimize_lambdas
from .spectral import (GridSpec, SpectralState, interpolate_array, moments,
                       refine_array, state_with_values, to_physical,
                       _InterpPlan, _SPHERE_AREA)
from .collision import AngularQuadrature, CrossSection, _evaluator

__all__ = [
    "GevreyWeight", "WeightedNorms", "weighted_norms",
    "fractional_heat_evolve", "FitReport", "fit_gevrey_order",
    "CommutatorReport", "commutation_error",
    "cb_constant", "beta_recommendation", "angle_thresholds",
    "InductionSchedule", "build_induction_schedule",
    "HypothesisRow", "check_hypotheses",
    "hinf_weighted_norm", "negative_sobolev_norm", "embedding_constant",
    "bracket_integral", "LloglReport", "entropy_and_llogl",
    "entropy_and_llogl_from_state",
]

_SCALE_FACTOR = (1.0 + math.sqrt(2.0)) / 2.0
# exp() overflows at ~709; anything this large is a configuration error
_MAX_EXP_ARG = 700.0


def _grow(beta_t: float, r2, power=1.0, alpha=1.0):
    """exp(beta*t * power * (1+r2)^alpha) with an overflow guard."""
    arg = beta_t * np.asarray(power) * (1.0 + np.asarray(r2)) ** alpha
    if np.any(arg > _MAX_EXP_ARG):
        raise NumericalFailure("weight exponent overflows; reduce beta*t")
    return np.exp(arg)


@dataclass(frozen=True)
class GevreyWeight:
    """Stretched-exponential frequency weight with optional cutoff.

    lam = inf means no cutoff.  The weight value at eta is
    exp(beta*t*(1+|eta|^2)^alpha) * 1_{|eta| <= lam}.
    """
    alpha: float
    beta: float
    t: float = 0.0
    lam: float = math.inf

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError("alpha must be in (0, 1]")
        if self.beta < 0.0 or self.t < 0.0:
            raise ConfigError("beta and t must be nonnegative")
        if not self.lam > 0.0:
            raise ConfigError("lam must be positive (use math.inf for none)")

    def profile(self, radii) -> np.ndarray:
        """Weight without the cutoff, as a function of |eta|."""
        r = np.asarray(radii, dtype=float)
        return _grow(self.beta * self.t, r * r, alpha=self.alpha)

    def values(self, grid: GridSpec) -> np.ndarray:
        r = grid.abs_nodes()
        out = self.profile(r)
        if math.isfinite(self.lam):
            out = np.where(r <= self.lam * (1.0 + 1e-12), out, 0.0)
        return out

    def at_time(self, t: float) -> "GevreyWeight":
        return replace(self, t=t)


@dataclass(frozen=True)
class WeightedNorms:
    l2: float
    sup: float
    h_alpha: float


def weighted_norms(state: SpectralState, w: GevreyWeight) -> WeightedNorms:
    """Cut-off weighted L2 and H^alpha norms, plus the pointwise sup of
    G^{eps(alpha,1)} |fhat| over the nodes inside the cutoff."""
    grid = state.grid
    if math.isfinite(w.lam) and w.lam > grid.eta_max * (1.0 + 1e-12):
        raise ConfigError("cutoff lies beyond the grid radius")
    cells = grid.cell_weights().reshape(-1)
    r = grid.abs_nodes().reshape(-1)
    mag = np.abs(state.values).reshape(-1)
    gv = w.values(grid).reshape(-1)
    w2 = (gv * mag) ** 2
    l2 = math.sqrt(float(np.sum(cells * w2)))
    h_alpha = math.sqrt(float(np.sum(cells * (1.0 + r * r) ** w.alpha * w2)))
    inside = r <= (w.lam * (1.0 + 1e-12) if math.isfinite(w.lam) else np.inf)
    eps1 = epsilon(w.alpha, 1.0)
    sup = float((_grow(w.beta * w.t, r[inside] ** 2, power=eps1,
                       alpha=w.alpha) * mag[inside]).max())
    return WeightedNorms(l2=l2, sup=sup, h_alpha=h_alpha)


def fractional_heat_evolve(state: SpectralState, nu: float,
                           t: float) -> SpectralState:
    """Exact flow of the fractional heat semigroup on the transform side:
    multiplication by exp(-t (2 pi |eta|)^{2 nu}).  Calibration oracle for
    the smoothing-order fit."""
    if t < 0:
        raise ConfigError("t must be nonnegative")
    if not 0.0 < nu < 1.0:
        raise ConfigError("nu must be in (0, 1)")
    r = state.grid.abs_nodes()
    factor = np.exp(-t * (2.0 * math.pi * r) ** (2.0 * nu))
    return state_with_values(state, state.values * factor, t=state.t + t)


# ----------------------------------------------------------------------------
# smoothing-order measurement
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class FitReport:
    alpha_hat: float
    beta_t_hat: float
    residual: float
    window: tuple
    n_points: int

    def beta_hat(self, t: float) -> float:
        return self.beta_t_hat / t


def fit_gevrey_order(state: SpectralState, fit_window=None,
                     min_points: int = 8) -> FitReport:
    """Least-squares estimate of the stretched-exponential decay order.

    Model: |fhat(eta)| / fhat(0) = exp(-b * |eta|^{2a}), fitted as
    log(-log ratio) = log(b) + a*log|eta|^2 over shell averages inside the
    window.  Returns a = alpha_hat and b = beta_t_hat (the product of rate
    and elapsed time; divide by t to get a rate).  Shells whose ratio is
    outside (1e-14, 1) carry no decay information and are dropped.
    """
    grid = state.grid
    if fit_window is None:
        fit_window = (2.0, grid.eta_max / 2.0)
    lo, hi = float(fit_window[0]), float(fit_window[1])
    if not 0.0 < lo < hi:
        raise ConfigError("fit window must satisfy 0 < lo < hi")
    r = grid.abs_nodes().reshape(-1)
    mag = np.abs(state.values).reshape(-1)
    mask = (r >= lo) & (r <= hi)
    if not mask.any():
        raise NumericalFailure("empty fit window: no grid shells inside it")
    shells, inverse = np.unique(np.round(r[mask], 9), return_inverse=True)
    mean_mag = np.bincount(inverse, weights=mag[mask]) / np.bincount(inverse)
    ratio = mean_mag / state.mass
    keep = (ratio > 1e-14) & (ratio < 1.0 - 1e-12)
    if keep.sum() < min_points:
        raise NumericalFailure(
            f"only {int(keep.sum())} usable shells in window (need {min_points})")
    x = np.log(shells[keep] ** 2)
    y = np.log(-np.log(ratio[keep]))
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return FitReport(alpha_hat=float(slope), beta_t_hat=float(np.exp(intercept)),
                     residual=resid, window=(lo, hi), n_points=int(keep.sum()))


# ----------------------------------------------------------------------------
# commutator: exact value and its two quadrature bounds
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutatorReport:
    lhs: float
    rhs_bound: float
    i_term: float
    i_plus_term: float

    @property
    def sandwich_ok(self) -> bool:
        tol = 1e-12 + 1e-9 * max(self.rhs_bound, self.i_term + self.i_plus_term)
        return (abs(self.lhs) <= self.i_term + self.i_plus_term + tol
                and abs(self.lhs) <= self.rhs_bound + tol)


def _plus_angles(grid: GridSpec, cs: CrossSection, quad: AngularQuadrature):
    """Half-angle nodes for the bound parametrized by eta+: angles in
    (theta_min/2, pi/4], kernel sin^d(v) b(cos 2v), and the sphere factor
    for the direction average."""
    d = grid.dimension
    th, wq = quad.angles(math.pi / 4.0, quad.theta_min / 2.0)
    kernel = np.sin(th) ** d * cs.collapsed(2.0 * th)
    if d >= 3:
        kernel = kernel / np.sin(2.0 * th) ** (d - 2)
    if grid.mode == "radial":
        kernel = kernel * (2.0 * math.pi if d == 3 else 2.0)
    return th, kernel * wq


def commutation_error(state: SpectralState, w: GevreyWeight, cs: CrossSection,
                      quad: AngularQuadrature) -> CommutatorReport:
    """The weighted-commutator inner product and two upper bounds for it.

    lhs: sum of cell * (Q(f, Gf) - G Q(f, f)) * conj(Gf), the discrete
    frequency-side pairing.  rhs_bound: collision-sphere quadrature of the
    product bound with the factor (1 - |eta+|^2/|eta|^2) and exponent
    eps(alpha, |eta+|^2/|eta-|^2).  i_term / i_plus_term: the two
    square-weighted integrals (parametrized by eta and by eta+), with the
    indicator restricting |eta-| below lam/sqrt(2) and prefactors alpha*
    beta*t, 2^d*alpha*beta*t (sqrt(2) for the one-dimensional model).
    """
    grid = state.grid
    d = grid.dimension
    if not math.isfinite(w.lam):
        raise ConfigError("commutator bounds need a finite cutoff")
    if w.lam > grid.eta_max / math.sqrt(2.0) * (1.0 + 1e-12):
        raise ConfigError("cutoff must stay within eta_max/sqrt(2)")
    from .collision import rhs_bilinear

    alpha, beta, t, lam = w.alpha, w.beta, w.t, w.lam
    ab_t = alpha * beta * t
    g_nodes = w.values(grid)
    f = state.values
    gf = g_nodes * f
    q1 = rhs_bilinear(grid, cs, quad, f, gf)
    q2 = g_nodes * rhs_bilinear(grid, cs, quad, f, f)
    cells = grid.cell_weights().reshape(-1)
    lhs = float(np.sum(cells * ((q1 - q2) * np.conj(gf)).reshape(-1)).real)

    ev = _evaluator(grid, cs, quad)
    fine = refine_array(grid, f)
    fm = np.abs(ev.gather(fine, "minus"))
    fp = np.abs(ev.gather(fine, "plus"))
    theta = ev.theta

    if d == 1:
        sin_sq = np.sin(theta) ** 2          # = 1 - |eta+|^2/|eta|^2
        ratio_pm = 1.0 / np.tan(theta) ** 2   # |eta+|^2 / |eta-|^2
        half = np.abs(theta) / 2.0
    else:
        half = theta / 2.0
        sin_sq = np.sin(half) ** 2
        ratio_pm = 1.0 / np.tan(half) ** 2
    eps_prop = epsilon(alpha, ratio_pm)
    eps_lem = epsilon(alpha, 1.0 / np.tan(half) ** 2)

    r_nodes = grid.abs_nodes().reshape(-1)
    mag = np.abs(f).reshape(-1)
    g_mag = (g_nodes.reshape(-1)) * mag      # |G_Lam fhat| on nodes
    bt = beta * t

    # product bound over the collision sphere
    g_minus_eps = _grow(bt, ev.abs_minus ** 2, power=eps_prop[None, :], alpha=alpha)
    glam_plus = _grow(bt, ev.abs_plus ** 2, alpha=alpha)
    glam_plus = np.where(ev.abs_plus <= lam * (1.0 + 1e-12), glam_plus, 0.0)
    bracket_plus = (1.0 + ev.abs_plus ** 2) ** alpha
    inner = (g_minus_eps * fm * glam_plus * fp * bracket_plus) @ (ev.weights * sin_sq)
    rhs_bound = 2.0 * ab_t * float(np.sum(cells * g_mag * inner))

    # square-weighted bound, outer variable eta; the evaluator weights carry
    # b(cos t)*sin^{d-2}t, so sin^2 of the full angle completes sin^d t * b
    ind_minus = ev.abs_minus <= lam / math.sqrt(2.0) * (1.0 + 1e-12)
    g_minus_lem = _grow(bt, ev.abs_minus ** 2, power=eps_lem[None, :], alpha=alpha)
    inner_i = (g_minus_lem * fm * ind_minus) @ (ev.weights * np.sin(theta) ** 2)
    bracket_nodes = (1.0 + r_nodes ** 2) ** alpha
    i_term = ab_t * float(np.sum(cells * g_mag ** 2 * bracket_nodes * inner_i))

    # square-weighted bound, outer variable eta+
    if d == 1:
        pts = grid.axis_nodes()[:, None] * np.tan(theta)[None, :]
        kernel_plus = ev.weights * sin_sq
        eps_plus = eps_lem
        pref = math.sqrt(2.0) * ab_t
    else:
        th_p, kernel_plus = _plus_angles(grid, cs, quad)
        eps_plus = epsilon(alpha, 1.0 / np.tan(th_p) ** 2)
        pref = 2.0 ** d * ab_t
        if grid.mode == "radial":
            pts = grid.axis_nodes()[:, None] * np.tan(th_p)[None, :]
        else:
            nodes = grid.nodes().reshape(-1, 2)
            rr = np.linalg.norm(nodes, axis=-1, keepdims=True)
            ehat = np.divide(nodes, rr, out=np.zeros_like(nodes), where=rr > 0)
            omega = np.stack([-ehat[:, 1], ehat[:, 0]], axis=-1)
            tanv = np.tan(th_p)
            base = rr[:, :, None] * tanv[None, :, None] * omega[:, None, :]
            pts = np.concatenate([-base, base], axis=1)
            kernel_plus = np.concatenate([kernel_plus, kernel_plus])
            eps_plus = np.concatenate([eps_plus, eps_plus])
    fmp = np.abs(_InterpPlan(grid, pts.reshape(-1, 2) if grid.mode == "full-2d"
                             else pts.reshape(-1)).apply(fine))
    fmp = fmp.reshape(len(r_nodes), -1)
    if grid.mode == "full-2d":
        abs_pts = np.linalg.norm(pts, axis=-1)
    else:
        abs_pts = np.abs(pts)
    ind_plus = abs_pts <= lam / math.sqrt(2.0) * (1.0 + 1e-12)
    g_minus_plus = _grow(bt, abs_pts ** 2, power=np.broadcast_to(eps_plus, abs_pts.shape),
                         alpha=alpha)
    inner_p = (g_minus_plus * fmp * ind_plus) @ kernel_plus
    i_plus_term = pref * float(np.sum(cells * g_mag ** 2 * bracket_nodes * inner_p))

    return CommutatorReport(lhs=lhs, rhs_bound=rhs_bound, i_term=i_term,
                            i_plus_term=i_plus_term)


# ----------------------------------------------------------------------------
# kernel moment constants and the rate budget
# ----------------------------------------------------------------------------

_CB_QUAD = AngularQuadrature(theta_min=1e-12, panels=160, nodes_per_panel=10)


def cb_constant(cs: CrossSection, d: int, variant: str = "scaled") -> float:
    """Angular moment of the kernel against sin^2 (the grazing-safe weight).

    variant "scaled": includes the sphere factor |S^{d-2}| for d >= 3 and
    uses the symmetric quarter-range for d = 1.  variant "plain": the bare
    integral of sin^d(theta) b(cos theta) over (0, pi/2], identical to
    "scaled" for d = 2.
    """
    if d not in (1, 2, 3):
        raise ConfigError("dimension must be 1, 2 or 3")
    if variant not in ("scaled", "plain"):
        raise ConfigError("variant must be 'scaled' or 'plain'")
    if d == 1:
        if variant == "plain":
            raise ConfigError("the plain variant needs d >= 2")
        th, wq = _CB_QUAD.angles(math.pi / 4.0)
        return 2.0 * float(np.sum(wq * np.sin(th) ** 2 * cs.collapsed(th)))
    th, wq = _CB_QUAD.angles(math.pi / 2.0)
    base = float(np.sum(wq * np.sin(th) ** 2 * cs.collapsed(th)))
    if variant == "plain" or d == 2:
        return base
    return _SPHERE_AREA[d - 1] * base


def beta_recommendation(M: float, T0: float, alpha: float, cs: CrossSection,
                        d: int, part="I", C_tilde: float = 1.0,
                        M2: float | None = None, theta0: float | None = None,
                        vartheta0: float | None = None) -> float:
    """Largest admissible weight growth rate for a hypothesis bound M.

    Part I:   C~ / ((1 + 2^{d-1}) c_b alpha T0 M + 1), with the sqrt(2)
              combination replacing 2^{d-1} in the one-dimensional model.
    Part II:  same shape with the plain kernel constant.
    Part III: C~ / (alpha T0 [(1+2^{d-1}) c_b2 M2 + (C_t0 + 2^d C_v0) M] + 1).
    """
    part = _canonical_part(part)
    if M < 0 or T0 <= 0 or not 0 < alpha <= 1:
        raise ConfigError("need M >= 0, T0 > 0, alpha in (0, 1]")
    if part == 1:
        cb = cb_constant(cs, d, "scaled")
        comb = 1.0 + (math.sqrt(2.0) if d == 1 else 2.0 ** (d - 1))
        return C_tilde / (comb * cb * alpha * T0 * M + 1.0)
    if d < 2:
        raise ConfigError("parts II and III need d >= 2")
    cb2 = cb_constant(cs, d, "plain")
    if part == 2:
        return C_tilde / ((1.0 + 2.0 ** (d - 1)) * cb2 * alpha * T0 * M + 1.0)
    if M2 is None or theta0 is None or vartheta0 is None:
        raise ConfigError("part III needs M2, theta0, and vartheta0")
    c_t0 = cs.b_value(theta0, d)
    c_v0 = cs.b_value(2.0 * vartheta0, d)
    denom = alpha * T0 * ((1.0 + 2.0 ** (d - 1)) * cb2 * M2
                          + (c_t0 + 2.0 ** d * c_v0) * M) + 1.0
    return C_tilde / denom


def _canonical_part(part) -> int:
    table = {"I": 1, "II": 2, "III": 3, "1": 1, "2": 2, "3": 3, 1: 1, 2: 2, 3: 3}
    try:
        return table[part]
    except KeyError:
        raise ConfigError(f"unknown induction part {part!r}") from None


def angle_thresholds(alpha: float, m: int) -> tuple:
    """Largest split angles (theta0, vartheta0) in (0, pi/4) keeping the
    grazing-cone exponent at or below 2m/(2m+2).

    eps(alpha, cot^2(theta0/2)) <= 2m/(2m+2) for the eta window and
    eps(alpha, cot^2(vartheta0)) <= 2m/(2m+2) for the eta+ window; both
    left sides increase in the angle, so bisection finds the threshold.
    """
    if m < 2:
        raise ConfigError("m must be >= 2")
    target = 2.0 * m / (2.0 * m + 2.0)
    cap = math.pi / 4.0 * (1.0 - 1e-9)

    def largest(fn):
        if fn(cap) <= target:
            return cap
        lo, hi = 1e-12, cap
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if fn(mid) <= target:
                lo = mid
            else:
                hi = mid
        return lo

    theta0 = largest(lambda th: epsilon(alpha, 1.0 / math.tan(th / 2.0) ** 2))
    vartheta0 = largest(lambda th: epsilon(alpha, 1.0 / math.tan(th) ** 2))
    return theta0, vartheta0


# ----------------------------------------------------------------------------
# scale induction: schedule construction and hypothesis checking
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class InductionSchedule:
    part: str
    dimension: int
    alpha: float
    m: int
    T0: float
    lambda0: float
    scales: tuple
    M: float
    B: float
    beta: float
    A_m: float
    K_empirical: float
    beta_formula: float
    beta_start: float
    C_tilde: float
    factor: float = _SCALE_FACTOR
    theta0: float | None = None
    vartheta0: float | None = None
    M2: float | None = None

    @property
    def n_max(self) -> int:
        return len(self.scales) - 1


def _l1m_norm(state: SpectralState, m: int) -> float:
    """Moment norm int f <v>^m dv, via conserved even moments.  m = 2 is
    exact; m = 3 and 4 use the m = 4 majorant (a safe overestimate)."""
    if m == 2:
        m0, _, m2 = moments(state, order=2)
        return float(m0 + (m2 if np.isscalar(m2) else np.real(m2)))
    mom = moments(state, order=4)
    m0, m2, m4 = float(mom[0]), float(np.real(mom[2])), float(mom[-1])
    return m0 + 2.0 * m2 + m4


def _default_lambda0(part: int, d: int) -> float:
    if part == 1:
        return 4.0 * math.sqrt(d) / (math.sqrt(2.0) - 1.0)
    if part == 2:
        return 4.0 * math.sqrt(2.0) / (math.sqrt(2.0) - 1.0)
    return 3.0


def _decay_exponent(part: int, m: int, d: int) -> float:
    n = {1: d, 2: 2, 3: 1}[part]
    return 2.0 * m / (2.0 * m + n)


def build_induction_schedule(states, part, m: int, alpha: float, T0: float,
                             cs: CrossSection, C_tilde: float = 1.0,
                             C_f0: float = 1.0, lambda0: float | None = None,
                             n_max: int = 16,
                             M2: float | None = None) -> InductionSchedule:
    """Two-pass schedule for the geometric chain of frequency scales.

    states: snapshots along one run covering [0, T0], first entry at t=0.
    Pass one prices the weight with the moment floor M = 2 A_m + 1 (times
    the direction-sphere measure for parts II/III); the resulting rate is
    used to measure the empirical decay constant, and the final rate is
    the minimum of the pass-one rate and the formula at the enlarged M.
    Scales above eta_max/sqrt(2) are dropped so every hypothesis window
    stays inside the grid.
    """
    if not states:
        raise ConfigError("need at least one snapshot state")
    part = _canonical_part(part)
    grid = states[0].grid
    d = grid.dimension
    if part >= 2 and d < 2:
        raise ConfigError("parts II and III need d >= 2")
    if m < 2:
        raise ConfigError("m must be >= 2")
    n_sec = {1: d, 2: 2, 3: 1}[part]
    a_cap = alpha_md(m, n_sec)
    if alpha > min(a_cap, cs.nu) * (1.0 + 1e-12):
        raise ConfigError(
            f"alpha {alpha:g} exceeds min(alpha_m_n {a_cap:g}, nu {cs.nu:g})")

    lam0 = _default_lambda0(part, d) if lambda0 is None else float(lambda0)
    if lam0 < _default_lambda0(part, d) * (1.0 - 1e-12):
        raise ConfigError("base scale below the admissible minimum")
    cap = grid.eta_max / math.sqrt(2.0)
    scales = []
    lam = lam0
    while lam <= cap * (1.0 + 1e-12) and len(scales) <= n_max:
        scales.append(lam)
        lam *= _SCALE_FACTOR
    if not scales:
        raise ConfigError("no scale fits below eta_max/sqrt(2); "
                          "raise eta_max or lower lambda0")

    sphere = _SPHERE_AREA[d - 1] if d >= 2 else 1.0  # |S^{d-2}| measure
    omega_measure = 1.0 if part == 1 else sphere
    A_m = max(_l1m_norm(s, m) for s in states)
    cells = grid.cell_weights().reshape(-1)
    l2_f0 = math.sqrt(float(np.sum(cells * np.abs(states[0].values).reshape(-1) ** 2)))
    B = l2_f0 * math.exp(C_f0 * T0)

    theta0 = vartheta0 = None
    if part == 3:
        theta0, vartheta0 = angle_thresholds(alpha, m)
        if M2 is None:
            M2 = 2.0 * sphere * A_m + 1.0

    def formula(M):
        return beta_recommendation(M, T0, alpha, cs, d, part, C_tilde,
                                   M2=M2, theta0=theta0, vartheta0=vartheta0)

    # crude start bound: the base-scale hypothesis value is at most
    # start_measure * A_m * exp(rate * T0 * <Lambda_0>^..)
    start_measure = omega_measure * (math.pi / 2.0 if part == 3 else 1.0)

    def beta_start_for(M):
        # rate below which the chain hypothesis holds at the base scale
        if M <= start_measure * A_m:
            return 0.0
        lg = math.log(M / (start_measure * A_m))
        if part == 1:
            return lg / (epsilon(alpha, 1.0) * T0 * (1.0 + lam0 ** 2) ** alpha)
        return lg / (T0 * (1.0 + lam0 ** 2))

    def cap_parts(M):
        vals = [formula(M), beta_start_for(M)]
        if part >= 2:
            vals.append(1.0 / T0)
        return min(v for v in vals if v > 0)

    floor = 2.0 * omega_measure * A_m + 1.0
    beta_a = cap_parts(floor)

    # measure the decay constant the chain would certify, then re-price;
    # the pointwise sup times the angular measure bounds the averaged
    # hypothesis functionals of parts II and III
    p = _decay_exponent(part, m, d)
    tilde_max = _SCALE_FACTOR * scales[-1]
    r = grid.abs_nodes().reshape(-1)
    inside = r <= min(tilde_max, grid.eta_max) * (1.0 + 1e-12)
    k_emp = 0.0
    for s in states:
        g = _grow(beta_a * s.t, r[inside] ** 2, power=p, alpha=alpha)
        k_emp = max(k_emp, float((g * np.abs(s.values).reshape(-1)[inside]).max()))
    k_emp *= start_measure
    M_final = max(floor, k_emp)
    beta = min(beta_a, cap_parts(M_final))

    return InductionSchedule(
        part={1: "I", 2: "II", 3: "III"}[part], dimension=d, alpha=alpha, m=m,
        T0=T0, lambda0=lam0, scales=tuple(scales), M=M_final, B=B, beta=beta,
        A_m=A_m, K_empirical=k_emp, beta_formula=formula(M_final),
        beta_start=beta_start_for(M_final), C_tilde=C_tilde,
        theta0=theta0, vartheta0=vartheta0, M2=M2)


def _unit_directions(d: int, n_random: int, rng) -> np.ndarray:
    axes = np.eye(d)
    extra = rng.normal(size=(n_random, d))
    extra /= np.linalg.norm(extra, axis=1, keepdims=True)
    return np.concatenate([axes, extra])


def _omega_frame(zeta: np.ndarray, n_nodes: int) -> tuple:
    """Quadrature nodes and weights for the unit sphere orthogonal to zeta.
    d=2: the two perpendicular units with counting weight 1 each; d=3: a
    uniform circle rule with total weight 2 pi."""
    d = zeta.shape[-1]
    if d == 2:
        om = np.array([[-zeta[1], zeta[0]], [zeta[1], -zeta[0]]])
        return om, np.ones(2)
    a = np.array([1.0, 0.0, 0.0])
    if abs(zeta @ a) > 0.9:
        a = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(zeta, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(zeta, e1)
    phi = 2.0 * math.pi * (np.arange(n_nodes) + 0.5) / n_nodes
    om = np.cos(phi)[:, None] * e1[None, :] + np.sin(phi)[:, None] * e2[None, :]
    return om, np.full(n_nodes, 2.0 * math.pi / n_nodes)


def _hyp1_sup(state, alpha, beta, lam) -> float:
    r = state.grid.abs_nodes().reshape(-1)
    inside = r <= lam * (1.0 + 1e-12)
    g = _grow(beta * state.t, r[inside] ** 2, power=epsilon(alpha, 1.0),
              alpha=alpha)
    return float((g * np.abs(state.values).reshape(-1)[inside]).max())


def _hyp2_sup(state, fine, alpha, beta, lam, dirs, omega_nodes,
              lattice) -> float:
    grid = state.grid
    d = grid.dimension
    eps1 = epsilon(alpha, 1.0)
    bt = beta * state.t
    if grid.mode == "radial":
        # radially symmetric data: the direction average collapses to the
        # sphere measure times the profile at radius sqrt(z^2 + rho^2)
        r = grid.axis_nodes()
        inside = r <= lam * (1.0 + 1e-12)
        g = _grow(bt, r[inside] ** 2, power=eps1, alpha=alpha)
        mult = 2.0 * math.pi if d == 3 else 2.0
        return mult * float((g * np.abs(state.values)[inside]).max())
    z, rho = lattice
    sup = 0.0
    g = _grow(bt, z ** 2 + rho ** 2, power=eps1, alpha=alpha)
    for zeta in dirs:
        om, om_w = _omega_frame(zeta, omega_nodes)
        pts = (z[:, None, None] * zeta[None, None, :]
               - rho[:, None, None] * om[None, :, :])
        vals = np.abs(_InterpPlan(grid, pts.reshape(-1, d)).apply(fine))
        vals = vals.reshape(len(z), len(om))
        sup = max(sup, float((g * (vals @ om_w)).max()))
    return sup


def _gl_rule(lo, hi, n):
    x, wq = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * wq


def _hyp3_sup(state, fine, alpha, beta, lam, m, theta0, vartheta0,
              dirs, omega_nodes, theta_nodes: int = 48,
              n_radii: int = 24) -> float:
    grid = state.grid
    d = grid.dimension
    p = 2.0 * m / (2.0 * m + 1.0)
    bt = beta * state.t
    sq2lam = math.sqrt(2.0) * lam
    if sq2lam > grid.eta_max * (1.0 + 1e-9):
        raise ConfigError("hypothesis window sqrt(2)*lam exceeds the grid")

    radii = np.linspace(sq2lam / n_radii, sq2lam, n_radii)
    th_a, w_a = _gl_rule(theta0, math.pi / 2.0, theta_nodes)
    th_b, w_b = _gl_rule(vartheta0, math.pi / 4.0, theta_nodes)

    if grid.mode == "radial":
        # |eta^-| depends only on |eta| and the angle, the direction
        # average is the sphere measure
        mult = 2.0 * math.pi if d == 3 else 2.0
        sup = 0.0
        for rm, wq in ((radii[:, None] * np.sin(th_a / 2.0)[None, :], w_a),
                       (radii[:, None] * np.tan(th_b)[None, :], w_b)):
            vals = np.abs(_InterpPlan(grid, rm.reshape(-1)).apply(fine))
            vals = vals.reshape(rm.shape)
            g = _grow(bt, rm ** 2, power=p, alpha=alpha)
            ind = rm <= lam * (1.0 + 1e-12)
            sup = max(sup, mult * float(((g * vals * ind) @ wq).max()))
        return sup

    sup = 0.0
    for ehat in dirs:
        om, om_w = _omega_frame(ehat, omega_nodes)
        for r0 in radii:
            half = th_a / 2.0
            base = (r0 * np.sin(half) ** 2)[:, None] * ehat[None, :]
            swing = (r0 * np.sin(half) * np.cos(half))
            pts = base[:, None, :] - swing[:, None, None] * om[None, :, :]
            rad = np.linalg.norm(pts, axis=-1)
            vals = np.abs(_InterpPlan(grid, pts.reshape(-1, d)).apply(fine))
            vals = vals.reshape(len(th_a), len(om))
            g = _grow(bt, rad ** 2, power=p, alpha=alpha)
            ind = rad <= lam * (1.0 + 1e-12)
            sup = max(sup, float(np.sum(w_a * ((g * vals * ind) @ om_w))))
            pts = -(r0 * np.tan(th_b))[:, None, None] * om[None, :, :]
            rad = np.linalg.norm(pts, axis=-1)
            vals = np.abs(_InterpPlan(grid, pts.reshape(-1, d)).apply(fine))
            vals = vals.reshape(len(th_b), len(om))
            g = _grow(bt, rad ** 2, power=p, alpha=alpha)
            ind = rad <= lam * (1.0 + 1e-12)
            sup = max(sup, float(np.sum(w_b * ((g * vals * ind) @ om_w))))
    return sup


@dataclass(frozen=True)
class HypothesisRow:
    scale: float
    t: float
    hyp1: float
    hyp2: float | None
    hyp3: float | None
    weighted_l2: float
    l2_cap: float
    passed: bool


def check_hypotheses(trajectory, schedule: InductionSchedule,
                     n_random: int = 64, omega_nodes: int = 16,
                     seed: int = 0) -> list:
    """Evaluate the chain hypotheses on every (scale, snapshot) pair.

    Returns HypothesisRow records; `passed` requires the part's hypothesis
    supremum to stay at or below schedule.M and the weighted L2 norm at
    sqrt(2)*scale to stay at or below schedule.B (small relative slack for
    quadrature noise).
    """
    part = _canonical_part(schedule.part)
    snaps = list(trajectory.snapshots)
    if not snaps:
        snaps = [(trajectory.final.t, trajectory.final)]
    grid = snaps[0][1].grid
    d = grid.dimension
    rng = np.random.default_rng(seed)
    dirs = _unit_directions(d, n_random, rng) if d >= 2 else None
    dirs3 = dirs[: d + min(n_random, 16)] if d >= 2 else None

    def lattice_for(lam):
        idx = np.arange(32)
        rad = lam * (idx + 1) / 32.0
        phi = math.pi / 4.0 + math.pi / 4.0 * (idx + 0.5) / 32.0
        rr, pp = np.meshgrid(rad, phi, indexing="ij")
        return (rr.reshape(-1) * np.cos(pp.reshape(-1)),
                rr.reshape(-1) * np.sin(pp.reshape(-1)))

    rows = []
    slack = 1.0 + 1e-9
    for t, s in snaps:
        need_fine = part >= 2 and (grid.mode != "radial" or part == 3)
        fine = refine_array(grid, s.values) if need_fine else None
        for lam in schedule.scales:
            h1 = _hyp1_sup(s, schedule.alpha, schedule.beta, lam)
            h2 = h3 = None
            if part == 2:
                h2 = _hyp2_sup(s, fine, schedule.alpha, schedule.beta, lam,
                               dirs, omega_nodes, lattice_for(lam))
            if part == 3:
                h3 = _hyp3_sup(s, fine, schedule.alpha, schedule.beta, lam,
                               schedule.m, schedule.theta0, schedule.vartheta0,
                               dirs3, omega_nodes)
            wn = weighted_norms(s, GevreyWeight(schedule.alpha, schedule.beta,
                                                t=t, lam=math.sqrt(2.0) * lam))
            relevant = {1: h1, 2: h2, 3: h3}[part]
            ok = (relevant is not None and relevant <= schedule.M * slack
                  and wn.l2 <= schedule.B * slack)
            rows.append(HypothesisRow(scale=lam, t=t, hyp1=h1, hyp2=h2, hyp3=h3,
                                      weighted_l2=wn.l2, l2_cap=schedule.B,
                                      passed=bool(ok)))
    rows.sort(key=lambda r: (r.scale, r.t))
    return rows


# ----------------------------------------------------------------------------
# polynomial-weight norms and the entropy functionals
# ----------------------------------------------------------------------------

def bracket_integral(d: int, p: float) -> float:
    """int (1+|v|^2)^{-p/2} dv over R^d, p > d (radial beta-function form)."""
    if p <= d:
        raise ConfigError("need p > d for integrability")
    radial = math.gamma(d / 2.0) * math.gamma((p - d) / 2.0) / (2.0 * math.gamma(p / 2.0))
    return _SPHERE_AREA[d] * radial


def embedding_constant(d: int) -> float:
    """Constant turning a mass bound into a negative-order Sobolev bound."""
    return math.sqrt(bracket_integral(d, 2.0 * d))


def negative_sobolev_norm(state: SpectralState, s: float) -> float:
    """Grid quadrature of the order -s Sobolev norm of the density."""
    grid = state.grid
    cells = grid.cell_weights().reshape(-1)
    r = grid.abs_nodes().reshape(-1)
    mag2 = np.abs(state.values).reshape(-1) ** 2
    return math.sqrt(float(np.sum(cells * (1.0 + r * r) ** (-s) * mag2)))


def hinf_weighted_norm(state: SpectralState, beta: float) -> float:
    """Polynomial-multiplier norm |<eta>^{beta*t - d} fhat|_{L2} at the
    state's own time; at t = 0 this is the order -d norm."""
    if beta < 0:
        raise ConfigError("beta must be nonnegative")
    s = state.grid.dimension - beta * state.t
    return negative_sobolev_norm(state, s)


@dataclass(frozen=True)
class LloglReport:
    entropy: float
    llogl: float
    bound_ok: bool
    mass: float
    l12: float
    bound_rhs: float
    delta: float
    c_delta: float


def entropy_and_llogl(density, v_squared, cell: float, dimension: int,
                      delta: float | None = None) -> LloglReport:
    """Discrete entropy int f log f and the companion functional
    int f log(1+f), with the comparison bound

        llogl <= log(2)*mass + entropy + C * (int f <v>^2 dv)^{1-delta},

    where C packs the largest constant in log(u) <= u^delta / (e*delta)
    against the integrable bracket weight.  delta defaults to 1/(d+2),
    strictly inside the admissible range (0, 2/(d+2))."""
    f = np.asarray(density, dtype=float).reshape(-1)
    v2 = np.asarray(v_squared, dtype=float).reshape(-1)
    if f.shape != v2.shape:
        raise ConfigError("density and v_squared shapes disagree")
    if np.any(f < 0):
        raise ConfigError("density samples must be nonnegative")
    if delta is None:
        delta = 1.0 / (dimension + 2.0)
    if not 0.0 < delta < 2.0 / (dimension + 2.0):
        raise ConfigError("delta outside (0, 2/(d+2))")
    pos = f > 0
    mass = float(np.sum(f) * cell)
    ent = float(np.sum(f[pos] * np.log(f[pos])) * cell)
    llogl = float(np.sum(f * np.log1p(f)) * cell)
    l12 = float(np.sum(f * (1.0 + v2)) * cell)
    c_delta = (bracket_integral(dimension, 2.0 * (1.0 - delta) / delta) ** delta
               / (math.e * delta))
    rhs = math.log(2.0) * mass + ent + c_delta * l12 ** (1.0 - delta)
    ok = llogl <= rhs + 1e-12 * max(1.0, abs(rhs))
    return LloglReport(entropy=ent, llogl=llogl, bound_ok=bool(ok), mass=mass,
                       l12=l12, bound_rhs=rhs, delta=delta, c_delta=c_delta)


def entropy_and_llogl_from_state(state: SpectralState) -> LloglReport:
    v, dens, dv = to_physical(state)
    d = state.grid.dimension
    if d == 1:
        v2 = v ** 2
    else:
        axes = np.meshgrid(*([v] * d), indexing="ij")
        v2 = sum(a ** 2 for a in axes)
    return entropy_and_llogl(dens, v2, dv ** d, d)
