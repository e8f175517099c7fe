"""Non-cutoff collision operator in frequency space.

For d >= 2 the operator acts on transforms through a sphere average,

    Qhat(g, h)(eta) = int_{S^{d-1}} b(etahat.sigma)
                      [ghat(eta-) hhat(eta+) - ghat(0) hhat(eta)] dsigma,
    eta+ = (eta + |eta| sigma)/2,   eta- = eta - eta+,

with |eta+| = |eta| cos(theta/2), |eta-| = |eta| sin(theta/2) for the
deviation angle theta between eta and sigma. The d = 1 caricature replaces
the sphere by theta in [-pi/4, pi/4] with eta+ = eta cos(theta),
eta- = eta sin(theta).

The angular kernel is the standard non-integrable model

    sin^{d-2}(theta) b(cos theta) = kappa * theta^(-1-2 nu)   (0 < theta <= pi/2)

(d = 1: b1(theta) = kappa |theta|^(-1-2 nu)), truncated at theta_min and
integrated by Gauss-Legendre on geometrically graded panels. All sigma
multiplicity (mirror directions for d = 2, the azimuthal circle for d = 3)
is folded into the quadrature weights, so sum(weights) is the truncated
total cross-section.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._threads import map_chunks, worker_count
from .errors import ConfigError
from .spectral import GridSpec, SpectralState, _InterpPlan, moments, refine_array

__all__ = [
    "CrossSection",
    "AngularQuadrature",
    "from_inverse_power",
    "collision_geometry",
    "sigma_from_angle",
    "perp_unit",
    "transform_jacobian",
    "kac_pair",
    "rhs",
    "rhs_bilinear",
    "total_weight",
    "stability_limit",
    "truncation_error_bound",
    "coercivity_probe",
]


def from_inverse_power(s: float) -> tuple:
    """Momentum-transfer exponents (gamma, nu) of an inverse-power-law force
    with exponent s > 2; s = 5 gives the Maxwellian case gamma = 0."""
    if not s > 2:
        raise ConfigError("inverse-power exponent must exceed 2")
    return (s - 5.0) / (s - 1.0), 1.0 / (s - 1.0)


@dataclass(frozen=True)
class CrossSection:
    """Angular collision kernel with singularity exponent nu in (0, 1)."""
    nu: float
    kappa: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.nu < 1.0:
            raise ConfigError(f"nu must lie in (0, 1), got {self.nu}")
        if not self.kappa > 0:
            raise ConfigError("kappa must be positive")

    @classmethod
    def maxwellian(cls, kappa: float = 1.0) -> "CrossSection":
        """Kernel of the s = 5 inverse-power force (nu = 1/4)."""
        return cls(nu=from_inverse_power(5.0)[1], kappa=kappa)

    def collapsed(self, theta) -> np.ndarray:
        """sin^{d-2}(theta) b(cos theta) = kappa |theta|^(-1-2 nu); also the
        d = 1 kernel b1(theta)."""
        th = np.abs(np.asarray(theta, dtype=float))
        return self.kappa * th ** (-1.0 - 2.0 * self.nu)

    def b_value(self, theta, dimension: int) -> np.ndarray:
        """b(cos theta) itself (the collapsed kernel divided by sin^{d-2})."""
        th = np.abs(np.asarray(theta, dtype=float))
        if dimension == 1:
            return self.collapsed(th)
        return self.collapsed(th) / np.sin(th) ** (dimension - 2)


@dataclass(frozen=True)
class AngularQuadrature:
    """Graded-panel Gauss-Legendre rule for the singular angular integral.

    Panels shrink geometrically from the upper angle limit down to theta_min,
    which matches the theta^(-1-2 nu) singularity: each panel sees a bounded
    relative variation of the kernel.
    """
    theta_min: float = 1e-4
    panels: int = 24
    nodes_per_panel: int = 8
    azimuthal_nodes: int = 8

    def __post_init__(self):
        if not 0.0 < self.theta_min < math.pi / 4:
            raise ConfigError("theta_min must lie in (0, pi/4)")
        if self.panels < 1 or self.nodes_per_panel < 2:
            raise ConfigError("need panels >= 1 and nodes_per_panel >= 2")
        if self.azimuthal_nodes < 1:
            raise ConfigError("azimuthal_nodes must be >= 1")

    def angles(self, theta_max: float, theta_min: float | None = None) -> tuple:
        """Positive nodes and plain quadrature weights on [theta_min, theta_max]."""
        tmin = self.theta_min if theta_min is None else theta_min
        if not tmin < theta_max:
            raise ConfigError("theta_min must be below the upper angle limit")
        x, w = np.polynomial.legendre.leggauss(self.nodes_per_panel)
        rho = (tmin / theta_max) ** (1.0 / self.panels)
        edges = theta_max * rho ** np.arange(self.panels, -1, -1)
        nodes, weights = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid, rad = 0.5 * (hi + lo), 0.5 * (hi - lo)
            nodes.append(mid + rad * x)
            weights.append(rad * w)
        return np.concatenate(nodes), np.concatenate(weights)


# ----------------------------------------------------------------------------
# geometry
# ----------------------------------------------------------------------------

def perp_unit(u: np.ndarray) -> np.ndarray:
    """Counter-clockwise perpendicular of 2-vectors (last axis)."""
    u = np.asarray(u, dtype=float)
    return np.stack([-u[..., 1], u[..., 0]], axis=-1)


def sigma_from_angle(eta_hat: np.ndarray, theta, sign: int = +1) -> np.ndarray:
    """Unit sigma at deviation angle theta from eta_hat, rotated toward
    sign * perp(eta_hat) (d = 2)."""
    th = np.asarray(theta, dtype=float)[..., None]
    return np.cos(th) * eta_hat + sign * np.sin(th) * perp_unit(eta_hat)


def collision_geometry(eta: np.ndarray, sigma: np.ndarray) -> tuple:
    """(eta_minus, eta_plus) for the frequency split eta+ = (eta + |eta| sigma)/2."""
    eta = np.asarray(eta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    r = np.linalg.norm(eta, axis=-1, keepdims=True)
    plus = 0.5 * (eta + r * sigma)
    return eta - plus, plus


def transform_jacobian(eta: np.ndarray, sigma: np.ndarray) -> float:
    """Determinant of d(eta+)/d(eta) at fixed sigma: 2^-d (1 + etahat.sigma)."""
    eta = np.asarray(eta, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    d = eta.shape[-1]
    ehat = eta / np.linalg.norm(eta, axis=-1, keepdims=True)
    return 2.0 ** (-d) * (1.0 + (ehat * sigma).sum(-1))


def kac_pair(eta, theta) -> tuple:
    """(eta_minus, eta_plus) = (eta sin theta, eta cos theta) for d = 1."""
    eta = np.asarray(eta, dtype=float)
    th = np.asarray(theta, dtype=float)
    return eta * np.sin(th), eta * np.cos(th)


# ----------------------------------------------------------------------------
# cached evaluator
# ----------------------------------------------------------------------------

def _split(arr: np.ndarray, k: int) -> list:
    if k <= 1 or arr.shape[0] < 4 * k:
        return [arr]
    return np.array_split(arr, k)


class _Evaluator:
    """Precomputed angular nodes, sample coordinates, and interpolation plans
    for one (grid, cross-section, quadrature) triple."""

    def __init__(self, grid: GridSpec, cs: CrossSection, quad: AngularQuadrature):
        self.grid = grid
        d = grid.dimension
        if d == 1:
            th, w = quad.angles(math.pi / 4)
            theta = np.concatenate([-th[::-1], th])
            weights = np.concatenate([w[::-1], w]) * cs.collapsed(theta)
            eta = grid.axis_nodes()
            minus, plus = kac_pair(eta[:, None], theta[None, :])
        elif grid.mode == "radial":
            theta, w = quad.angles(math.pi / 2)
            mult = 2.0 * math.pi if d == 3 else 2.0
            weights = mult * w * cs.collapsed(theta)
            r = grid.axis_nodes()
            minus = r[:, None] * np.sin(theta[None, :] / 2.0)
            plus = r[:, None] * np.cos(theta[None, :] / 2.0)
        else:  # full-2d
            th, w = quad.angles(math.pi / 2)
            theta = np.concatenate([-th[::-1], th])
            weights = np.concatenate([w[::-1], w]) * cs.collapsed(theta)
            pts = grid.nodes()
            r = np.linalg.norm(pts, axis=-1, keepdims=True)
            ehat = np.divide(pts, r, out=np.zeros_like(pts), where=r > 0)
            sigma = (np.cos(theta)[None, :, None] * ehat[:, None, :]
                     + np.sin(theta)[None, :, None] * perp_unit(ehat)[:, None, :])
            plus = 0.5 * (pts[:, None, :] + r[:, None, :] * sigma)
            minus = pts[:, None, :] - plus
        self.theta = theta
        self.weights = weights
        self.total_weight = float(weights.sum())
        if d == 1 or grid.mode == "radial":
            self.abs_minus, self.abs_plus = np.abs(minus), np.abs(plus)
        else:
            self.abs_minus = np.linalg.norm(minus, axis=-1)
            self.abs_plus = np.linalg.norm(plus, axis=-1)
        self.n_nodes = minus.shape[0]
        self.n_theta = theta.shape[0]
        flat_minus = minus.reshape(-1, 2) if grid.mode == "full-2d" else minus.reshape(-1)
        flat_plus = plus.reshape(-1, 2) if grid.mode == "full-2d" else plus.reshape(-1)
        k = worker_count()
        self.plans_minus = [_InterpPlan(grid, c) for c in _split(flat_minus, k)]
        self.plans_plus = [_InterpPlan(grid, c) for c in _split(flat_plus, k)]

    def gather(self, fine: np.ndarray, side: str) -> np.ndarray:
        plans = self.plans_minus if side == "minus" else self.plans_plus
        if len(plans) == 1:
            out = plans[0].apply(fine)
        else:
            out = np.concatenate(map_chunks(lambda p: p.apply(fine), plans))
        return out.reshape(self.n_nodes, self.n_theta)


_EVAL_CACHE: dict = {}


def _evaluator(grid: GridSpec, cs: CrossSection, quad: AngularQuadrature) -> _Evaluator:
    key = (grid, cs, quad, worker_count())
    ev = _EVAL_CACHE.get(key)
    if ev is None:
        ev = _Evaluator(grid, cs, quad)
        if len(_EVAL_CACHE) >= 8:
            _EVAL_CACHE.pop(next(iter(_EVAL_CACHE)))
        _EVAL_CACHE[key] = ev
    return ev


# ----------------------------------------------------------------------------
# operator evaluation
# ----------------------------------------------------------------------------

def rhs_bilinear(grid: GridSpec, cs: CrossSection, quad: AngularQuadrature,
                 g_values: np.ndarray, h_values: np.ndarray) -> np.ndarray:
    """Qhat(g, h) on the grid nodes from raw transform samples.

    The zero node is set to exactly 0: there eta+ = eta- = 0 and the
    gain/loss terms cancel identically, so any residue is pure roundoff.
    """
    ev = _evaluator(grid, cs, quad)
    g_values = np.asarray(g_values, dtype=complex).reshape(grid.shape)
    h_values = np.asarray(h_values, dtype=complex).reshape(grid.shape)
    gm = ev.gather(refine_array(grid, g_values), "minus")
    hp = ev.gather(refine_array(grid, h_values), "plus")
    gain = (gm * hp) @ ev.weights
    g0 = g_values[grid.zero_index]
    out = (gain - ev.total_weight * g0 * h_values.reshape(-1)).reshape(grid.shape)
    out[grid.zero_index] = 0.0
    return out


def rhs(state: SpectralState, cs: CrossSection, quad: AngularQuadrature) -> np.ndarray:
    """Qhat(f, f) for a state."""
    return rhs_bilinear(state.grid, cs, quad, state.values, state.values)


def total_weight(grid: GridSpec, cs: CrossSection, quad: AngularQuadrature) -> float:
    """Truncated total cross-section (the loss-term coefficient)."""
    return _evaluator(grid, cs, quad).total_weight


def stability_limit(state: SpectralState, cs: CrossSection,
                    quad: AngularQuadrature) -> float:
    """Largest safe time step 0.5 / (fhat(0) * total cross-section); the loss
    term makes the stiffest mode decay at rate fhat(0) * W."""
    lam = state.mass * total_weight(state.grid, cs, quad)
    return 0.5 / lam


def truncation_error_bound(state_g: SpectralState, state_h: SpectralState,
                           cs: CrossSection, quad: AngularQuadrature) -> np.ndarray:
    """Pointwise bound on the discarded |theta| < theta_min part of
    Qhat(g, h), valid for nonnegative densities g, h.

    Pairing each sigma with its mirror kills the odd-in-omega linear terms;
    what remains is controlled by second differences of the transforms, giving
    an integrand bound C(|eta|) theta^2 with

        C = pi^2 |eta|^2 (m2(g) m0(h) + m0(g) m2(h))
            + pi |eta| (M1(g) m0(h) + m0(g) M1(h)),      d >= 2,
        C = (2 pi)^2 m2(g) m0(h) |eta|^2 + 2 pi m0(g) M1(h) |eta|,   d = 1,

    where M1 = int |v| f is replaced by its Cauchy-Schwarz bound
    sqrt(m0 m2). Integrating kappa theta^(-1-2nu) theta^2 over the discarded
    range gives the factor theta_min^(2-2nu)/(2-2nu) times the sigma
    multiplicity.
    """
    grid = state_g.grid
    d = grid.dimension
    mg = moments(state_g, 2)
    mh = moments(state_h, 2)
    m0g, m2g = mg[0], mg[2]
    m0h, m2h = mh[0], mh[2]
    M1g = math.sqrt(max(m0g * m2g, 0.0))
    M1h = math.sqrt(max(m0h * m2h, 0.0))
    r = grid.abs_nodes()
    if d == 1:
        c = (2 * math.pi) ** 2 * m2g * m0h * r ** 2 + 2 * math.pi * m0g * M1h * r
        mult = 2.0
    else:
        c = (math.pi ** 2 * (m2g * m0h + m0g * m2h) * r ** 2
             + math.pi * (M1g * m0h + m0g * M1h) * r)
        mult = 2.0 * math.pi if d == 3 else 2.0
    tail = cs.kappa * quad.theta_min ** (2.0 - 2.0 * cs.nu) / (2.0 - 2.0 * cs.nu)
    return mult * tail * c


def coercivity_probe(state: SpectralState, cs: CrossSection,
                     quad: AngularQuadrature) -> np.ndarray:
    """Per-node dissipativity margin W * fhat(0) - int b |fhat(eta-)| dsigma.

    Nonnegative because |fhat| <= fhat(0) for a nonnegative density; its size
    away from eta = 0 is what drives regularization at that frequency.
    """
    ev = _evaluator(state.grid, cs, quad)
    gm = np.abs(ev.gather(refine_array(state.grid, state.values), "minus"))
    absorbed = gm @ ev.weights
    return (ev.total_weight * state.mass - absorbed).reshape(state.grid.shape)
