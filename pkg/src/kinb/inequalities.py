"""Closed-form constants and quantitative inequalities used by the smoothing
diagnostics, together with numerical checkers for each of them.

Everything here is exact arithmetic on scalars/arrays; no grids are involved.
The checkers are written so a randomized driver can hammer them: each returns
a small result object with the evaluated sides instead of just a boolean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError

__all__ = [
    "epsilon",
    "epsilon_split_gap",
    "alpha_md",
    "required_moment",
    "LambdaPoints",
    "kl_constant",
    "kl_vandermonde_norm_matrix",
    "optimize_lambdas",
    "kl_check",
    "KLCheckResult",
    "TrigPoly",
    "pointwise_from_l2_check",
    "DDCheckResult",
    "expdiff_check",
    "ExpDiffResult",
]

# Test hook: the verify command's failure path is exercised by scaling the
# Kolmogorov-Landau constant away from its correct value. Production value 1.0.
_CM_SCALE = 1.0


# ----------------------------------------------------------------------------
# epsilon(alpha, u) = (1 + u)^alpha - u^alpha
# ----------------------------------------------------------------------------

def epsilon(alpha, u):
    """Evaluate (1 + u)^alpha - u^alpha stably for u in [0, inf].

    For large u the two powers agree to many digits, so the difference is
    computed as u^alpha * expm1(alpha * log1p(1/u)). Key facts relied on
    elsewhere: for fixed alpha in (0,1) the function strictly decreases in u
    from 1 to 0, is bounded by u^(alpha-1), and increases in alpha for u > 0.
    """
    alpha = np.asarray(alpha, dtype=float)
    u = np.asarray(u, dtype=float)
    if np.any(alpha < 0) or np.any(alpha > 1):
        raise ValueError("alpha must lie in [0, 1]")
    if np.any(u < 0):
        raise ValueError("u must be nonnegative")
    small = u <= 1.0
    us = np.where(small, u, 1.0)
    ul = np.where(small, 1.0, u)
    direct = (1.0 + us) ** alpha - us ** alpha
    with np.errstate(divide="ignore"):
        tail = ul ** alpha * np.expm1(alpha * np.log1p(1.0 / ul))
    out = np.where(small, direct, tail)
    out = np.where(np.isinf(u), np.zeros_like(out), out)
    if out.ndim == 0:
        return float(out)
    return out


def epsilon_split_gap(alpha: float, s_minus: float, s_plus: float) -> float:
    """Slack of (1+s-+s+)^a <= eps(a, s+/s-) (1+s-)^a + (1+s+)^a, for
    0 <= s- <= s+. Nonnegative when the inequality holds."""
    if not 0 <= s_minus <= s_plus:
        raise ValueError("need 0 <= s_minus <= s_plus")
    lhs = (1.0 + s_minus + s_plus) ** alpha
    eps = 0.0 if s_minus == 0 else epsilon(alpha, s_plus / s_minus)
    rhs = eps * (1.0 + s_minus) ** alpha + (1.0 + s_plus) ** alpha
    return rhs - lhs


# ----------------------------------------------------------------------------
# admissible weight exponents and moment requirements
# ----------------------------------------------------------------------------

def alpha_md(m: int, n: int) -> float:
    """Largest weight exponent with eps(alpha, 1) = 2m/(2m + n).

    alpha_md = log((4m + n)/(2m + n)) / log 2; increasing in m with limit 1,
    decreasing in the dimension-like index n.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive integers")
    return math.log((4 * m + n) / (2 * m + n)) / math.log(2.0)


def required_moment(nu: float, bounded: bool = False) -> int:
    """Smallest integer moment order m compatible with singularity strength nu.

    bounded=False: m >= max(2, (2^nu - 1)/(2 - 2^nu));
    bounded=True:  m >= max(2, (2^nu - 1)/(2 (2 - 2^nu))).
    """
    if not 0 < nu < 1:
        raise ValueError("nu must lie in (0, 1)")
    r = (2.0 ** nu - 1.0) / (2.0 - 2.0 ** nu)
    if bounded:
        r /= 2.0
    return max(2, math.ceil(r - 1e-12))


# ----------------------------------------------------------------------------
# Kolmogorov-Landau constant via the Vandermonde construction
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaPoints:
    """Interior evaluation points 0 < l_1 < ... < l_{m-1} <= 1 together with
    the derivative-interpolation constant they induce."""
    m: int
    points: tuple
    constant: float


def _validate_lambdas(m: int, lambdas: Sequence[float]) -> np.ndarray:
    lam = np.asarray(lambdas, dtype=float)
    if m < 2:
        raise ValueError("m must be >= 2")
    if lam.shape != (m - 1,):
        raise ValueError(f"need {m - 1} points for m={m}")
    if not (np.all(lam > 0) and np.all(lam <= 1)):
        raise ValueError("points must lie in (0, 1]")
    if m > 2 and not np.all(np.diff(lam) > 0):
        raise ValueError("points must be strictly increasing")
    return lam


def kl_constant(m: int, lambdas: Sequence[float]) -> float:
    """C_m = 2^m m! (m-1) * ||V^{-1}||, with the l1-induced inverse norm in
    closed form: max over beta of (1/l_beta) prod_{v != beta} (1+l_v)/|l_v - l_beta|.

    V is the Vandermonde-type matrix with rows (l_s, l_s^2, ..., l_s^{m-1}).
    """
    lam = _validate_lambdas(m, lambdas)
    best = 0.0
    for b in range(m - 1):
        prod = 1.0
        for v in range(m - 1):
            if v == b:
                continue
            prod *= (1.0 + lam[v]) / abs(lam[v] - lam[b])
        best = max(best, prod / lam[b])
    return _CM_SCALE * 2.0 ** m * math.factorial(m) * (m - 1) * best


def kl_vandermonde_norm_matrix(m: int, lambdas: Sequence[float]) -> float:
    """||V^{-1}|| by direct matrix inversion (cross-check for kl_constant)."""
    lam = _validate_lambdas(m, lambdas)
    V = np.vander(lam, N=m, increasing=True)[:, 1:]  # rows (l, l^2, .., l^{m-1})
    Vi = np.linalg.inv(V)
    return float(np.abs(Vi).sum(axis=0).max())


def optimize_lambdas(m: int, seed: int = 0, starts: int = 16) -> LambdaPoints:
    """Coordinate-descent minimization of C_m over (0,1]^{m-1}.

    Deterministic for a fixed seed; multistart with `starts` random initial
    orderings plus the equispaced one. m=2 recovers l=[1], C_2 = 8.
    """
    if not 2 <= m <= 8:
        raise ValueError("optimize_lambdas supports 2 <= m <= 8")
    rng = np.random.default_rng(seed)
    dim = m - 1

    def cost(lam: np.ndarray) -> float:
        if np.any(lam <= 0) or np.any(lam > 1) or (dim > 1 and np.any(np.diff(lam) <= 1e-9)):
            return math.inf
        return kl_constant(m, lam)

    def descend(lam: np.ndarray) -> tuple:
        lam = lam.copy()
        best = cost(lam)
        for _ in range(200):
            improved = False
            for j in range(dim):
                lo = lam[j - 1] + 1e-6 if j > 0 else 1e-6
                hi = lam[j + 1] - 1e-6 if j < dim - 1 else 1.0
                if hi <= lo:
                    continue
                grid = np.linspace(lo, hi, 257)
                vals = np.array([cost(np.concatenate([lam[:j], [g], lam[j + 1:]]))
                                 for g in grid])
                k = int(np.argmin(vals))
                if vals[k] < best - 1e-13:
                    lam[j] = grid[k]
                    best = vals[k]
                    improved = True
            if not improved:
                break
        return lam, best

    candidates = [np.linspace(1.0 / dim, 1.0, dim)]
    for _ in range(starts):
        candidates.append(np.sort(rng.uniform(0.02, 1.0, size=dim)))
    best_lam, best_c = None, math.inf
    for c0 in candidates:
        lam, c = descend(np.asarray(c0, dtype=float))
        if c < best_c:
            best_lam, best_c = lam, c
    return LambdaPoints(m=m, points=tuple(float(x) for x in best_lam), constant=float(best_c))


@lru_cache(maxsize=16)
def _default_cm(m: int) -> float:
    return optimize_lambdas(m).constant


# ----------------------------------------------------------------------------
# derivative-sandwich check on [0, 1] for polynomials
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class KLCheckResult:
    ok_additive: bool
    ok_multiplicative: bool
    lhs: float
    additive_bound: float
    multiplicative_bound: float

    @property
    def ok(self) -> bool:
        return self.ok_additive and self.ok_multiplicative


def _poly_sup_01(p: np.polynomial.Polynomial) -> float:
    """Sup norm on [0,1]: dense sampling (2048 points) refined with the real
    critical points of the polynomial."""
    xs = np.linspace(0.0, 1.0, 2048)
    vals = np.abs(p(xs))
    best = float(vals.max())
    dp = p.deriv()
    scale = float(np.abs(dp.coef).max()) if dp.coef.size else 0.0
    if scale > 0.0:
        # drop leading coefficients too small to matter; a subnormal leader
        # overflows the companion-matrix eigenproblem
        dp = dp.trim(tol=1e-250 + 1e-14 * scale)
    if dp.degree() >= 1:
        try:
            roots = dp.roots()
        except np.linalg.LinAlgError:
            return best
        real = roots[np.abs(roots.imag) < 1e-9].real
        inside = real[(real >= 0.0) & (real <= 1.0)]
        if inside.size:
            best = max(best, float(np.abs(p(inside)).max()))
    return best


def kl_check(coeffs: Sequence[float], m: int, k: int, u: float,
             cm: float | None = None) -> KLCheckResult:
    """Check both derivative interpolation bounds for a polynomial on [0,1].

    additive:        ||w^(k)|| <= C_m (||w|| / u^k + u^{m-k} ||w^(m)||)
    multiplicative'  ||w^(k)|| <= 2 C_m ||w||^{1-k/m} max(||w||, ||w^(m)||)^{k/m}

    coeffs are ascending power-basis coefficients; 1 <= k < m, 0 < u <= 1.
    cm defaults to the optimized constant for this m.
    """
    if not (m >= 2 and 1 <= k < m):
        raise ValueError("need m >= 2 and 1 <= k < m")
    if not 0 < u <= 1:
        raise ValueError("u must lie in (0, 1]")
    if cm is None:
        cm = _default_cm(m)
    p = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    nw = _poly_sup_01(p)
    nk = _poly_sup_01(p.deriv(k))
    nm = _poly_sup_01(p.deriv(m))
    add = cm * (nw / u ** k + u ** (m - k) * nm)
    mult = 2.0 * cm * nw ** (1.0 - k / m) * max(nw, nm) ** (k / m)
    tol = 1e-9 * max(1.0, nk)
    return KLCheckResult(ok_additive=nk <= add + tol,
                         ok_multiplicative=nk <= mult + tol,
                         lhs=nk, additive_bound=add, multiplicative_bound=mult)


# ----------------------------------------------------------------------------
# band-limited test functions and the pointwise-from-L2 bound
# ----------------------------------------------------------------------------

class TrigPoly:
    """Real trigonometric polynomial on R^n, periodic with period L per axis.

    Stored as {wavevector tuple: complex coefficient} with Hermitian symmetry
    so evaluations are real. Smooth and band-limited, hence all sup norms and
    cube integrals below are numerically trustworthy.
    """

    def __init__(self, n: int, period: float, coeffs: dict):
        if n not in (1, 2):
            raise ValueError("TrigPoly supports n in {1, 2}")
        self.n = n
        self.period = float(period)
        self.coeffs = {tuple(k): complex(c) for k, c in coeffs.items()}

    @classmethod
    def random(cls, n: int, kmax: int, period: float, seed: int,
               scale: float = 1.0) -> "TrigPoly":
        rng = np.random.default_rng(seed)
        coeffs: dict = {}
        rng_keys = []
        if n == 1:
            rng_keys = [(k,) for k in range(0, kmax + 1)]
        else:
            rng_keys = [(kx, ky) for kx in range(-kmax, kmax + 1)
                        for ky in range(0, kmax + 1)]
            rng_keys = [k for k in rng_keys if k[1] > 0 or k[0] >= 0]
        for key in rng_keys:
            c = complex(rng.normal(), rng.normal()) * scale / (1 + sum(abs(x) for x in key)) ** 2
            if all(x == 0 for x in key):
                c = complex(c.real, 0.0)
            coeffs[key] = coeffs.get(key, 0) + c
            neg = tuple(-x for x in key)
            if neg != key:
                coeffs[neg] = coeffs.get(neg, 0) + c.conjugate()
        return cls(n, period, coeffs)

    def eval(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = x.reshape(1, 1)
        elif x.ndim == 1:
            x = x[:, None] if self.n == 1 else x[None, :]
        out = np.zeros(x.shape[0], dtype=complex)
        w = 2.0j * np.pi / self.period
        for k, c in self.coeffs.items():
            phase = np.zeros(x.shape[0], dtype=complex)
            for i, ki in enumerate(k):
                phase += ki * x[:, i]
            out += c * np.exp(w * phase)
        return out.real

    def axis_derivative(self, axis: int, order: int) -> "TrigPoly":
        w = 2.0j * np.pi / self.period
        coeffs = {k: c * (w * k[axis]) ** order for k, c in self.coeffs.items()}
        return TrigPoly(self.n, self.period, coeffs)

    def sup_norm(self, samples: int = 4096) -> float:
        if self.n == 1:
            xs = np.linspace(0, self.period, samples, endpoint=False)[:, None]
            return float(np.abs(self.eval(xs)).max())
        s = max(256, int(math.isqrt(samples)) * 4)
        g = np.linspace(0, self.period, s, endpoint=False)
        # separable evaluation: sum_k c_k e1[kx] (x) e2[ky]
        keys = list(self.coeffs.keys())
        kx = np.array([k[0] for k in keys])
        ky = np.array([k[1] for k in keys])
        cc = np.array([self.coeffs[k] for k in keys])
        w = 2.0j * np.pi / self.period
        ex = np.exp(w * np.outer(g, kx))
        ey = np.exp(w * np.outer(ky, g))
        vals = (ex * cc[None, :]) @ ey
        return float(np.abs(vals.real).max())

    def cube_integral_sq(self, corner: np.ndarray, side: float = 2.0) -> float:
        """Exact integral of H^2 over the axis-aligned cube starting at
        `corner` and extending by `side` along each axis (signed per corner
        orientation is handled by the caller)."""
        sq = getattr(self, "_sq_coeffs", None)
        if sq is None:
            sq = {}
            for k1, c1 in self.coeffs.items():
                for k2, c2 in self.coeffs.items():
                    key = tuple(a + b for a, b in zip(k1, k2))
                    sq[key] = sq.get(key, 0.0) + c1 * c2
            object.__setattr__(self, "_sq_coeffs", sq)
        w = 2.0j * np.pi / self.period
        total = 0.0 + 0.0j
        for k, c in sq.items():
            term = c
            for i, ki in enumerate(k):
                a = corner[i]
                b = a + side
                if ki == 0:
                    term *= (b - a)
                else:
                    term *= (np.exp(w * ki * b) - np.exp(w * ki * a)) / (w * ki)
            total += term
        return float(total.real)


@dataclass(frozen=True)
class DDCheckResult:
    ok: bool
    worst_margin: float
    constant: float
    failures: tuple


def _chain_constant(H: TrigPoly, m: int) -> float:
    """Constant for |H(x)| <= L (int_{Q_x} H^2)^{m/(2m+n)}.

    Per-axis factors L_i = 2 p_i C_m max(||H||^{1/m}, ||d_i^m H||^{1/m})
    + ||H||^{1/m} with p_i = 3 + (n - i)/m from the exponent ladder
    q_i = 2 + (n - i + 1)/m; the product is raised to m/(2m+n) so both sides
    scale identically under H -> t H.
    """
    n = H.n
    cm = _default_cm(m)
    sup_h = H.sup_norm()
    prod = 1.0
    for i in range(1, n + 1):
        sup_dm = H.axis_derivative(i - 1, m).sup_norm()
        p_i = 3.0 + (n - i) / m
        prod *= 2.0 * p_i * cm * max(sup_h, sup_dm) ** (1.0 / m) + sup_h ** (1.0 / m)
    return prod ** (m / (2.0 * m + n))


def pointwise_from_l2_check(H: TrigPoly, m: int, points: np.ndarray,
                            side: float = 2.0) -> DDCheckResult:
    """Check |H(x)| <= L_{m,n} (int_{Q_x} H^2)^{m/(2m+n)} at each point.

    Q_x is the cube of side 2 with corner x, oriented away from the origin
    per axis (so x . (xi - x) >= 0 on Q_x).
    """
    pts = np.asarray(points, dtype=float)
    n = H.n
    if pts.ndim == 1:
        pts = pts[:, None] if n == 1 else pts[None, :]
    if pts.shape[1] != n:
        raise ValueError("points dimension mismatch")
    L = _chain_constant(H, m)
    expo = m / (2.0 * m + n)
    failures = []
    worst = math.inf
    for x in pts:
        corner = np.where(x >= 0, x, x - side)
        integral = max(H.cube_integral_sq(corner, side), 0.0)
        lhs = abs(float(H.eval(x[None, :])[0]))
        rhs = L * integral ** expo
        margin = rhs - lhs
        worst = min(worst, margin)
        if margin < -1e-9 * max(1.0, lhs):
            failures.append((tuple(x), lhs, rhs))
    return DDCheckResult(ok=not failures, worst_margin=worst, constant=L,
                         failures=tuple(failures[:5]))


# ----------------------------------------------------------------------------
# two-sided exponential difference bound, high precision
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpDiffResult:
    ok: bool
    lhs: float
    rhs: float


def expdiff_check(alpha: float, beta_t: float, s_minus: float, s_plus: float,
                  dps: int = 50) -> ExpDiffResult:
    """Verify, at `dps` decimal digits, that for Gt(s) = exp(beta_t (1+s)^alpha)
    and s = s_minus + s_plus with 0 <= s_minus <= s_plus:

      |Gt(s) - Gt(s_plus)| <=
        2 alpha beta_t (1+s_plus)^alpha (1 - s_plus/s)
        * Gt(s_minus)^eps(alpha, s_plus/s_minus) * Gt(s_plus).
    """
    import mpmath as mp
    if not 0 <= s_minus <= s_plus:
        raise ValueError("need 0 <= s_minus <= s_plus")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    with mp.workdps(dps):
        a = mp.mpf(alpha)
        bt = mp.mpf(beta_t)
        sm = mp.mpf(s_minus)
        sp = mp.mpf(s_plus)
        s = sm + sp
        gt = lambda x: mp.e ** (bt * (1 + x) ** a)
        lhs = abs(gt(s) - gt(sp))
        if s == 0:
            rhs = mp.mpf(0)
        else:
            eps = mp.mpf(0) if sm == 0 else (1 + sp / sm) ** a - (sp / sm) ** a
            rhs = 2 * a * bt * (1 + sp) ** a * (1 - sp / s) * gt(sm) ** eps * gt(sp)
        ok = bool(lhs <= rhs * (1 + mp.mpf(10) ** (5 - dps)))
        return ExpDiffResult(ok=ok, lhs=float(lhs), rhs=float(rhs))
