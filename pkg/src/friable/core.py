"""Friable-number infrastructure: sieves, enumeration, counting, saddle point.

A positive integer n is y-friable (y-smooth) when its largest prime factor
P(n) is at most y.  Everything else in the package builds on the objects
provided here:

* smallest/greatest prime factor sieves and friable enumeration,
* Psi(x, y) = #S(x, y) where S(x, y) = {n <= x : P(n) <= y}, plus the
  character-twisted count Psi(x, y; chi),
* the saddle point alpha(x, y), the unique root of
  sum_{p<=y} log p / (p^alpha - 1) = log x,
* the truncated Euler product zeta(s, y) = prod_{p<=y} (1 - p^-s)^-1,
* Dickman's rho function and the Hildebrand-Tenenbaum-style saddle-point
  approximation of Psi(x, y).

Sieve tables are built once and cached; after construction they are
immutable, so callers may freely share them across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericError, ResourceLimitError

DEFAULT_SIEVE_LIMIT = 10**8
LATTICE_Y_LIMIT = 10**3
SADDLE_DEFAULT_TOL = 1e-10
DICKMAN_DEFAULT_STEP = 1e-3
DICKMAN_DEFAULT_UMAX = 20.0


@dataclass(frozen=True)
class FriableParams:
    """The pair (x, y) with 2 <= y <= x; u = log x / log y."""

    x: float
    y: float

    def __post_init__(self):
        if not (self.y >= 2 and self.x >= self.y):
            raise ValueError(f"need 2 <= y <= x, got x={self.x}, y={self.y}")

    @property
    def u(self) -> float:
        return math.log(self.x) / math.log(self.y)


@dataclass(frozen=True)
class SaddleData:
    """Solved saddle point for a pair (x, y).

    alpha solves sum_{p<=y} log p/(p^alpha - 1) = log x up to `residual`;
    sigma2 is minus the derivative of that prime sum at alpha, i.e.
    sum_{p<=y} (log p)^2 p^alpha / (p^alpha - 1)^2; zeta_alpha_y is the
    truncated Euler product zeta(alpha, y).
    """

    alpha: float
    sigma2: float
    zeta_alpha_y: float
    residual: float


@dataclass(frozen=True)
class AsymptoticScales:
    """Derived scales used in error terms: u_y, H(u), Y, and the cutoffs
    Y_eps = exp((log y)^(3/5-eps)) and T_eps = min(exp((log y)^(3/2-eps)), H(u))."""

    u_y: float
    H_u: float
    Y: float
    Y_eps: float
    T_eps: float


@dataclass(frozen=True)
class DickmanTable:
    """Samples of Dickman's rho on a uniform grid [0, u_max]."""

    grid_step: float
    values: np.ndarray  # values[i] = rho(i * grid_step)

    @property
    def u_max(self) -> float:
        return (len(self.values) - 1) * self.grid_step


# ----------------------------------------------------------------------------
# Prime sieves
# ----------------------------------------------------------------------------

_gpf_cache: dict[int, np.ndarray] = {}


@lru_cache(maxsize=8)
def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit, as an int64 array."""
    limit = int(limit)
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def spf_sieve(limit: int, budget: int = DEFAULT_SIEVE_LIMIT) -> np.ndarray:
    """Smallest-prime-factor table for 1..limit.

    entry[n] = smallest prime factor of n for n >= 2; entry[1] = 1 is a
    sentinel meaning "unit".  Raises ResourceLimitError past `budget`.
    """
    limit = int(limit)
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if limit > budget:
        raise ResourceLimitError(
            f"spf_sieve limit {limit} exceeds configured budget {budget}"
        )
    spf = np.zeros(limit + 1, dtype=np.int64)
    if limit >= 1:
        spf[1] = 1
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            view = spf[p * p :: p]
            view[view == 0] = p
    untouched = np.nonzero(spf == 0)[0]
    spf[untouched] = untouched  # remaining entries are primes (and 0 itself)
    if limit >= 0:
        spf[0] = 0
    return spf


def _gpf_sieve(limit: int, budget: int) -> np.ndarray:
    """Greatest-prime-factor table (int32) for 0..limit, cached."""
    limit = int(limit)
    if limit > budget:
        raise ResourceLimitError(
            f"sieve limit {limit} exceeds configured budget {budget}"
        )
    for cached_limit, arr in _gpf_cache.items():
        if cached_limit >= limit:
            return arr[: limit + 1]
    gpf = np.zeros(limit + 1, dtype=np.int32)
    gpf[1] = 1
    for p in range(2, limit + 1):
        if gpf[p] == 0:
            gpf[p::p] = p
    _gpf_cache.clear()  # keep only the largest table
    _gpf_cache[limit] = gpf
    return gpf


# ----------------------------------------------------------------------------
# Friable enumeration and counting
# ----------------------------------------------------------------------------


def _lattice_enumerate(x: float, y: float) -> np.ndarray:
    """All y-friable n <= x by recursing over prime exponent vectors."""
    ps = [int(p) for p in primes_upto(int(y))]
    out = []

    def rec(idx: int, prod: int) -> None:
        out.append(prod)
        for j in range(idx, len(ps)):
            nxt = prod * ps[j]
            if nxt > x:
                break
            rec(j, nxt)

    rec(0, 1)
    arr = np.array(sorted(out), dtype=np.int64)
    return arr


def enumerate_friable(
    params: FriableParams,
    sieve_budget: int = DEFAULT_SIEVE_LIMIT,
    strategy: str = "auto",
) -> np.ndarray:
    """Ascending array of all n in S(x, y), 1 included.

    Strategy "sieve" marks greatest prime factors up to x; "lattice" walks
    prime exponent vectors and only needs y <= LATTICE_Y_LIMIT.  "auto"
    prefers the sieve for x within budget and falls back to the lattice.
    """
    x, y = params.x, params.y
    if strategy not in ("auto", "sieve", "lattice"):
        raise ValueError(f"unknown strategy {strategy!r}")
    use_sieve = strategy == "sieve" or (strategy == "auto" and x <= sieve_budget)
    if use_sieve:
        if x > sieve_budget:
            raise ResourceLimitError(
                f"x={x} exceeds sieve budget {sieve_budget}"
            )
        gpf = _gpf_sieve(int(x), sieve_budget)
        return np.nonzero(gpf[: int(x) + 1] <= y)[0][1:].astype(np.int64)
    if strategy == "lattice" or y <= LATTICE_Y_LIMIT:
        return _lattice_enumerate(x, y)
    raise ResourceLimitError(
        f"neither strategy feasible: x={x} > sieve budget {sieve_budget} "
        f"and y={y} > lattice limit {LATTICE_Y_LIMIT}"
    )


@lru_cache(maxsize=64)
def _friable_values_cached(x: float, y: float) -> np.ndarray:
    return enumerate_friable(FriableParams(x, y))


def friable_values(params: FriableParams) -> np.ndarray:
    """Cached wrapper around enumerate_friable for repeated evaluations."""
    return _friable_values_cached(float(params.x), float(params.y))


def psi(params: FriableParams, **kwargs) -> int:
    """Psi(x, y) = #{n <= x : P(n) <= y}."""
    return int(len(enumerate_friable(params, **kwargs)))


def psi_char(params: FriableParams, chi) -> complex:
    """Psi(x, y; chi) = sum over n in S(x, y) of chi(n)."""
    ns = friable_values(params)
    values = np.asarray(chi.values)
    return complex(values[ns % chi.modulus].sum())


# ----------------------------------------------------------------------------
# Saddle point and Euler products
# ----------------------------------------------------------------------------


def _prime_sum(alpha: float, ps: np.ndarray, logs: np.ndarray) -> float:
    """sum_{p<=y} log p / (p^alpha - 1)."""
    return float(np.sum(logs / np.expm1(alpha * logs)))


def sigma2(alpha: float, y: float) -> float:
    """Second log-derivative scale: sum (log p)^2 p^alpha / (p^alpha - 1)^2."""
    ps = primes_upto(int(y))
    logs = np.log(ps.astype(np.float64))
    pa = np.exp(alpha * logs)
    return float(np.sum(logs * logs * pa / (pa - 1.0) ** 2))


def zeta_partial(s: float, y: float) -> float:
    """zeta(s, y) = prod_{p<=y} (1 - p^-s)^-1, accumulated in log space."""
    if s <= 0:
        raise ValueError("zeta_partial requires s > 0")
    ps = primes_upto(int(y)).astype(np.float64)
    return float(np.exp(-np.sum(np.log1p(-ps ** (-s)))))


def saddle_alpha(
    params: FriableParams, tol: float = SADDLE_DEFAULT_TOL, max_iter: int = 200
) -> SaddleData:
    """Solve sum_{p<=y} log p/(p^alpha - 1) = log x for alpha in (0, 1].

    Newton iteration on the strictly decreasing prime sum, with a
    maintained bracket and bisection fallback; the initial guess is
    log(1 + y/log x)/log y.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x, y = params.x, params.y
    ps = primes_upto(int(y))
    if len(ps) == 0:
        raise ValueError("no primes <= y")
    logs = np.log(ps.astype(np.float64))
    logx = math.log(x)

    def g(a: float) -> float:
        return _prime_sum(a, ps, logs) - logx

    lo, hi = 1e-12, 1.5  # g(lo) > 0 >= g(hi) since alpha(x, y) <= 1
    a = min(max(math.log1p(y / logx) / math.log(y), 1e-6), 1.0)
    ga = g(a)
    for _ in range(max_iter):
        if abs(ga) <= tol:
            break
        if ga > 0:
            lo = a
        else:
            hi = a
        s2 = float(np.sum(logs * logs * np.exp(a * logs) / np.expm1(a * logs) ** 2))
        step = ga / s2  # g' = -sigma2 < 0
        nxt = a + step
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        a, ga = nxt, g(nxt)
    else:
        raise NumericError(
            f"saddle solver did not converge: bracket [{lo}, {hi}], "
            f"alpha={a}, residual={ga}"
        )
    return SaddleData(
        alpha=a,
        sigma2=sigma2(a, y),
        zeta_alpha_y=zeta_partial(a, y),
        residual=ga,
    )


def ht_estimate(params: FriableParams, tol: float = SADDLE_DEFAULT_TOL) -> float:
    """Saddle-point approximation x^alpha zeta(alpha, y) / (alpha sqrt(2 pi sigma2)).

    No correction terms are applied; expect a relative accuracy on the order
    of 1/u + (log y)/y.
    """
    sd = saddle_alpha(params, tol=tol)
    return (
        params.x**sd.alpha
        * sd.zeta_alpha_y
        / (sd.alpha * math.sqrt(2.0 * math.pi * sd.sigma2))
    )


def asymptotic_scales(params: FriableParams, eps: float = 0.1) -> AsymptoticScales:
    """Hybrid scale u_y, H(u), and the cutoffs Y, Y_eps, T_eps for (x, y)."""
    x, y, u = params.x, params.y, params.u
    log_y = math.log(y)
    inv_uy = min(1.0 / u, math.log(1.0 + u) / log_y)
    H_u = math.exp(u / math.log(u + 1.0) ** 2)
    Y = min(y, math.exp(math.sqrt(math.log(x))))
    Y_eps = math.exp(log_y ** (3.0 / 5.0 - eps))
    T_eps = min(math.exp(log_y ** (3.0 / 2.0 - eps)), H_u)
    return AsymptoticScales(u_y=1.0 / inv_uy, H_u=H_u, Y=Y, Y_eps=Y_eps, T_eps=T_eps)


# ----------------------------------------------------------------------------
# Dickman's rho
# ----------------------------------------------------------------------------


def build_dickman_table(
    u_max: float = DICKMAN_DEFAULT_UMAX, grid_step: float = DICKMAN_DEFAULT_STEP
) -> DickmanTable:
    """Tabulate rho by stepping u*rho(u) = integral of rho over [u-1, u].

    The delay equation u rho'(u) = -rho(u-1) is integrated with the
    trapezoid rule on a uniform grid; 1/grid_step must be an integer so
    that u-1 lands on a node.
    """
    m = round(1.0 / grid_step)
    if abs(m * grid_step - 1.0) > 1e-12:
        raise ValueError("1/grid_step must be an integer")
    n = int(round(u_max / grid_step))
    rho = np.ones(n + 1)
    cum = np.zeros(n + 1)  # trapezoid integral of rho from 0 to u_i
    h = grid_step
    for i in range(1, n + 1):
        if i <= m:
            cum[i] = cum[i - 1] + h  # rho = 1 on [0, 1]
            continue
        u_i = i * h
        # rho_i * u_i = cum_i - cum_{i-m}, with cum_i containing rho_i itself
        partial = cum[i - 1] + 0.5 * h * rho[i - 1] - cum[i - m]
        rho_i = partial / (u_i - 0.5 * h)
        rho[i] = rho_i
        cum[i] = cum[i - 1] + 0.5 * h * (rho[i - 1] + rho_i)
    return DickmanTable(grid_step=grid_step, values=rho)


_default_dickman: DickmanTable | None = None


def default_dickman_table() -> DickmanTable:
    global _default_dickman
    if _default_dickman is None:
        _default_dickman = build_dickman_table()
    return _default_dickman


def dickman_rho(u: float, table: DickmanTable | None = None) -> float:
    """rho(u) by linear interpolation in a precomputed table."""
    if u < 0:
        raise ValueError("rho is defined for u >= 0")
    if u <= 1.0:
        return 1.0
    if table is None:
        table = default_dickman_table()
    if u > table.u_max + 1e-12:
        raise ValueError(f"u={u} beyond table range {table.u_max}")
    t = u / table.grid_step
    i = min(int(t), len(table.values) - 2)
    frac = t - i
    v = table.values
    return float(v[i] * (1.0 - frac) + v[i + 1] * frac)
