"""Local densities for Waring-type counts over friable numbers.

A friable-biased probability measure mu_q on Z/qZ (defined on prime powers
and extended multiplicatively) drives every non-archimedean quantity here:

* the weighted exponential sums S(x, y; q, a) = sum_b mu_q(b) e(a b^k / q),
* their unit-averaged powers S(q) = sum_{(a,q)=1} S(x,y;q,a)^s e(-aN/q),
* the weighted solution densities M(q) of n_1^k + ... + n_s^k = N (mod q),
* the local factors beta_p = sum_l S(p^l) with certified geometric tails,
* the archimedean factor beta_infty, both in closed form
  Gamma(s*alpha/k)^-1 Gamma(alpha/k + 1)^s and as a truncated Fourier
  integral of the oscillatory transform, and truncated singular series.

Floating point throughout; `friable.exact` has the rational-arithmetic
twin used by the identity checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characters import factorize
from .errors import ResourceLimitError
from .weyl import phi_check_grid

BETA_TAIL_EPS = 0.1  # slack exponent in truncation-level heuristics


@dataclass(frozen=True)
class LocalMeasure:
    """The measure mu_{p^m} at parameters (alpha, y); mass depends only on
    the p-adic valuation v of the residue (capped at m)."""

    p: int
    m: int
    alpha: float
    y: float
    mass_by_valuation: tuple

    @classmethod
    def build(cls, p, m, alpha, y):
        masses = tuple(mu_mass(p, m, v, alpha, y) for v in range(m + 1))
        return cls(p, m, alpha, y, masses)


@dataclass
class LocalFactor:
    """A computed beta_p with its truncation level and tail bound."""

    p: int
    value: float
    tail_bound: float
    levels: int
    terms: list = field(default_factory=list)


@dataclass
class TruncatedIntegral:
    value: float
    imag_residual: float
    tail_estimate: float
    Delta: float


@dataclass
class TruncatedSeries:
    value: float
    imag_residual: float
    tail_estimate: float
    Q: int


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1 if d == 2 else 2
    return True


def mu_mass(p: int, m: int, v: int, alpha: float, y: float) -> float:
    """Mass mu_{p^m}(b) for any b with v_p(b) = v (v capped at m).

    Uniform on units when p > y; friable-biased by p^((1-alpha) v) when
    p <= y, with an atom p^(-alpha m) at v = m.
    """
    if not _is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if not (0 <= v <= m):
        raise ValueError(f"need 0 <= v <= m, got v={v}, m={m}")
    phi = (p - 1) * p ** (m - 1)
    if p > y:
        if v > 0:
            return 0.0
        return 1.0 / phi
    if v == m:
        return float(p) ** (-alpha * m)
    return float(p) ** ((1.0 - alpha) * v) * (1.0 - float(p) ** -alpha) / phi


def _valuation_vector(q: int, p: int, m: int) -> np.ndarray:
    """min(v_p(b), m) for b = 0..q-1."""
    v = np.zeros(q, dtype=np.int64)
    pj = p
    for _ in range(m):
        v[::pj] += 1
        pj *= p
    return np.minimum(v, m)


def _mass_vector(q: int, alpha: float, y: float) -> np.ndarray:
    """mu_q(b) for b = 0..q-1, via multiplicativity over prime powers."""
    masses = np.ones(q, dtype=np.float64)
    for p, m in factorize(q):
        local = np.array([mu_mass(p, m, v, alpha, y) for v in range(m + 1)])
        masses *= local[_valuation_vector(q, p, m)]
    return masses


def _power_class_weights(q: int, k: int, alpha: float, y: float) -> np.ndarray:
    """f[c] = sum of mu_q(b) over b with b^k = c (mod q)."""
    if q == 1:
        return np.ones(1, dtype=np.float64)
    masses = _mass_vector(q, alpha, y)
    b = np.arange(q, dtype=np.int64)
    r = np.ones(q, dtype=np.int64)
    for _ in range(k):
        r = (r * b) % q
    f = np.zeros(q, dtype=np.float64)
    np.add.at(f, r, masses)
    return f


def s_xy_qa(q: int, a: int, alpha: float, y: float, k: int) -> complex:
    """S(x, y; q, a) = sum_{b mod q} mu_q(b) e(a b^k / q)."""
    if q < 1 or q > 10**5:
        raise ValueError("need 1 <= q <= 1e5")
    if math.gcd(a, q) != 1:
        raise ValueError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    f = _power_class_weights(q, k, alpha, y)
    c = np.arange(q)
    return complex(np.sum(f * np.exp(2j * np.pi * ((a % q) * c % q) / q)))


def s_xy_qa_all(q: int, alpha: float, y: float, k: int) -> np.ndarray:
    """S(x, y; q, a) for all a = 0..q-1 via a length-q DFT."""
    f = _power_class_weights(q, k, alpha, y)
    return q * np.fft.ifft(f)


def s_q(q: int, N: int, alpha: float, y: float, k: int, s: int) -> complex:
    """S(q) = sum over units a mod q of S(x,y;q,a)^s e(-aN/q).

    Conjugate symmetry in a forces the value to be real up to rounding.
    """
    if q < 1 or q > 10**4:
        raise ValueError("need 1 <= q <= 1e4")
    if q == 1:
        return 1.0 + 0.0j
    vals = s_xy_qa_all(q, alpha, y, k)
    a = np.arange(q)
    units = np.gcd(a, q) == 1
    phases = np.exp(-2j * np.pi * ((a[units] * (N % q)) % q) / q)
    return complex(np.sum(vals[units] ** s * phases))


def m_q(q: int, N: int, alpha: float, y: float, k: int, s: int) -> float:
    """M(q): the mu_q-weighted density of solutions of
    n_1^k + ... + n_s^k = N (mod q), via s-fold cyclic convolution."""
    if q == 1:
        return 1.0
    if q > 10**5:
        raise ResourceLimitError(
            f"m_q budget exceeded for q={q}; evaluate via the identity "
            "sum over d|q of S(d) = q M(q) instead"
        )
    f = _power_class_weights(q, k, alpha, y)
    fh = np.fft.fft(f)
    g = np.fft.ifft(fh**s)
    return float(g[N % q].real)


def beta_p(
    p: int,
    N: int,
    alpha: float,
    y: float,
    k: int,
    s: int,
    tail_tol: float = 1e-9,
) -> LocalFactor:
    """beta_p = sum_{l >= 0} S(p^l), truncated with a certified tail.

    The series is geometric-dominated, |S(p^l)| <= C p^(l(1 - s alpha/k)),
    so it converges only when s*alpha/k > 1; the truncation level is chosen
    from tail_tol and then the tail is re-estimated from the computed terms.
    """
    sak = s * alpha / k
    if sak <= 1.0 + 1e-9:
        raise ValueError(f"beta_p series divergent: s*alpha/k = {sak:.4f} <= 1")
    decay = 1.0 - sak + BETA_TAIL_EPS  # < 0
    levels = max(4, math.ceil(math.log(tail_tol) / (decay * math.log(p))))
    terms = [1.0]
    q = 1
    for _ in range(levels):
        q *= p
        if q > 10**4:
            break
        terms.append(float(s_q(q, N, alpha, y, k, s).real))
    value = math.fsum(terms)
    ell = len(terms) - 1
    ratio = float(p) ** (1.0 - sak)
    c_fit = max(
        (abs(t) / float(p) ** (l * (1.0 - sak)) for l, t in enumerate(terms) if l >= 1),
        default=0.0,
    )
    tail = c_fit * float(p) ** ((ell + 1) * (1.0 - sak)) / (1.0 - ratio)
    return LocalFactor(p=p, value=value, tail_bound=tail, levels=ell, terms=terms)


def beta_infty_closed(alpha: float, k: int, s: int) -> float:
    """Gamma(s alpha / k)^-1 * Gamma(alpha/k + 1)^s."""
    if alpha <= 0 or s < 1:
        raise ValueError("need alpha > 0 and s >= 1")
    return math.gamma(alpha / k + 1.0) ** s / math.gamma(s * alpha / k)


def beta_infty_numeric(
    alpha: float, k: int, s: int, Delta: float = 2000.0
) -> TruncatedIntegral:
    """Truncated Fourier form: int_{|d| <= Delta} Phi(d, alpha)^s e(-d) dd.

    Gauss-Legendre panels sized so each sees at most ~4 radians of the
    fastest phase e((s-1) d).  The reported tail estimate scales like
    Delta^(1 - s alpha/k) with an empirical prefactor sampled near the
    cutoff.
    """
    sak = s * alpha / k
    if sak <= 1.0:
        raise ValueError(f"integral divergent: s*alpha/k = {sak:.4f} <= 1")
    h = min(0.25, 4.0 / (2.0 * math.pi * max(s - 1, 1)))
    nodes, weights = np.polynomial.legendre.leggauss(12)
    n_panels = int(math.ceil(2.0 * Delta / h))
    edges = np.linspace(-Delta, Delta, n_panels + 1)
    total = 0.0 + 0.0j
    chunk = max(1, 200000 // 12)
    for i in range(0, n_panels, chunk):
        lo = edges[i : i + chunk]
        hi = edges[i + 1 : i + 1 + chunk]
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        pts = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        phi = phi_check_grid(pts, alpha, k) ** s
        integrand = phi * np.exp(-2j * np.pi * pts)
        w = (half[:, None] * weights[None, :]).ravel()
        total += np.sum(integrand * w)
    # empirical prefactor for the |Phi| ~ c0 |d|^(-alpha/k) envelope
    sample = np.linspace(0.9 * Delta, Delta, 32)
    c0 = float(np.max(np.abs(phi_check_grid(sample, alpha, k)) * sample ** (alpha / k)))
    tail = 2.0 * c0**s * Delta ** (1.0 - sak) / (sak - 1.0)
    return TruncatedIntegral(
        value=float(total.real),
        imag_residual=float(abs(total.imag)),
        tail_estimate=tail,
        Delta=Delta,
    )


def s_q_multiplicative(
    q: int, N: int, alpha: float, y: float, k: int, s: int, cache: dict | None = None
) -> complex:
    """S(q) via multiplicativity from its prime-power values."""
    if q == 1:
        return 1.0 + 0.0j
    out = 1.0 + 0.0j
    for p, m in factorize(q):
        key = (p**m, N % p**m)
        if cache is not None and key in cache:
            val = cache[key]
        else:
            val = s_q(p**m, N, alpha, y, k, s)
            if cache is not None:
                cache[key] = val
        out *= val
    return out


def singular_series_truncated(
    N: int, Q: int, alpha: float, y: float, k: int, s: int, margin: float = 0.05
) -> TruncatedSeries:
    """sum_{q <= Q} S(q), with a tail estimate C Q^(2 - s alpha/k + eps).

    Requires s*alpha/k > 2 + margin so the full series converges
    absolutely; the fitted prefactor comes from the computed |S(q)|.
    """
    sak = s * alpha / k
    if sak <= 2.0 + margin:
        raise ValueError(
            f"singular series not certifiably convergent: s*alpha/k = {sak:.4f}"
        )
    cache: dict = {}
    total = 0.0 + 0.0j
    c_fit = 0.0
    eps = BETA_TAIL_EPS
    for q in range(1, Q + 1):
        val = s_q_multiplicative(q, N, alpha, y, k, s, cache)
        total += val
        if q > 1:
            c_fit = max(c_fit, abs(val) / q ** (1.0 - sak + eps))
    tail = c_fit * Q ** (2.0 - sak + eps) / (sak - 2.0 - eps)
    return TruncatedSeries(
        value=float(total.real),
        imag_residual=float(abs(total.imag)),
        tail_estimate=tail,
        Q=Q,
    )
