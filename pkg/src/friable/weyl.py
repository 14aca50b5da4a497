"""Friable Weyl sums, their local transforms, and major/minor arc geometry.

The central object is E_k(x, y; theta) = sum over n in S(x, y) of
e(n^k theta).  Near a rational theta = a/q + delta the sum is governed by
the product of two local transforms:

* the oscillatory integral Phi(lambda, s) = s * int_0^1 e(lambda t^k) t^(s-1) dt,
  evaluated here through the incomplete gamma function in three regimes
  (power series, graded quadrature, asymptotic series);
* the divisor sum H_{a/q}(s) over d1 d2 | q with P(d1 d2) <= y.

Phases n^k*theta are reduced mod 1 in integer arithmetic: a wrapping 64-bit
product against theta's scaled mantissa on the vectorised path, and a
192-bit reduction on the scalar path, so that no accuracy is lost even when
n^k is far beyond 2^53.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import dioph
from .core import FriableParams, SaddleData, friable_values
from .errors import ResourceLimitError

TWO_PI = 2.0 * math.pi
_FAST_PHASE_LIMIT = 2.0**42  # max x^k for the wrapping-uint64 phase path
_GOLDEN_FRAC = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RationalPhase:
    """theta decomposed as a/q + delta with height q(1 + |delta| x^k)."""

    theta: float
    a: int
    q: int
    delta: float
    height: float


@dataclass(frozen=True)
class ArcSet:
    """Union of arcs |q*theta - a| <= Q X^-k over coprime 0 <= a < q <= Q."""

    Q: float
    x: float
    k: int
    arcs: list  # (a, q, half_width) with half_width = Q x^-k / q
    total_measure: float
    overlap_warning: bool


@dataclass
class ScanReport:
    x: float
    y: float
    k: int
    Q: float
    grid_size: int
    sup_ratio: float
    argmax_theta: float | None
    n_scanned: int
    rows: list  # (theta, q, delta, abs_E_over_psi)


# ----------------------------------------------------------------------------
# The oscillatory transform Phi(lambda, s)
# ----------------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def complex_gamma(z: complex) -> complex:
    """Gamma(z) by the Lanczos approximation (relative error ~1e-13)."""
    if z.imag == 0 and z.real > 0:
        return complex(math.gamma(z.real))
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * complex_gamma(1.0 - z))
    z -= 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * cmath.exp(-t) * acc


def _phi_series(z: complex, a: complex) -> complex:
    """a * e^-z * sum_n z^n / (a (a+1) ... (a+n)), for |z| <= ~14."""
    term = 1.0 / a
    acc = term
    for n in range(1, 160):
        term *= z / (a + n)
        acc += term
        if abs(term) < 1e-18 * abs(acc) and n > abs(z):
            break
    return a * cmath.exp(-z) * acc


def _phi_asymptotic(z: complex, a: complex) -> complex:
    """a*Gamma(a)*z^-a minus the asymptotic tail of the upper gamma, |z| >= ~35."""
    head = a * complex_gamma(a) * cmath.exp(-a * cmath.log(z))
    term = 1.0 + 0.0j
    acc = term
    prev = abs(term)
    for n in range(1, 60):
        term *= (a - n) / z
        if abs(term) > prev:  # past the optimal truncation point
            break
        acc += term
        prev = abs(term)
        if prev < 1e-18:
            break
    tail = (a / z) * cmath.exp(-z) * acc
    return head - tail


def _phi_quadrature(lam: complex, a: complex) -> complex:
    """a * int_0^1 e(lam w) w^(a-1) dw for moderate |lam| (~2..6).

    The endpoint singularity is handled by an analytic series on [0, w0]
    with |2 pi lam| w0 <= 1/2, the rest by Gauss-Legendre panels short
    enough that the phase advances at most ~3 radians per panel.
    """
    mu = TWO_PI * lam  # e(lam w) = exp(i mu w)
    abs_mu = abs(mu)
    w0 = min(0.5, 0.5 / abs_mu)
    # series part: a * sum_m (i mu)^m / m! * w0^(m+a) / (m+a)
    w0_pow_a = cmath.exp(a * math.log(w0))
    term = 1.0 + 0.0j
    acc = w0_pow_a / a
    for m in range(1, 40):
        term *= 1j * mu * w0 / m
        acc += term * w0_pow_a / (m + a)
        if abs(term) < 1e-19:
            break
    total = a * acc
    # panelled part on [w0, 1]
    nodes, weights = _gauss_legendre(12)
    w_lo = w0
    while w_lo < 1.0 - 1e-15:
        w_hi = min(1.0, w_lo * 2.0, w_lo + 3.0 / max(abs_mu, 1.0))
        half = 0.5 * (w_hi - w_lo)
        mid = 0.5 * (w_hi + w_lo)
        for t, wt in zip(nodes, weights):
            w = mid + half * t
            total += a * wt * half * cmath.exp(1j * mu * w + (a - 1.0) * math.log(w))
        w_lo = w_hi
    return total


@lru_cache(maxsize=8)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return tuple(x), tuple(w)


def phi_check(lam: complex, s: complex, k: int) -> complex:
    """Phi(lambda, s) = s * int_0^1 e(lambda t^k) t^(s-1) dt, Re(s) > 0.

    Substituting w = t^k reduces to (s/k) int_0^1 e(lambda w) w^(s/k-1) dw,
    an incomplete-gamma value; relative accuracy is ~1e-10 or better
    uniformly in lambda.
    """
    s = complex(s)
    if s.real <= 0:
        raise ValueError("phi_check requires Re(s) > 0")
    if k < 1:
        raise ValueError("k must be a positive integer")
    a = s / k
    lam = complex(lam)
    if lam == 0:
        return 1.0 + 0.0j
    z = -2j * math.pi * lam
    az = abs(z)
    if az <= 14.0:
        return _phi_series(z, a)
    if az >= 35.0:
        return _phi_asymptotic(z, a)
    return _phi_quadrature(lam, a)


def phi_check_grid(lams: np.ndarray, alpha: float, k: int) -> np.ndarray:
    """Vectorised Phi(lambda, alpha) over a real lambda array."""
    if alpha <= 0:
        raise ValueError("phi_check requires Re(s) > 0")
    lams = np.asarray(lams, dtype=np.float64)
    a = alpha / k
    z = -2j * math.pi * lams
    az = np.abs(z)
    out = np.empty(lams.shape, dtype=np.complex128)

    small = az <= 14.0
    if np.any(small):
        zs = z[small]
        term = np.full(zs.shape, 1.0 / a, dtype=np.complex128)
        acc = term.copy()
        for n in range(1, 160):
            term = term * zs / (a + n)
            acc += term
            if n > 16 and np.max(np.abs(term)) < 1e-18:
                break
        out[small] = a * np.exp(-zs) * acc

    large = az >= 35.0
    if np.any(large):
        zl = z[large]
        head = a * math.gamma(a) * np.exp(-a * np.log(zl))
        term = np.ones(zl.shape, dtype=np.complex128)
        acc = term.copy()
        live = np.ones(zl.shape, dtype=bool)
        prev = np.abs(term)
        for n in range(1, 60):
            term = term * ((a - n) / zl)
            mag = np.abs(term)
            live &= mag <= prev
            if not live.any() or np.max(mag[live]) < 1e-18:
                break
            acc[live] += term[live]
            prev = mag
        out[large] = head - (a / zl) * np.exp(-zl) * acc

    mid = ~(small | large)
    for idx in np.nonzero(mid)[0]:
        out[idx] = _phi_quadrature(complex(lams[idx]), complex(a))
    out[lams == 0.0] = 1.0
    return out


# ----------------------------------------------------------------------------
# Weyl sums
# ----------------------------------------------------------------------------


def _friable_upto(x: float, y: float) -> np.ndarray:
    """S(x, y) as an array, tolerating x < y and tiny x."""
    if x < 1:
        return np.zeros(0, dtype=np.int64)
    if x < 2:
        return np.ones(1, dtype=np.int64)
    return friable_values(FriableParams(x, min(y, x)))


def _phases_scalar(ns: np.ndarray, k: int, theta: float) -> np.ndarray:
    """Fractional parts of n^k * theta via 192-bit integer reduction."""
    bits = 192
    mask = (1 << bits) - 1
    shift = bits - 53
    scale = 2.0**-53
    u = round((theta % 1.0) * (1 << bits))
    out = np.empty(len(ns), dtype=np.float64)
    for i, n in enumerate(ns):
        r = ((int(n) ** k) * u) & mask
        out[i] = (r >> shift) * scale
    return out


def _phases_vector(nk_u64: np.ndarray, theta: float) -> np.ndarray:
    """Fractional parts of n^k * theta via a wrapping 64-bit product."""
    t = int(round((theta % 1.0) * 2.0**64)) % (1 << 64)
    with np.errstate(over="ignore"):
        prod = nk_u64 * np.uint64(t)
    return prod.astype(np.float64) * 2.0**-64


def weyl_sum(params: FriableParams, k: int, theta: float) -> complex:
    """E_k(x, y; theta) = sum over n in S(x, y) of e(n^k theta), exactly."""
    if not (1 <= k <= 8):
        raise ValueError("k must be in 1..8")
    ns = friable_values(params)
    return _weyl_sum_over(ns, k, theta)


def _weyl_sum_over(ns: np.ndarray, k: int, theta: float) -> complex:
    if len(ns) == 0:
        return 0.0 + 0.0j
    xk = float(ns[-1]) ** k
    if xk <= _FAST_PHASE_LIMIT:
        nk = ns.astype(np.uint64)
        for _ in range(k - 1):
            nk = nk * ns.astype(np.uint64)
        frac = _phases_vector(nk, theta)
    else:
        frac = _phases_scalar(ns, k, theta)
    return complex(np.exp(2j * np.pi * frac).sum())


def weyl_sums_grid(params: FriableParams, k: int, thetas: np.ndarray) -> np.ndarray:
    """E_k(x, y; theta) for many thetas, vectorised in chunks."""
    if not (1 <= k <= 8):
        raise ValueError("k must be in 1..8")
    ns = friable_values(params)
    thetas = np.asarray(thetas, dtype=np.float64)
    xk = float(ns[-1]) ** k if len(ns) else 0.0
    out = np.empty(len(thetas), dtype=np.complex128)
    if xk <= _FAST_PHASE_LIMIT:
        nk = ns.astype(np.uint64)
        for _ in range(k - 1):
            nk = nk * ns.astype(np.uint64)
        ts = np.array(
            [int(round((t % 1.0) * 2.0**64)) % (1 << 64) for t in thetas],
            dtype=np.uint64,
        )
        chunk = max(1, int(4e6 // max(len(ns), 1)))
        for i in range(0, len(thetas), chunk):
            block = ts[i : i + chunk]
            with np.errstate(over="ignore"):
                prod = nk[None, :] * block[:, None]
            frac = prod.astype(np.float64) * 2.0**-64
            out[i : i + chunk] = np.exp(2j * np.pi * frac).sum(axis=1)
    else:
        for i, t in enumerate(thetas):
            out[i] = _weyl_sum_over(ns, k, float(t))
    return out


# ----------------------------------------------------------------------------
# The rational-phase main term
# ----------------------------------------------------------------------------


def rational_decompose(theta: float, x: float, k: int, qmax: int) -> RationalPhase:
    """Best rational phase a/q + delta with q <= qmax, plus its height."""
    a, q, delta = dioph.rational_approx_wrapped(theta, qmax)
    height = q * (1.0 + abs(delta) * float(x) ** k)
    return RationalPhase(theta=theta % 1.0, a=a, q=q, delta=delta, height=height)


def _mobius(n: int) -> int:
    mu = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            mu = -mu
        d += 1 if d == 2 else 2
    if n > 1:
        mu = -mu
    return mu


def _euler_phi(n: int) -> int:
    phi = n
    d = 2
    m = n
    while d * d <= m:
        if m % d == 0:
            phi -= phi // d
            while m % d == 0:
                m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        phi -= phi // m
    return phi


def _largest_prime_factor(n: int) -> int:
    if n == 1:
        return 1
    big = 1
    d = 2
    while d * d <= n:
        while n % d == 0:
            big = d
            n //= d
        d += 1 if d == 2 else 2
    return max(big, n) if n > 1 else big


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _coprime_power_sum(q1: int, c: int, k: int) -> complex:
    """sum over b mod q1 with (b, q1) = 1 of e(c * b^k / q1)."""
    if q1 == 1:
        return 1.0 + 0.0j
    b = np.arange(q1, dtype=np.int64)
    units = np.gcd(b, q1) == 1
    r = np.ones(q1, dtype=np.int64)
    for _ in range(k):
        r = (r * b) % q1
    phases = np.exp(2j * np.pi * ((c % q1) * r[units] % q1) / q1)
    return complex(phases.sum())


def h_aq(a: int, q: int, alpha: float, y: float, k: int) -> complex:
    """H_{a/q}(alpha): the divisor sum
    sum_{d1 d2 | q, P(d1 d2) <= y} mu(d2) / ((d1 d2)^alpha phi(q/d1))
    * sum_{b mod q, (b,q) = d1} e(a b^k / q), evaluated exactly.
    """
    if q < 1 or q > 10**5:
        raise ValueError("need 1 <= q <= 1e5")
    if math.gcd(a, q) != 1 and q > 1:
        raise ValueError(f"need gcd(a, q) = 1, got a={a}, q={q}")
    total = 0.0 + 0.0j
    for d1 in _divisors(q):
        if _largest_prime_factor(d1) > y:
            continue
        q1 = q // d1
        inner = _coprime_power_sum(q1, a * pow(d1, k - 1, q1) if q1 > 1 else 0, k)
        phi_q1 = _euler_phi(q1)
        for d2 in _divisors(q1):
            mu = _mobius(d2)
            if mu == 0 or _largest_prime_factor(d2) > y:
                continue
            total += mu * inner / ((d1 * d2) ** alpha * phi_q1)
    return total


def major_arc_main_term(
    params: FriableParams, k: int, phase: RationalPhase, saddle: SaddleData
) -> complex:
    """Psi(x, y) * Phi(delta x^k, alpha) * H_{a/q}(alpha)."""
    psi_val = len(friable_values(params))
    lam = phase.delta * float(params.x) ** k
    return (
        psi_val
        * phi_check(lam, saddle.alpha, k)
        * h_aq(phase.a if phase.q > 1 else 0, phase.q, saddle.alpha, params.y, k)
    )


def mk_main_term(params: FriableParams, k: int, phase: RationalPhase) -> complex:
    """Principal-character main term: the divisor sum of rescaled Weyl sums
    E_k(x/(d1 d2), y; (d1 d2)^k delta) weighted like H_{a/q}."""
    q = phase.q
    if q > 10**3:
        raise ValueError("mk_main_term needs q <= 1e3")
    a, delta = phase.a, phase.delta
    x, y = params.x, params.y
    total = 0.0 + 0.0j
    for d1 in _divisors(q):
        if _largest_prime_factor(d1) > y:
            continue
        q1 = q // d1
        inner = _coprime_power_sum(q1, a * pow(d1, k - 1, q1) if q1 > 1 else 0, k)
        phi_q1 = _euler_phi(q1)
        for d2 in _divisors(q1):
            mu = _mobius(d2)
            if mu == 0 or _largest_prime_factor(d2) > y:
                continue
            d = d1 * d2
            ns = _friable_upto(x / d, y)
            e_val = _weyl_sum_over(ns, k, (d**k) * delta)
            total += mu * inner * e_val / phi_q1
    return total


# ----------------------------------------------------------------------------
# Arc geometry and minor-arc scans
# ----------------------------------------------------------------------------


def arc_decompose(Q: float, x: float, k: int) -> ArcSet:
    """All arcs |q theta - a| <= Q x^-k around Farey fractions a/q, q <= Q."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    X = float(x) ** k
    arcs = []
    measure = 0.0
    for q in range(1, int(Q) + 1):
        hw = Q / (X * q)
        for a in range(q):
            if math.gcd(a, q) == 1 or q == 1:
                arcs.append((a, q, hw))
                measure += min(2.0 * hw, 1.0)
    overlap = 2.0 * Q * Q > X
    return ArcSet(
        Q=Q,
        x=x,
        k=k,
        arcs=arcs,
        total_measure=min(measure, 1.0),
        overlap_warning=overlap,
    )


def in_major_arcs(theta: float, Q: float, x: float, k: int) -> bool:
    """Whether theta lies in some arc |q theta - a| <= Q x^-k with q <= Q.

    The minimum of |q theta - a| over q <= Q is attained at a continued-
    fraction convergent, so only convergents need checking.
    """
    X = float(x) ** k
    width = Q / X
    t = theta % 1.0
    if width >= 0.5:
        return True
    for p, q in dioph.convergents(t, int(Q)):
        if q <= Q and abs(q * t - p) <= width:
            return True
    return False


def minor_arc_scan(
    params: FriableParams,
    k: int,
    Q: float,
    grid_size: int = 2000,
    keep_rows: bool = False,
) -> ScanReport:
    """Sup of |E_k|/Psi over a golden-offset grid restricted to the
    complement of the major arcs of parameter Q."""
    reports = minor_arc_sweep(params, k, [Q], grid_size, keep_rows=keep_rows)
    return reports["reports"][0]


def minor_arc_sweep(
    params: FriableParams,
    k: int,
    Q_list,
    grid_size: int = 2000,
    keep_rows: bool = False,
    threads: int = 1,
) -> dict:
    """Scan the same grid for several Q, reusing the Weyl sums.

    Returns per-Q ScanReports plus the decay exponent c_hat fitted by least
    squares to log sup = -c_hat log Q + const (when >= 2 usable points).
    """
    if grid_size > 10**6:
        raise ResourceLimitError("grid_size exceeds the 1e6 evaluation budget")
    thetas = (np.arange(grid_size) + _GOLDEN_FRAC) / grid_size
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        chunks = np.array_split(thetas, threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: weyl_sums_grid(params, k, c), chunks))
        e_vals = np.concatenate(parts)
    else:
        e_vals = weyl_sums_grid(params, k, thetas)
    psi_val = len(friable_values(params))
    ratios = np.abs(e_vals) / psi_val
    reports = []
    for Q in Q_list:
        mask = np.array(
            [not in_major_arcs(t, Q, params.x, k) for t in thetas], dtype=bool
        )
        n_scanned = int(mask.sum())
        if n_scanned == 0:
            rep = ScanReport(
                params.x, params.y, k, Q, grid_size, 0.0, None, 0, []
            )
        else:
            sub = np.nonzero(mask)[0]
            best = sub[np.argmax(ratios[sub])]
            rows = []
            if keep_rows:
                for i in sub:
                    a, q, delta = dioph.rational_approx_wrapped(float(thetas[i]), int(Q))
                    rows.append((float(thetas[i]), q, delta, float(ratios[i])))
            rep = ScanReport(
                params.x,
                params.y,
                k,
                Q,
                grid_size,
                float(ratios[best]),
                float(thetas[best]),
                n_scanned,
                rows,
            )
        reports.append(rep)
    sups = [(r.Q, r.sup_ratio) for r in reports if r.sup_ratio > 0]
    c_hat = None
    if len(sups) >= 2:
        lq = np.log([s[0] for s in sups])
        lr = np.log([s[1] for s in sups])
        slope = np.polyfit(lq, lr, 1)[0]
        c_hat = -float(slope)
    return {"reports": reports, "c_hat": c_hat}
