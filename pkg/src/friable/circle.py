"""End-to-end pipeline: exact representation counts, exact moments of the
friable Weyl sum, and circle-method predictions against ground truth.

The exact side works with the generating sequence of the k-th powers of
friable numbers.  Representation counts use a meet-in-the-middle join of
half-sum multisets; moments use an s-fold convolution of the counting
sequence followed by sum-of-squares, which equals the number of solutions
of n_1^k + ... + n_s^k = m_1^k + ... + m_s^k in S(x, y).  Convolutions are
exact: dense integer sequences are multiplied as packed big integers
(gmpy2), sparse ones through dictionaries.

The prediction side assembles x^-k Psi(x, y)^s beta_infty prod_p beta_p
from the saddle point and the local factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np

from .core import FriableParams, friable_values, primes_upto, saddle_alpha
from .errors import ResourceLimitError
from .localfactors import beta_infty_closed, beta_p
from .weyl import _friable_upto

DEFAULT_HALF_BUDGET = 4 * 10**7  # max Psi^ceil(s/2) for meet-in-the-middle
DEFAULT_DENSE_BUDGET = 3 * 10**7  # max dense convolution length


@dataclass(frozen=True)
class RepresentationQuery:
    """Count ordered s-tuples of y-friable n <= x with n_1^k+...+n_s^k = N."""

    N: int
    k: int
    s: int
    y: float
    x: float | None = None

    def __post_init__(self):
        if self.N < 1 or self.k < 1 or self.s < 1:
            raise ValueError("need N, k, s >= 1")
        if self.x is None:
            object.__setattr__(self, "x", float(math.ceil(self.N ** (1.0 / self.k))))
        if self.y > self.x:
            raise ValueError(f"need y <= x, got y={self.y}, x={self.x}")


@dataclass
class PredictionReport:
    N: int
    k: int
    s: int
    x: float
    y: float
    alpha: float
    psi: int
    beta_infty: float
    beta_p_partial: dict  # prime -> (value, tail_bound)
    predicted: float
    series_certified: bool
    exact: int | None = None
    ratio: float | None = None
    diagnostics: dict = field(default_factory=dict)


def _query_values(query: RepresentationQuery) -> np.ndarray:
    """k-th powers of the friable numbers that can appear in a sum equal N."""
    x_eff = min(float(query.x), float(query.N) ** (1.0 / query.k) + 1e-9)
    ns = _friable_upto(x_eff, query.y)
    vals = ns.astype(object) ** query.k
    return np.array([int(v) for v in vals if int(v) <= query.N], dtype=np.int64)


def _tuple_sum_counts(values: np.ndarray, s: int, cap: int) -> np.ndarray:
    """counts[t] = number of ordered s-tuples of `values` with sum t <= cap."""
    base = np.bincount(values, minlength=cap + 1)[: cap + 1].astype(np.int64)
    acc = base.copy()
    for _ in range(s - 1):
        nxt = np.zeros(cap + 1, dtype=np.int64)
        for v in values:
            nxt[v:] += acc[: cap + 1 - v]
        acc = nxt
    return acc


def count_exact(query: RepresentationQuery, budget: int = DEFAULT_HALF_BUDGET) -> int:
    """Ordered representation count by a meet-in-the-middle join.

    Splits s = s1 + s2 with s1 = ceil(s/2), builds the two half-sum count
    tables up to N, and joins them; memory is O(N) rather than Psi^s time.
    """
    values = _query_values(query)
    psi_n = len(values)
    s1 = (query.s + 1) // 2
    s2 = query.s - s1
    if psi_n**s1 > budget:
        raise ResourceLimitError(
            f"count_exact budget: psi={psi_n}, ceil(s/2)={s1}, "
            f"{psi_n}^{s1} = {psi_n**s1} > {budget}"
        )
    if psi_n == 0:
        return 0
    c1 = _tuple_sum_counts(values, s1, query.N)
    if s2 == 0:
        return int(c1[query.N])
    c2 = c1 if s2 == s1 else _tuple_sum_counts(values, s2, query.N)
    return int(np.dot(c1, c2[::-1]))


def representation_count_convolution(query: RepresentationQuery) -> int:
    """The same count as the N-th coefficient of the s-fold convolution,
    i.e. the exactly-evaluated Fourier coefficient of E_k^s at N."""
    values = _query_values(query)
    if len(values) == 0:
        return 0
    return int(_tuple_sum_counts(values, query.s, query.N)[query.N])


# ----------------------------------------------------------------------------
# Exact moments
# ----------------------------------------------------------------------------


def _pack_u64(counts: np.ndarray) -> gmpy2.mpz:
    """Kronecker packing with 64-bit bins (little-endian)."""
    return gmpy2.mpz(int.from_bytes(counts.astype("<u8").tobytes(), "little"))


def _unpack_u64(z: gmpy2.mpz, length: int) -> np.ndarray:
    raw = int(z).to_bytes(8 * length, "little")
    return np.frombuffer(raw, dtype="<u8", count=length)


def _convolution_power_dense(base: np.ndarray, s: int) -> np.ndarray:
    """Coefficients of (sum_t base[t] X^t)^s, exactly, via packed big ints.

    64-bit bins are valid while the coefficients of the power stay under
    2^63; they are bounded by (sum base)^s.
    """
    total = int(base.sum())
    if s * max(1, total.bit_length()) >= 62:
        raise ResourceLimitError(
            f"convolution coefficients may exceed 64-bit bins: total={total}, s={s}"
        )
    powed = _pack_u64(base) ** s
    return _unpack_u64(powed, s * (len(base) - 1) + 1)


def moment_exact(
    params: FriableParams,
    k: int,
    s: int,
    dense_budget: int = DEFAULT_DENSE_BUDGET,
) -> int:
    """The exact 2s-th moment integral of |E_k(x, y; .)| over [0, 1].

    Equals the number of 2s-tuples in S(x, y) with equal k-th power sums:
    computed as sum_t r_s(t)^2 where r_s is the s-fold convolution of the
    indicator of {n^k : n in S(x, y)}.
    """
    ns = friable_values(params)
    vals = [int(n) ** k for n in ns]
    top = max(vals)
    dense_len = s * top + 1
    if dense_len <= dense_budget:
        base = np.zeros(top + 1, dtype=np.int64)
        for v in vals:
            base[v] += 1
        coeffs = _convolution_power_dense(base, s)
        return int(sum(int(c) * int(c) for c in coeffs.tolist()))
    # sparse fallback: dictionary convolution over attained sums
    if len(vals) ** min(s, 2) > 10**7:
        raise ResourceLimitError(
            f"moment budget: dense length {dense_len} > {dense_budget} and "
            f"psi={len(vals)} too large for the sparse path"
        )
    acc = {0: 1}
    for _ in range(s):
        nxt: dict[int, int] = {}
        for t, c in acc.items():
            for v in vals:
                nxt[t + v] = nxt.get(t + v, 0) + c
        acc = nxt
    return sum(c * c for c in acc.values())


def moment_scaling_report(
    params: FriableParams,
    k: int,
    s_list,
    doublings: int = 2,
    bound_factor: float = 3.0,
) -> dict:
    """Normalised moments moment/(Psi^2s x^-k) along a doubling x schedule.

    y follows x when the base parameters have y = x, otherwise y stays
    fixed.  Flags whether, for each s, the ratios across the schedule stay
    within `bound_factor` of each other.
    """
    xs = [params.x * 2**j for j in range(doublings + 1)]
    track_y = params.y == params.x
    rows = []
    bounded = {}
    for s in s_list:
        ratios = []
        for x in xs:
            y = x if track_y else params.y
            pars = FriableParams(x, y)
            mom = moment_exact(pars, k, s)
            psi_n = len(friable_values(pars))
            ratio = mom / (psi_n ** (2 * s) * x**-k)
            rows.append(
                {
                    "x": x,
                    "y": y,
                    "k": k,
                    "s": s,
                    "moment": mom,
                    "psi": psi_n,
                    "normalized_ratio": ratio,
                }
            )
            ratios.append(ratio)
        bounded[s] = max(ratios) / min(ratios) <= bound_factor
    return {"rows": rows, "bounded": bounded, "bound_factor": bound_factor}


def predict(
    query: RepresentationQuery,
    prime_cutoff: int = 100,
    tail_tol: float = 1e-8,
    margin: float = 0.05,
    count_budget: int = DEFAULT_HALF_BUDGET,
    attach_exact: bool = True,
) -> PredictionReport:
    """Circle-method prediction x^-k Psi^s beta_infty prod_p beta_p vs truth.

    The individual beta_p series need s*alpha/k > 1; the full singular
    series over q carries a certified tail only when s*alpha/k > 2, which
    is reported through `series_certified` rather than enforced.
    """
    x, y = float(query.x), float(query.y)
    params = FriableParams(x, y)
    sd = saddle_alpha(params)
    sak = query.s * sd.alpha / query.k
    if sak <= 1.0 + margin:
        raise ValueError(
            f"singular series divergent: s*alpha/k = {sak:.4f} <= 1 + {margin}"
        )
    psi_n = len(friable_values(params))
    b_inf = beta_infty_closed(sd.alpha, query.k, query.s)
    betas = {}
    prod = 1.0
    for p in primes_upto(prime_cutoff):
        fac = beta_p(int(p), query.N, sd.alpha, y, query.k, query.s, tail_tol)
        betas[int(p)] = (fac.value, fac.tail_bound)
        prod *= fac.value
    predicted = x**-query.k * psi_n**query.s * b_inf * prod
    report = PredictionReport(
        N=query.N,
        k=query.k,
        s=query.s,
        x=x,
        y=y,
        alpha=sd.alpha,
        psi=psi_n,
        beta_infty=b_inf,
        beta_p_partial=betas,
        predicted=predicted,
        series_certified=sak > 2.0 + margin,
        diagnostics={
            "s_alpha_over_k": sak,
            "beta_product": prod,
            "prime_cutoff": prime_cutoff,
            "tail_tol": tail_tol,
        },
    )
    if attach_exact:
        try:
            report.exact = count_exact(query, budget=count_budget)
            if predicted > 0:
                report.ratio = report.exact / predicted
        except ResourceLimitError:
            report.diagnostics["exact_skipped"] = "budget"
    return report
