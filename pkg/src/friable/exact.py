"""Exact-arithmetic twin of the local-density machinery.

For half-integer alpha (the identity checks use alpha = 1 and alpha = 1/2)
every local mass lives in Z[sqrt(p)] after clearing denominators, so the
divisor-sum identity  sum_{d | q} S(d) = q M(q)  and the projection
identity for the measure mu_{p^m} can be verified exactly:

* S(p^l) is expanded through Ramanujan sums,
  S(d) = sum_r w^(*s)[r] c_d(r - N), where w is the mass distribution of
  b^k mod d and c_d is integer-valued - no roots of unity ever appear;
* the cyclic convolutions w^(*s) run on integer pairs (rational and
  sqrt(p) parts) packed into big integers (Kronecker substitution).

Values are returned as SqrtExt numbers: exact a + b*sqrt(p) with Fraction
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class SqrtExt:
    """a + b*sqrt(p) with exact rational a, b."""

    a: Fraction
    b: Fraction
    p: int

    @classmethod
    def of(cls, a, b=0, p=1):
        return cls(Fraction(a), Fraction(b), p)

    def _check(self, other: "SqrtExt"):
        if self.b and other.b and self.p != other.p:
            raise ValueError("mixed radicands")

    def __add__(self, other):
        if not isinstance(other, SqrtExt):
            other = SqrtExt.of(other)
        self._check(other)
        return SqrtExt(self.a + other.a, self.b + other.b, self.p if self.b else other.p)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, SqrtExt):
            other = SqrtExt.of(other)
        return self + SqrtExt(-other.a, -other.b, other.p)

    def __mul__(self, other):
        if not isinstance(other, SqrtExt):
            other = SqrtExt.of(other)
        self._check(other)
        p = self.p if self.b else other.p
        return SqrtExt(
            self.a * other.a + p * self.b * other.b,
            self.a * other.b + self.b * other.a,
            p,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, SqrtExt):
            other = SqrtExt.of(other)
        self._check(other)
        p = self.p if self.b else other.p
        norm = other.a * other.a - p * other.b * other.b
        conj = SqrtExt(other.a, -other.b, p)
        num = self * conj
        return SqrtExt(num.a / norm, num.b / norm, p)

    def __eq__(self, other):
        if not isinstance(other, SqrtExt):
            other = SqrtExt.of(other)
        return self.a == other.a and self.b == other.b

    def __float__(self):
        return float(self.a) + float(self.b) * self.p**0.5

    def __repr__(self):
        if self.b == 0:
            return f"{self.a}"
        return f"{self.a} + {self.b}*sqrt({self.p})"


def _half_pow_frac(p: int, t: int) -> SqrtExt:
    """p^(t/2) as a SqrtExt, t any integer."""
    if t >= 0:
        if t % 2 == 0:
            return SqrtExt.of(p ** (t // 2), 0, p)
        return SqrtExt.of(0, p ** ((t - 1) // 2), p)
    if t % 2 == 0:
        return SqrtExt.of(Fraction(1, p ** (-t // 2)), 0, p)
    # p^(-(2j+1)/2) = sqrt(p) / p^(j+1)
    j = (-t - 1) // 2
    return SqrtExt.of(0, Fraction(1, p ** (j + 1)), p)


def mu_mass_exact(p: int, m: int, v: int, alpha: Fraction, friable: bool) -> SqrtExt:
    """Exact mass at valuation v for mu_{p^m}; alpha must be a half-integer."""
    alpha = Fraction(alpha)
    if alpha.denominator not in (1, 2):
        raise ValueError("exact masses need alpha with denominator 1 or 2")
    if not (0 <= v <= m):
        raise ValueError("need 0 <= v <= m")
    A = int(alpha * 2)
    phi = (p - 1) * p ** (m - 1)
    if not friable:
        if v > 0:
            return SqrtExt.of(0, 0, p)
        return SqrtExt.of(Fraction(1, phi), 0, p)
    if v == m:
        return _half_pow_frac(p, -A * m)
    one_minus = SqrtExt.of(1) - _half_pow_frac(p, -A)
    return _half_pow_frac(p, (2 - A) * v) * one_minus * SqrtExt.of(Fraction(1, phi))


def projection_identity_holds(p: int, m: int, alpha: Fraction, friable: bool) -> bool:
    """Check sum_u mu_{p^m}(u p^(m-l) + b) = mu_{p^(m-l)}(b) for all l, b."""

    def val(n: int, cap: int) -> int:
        if n == 0:
            return cap
        v = 0
        while n % p == 0 and v < cap:
            n //= p
            v += 1
        return v

    pm = p**m
    for ell in range(m + 1):
        step = p ** (m - ell)
        for b in range(step):
            total = SqrtExt.of(0, 0, p)
            for u in range(p**ell):
                total = total + mu_mass_exact(
                    p, m, val((u * step + b) % pm, m), alpha, friable
                )
            if m - ell >= 1:
                expect = mu_mass_exact(p, m - ell, val(b, m - ell), alpha, friable)
            else:  # modulus 1: the unique residue carries mass 1
                expect = SqrtExt.of(1)
            if total != expect:
                return False
    return True


# ----------------------------------------------------------------------------
# Integer-pair vectors and Kronecker convolution
# ----------------------------------------------------------------------------


def _poly_mul_int(a: list[int], b: list[int]) -> list[int]:
    """Linear convolution of integer sequences via big-int packing.

    Signed coefficients are handled by balanced digit extraction, which is
    valid because every output coefficient is below half the packing base.
    """
    if not a or not b:
        return []
    max_a = max(1, max(abs(c) for c in a))
    max_b = max(1, max(abs(c) for c in b))
    bound = max_a * max_b * min(len(a), len(b))
    width = bound.bit_length() + 2
    base = 1 << width
    half = base >> 1
    mask = base - 1
    pa = 0
    for c in reversed(a):
        pa = (pa << width) + c
    pb = 0
    for c in reversed(b):
        pb = (pb << width) + c
    prod = pa * pb
    out = []
    for _ in range(len(a) + len(b) - 1):
        d = prod & mask
        if d >= half:
            d -= base
        out.append(d)
        prod = (prod - d) >> width
    return out


def _cyclic_pairs(u: list, v: list, q: int, p: int) -> list:
    """Cyclic convolution mod q of vectors of (rational, sqrt(p)) int pairs."""
    ur = [c[0] for c in u]
    uw = [c[1] for c in u]
    vr = [c[0] for c in v]
    vw = [c[1] for c in v]
    rr = _poly_mul_int(ur, vr)
    ww = _poly_mul_int(uw, vw)
    rw = _poly_mul_int(ur, vw)
    wr = _poly_mul_int(uw, vr)
    out_r = [0] * q
    out_w = [0] * q
    for i, c in enumerate(rr):
        out_r[i % q] += c
    for i, c in enumerate(ww):
        out_r[i % q] += p * c
    for i, c in enumerate(rw):
        out_w[i % q] += c
    for i, c in enumerate(wr):
        out_w[i % q] += c
    return list(zip(out_r, out_w))


def _scaled_mass_pairs(p: int, m: int, alpha: Fraction, friable: bool):
    """Masses of mu_{p^m} scaled by S = phi(p^m) * p^ceil(alpha m).

    Returns (pairs indexed by valuation v, scale) with each pair an exact
    element of Z[sqrt(p)].
    """
    A = int(Fraction(alpha) * 2)
    if A not in (1, 2):
        raise ValueError("exact engine supports alpha in {1/2, 1}")
    phi = (p - 1) * p ** (m - 1)
    E = -((-A * m) // 2)  # ceil(A m / 2)
    scale = phi * p**E

    def hp(t: int) -> tuple[int, int]:
        if t % 2 == 0:
            return (p ** (t // 2), 0)
        return (0, p ** ((t - 1) // 2))

    pairs = []
    for v in range(m + 1):
        if not friable:
            pairs.append((p**E, 0) if v == 0 else (0, 0))
        elif v == m:
            r, w = hp(2 * E - A * m)
            pairs.append((phi * r, phi * w))
        else:
            t1 = (2 - A) * v + 2 * E
            r1, w1 = hp(t1)
            r2, w2 = hp(t1 - A)
            pairs.append((r1 - r2, w1 - w2))
    return pairs, scale


def _weight_vector(p: int, m: int, k: int, alpha: Fraction, friable: bool):
    """Scaled distribution of b^k mod p^m under mu_{p^m}."""
    q = p**m
    mass, scale = _scaled_mass_pairs(p, m, alpha, friable)
    w = [(0, 0)] * q
    for b in range(q):
        n, v = b, 0
        if b == 0:
            v = m
        else:
            while n % p == 0 and v < m:
                n //= p
                v += 1
        c = pow(b, k, q)
        r0, w0 = w[c]
        r1, w1 = mass[v]
        w[c] = (r0 + r1, w0 + w1)
    return w, scale


def ramanujan_prime_power(p: int, ell: int, t: int) -> int:
    """c_{p^l}(t): phi(p^l) if p^l | t; -p^(l-1) if p^(l-1) || t; else 0."""
    if ell == 0:
        return 1
    pl = p**ell
    if t % pl == 0:
        return (p - 1) * p ** (ell - 1)
    if t % (pl // p) == 0:
        return -(p ** (ell - 1))
    return 0


def _power_distribution(p, m, k, alpha, friable, s):
    w, scale = _weight_vector(p, m, k, alpha, friable)
    acc = w
    q = p**m
    for _ in range(s - 1):
        acc = _cyclic_pairs(acc, w, q, p)
    return acc, scale


def m_q_exact(p, m, N, alpha, friable, k, s) -> SqrtExt:
    """Exact M(p^m): scaled convolution value at N divided by scale^s."""
    acc, scale = _power_distribution(p, m, k, alpha, friable, s)
    q = p**m
    r, w = acc[N % q]
    den = Fraction(1, scale**s)
    return SqrtExt.of(r * den, w * den, p)


def s_prime_power_exact(p, ell, N, alpha, friable, k, s) -> SqrtExt:
    """Exact S(p^l) via the Ramanujan-sum expansion (integer cyclotomy)."""
    if ell == 0:
        return SqrtExt.of(1, 0, p)
    acc, scale = _power_distribution(p, ell, k, alpha, friable, s)
    q = p**ell
    tot_r, tot_w = 0, 0
    for r_idx, (r, w) in enumerate(acc):
        c = ramanujan_prime_power(p, ell, r_idx - N)
        if c:
            tot_r += c * r
            tot_w += c * w
    den = Fraction(1, scale**s)
    return SqrtExt.of(tot_r * den, tot_w * den, p)


def divisor_sum_identity(p, m, N, alpha, friable, k, s) -> dict:
    """Exact check of sum_{l <= m} S(p^l) = p^m M(p^m)."""
    lhs = SqrtExt.of(0, 0, p)
    for ell in range(m + 1):
        lhs = lhs + s_prime_power_exact(p, ell, N, alpha, friable, k, s)
    rhs = SqrtExt.of(p**m) * m_q_exact(p, m, N, alpha, friable, k, s)
    return {
        "p": p,
        "m": m,
        "N": N,
        "alpha": str(Fraction(alpha)),
        "friable": friable,
        "k": k,
        "s": s,
        "lhs": lhs,
        "rhs": rhs,
        "equal": lhs == rhs,
    }
