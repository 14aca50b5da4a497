"""Dirichlet character groups mod q and power-twisted Gauss sums.

Characters are built through the CRT decomposition of (Z/qZ)^x: a primitive
root for each odd prime-power factor, the {+-1} x <5> structure for powers
of two.  Each character carries a fully materialised value table of length
q so that inner loops over residues stay branch-free.

The Gauss sums here are G_k(q, a, chi) = sum_{b mod q} chi(b) e(a b^k / q),
the k-th power generalisation of the classical case k = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorisation as (p, exponent) pairs, ascending."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n: int) -> int:
    phi = 1
    for p, e in factorize(n):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def _primitive_root_mod_p(p: int) -> int:
    if p == 2:
        return 1
    order_divisors = [(p - 1) // f for f, _ in factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, d, p) != 1 for d in order_divisors):
            return g
    raise RuntimeError(f"no primitive root found mod {p}")  # unreachable


def _primitive_root_mod_pk(p: int, m: int) -> int:
    """Primitive root mod p^m for odd p (g mod p, lifted if needed)."""
    g = _primitive_root_mod_p(p)
    if m == 1:
        return g
    # g is a primitive root mod p^m iff g^(p-1) != 1 mod p^2
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


@dataclass
class DirichletCharacter:
    """A Dirichlet character mod q with a materialised value table.

    values[n] = chi(n mod q); chi(n) = 0 exactly when gcd(n, q) > 1.
    `index` records the exponent vector on the group generators used to
    build the character (one slot per cyclic factor).
    """

    modulus: int
    values: np.ndarray
    index: tuple[int, ...]
    _conductor: int | None = field(default=None, repr=False)

    @property
    def is_principal(self) -> bool:
        return all(j == 0 for j in self.index)

    @property
    def conductor(self) -> int:
        if self._conductor is None:
            self._conductor = conductor(self)
        return self._conductor

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])


def _cyclic_factors(q: int) -> tuple[list[int], list[np.ndarray]]:
    """Cyclic decomposition of (Z/qZ)^x.

    Returns (orders, dlogs): for each cyclic factor its order n_i, and an
    array mapping every residue r mod q to its exponent in that factor
    (-1 on non-units).
    """
    orders: list[int] = []
    dlogs: list[np.ndarray] = []
    for p, m in factorize(q):
        pk = p**m
        others = q // pk
        # indices of residues mod q congruent to each class mod pk
        if p == 2:
            if m == 1:
                continue  # trivial group
            if m == 2:
                table = -np.ones(pk, dtype=np.int64)
                table[1] = 0
                table[3] = 1
                comps = [(2, table)]
            else:
                half = 2 ** (m - 2)
                t_sign = -np.ones(pk, dtype=np.int64)
                t_five = -np.ones(pk, dtype=np.int64)
                r = 1
                for t in range(half):
                    t_sign[r] = 0
                    t_five[r] = t
                    t_sign[(-r) % pk] = 1
                    t_five[(-r) % pk] = t
                    r = (r * 5) % pk
                comps = [(2, t_sign), (half, t_five)]
        else:
            g = _primitive_root_mod_pk(p, m)
            phi = (p - 1) * p ** (m - 1)
            table = -np.ones(pk, dtype=np.int64)
            r = 1
            for t in range(phi):
                table[r] = t
                r = (r * g) % pk
            comps = [(phi, table)]
        for order, table in comps:
            full = table[np.arange(q) % pk]
            orders.append(order)
            dlogs.append(full)
    return orders, dlogs


@lru_cache(maxsize=128)
def _group_data(q: int):
    orders, dlogs = _cyclic_factors(q)
    unit_mask = np.array([math.gcd(n, q) == 1 for n in range(q)], dtype=bool)
    return orders, dlogs, unit_mask


def character_group(q: int) -> list[DirichletCharacter]:
    """All phi(q) Dirichlet characters mod q."""
    if q < 1:
        raise ValueError("modulus must be a positive integer")
    if q == 1:
        return [DirichletCharacter(1, np.ones(1, dtype=np.complex128), ())]
    orders, dlogs, unit_mask = _group_data(q)
    chars: list[DirichletCharacter] = []
    index = [0] * len(orders)

    def build(idx: tuple[int, ...]) -> DirichletCharacter:
        angle = np.zeros(q, dtype=np.float64)
        for j, order, dl in zip(idx, orders, dlogs):
            if j:
                angle[unit_mask] += j * dl[unit_mask] / order
        values = np.zeros(q, dtype=np.complex128)
        values[unit_mask] = np.exp(2j * np.pi * angle[unit_mask])
        return DirichletCharacter(q, values, idx)

    while True:
        chars.append(build(tuple(index)))
        for pos in range(len(orders)):
            index[pos] += 1
            if index[pos] < orders[pos]:
                break
            index[pos] = 0
        else:
            break
    return chars


def principal_character(q: int) -> DirichletCharacter:
    return character_group(q)[0]


def conductor(chi: DirichletCharacter) -> int:
    """Smallest q' | q such that chi is induced by a character mod q'.

    chi is induced mod q' iff chi(n) = 1 for every n coprime to q with
    n = 1 (mod q').
    """
    q = chi.modulus
    if q == 1:
        return 1
    divisors = sorted(
        d for d in range(1, q + 1) if q % d == 0
    )
    vals = chi.values
    for d in divisors:
        ns = np.arange(1, q + 1, d) % q  # n = 1 + d*t
        ok = True
        for n in ns:
            v = vals[n]
            if v != 0 and abs(v - 1.0) > 1e-9:
                ok = False
                break
        if ok:
            return d
    return q


def gauss_sum_k(q: int, a: int, chi: DirichletCharacter, k: int) -> complex:
    """G_k(q, a, chi) = sum_{b mod q} chi(b) e(a b^k / q), by direct summation."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if chi.modulus != q:
        raise ValueError(f"character modulus {chi.modulus} != q = {q}")
    if q == 1:
        return 1.0 + 0.0j
    b = np.arange(q, dtype=np.int64)
    r = np.ones(q, dtype=np.int64)
    for _ in range(k):
        r = (r * b) % q
    phases = np.exp(2j * np.pi * ((a % q) * r % q) / q)
    return complex(np.dot(chi.values, phases))


def gauss_sums_all_a(q: int, chi: DirichletCharacter, k: int) -> np.ndarray:
    """G_k(q, a, chi) for a = 0..q-1 at once, via a length-q DFT."""
    if chi.modulus != q:
        raise ValueError(f"character modulus {chi.modulus} != q = {q}")
    if q == 1:
        return np.ones(1, dtype=np.complex128)
    b = np.arange(q, dtype=np.int64)
    r = np.ones(q, dtype=np.int64)
    for _ in range(k):
        r = (r * b) % q
    f = np.zeros(q, dtype=np.complex128)
    np.add.at(f, r, chi.values)
    return q * np.fft.ifft(f)


def count_kth_twist_solutions(chi: DirichletCharacter, k: int) -> int:
    """Number of characters t mod q with t^k * chi principal.

    Counted on exponent vectors: in a cyclic factor of order n the equation
    k*t = -c (mod n) has gcd(k, n) solutions when gcd(k, n) | c, else none.
    """
    q = chi.modulus
    if q == 1:
        return 1
    orders, _, _ = _group_data(q)
    total = 1
    for n, c in zip(orders, chi.index):
        g = math.gcd(k, n)
        total *= g if c % g == 0 else 0
    return total


def gauss_bound(q: int, a: int, chi: DirichletCharacter, k: int) -> float:
    """The explicit bound 2 k^omega(q) tau(q) min(q/sqrt(q*), sqrt(a q)).

    Valid for G_k(q, a*a', chi) with (a', q) = 1; the sharpest admissible
    representative for an arbitrary residue t is a = gcd(t, q).
    """
    fac = factorize(q)
    omega = len(fac)
    tau = 1
    for _, e in fac:
        tau *= e + 1
    qstar = chi.conductor
    return 2.0 * k**omega * tau * min(q / math.sqrt(qstar), math.sqrt(a * q))
