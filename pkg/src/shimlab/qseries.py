"""Truncated q-expansions over exact coefficient rings."""

import math
from fractions import Fraction

import sympy

from .arith import DirichletCharacter, divisors, psi_index


class QSeriesError(ValueError):
    pass


RATIONAL = "rational"


def padic_tag(p, M):
    return f"padic({p},{M})"


def _parse_padic(tag):
    p, M = tag[len("padic("):-1].split(",")
    return int(p), int(M)


# ---------------------------------------------------------------- fast integer convolution

def _pack(a, nbytes, offset):
    buf = b"".join((x + offset).to_bytes(nbytes, "little") for x in a)
    X = int.from_bytes(buf, "little")
    if offset:
        G = int.from_bytes((1).to_bytes(nbytes, "little") * len(a), "little")
        X -= offset * G
    return X


def int_convolve(a, b, n):
    """First n coefficients of the product of two integer coefficient lists."""
    a, b = a[:n], b[:n]
    if not a or not b:
        return [0] * n
    if min(len(a), len(b)) <= 8:
        out = [0] * n
        for i, x in enumerate(a):
            if x:
                for j in range(min(len(b), n - i)):
                    out[i + j] += x * b[j]
        return out
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    if ma == 0 or mb == 0:
        return [0] * n
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 2
    nbytes = (bits + 7) // 8
    neg = any(x < 0 for x in a) or any(x < 0 for x in b)
    off_a = 1 << (ma.bit_length()) if any(x < 0 for x in a) else 0
    off_b = 1 << (mb.bit_length()) if any(x < 0 for x in b) else 0
    if off_a or off_b:
        # offsets must fit; widen by a byte
        nbytes += 1
    Z = _pack(a, nbytes, off_a) * _pack(b, nbytes, off_b)
    m = min(n, len(a) + len(b) - 1)
    half = 1 << (8 * nbytes - 1) if neg else 0
    if half:
        Z += half * int.from_bytes((1).to_bytes(nbytes, "little") * m, "little")
    Z &= (1 << (8 * nbytes * m)) - 1
    raw = Z.to_bytes(nbytes * m, "little")
    out = [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(m)]
    return out + [0] * (n - m)


def _common_denominator(cs):
    d = 1
    for c in cs:
        if c.denominator != 1:
            d = math.lcm(d, c.denominator)
    return d


def rational_convolve(a, b, n):
    da, db = _common_denominator(a), _common_denominator(b)
    ia = [int(x * da) for x in a]
    ib = [int(x * db) for x in b]
    c = int_convolve(ia, ib, n)
    D = da * db
    return [Fraction(x, D) for x in c]


# ---------------------------------------------------------------- QExpansion

class QExpansion:
    """a_0 + a_1 q + ... + a_{B-1} q^{B-1} + O(q^B)."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, coeffs, ring=RATIONAL, prec=None):
        coeffs = list(coeffs)
        if prec is not None:
            coeffs = coeffs[:prec] + [0] * (prec - len(coeffs))
        self.ring = ring
        if ring == RATIONAL:
            self.coeffs = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        elif ring.startswith("padic("):
            p, M = _parse_padic(ring)
            m = p ** M
            self.coeffs = [int(c) % m for c in coeffs]
        else:
            self.coeffs = coeffs

    @property
    def prec(self):
        return len(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        if isinstance(n, slice):
            return self.coeffs[n]
        if n >= len(self.coeffs):
            raise QSeriesError(f"coefficient {n} is beyond the precision {self.prec}")
        return self.coeffs[n]

    def _check(self, other):
        if not isinstance(other, QExpansion):
            raise QSeriesError("expected a QExpansion")
        if other.ring != self.ring:
            raise QSeriesError(f"ring mismatch: {self.ring} vs {other.ring}")

    def _zero(self):
        if self.ring == RATIONAL:
            return Fraction(0)
        if self.ring.startswith("padic("):
            return 0
        return self.coeffs[0] * 0

    def __add__(self, other):
        if not isinstance(other, QExpansion):
            cs = list(self.coeffs)
            cs[0] = cs[0] + other
            return QExpansion(cs, self.ring)
        self._check(other)
        n = min(self.prec, other.prec)
        return QExpansion([a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n])], self.ring)

    __radd__ = __add__

    def __neg__(self):
        return QExpansion([-a for a in self.coeffs], self.ring)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        return QExpansion([a * c for a in self.coeffs], self.ring)

    def __mul__(self, other):
        if not isinstance(other, QExpansion):
            return self.scale(other)
        self._check(other)
        n = min(self.prec, other.prec)
        if self.ring == RATIONAL:
            return QExpansion(rational_convolve(self.coeffs, other.coeffs, n), self.ring)
        if self.ring.startswith("padic("):
            return QExpansion(int_convolve(self.coeffs, other.coeffs, n), self.ring)
        out = [self._zero()] * n
        for i, x in enumerate(self.coeffs[:n]):
            if x != 0:
                for j in range(n - i):
                    out[i + j] = out[i + j] + x * other.coeffs[j]
        return QExpansion(out, self.ring)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = QExpansion([1] + [0] * (self.prec - 1), self.ring) if self.ring == RATIONAL or self.ring.startswith("padic(") \
            else QExpansion([self.coeffs[0] * 0 + 1] + [self._zero()] * (self.prec - 1), self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        """Multiplicative inverse; requires an invertible constant term."""
        n = self.prec
        a0 = self.coeffs[0]
        if a0 == 0:
            raise QSeriesError("constant term is not invertible")
        if self.ring.startswith("padic("):
            p, M = _parse_padic(self.ring)
            if a0 % p == 0:
                raise QSeriesError("constant term is not a p-adic unit")
            inv0 = pow(a0, -1, p ** M)
        else:
            inv0 = 1 / a0
        g = QExpansion([inv0], self.ring)
        k = 1
        while k < n:
            k = min(2 * k, n)
            f = self.truncate(k)
            g = g.truncate(k) if g.prec >= k else QExpansion(g.coeffs + [0] * (k - g.prec), self.ring)
            fg = f * g
            two = QExpansion([2 - c if i == 0 else -c for i, c in enumerate(fg.coeffs)], self.ring)
            g = g * two
        return g.truncate(n)

    def __truediv__(self, other):
        if not isinstance(other, QExpansion):
            return self.scale(1 / Fraction(other)) if self.ring == RATIONAL else self.scale(1 / other)
        # allow leading zeros in the divisor if matched by the numerator
        v = other.valuation()
        if v > 0:
            if self.valuation() < v:
                raise QSeriesError("quotient is not a power series")
            return self.shift(-v) / other.shift(-v)
        return self * other.inverse()

    def shift(self, k):
        """Multiply by q^k (k may be negative if the leading coefficients vanish)."""
        if k >= 0:
            return QExpansion([self._zero()] * k + self.coeffs[:max(0, self.prec - k)] if self.prec > k else [self._zero()] * self.prec, self.ring)
        k = -k
        return QExpansion(self.coeffs[k:], self.ring)

    def truncate(self, B):
        if B > self.prec:
            raise QSeriesError("cannot extend precision")
        return QExpansion(self.coeffs[:B], self.ring)

    def valuation(self):
        for i, c in enumerate(self.coeffs):
            if c != 0:
                return i
        return math.inf

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, QExpansion) or other.ring != self.ring:
            return False
        n = min(self.prec, other.prec)
        return self.coeffs[:n] == other.coeffs[:n]

    __hash__ = None

    def V(self, d):
        """q -> q^d."""
        n = self.prec
        out = [self._zero()] * n
        for i in range(0, (n + d - 1) // d):
            out[i * d] = self.coeffs[i]
        return QExpansion(out, self.ring)

    def U(self, d):
        """a_n -> a_{dn}; precision drops to ceil(B/d)."""
        n = (self.prec + d - 1) // d
        return QExpansion([self.coeffs[d * i] for i in range(n)], self.ring)

    def twist(self, chi):
        return QExpansion([c * chi(i) for i, c in enumerate(self.coeffs)], self.ring)

    def map(self, fn, ring):
        return QExpansion([fn(c) for c in self.coeffs], ring)

    def to_padic(self, p, M):
        m = p ** M
        out = []
        for c in self.coeffs:
            c = Fraction(c)
            if c.denominator % p == 0:
                raise QSeriesError("coefficient is not p-integral")
            out.append(c.numerator * pow(c.denominator, -1, m) % m)
        return QExpansion(out, padic_tag(p, M))

    def to_json(self):
        if self.ring == RATIONAL:
            cs = [str(c) for c in self.coeffs]
        elif self.ring.startswith("padic("):
            cs = [str(c) for c in self.coeffs]
        else:
            cs = [str(c) for c in self.coeffs]
        return {"ring": self.ring, "precision": self.prec, "coefficients": cs}

    @classmethod
    def from_json(cls, d):
        if d["ring"] == RATIONAL:
            return cls([Fraction(c) for c in d["coefficients"]], RATIONAL)
        if d["ring"].startswith("padic("):
            return cls([int(c) for c in d["coefficients"]], d["ring"])
        raise QSeriesError("only rational and p-adic expansions round-trip through JSON")

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs[:12]):
            if c != 0:
                terms.append(f"{c}" if i == 0 else f"{c}*q^{i}")
        return " + ".join(terms) + f" + O(q^{self.prec})"


def one(B, ring=RATIONAL):
    return QExpansion([1] + [0] * (B - 1), ring)


# ---------------------------------------------------------------- standard series

def theta(B):
    cs = [0] * B
    n = 0
    while n * n < B:
        cs[n * n] = 2 if n else 1
        n += 1
    return QExpansion(cs)


def eta_power_series(B, e=1):
    """prod (1 - q^n)^e truncated at B (no q^(1/24) factor)."""
    cs = [0] * B
    k = 0
    while True:
        added = False
        for s in ((0,) if k == 0 else (k, -k)):
            g = s * (3 * s - 1) // 2
            if g < B:
                cs[g] += -1 if s % 2 else 1
                added = True
        if not added:
            break
        k += 1
    f = QExpansion(cs)
    return f ** e if e != 1 else f


def eta_product(spec, B):
    """prod_d eta(d z)^{r_d} as a q-expansion; the total q-shift must be integral."""
    shift = sum(d * r for d, r in spec.items())
    if shift % 24:
        raise QSeriesError("eta product has fractional q-order")
    shift //= 24
    if shift < 0:
        raise QSeriesError("eta product has a pole at infinity")
    f = one(B)
    for d, r in spec.items():
        base = eta_power_series(B, 1).V(d)
        f = f * (base ** r if r >= 0 else base.inverse() ** (-r))
    return f.shift(shift)


def delta(B):
    """q prod (1 - q^n)^24 via Jacobi's identity for the cube."""
    cs = [0] * B
    k = 0
    while k * (k + 1) // 2 < B:
        cs[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    e3 = QExpansion(cs)
    e24 = e3 ** 8
    return e24.shift(1)


def bernoulli(k):
    return Fraction(int(sympy.bernoulli(k).p), int(sympy.bernoulli(k).q)) if k != 1 else Fraction(-1, 2)


def generalized_bernoulli(k, chi):
    """B_{k,chi} for a rational-valued primitive character chi."""
    chi = chi.primitive()
    f = chi.modulus
    if f == 1:
        return bernoulli(k) if k != 1 else Fraction(1, 2)
    x = sympy.Symbol("x")
    Bk = sympy.bernoulli(k, x)
    total = Fraction(0)
    for a in range(1, f + 1):
        v = chi(a)
        if v:
            val = sympy.Rational(Bk.subs(x, sympy.Rational(a, f)))
            total += v * Fraction(int(val.p), int(val.q))
    return total * f ** (k - 1)


def eisenstein(k, chi=None, psi=None, B=10):
    """E_k^{chi,psi}: constant term -B_{k,psi}/(2k) when chi is trivial, a_n = sum chi(n/d) psi(d) d^(k-1).

    With both characters trivial the series is normalized to constant term 1.
    """
    chi = (chi or DirichletCharacter.trivial(1)).primitive()
    psi = (psi or DirichletCharacter.trivial(1)).primitive()
    if not (chi.is_rational() and psi.is_rational()):
        raise QSeriesError("only rational-valued characters are supported")
    if chi.parity() * psi.parity() != (-1) ** k:
        raise QSeriesError("parity violation: chi psi(-1) must equal (-1)^k")
    trivial = chi.is_trivial() and psi.is_trivial()
    if trivial and k < 4:
        raise QSeriesError("weight must be at least 4 for the level-one series")
    cs = [Fraction(0)] * B
    if chi.is_trivial():
        cs[0] = -generalized_bernoulli(k, psi) / (2 * k)
    for n in range(1, B):
        s = 0
        for d in divisors(n):
            s += chi(n // d) * psi(d) * d ** (k - 1)
        cs[n] = Fraction(s)
    f = QExpansion(cs)
    if trivial:
        f = f.scale(1 / cs[0])
    return f


def level_one_eisenstein(k, B):
    return eisenstein(k, None, None, B)


def sturm_bound(weight, level, margin=10):
    """ceil(weight * index / 12) + margin; weight may be a Fraction."""
    return math.ceil(Fraction(weight) * psi_index(level) / 12) + margin


def miller_basis(k, B, cusp=True):
    """Echelon basis of S_k(SL2(Z)) (or M_k) from products of E4, E6 and Delta."""
    if k % 2 or k < 0:
        return []
    E4, E6, D = level_one_eisenstein(4, B), level_one_eisenstein(6, B), delta(B)
    out = []
    j = 1 if cusp else 0
    while 12 * j <= k:
        r = k - 12 * j
        found = None
        for b in range(0, r // 6 + 1):
            if (r - 6 * b) % 4 == 0:
                found = ((r - 6 * b) // 4, b)
                break
        if found is not None and not (r == 2):
            a, b = found
            f = (D ** j) * (E4 ** a) * (E6 ** b)
            out.append(f)
        j += 1
    return echelonize(out)


def echelonize(basis, sturm=None):
    """Reduced row echelon form of a list of rational expansions by leading exponent."""
    if not basis:
        return []
    ring = basis[0].ring
    B = basis[0].prec
    for f in basis:
        if f.ring != ring or f.prec != B:
            raise QSeriesError("common ring tag and precision required")
    if sturm is not None and B < sturm:
        raise QSeriesError("precision below Sturm bound")
    if ring.startswith("padic("):
        return _echelonize_padic(basis)
    rows = [list(f.coeffs) for f in basis]
    piv_rows = []
    pivots = []
    for r in rows:
        # reduce against existing pivots
        for pr, pc in zip(piv_rows, pivots):
            c = r[pc]
            if c != 0:
                r = [a - c * b for a, b in zip(r, pr)] if pc == 0 else r[:pc] + [a - c * b for a, b in zip(r[pc:], pr[pc:])]
        lead = next((i for i, c in enumerate(r) if c != 0), None)
        if lead is None:
            continue
        inv = 1 / r[lead]
        r = [Fraction(0)] * lead + [c * inv for c in r[lead:]]
        # clear this column from earlier pivot rows
        for i, pr in enumerate(piv_rows):
            c = pr[lead]
            if c != 0:
                piv_rows[i] = pr[:lead] + [a - c * b for a, b in zip(pr[lead:], r[lead:])]
        piv_rows.append(r)
        pivots.append(lead)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [QExpansion(piv_rows[i], ring) for i in order]


def _echelonize_padic(basis):
    p, M = _parse_padic(basis[0].ring)
    m = p ** M
    rows = [list(f.coeffs) for f in basis]
    piv_rows, pivots = [], []
    for r in rows:
        for pr, pc in zip(piv_rows, pivots):
            c = r[pc]
            if c:
                r = [(a - c * b) % m for a, b in zip(r, pr)]
        lead = next((i for i, c in enumerate(r) if c % p), None)
        if lead is None:
            if any(r):
                raise QSeriesError("non-unit pivot: p-adic echelon form needs unit leading coefficients")
            continue
        inv = pow(r[lead], -1, m)
        r = [c * inv % m for c in r]
        for i, pr in enumerate(piv_rows):
            c = pr[lead]
            if c:
                piv_rows[i] = [(a - c * b) % m for a, b in zip(pr, r)]
        piv_rows.append(r)
        pivots.append(lead)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return [QExpansion(piv_rows[i], basis[0].ring) for i in order]


def pivots_of(basis):
    return [f.valuation() for f in basis]


def coordinates_in(basis, f):
    """Coefficients c with f = sum c_i basis_i for an echelonized basis; None if f is outside the span."""
    piv = pivots_of(basis)
    n = min(f.prec, basis[0].prec) if basis else f.prec
    coeffs = []
    r = list(f.coeffs[:n])
    for b, pc in zip(basis, piv):
        c = r[pc]
        coeffs.append(c)
        if c != 0:
            r = [a - c * x for a, x in zip(r, b.coeffs[:n])]
    if any(x != 0 for x in r):
        return None
    return coeffs


def linear_combination(basis, coeffs):
    out = basis[0].scale(0)
    for c, b in zip(coeffs, basis):
        if c != 0:
            out = out + b.scale(c)
    return out
