"""Capped-precision p-adic numbers, the one-parameter disc ring, and spectral tools
for finite models of compact operators: Newton polygons, Fredholm factorization
and Riesz projectors."""

import functools
import math
import warnings
from fractions import Fraction

from .arith import valuation as _int_valuation

@functools.lru_cache(maxsize=None)
def _ppow(p, k):
    # powers of p are recomputed constantly in normalization
    return p ** k

INF = math.inf
DEFAULT_PREC = 40


class PrecisionError(ArithmeticError):
    pass


class PadicNumber:
    """p^val * unit with the unit known modulo p^(prec - val).

    Zero to precision is stored as unit 0 and val == prec.
    """

    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p, x=0, prec=DEFAULT_PREC):
        self.p = p
        self.prec = prec
        if isinstance(x, PadicNumber):
            self.val, self.unit = x.val, x.unit
            self.prec = min(prec, x.prec)
            self._normalize()
            return
        x = Fraction(x)
        if x == 0:
            self.val, self.unit = prec, 0
            return
        v = _int_valuation(x, p)
        rel = prec - v
        if rel <= 0:
            self.val, self.unit = prec, 0
            return
        m = p ** rel
        num = x.numerator // p ** max(0, v)
        den = x.denominator // p ** max(0, -v)
        self.val = v
        self.unit = num * pow(den, -1, m) % m

    @classmethod
    def _make(cls, p, val, unit, prec):
        self = cls.__new__(cls)
        self.p, self.prec = p, prec
        rel = prec - val
        u = unit % _ppow(p, rel) if rel > 0 else 0
        if u == 0:
            self.val, self.unit = prec, 0
            return self
        while u % p == 0:
            u //= p
            val += 1
        self.val, self.unit = val, u
        return self

    def _normalize(self):
        p = self.p
        rel = self.prec - self.val
        if rel <= 0:
            self.val, self.unit = self.prec, 0
            return
        u = self.unit % _ppow(p, rel)
        if u == 0:
            self.val, self.unit = self.prec, 0
            return
        # u < p^rel already, so stripping factors of p keeps it reduced
        while u % p == 0:
            u //= p
            self.val += 1
        self.unit = u

    def _c(self, other):
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError("p-adic numbers for different primes")
            return other
        x = Fraction(other)
        v = _int_valuation(x, self.p) if x else 0
        return PadicNumber(self.p, x, max(self.prec, self.prec + v, v + self.prec - self.val + 2))

    # arithmetic
    def __add__(self, other):
        o = other if type(other) is PadicNumber and other.p == self.p else self._c(other)
        p = self.p
        prec = min(self.prec, o.prec)
        v = min(self.val, o.val)
        x = self.unit * _ppow(p, self.val - v) + o.unit * _ppow(p, o.val - v)
        return PadicNumber._make(p, v, x, prec)

    __radd__ = __add__

    def __neg__(self):
        return PadicNumber._make(self.p, self.val, -self.unit, self.prec)

    def __sub__(self, other):
        o = other if type(other) is PadicNumber and other.p == self.p else self._c(other)
        p = self.p
        v = min(self.val, o.val)
        x = self.unit * _ppow(p, self.val - v) - o.unit * _ppow(p, o.val - v)
        return PadicNumber._make(p, v, x, min(self.prec, o.prec))

    def __rsub__(self, other):
        return self._c(other) - self

    def __mul__(self, other):
        o = other if type(other) is PadicNumber and other.p == self.p else self._c(other)
        prec = min(self.val + o.prec, o.val + self.prec)
        return PadicNumber._make(self.p, self.val + o.val, self.unit * o.unit, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._c(other)
        if o.unit == 0:
            raise ZeroDivisionError("division by a p-adic zero")
        rel = min(self.prec - self.val, o.prec - o.val)
        val = self.val - o.val
        if self.unit == 0:
            return PadicNumber._make(self.p, self.prec - o.val, 0, self.prec - o.val)
        m = self.p ** rel
        return PadicNumber._make(self.p, val, self.unit * pow(o.unit, -1, m), val + rel)

    def __rtruediv__(self, other):
        return self._c(other) / self

    def __pow__(self, n):
        if n < 0:
            return (1 / self) ** (-n)
        r = PadicNumber(self.p, 1, self.prec + (n + 1) * abs(self.val) + 1)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __eq__(self, other):
        try:
            return (self - other).is_zero()
        except (TypeError, ValueError):
            return False

    def __hash__(self):
        return hash((self.p, self.val, self.unit % self.p ** min(5, max(0, self.prec - self.val))))

    # queries
    def is_zero(self):
        return self.unit == 0

    def valuation(self):
        return INF if self.unit == 0 else self.val

    def precision(self):
        return self.prec

    def relative_precision(self):
        return self.prec - self.val

    def is_unit(self):
        return self.unit != 0 and self.val == 0

    def lift(self):
        """Rational representative."""
        if self.val >= 0:
            return Fraction(self.unit * self.p ** self.val)
        return Fraction(self.unit, self.p ** (-self.val))

    def lift_int(self):
        if self.val < 0:
            raise PrecisionError("negative valuation has no integral lift")
        return self.unit * self.p ** self.val

    def residue(self):
        if self.val < 0:
            raise PrecisionError("element is not integral")
        return self.lift_int() % self.p

    def add_bigoh(self, prec):
        return PadicNumber._make(self.p, self.val, self.unit, min(prec, self.prec))

    def digits(self):
        """Base-p digit string of the integral representative with the valuation shift."""
        if self.unit == 0:
            return f"O({self.p}^{self.prec})"
        u, ds = self.unit, []
        for _ in range(self.prec - self.val):
            ds.append(u % self.p)
            u //= self.p
        return f"{self.p}^{self.val}*[{''.join(map(str, ds))}]+O({self.p}^{self.prec})"

    def _pivot_key(self):
        return self.valuation()

    def __repr__(self):
        if self.unit == 0:
            return f"O({self.p}^{self.prec})"
        return f"{self.lift()} + O({self.p}^{self.prec})"

    def __float__(self):
        return float(self.lift())


def Zp(p, prec=DEFAULT_PREC):
    """Factory for elements of Q_p at a fixed cap."""
    return lambda x: PadicNumber(p, x, prec)


# ---------------------------------------------------------------- disc ring

class DiscElement:
    """Element of Q_p[t]/(t^(T+1)), a truncated model of functions on a weight disc.

    tail is a lower bound for the valuation of the omitted coefficients of t^(T+1), ...;
    it bounds the truncation error of specializations at integral points.
    """

    __slots__ = ("p", "T", "coeffs", "tail")

    def __init__(self, p, coeffs, T=12, prec=DEFAULT_PREC, tail=INF):
        self.p, self.T, self.tail = p, T, tail
        cs = [c if isinstance(c, PadicNumber) else PadicNumber(p, c, prec) for c in coeffs[:T + 1]]
        while len(cs) < T + 1:
            cs.append(PadicNumber(p, 0, prec))
        self.coeffs = cs

    @classmethod
    def constant(cls, p, x, T=12, prec=DEFAULT_PREC):
        return cls(p, [x], T, prec)

    def _c(self, other):
        if isinstance(other, DiscElement):
            return other
        return DiscElement(self.p, [other], self.T, self.prec())

    def prec(self):
        return min(c.prec for c in self.coeffs)

    def __add__(self, other):
        o = self._c(other)
        return DiscElement(self.p, [a + b for a, b in zip(self.coeffs, o.coeffs)], self.T, tail=min(self.tail, o.tail))

    __radd__ = __add__

    def __neg__(self):
        return DiscElement(self.p, [-a for a in self.coeffs], self.T, tail=self.tail)

    def __sub__(self, other):
        return self + (-self._c(other))

    def __rsub__(self, other):
        return self._c(other) - self

    def __mul__(self, other):
        if not isinstance(other, DiscElement):
            return DiscElement(self.p, [a * other for a in self.coeffs], self.T, tail=self.tail)
        T = self.T
        a, b = self.coeffs, other.coeffs
        p = self.p
        out = []
        # integer convolution with one normalization per coefficient
        for n in range(T + 1):
            terms = [(a[i], b[n - i]) for i in range(n + 1)]
            prec = min(min(x.val + y.prec, y.val + x.prec) for x, y in terms)
            live = [(x.val + y.val, x.unit * y.unit) for x, y in terms if x.unit and y.unit]
            if not live:
                out.append(PadicNumber._make(p, prec, 0, prec))
                continue
            v0 = min(v for v, _ in live)
            tot = sum(u * _ppow(p, v - v0) for v, u in live if v < prec)
            out.append(PadicNumber._make(p, v0, tot, prec) if v0 < prec else PadicNumber._make(p, prec, 0, prec))
        va = [c.valuation() for c in a]
        vb = [c.valuation() for c in b]
        tail = min(self.tail + min(vb), other.tail + min(va))
        # the truncation drops a_i b_j with i + j > T
        for i in range(1, T + 1):
            if va[i] < INF:
                tail = min(tail, va[i] + min(vb[T + 1 - i:]))
        return DiscElement(self.p, out, T, tail=tail)

    __rmul__ = __mul__

    def inverse(self):
        b = self.coeffs
        if b[0].is_zero():
            raise ZeroDivisionError("constant term vanishes: not invertible on the disc")
        inv0 = 1 / b[0]
        c = [inv0]
        T = self.T
        # a few coefficients past T estimate the size of what the truncation drops
        for n in range(1, 2 * T + 3):
            s = b[1] * c[n - 1] if T >= 1 else b[0] * 0
            for i in range(2, min(n, T) + 1):
                s = s + b[i] * c[n - i]
            c.append(-(s * inv0))
        tail = self.tail - 2 * b[0].valuation() if self.tail < INF else INF
        tail = min([tail] + [x.valuation() for x in c[T + 1:]])
        return DiscElement(self.p, c[:T + 1], T, tail=tail)

    def __truediv__(self, other):
        if not isinstance(other, DiscElement):
            return DiscElement(self.p, [a / other for a in self.coeffs], self.T, tail=self.tail)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._c(other) * self.inverse()

    def __pow__(self, n):
        r = self._c(1)
        for _ in range(n):
            r = r * self
        return r

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None

    def valuation(self):
        return min(c.valuation() for c in self.coeffs)

    def constant_term(self):
        return self.coeffs[0]

    def _pivot_key(self):
        return self.coeffs[0].valuation()

    def __call__(self, t0):
        """Specialize at a point t0 with |t0| <= 1; precision capped by the tail bound."""
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * t0 + c
        if self.tail < INF:
            vt = t0.valuation() if isinstance(t0, PadicNumber) else _int_valuation(Fraction(t0), self.p)
            vt = 0 if vt == INF else vt
            bound = self.tail + vt * (self.T + 1) if vt != INF else INF
            if bound < acc.prec:
                acc = acc.add_bigoh(int(math.floor(bound)))
        return acc

    def shift(self, t0):
        """Re-center: the element g(t) = f(t + t0) in the same truncated model."""
        n = self.T + 1
        out = [PadicNumber(self.p, 0, self.prec()) for _ in range(n)]
        for i, c in enumerate(self.coeffs):
            for j in range(i + 1):
                out[j] = out[j] + c * (math.comb(i, j) * Fraction(t0) ** (i - j))
        return DiscElement(self.p, out, self.T, tail=self.tail)

    def __repr__(self):
        terms = [f"({c})*t^{i}" for i, c in enumerate(self.coeffs) if not c.is_zero()]
        return " + ".join(terms) or "0"


def interpolate(p, nodes, values, T=12, tail=INF):
    """Polynomial through (node, value) pairs as a DiscElement (Newton divided differences)."""
    n = len(nodes)
    if n > T + 1:
        raise ValueError("more nodes than the truncation allows")
    dd = list(values)
    coef = [dd[0]]
    for j in range(1, n):
        dd = [(dd[i + 1] - dd[i]) / (nodes[i + j] - nodes[i]) for i in range(len(dd) - 1)]
        coef.append(dd[0])
    prec = min(v.prec for v in values)
    poly = [PadicNumber(p, 0, prec)]
    for j in range(n - 1, -1, -1):
        # poly = poly * (t - nodes[j]) + coef[j]
        new = [PadicNumber(p, 0, prec) for _ in range(len(poly) + 1)]
        for i, c in enumerate(poly):
            new[i + 1] = new[i + 1] + c
            new[i] = new[i] - c * nodes[j]
        new[0] = new[0] + coef[j]
        poly = new
    return DiscElement(p, poly[:T + 1], T, tail=tail)


# ---------------------------------------------------------------- generic linear algebra

def _key(x):
    k = getattr(x, "_pivot_key", None)
    if k is not None:
        return k()
    return INF if x == 0 else 0


def _is_zero(x):
    z = getattr(x, "is_zero", None)
    return z() if z is not None else x == 0


def zero_like(x):
    return x * 0


def one_like(x):
    return x * 0 + 1


def identity(n, x):
    z, o = zero_like(x), one_like(x)
    return [[o if i == j else z for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    n, m = len(A), len(B[0])
    kk = len(B)
    out = []
    for i in range(n):
        row = A[i]
        r = []
        for j in range(m):
            s = row[0] * B[0][j]
            for l in range(1, kk):
                s = s + row[l] * B[l][j]
            r.append(s)
        out.append(r)
    return out


def mat_add(A, B, scale=1):
    return [[a + scale * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A, c):
    return [[a * c for a in r] for r in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def mat_is_zero(A):
    return all(_is_zero(x) for r in A for x in r)


def mat_min_valuation(A):
    return min((x.valuation() for r in A for x in r), default=INF)


def _full_pivot_order(A, ncols):
    """Column order chosen by Gaussian elimination with global least-valuation pivots."""
    R = [list(r[:ncols]) for r in A]
    rows = list(range(len(R)))
    cols = list(range(ncols))
    order = []
    while rows and cols:
        best, bk = None, INF
        for i in rows:
            Ri = R[i]
            for j in cols:
                k = _key(Ri[j])
                if k < bk:
                    best, bk = (i, j), k
        if best is None:
            break
        i, j = best
        rows.remove(i)
        cols.remove(j)
        order.append(j)
        piv = R[i][j]
        for i2 in rows:
            if not _is_zero(R[i2][j]):
                c = R[i2][j] / piv
                R[i2] = [a - c * b if jj in cols else a for jj, (a, b) in enumerate(zip(R[i2], R[i]))]
    return order


def rref(A, ncols=None):
    """Row reduce; returns (R, pivot columns).

    For p-adic entries the first ``ncols`` columns (default all) are visited in the
    order of a full-pivoting elimination, which keeps rank decisions stable when a
    column is small compared with the rest of the matrix. The rows of R are returned
    sorted by pivot column.
    """
    if A and A[0] and isinstance(A[0][0], (PadicNumber, DiscElement)):
        m = len(A[0])
        ncols = m if ncols is None else ncols
        order = _full_pivot_order(A, ncols)
        perm = order + [j for j in range(m) if j not in order]
        R, piv = _rref_partial([[r[j] for j in perm] for r in A])
        inv = [0] * m
        for a, j in enumerate(perm):
            inv[j] = a
        R = [[r[inv[j]] for j in range(m)] for r in R]
        piv = [perm[a] for a in piv]
        idx = sorted(range(len(piv)), key=lambda i: piv[i])
        R = [R[i] for i in idx] + R[len(piv):]
        return R, [piv[i] for i in idx]
    return _rref_partial(A)


def _rref_partial(A):
    """Row reduce with minimal-valuation pivoting down each column in turn."""
    R = [list(r) for r in A]
    n = len(R)
    m = len(R[0]) if n else 0
    pivots = []
    row = 0
    for col in range(m):
        if row >= n:
            break
        best, bk = None, INF
        for i in range(row, n):
            k = _key(R[i][col])
            if k < bk:
                best, bk = i, k
        if best is None:
            if any(not _is_zero(R[i][col]) for i in range(row, n)):
                raise PrecisionError("pivot not invertible over the base ring")
            continue
        R[row], R[best] = R[best], R[row]
        inv = 1 / R[row][col]
        R[row] = [x * inv for x in R[row]]
        for i in range(n):
            if i != row and not _is_zero(R[i][col]):
                c = R[i][col]
                R[i] = [a - c * b for a, b in zip(R[i], R[row])]
        pivots.append(col)
        row += 1
    return R, pivots


def kernel(A):
    """Basis of the right kernel as columns of a matrix (list of rows)."""
    m = len(A[0])
    R, pivots = rref(A)
    free = [j for j in range(m) if j not in pivots]
    z, o = zero_like(A[0][0]), one_like(A[0][0])
    basis = []
    for f in free:
        v = [z] * m
        v[f] = o
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][f]
        if isinstance(o, PadicNumber):
            # scale to a primitive vector; relative precision is unchanged
            vm = min(x.valuation() for x in v if not x.is_zero())
            if vm:
                v = [x * Fraction(o.p) ** -vm for x in v]
        basis.append(v)
    return transpose(basis) if basis else [[] for _ in range(m)]


def column_space(A):
    """Columns of A at the pivot positions of its row reduction."""
    _, pivots = rref(A)
    return [[r[j] for j in pivots] for r in A], pivots


def solve(A, B):
    """X with A X = B for square invertible A."""
    n = len(A)
    aug = [list(A[i]) + list(B[i]) for i in range(n)]
    R, pivots = rref(aug, n)
    if pivots[:n] != list(range(n)):
        raise PrecisionError("matrix not invertible at this precision")
    return [r[n:] for r in R[:n]]


def inverse(A):
    return solve(A, identity(len(A), A[0][0]))


def coordinates(N, V):
    """X with N X = V for N of full column rank; raises if V is not in the span."""
    k = len(N[0])
    aug = [list(N[i]) + list(V[i]) for i in range(len(N))]
    R, pivots = rref(aug, k)
    if pivots[:k] != list(range(k)):
        raise PrecisionError("basis columns are dependent at this precision")
    for r in R[k:]:
        if not all(_is_zero(x) for x in r):
            raise PrecisionError("vectors do not lie in the span")
    return [r[k:] for r in R[:k]]


def hessenberg_charpoly(A):
    """Characteristic polynomial x^n + ... (low degree first) over a field of fractions."""
    n = len(A)
    H = [list(r) for r in A]
    for m in range(n - 2):
        best, bk = None, INF
        for i in range(m + 1, n):
            k = _key(H[i][m])
            if k < bk:
                best, bk = i, k
        if best is None:
            continue
        i = best
        if i != m + 1:
            H[i], H[m + 1] = H[m + 1], H[i]
            for r in H:
                r[i], r[m + 1] = r[m + 1], r[i]
        piv = H[m + 1][m]
        for j in range(m + 2, n):
            if _is_zero(H[j][m]):
                continue
            u = H[j][m] / piv
            H[j] = [a - u * b for a, b in zip(H[j], H[m + 1])]
            for r in H:
                r[m + 1] = r[m + 1] + u * r[j]
    o = one_like(A[0][0])
    z = zero_like(A[0][0])
    polys = [[o]]
    for m in range(n):
        # (x - h_mm) p_m
        pm = polys[m]
        nxt = [z] + list(pm)
        for i, c in enumerate(pm):
            nxt[i] = nxt[i] - H[m][m] * c
        prod = o
        for i in range(m - 1, -1, -1):
            prod = prod * H[i + 1][i]
            c = H[i][m] * prod
            if not _is_zero(c):
                for j, d in enumerate(polys[i]):
                    nxt[j] = nxt[j] - c * d
        polys.append(nxt)
    return polys[n]


def charpoly_mod(A, p, K):
    """Characteristic polynomial (low degree first) of an integer matrix over Z/p^K.

    Hessenberg reduction pivoting on the entry of least valuation. Any lift of the
    multiplier still gives a similarity, so no p-adic digits are lost: for an integral
    input known mod p^K the output is correct mod p^K.
    """
    mod = p ** K
    n = len(A)
    H = [[x % mod for x in r] for r in A]

    def v(x):
        if x == 0:
            return K
        c = 0
        while x % p == 0:
            x //= p
            c += 1
        return c

    for m in range(n - 2):
        best, bk = None, K
        for i in range(m + 1, n):
            k = v(H[i][m])
            if k < bk:
                best, bk = i, k
        if best is None:
            continue
        i = best
        if i != m + 1:
            H[i], H[m + 1] = H[m + 1], H[i]
            for r in H:
                r[i], r[m + 1] = r[m + 1], r[i]
        piv = H[m + 1][m]
        pv = p ** bk
        winv = pow(piv // pv, -1, mod)
        rowp = H[m + 1]
        for j in range(m + 2, n):
            if H[j][m] == 0:
                continue
            u = (H[j][m] // pv) * winv % mod
            H[j] = [(a - u * b) % mod for a, b in zip(H[j], rowp)]
            for r in H:
                r[m + 1] = (r[m + 1] + u * r[j]) % mod
    polys = [[1]]
    for m in range(n):
        pm = polys[m]
        nxt = [0] + list(pm)
        for i, c in enumerate(pm):
            nxt[i] = (nxt[i] - H[m][m] * c) % mod
        prod = 1
        for i in range(m - 1, -1, -1):
            prod = prod * H[i + 1][i] % mod
            c = H[i][m] * prod % mod
            if c:
                for j, d in enumerate(polys[i]):
                    nxt[j] = (nxt[j] - c * d) % mod
        polys.append(nxt)
    return polys[n]


def berkowitz_charpoly(A):
    """Division-free characteristic polynomial x^n + ... (low degree first) over a ring."""
    n = len(A)
    o, z = one_like(A[0][0]), zero_like(A[0][0])
    # Berkowitz: build the Toeplitz vectors
    vect = [o, -A[0][0]]
    for r in range(1, n):
        R = [A[r][j] for j in range(r)]
        C = [A[i][r] for i in range(r)]
        Asub = [row[:r] for row in A[:r]]
        arr = r
        t = [o, -A[r][r]]
        Y = C
        for _ in range(r):
            t.append(-sum((R[j] * Y[j] for j in range(1, r)), R[0] * Y[0]))
            Y = [sum((Asub[i][j] * Y[j] for j in range(1, r)), Asub[i][0] * Y[0]) for i in range(r)]
        # t has length r + 2; form product of lower-triangular Toeplitz(t) with vect
        new = []
        for i in range(arr + 2):
            s = z
            for j in range(len(vect)):
                if 0 <= i - j < len(t):
                    s = s + t[i - j] * vect[j]
            new.append(s)
        vect = new
    # vect is x^n coefficient first
    return list(reversed(vect))


def char_series(A, method=None):
    """det(1 - A T) as a coefficient list (c_0 = 1)."""
    if not A:
        return []
    x = A[0][0]
    if method is None:
        method = "berkowitz" if isinstance(x, DiscElement) else "hessenberg"
    cp = berkowitz_charpoly(A) if method == "berkowitz" else hessenberg_charpoly(A)
    return list(reversed(cp))


def poly_mul(a, b):
    if not a or not b:
        return []
    out = [a[0] * 0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def poly_eval_matrix(coeffs, A):
    """sum c_i A^i by Horner."""
    n = len(A)
    I = identity(n, A[0][0])
    acc = mat_scale(I, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = mat_add(mat_mul(acc, A), mat_scale(I, c))
    return acc


# ---------------------------------------------------------------- Newton polygons

def _vals(P):
    out = []
    for c in P:
        if isinstance(c, DiscElement):
            c = c.constant_term()
        out.append(c.valuation() if isinstance(c, PadicNumber) else c)
    return out


def _precs(P):
    out = []
    for c in P:
        if isinstance(c, DiscElement):
            c = c.constant_term()
        out.append(c.prec if isinstance(c, PadicNumber) else INF)
    return out


def newton_polygon(P, p=None):
    """Slopes (ascending, with multiplicities) of the lower hull of (i, v(c_i)).

    Returns (segments, vertices). Coefficients known only to be zero are checked
    against the hull; a zero whose precision is too low to lie above it raises.
    """
    if p is not None:
        P = [c if isinstance(c, (PadicNumber, DiscElement)) else PadicNumber(p, c, 10 ** 6) for c in P]
    vals, precs = _vals(P), _precs(P)
    pts = [(i, v) for i, v in enumerate(vals) if v != INF]
    if not pts or pts[0][0] != 0 or vals[0] != 0:
        raise ValueError("Fredholm series must have constant term 1")
    if len(pts) == 1:
        if len(P) > 1:
            warnings.warn("all higher coefficients are zero to working precision")
        return [], [(0, 0)]
    hull = [pts[0]]
    for q in pts[1:]:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (q[0] - x1) >= (q[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(q)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    # zeros of unknown valuation inside the hull range must not dip below it
    last = hull[-1][0]
    for i, v in enumerate(vals):
        if v == INF and 0 < i < last:
            for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
                if x1 < i < x2:
                    h = y1 + Fraction(y2 - y1, x2 - x1) * (i - x1)
                    if precs[i] < h:
                        raise PrecisionError(f"coefficient {i} is zero only to precision {precs[i]}")
    return segs, hull


def slopes_list(P, p=None):
    segs, _ = newton_polygon(P, p)
    out = []
    for s, m in segs:
        out.extend([s] * m)
    return out


def _trim(P):
    P = list(P)
    while len(P) > 1 and _is_zero(P[-1]):
        P.pop()
    return P


def fredholm_factor(P, h, max_iter=80):
    """Factor P = Q * Q' with Q(0) = Q'(0) = 1, Q carrying exactly the slopes <= h."""
    P = _trim(P)
    segs, hull = newton_polygon(P)
    h = Fraction(h)
    m = sum(mult for s, mult in segs if s <= h)
    one = one_like(P[0])
    if m == 0:
        return [one], P
    if m == len(P) - 1:
        return P, [one]
    if m not in [x for x, _ in hull]:
        raise PrecisionError("slope boundary not a vertex")
    D = len(P) - 1
    cm = P[m]
    Q = list(P[:m + 1])
    Qp = [one] + [P[m + i] / cm for i in range(1, D - m + 1)]
    # Newton iteration on the Sylvester system Q dQ' + Q' dQ = P - Q Q'
    prev = None
    for it in range(max_iter):
        E = [a - b for a, b in zip(P, _pad(poly_mul(Q, Qp), D + 1))]
        if all(_is_zero(e) for e in E):
            return Q, Qp
        vE = min(_val_any(e) for e in E)
        if prev is not None and vE <= prev and it > 6:
            raise PrecisionError("precision exhausted")
        prev = vE
        S = []
        # unknowns: dQ_1..dQ_m, dQ'_1..dQ'_{D-m}; equations: T^1..T^D
        z = zero_like(one)
        for r in range(1, D + 1):
            row = []
            for j in range(1, m + 1):
                i = r - j
                row.append(Qp[i] if 0 <= i < len(Qp) else z)
            for j in range(1, D - m + 1):
                i = r - j
                row.append(Q[i] if 0 <= i < len(Q) else z)
            S.append(row)
        rhs = [[E[r]] for r in range(1, D + 1)]
        try:
            X = solve(S, rhs)
        except PrecisionError as exc:
            raise PrecisionError("factors not coprime at this precision") from exc
        Q = [Q[0]] + [Q[j] + X[j - 1][0] for j in range(1, m + 1)]
        Qp = [Qp[0]] + [Qp[j] + X[m + j - 1][0] for j in range(1, D - m + 1)]
    raise PrecisionError("precision exhausted")


def _pad(a, n):
    z = zero_like(a[0])
    return list(a[:n]) + [z] * (n - len(a))


def _val_any(x):
    return x.valuation() if hasattr(x, "valuation") else (INF if x == 0 else 0)


def reverse_poly(Q, m=None):
    """X^m Q(1/X)."""
    m = len(Q) - 1 if m is None else m
    z = zero_like(Q[0])
    out = [z] * (m + 1)
    for i, c in enumerate(Q):
        out[m - i] = c
    return out


def riesz_decompose(phi, Q):
    """Projector onto N = ker Q*(phi) along F = im Q*(phi), and a basis of N."""
    d = len(phi)
    m = len(_trim(Q)) - 1
    if m == 0:
        z = zero_like(phi[0][0])
        return [[z] * d for _ in range(d)], [[] for _ in range(d)]
    Qs = reverse_poly(_trim(Q))
    A = poly_eval_matrix(Qs, phi)
    N = kernel(A)
    if len(N[0]) != m:
        raise PrecisionError("factors not coprime at this precision")
    F, _ = column_space(A)
    if len(F[0]) != d - m:
        raise PrecisionError("factors not coprime at this precision")
    B = [list(N[i]) + list(F[i]) for i in range(d)]
    Binv = inverse(B)
    z, o = zero_like(phi[0][0]), one_like(phi[0][0])
    D = [[o if i == j and i < m else z for j in range(d)] for i in range(d)]
    e = mat_mul(mat_mul(B, D), Binv)
    return e, N


def restrict(phi, N):
    """Matrix of phi on the column span of N."""
    return coordinates(N, mat_mul(phi, N))


def invert_on_N(phi_N, Q=None):
    Xinv = inverse(phi_N)
    if Q is not None:
        R = poly_eval_matrix(list(Q), Xinv)
        if not mat_is_zero(R):
            raise PrecisionError("Q(phi^-1) does not vanish on N at this precision")
    return Xinv


def padic_matrix(p, rows, prec):
    return [[PadicNumber(p, x, prec) for x in r] for r in rows]


def disc_matrix(p, rows, T=12, prec=DEFAULT_PREC):
    return [[x if isinstance(x, DiscElement) else DiscElement(p, [x], T, prec) for x in r] for r in rows]
