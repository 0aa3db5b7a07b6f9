"""Integer, character and algebraic-number arithmetic."""

import cmath
import math
import threading
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy


class ArithError(ValueError):
    pass


# ---------------------------------------------------------------- integers

@lru_cache(maxsize=4096)
def factor(n):
    """Prime factorization of a positive integer as a tuple of (p, e)."""
    if n < 1:
        raise ArithError("factor expects a positive integer")
    return tuple(sorted(sympy.factorint(n).items()))


def is_prime(n):
    return n >= 2 and len(factor(n)) == 1 and factor(n)[0][1] == 1


def divisors(n):
    ds = [1]
    for p, e in factor(n):
        ds = [d * p ** i for d in ds for i in range(e + 1)]
    return sorted(ds)


def valuation(n, p):
    if n == 0:
        return math.inf
    if isinstance(n, Fraction):
        return valuation(n.numerator, p) - valuation(n.denominator, p)
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


def moebius(n):
    f = factor(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n):
    r = n
    for p, _ in factor(n):
        r = r // p * (p - 1)
    return r


def psi_index(n):
    """Index of Gamma_0(n) in SL_2(Z)."""
    r = n
    for p, _ in factor(n):
        r = r // p * (p + 1)
    return r


def squarefree_part(n):
    if n < 1:
        raise ArithError("squarefree_part expects n >= 1")
    r = 1
    for p, e in factor(n):
        if e % 2:
            r *= p
    return r


def is_squarefree(n):
    return n >= 1 and all(e == 1 for _, e in factor(n))


def is_square(n):
    return n >= 0 and math.isqrt(n) ** 2 == n


def kronecker(a, b):
    return int(sympy.jacobi_symbol(a, b)) if b > 0 and b % 2 else _kronecker(a, b)


def _kronecker(a, b):
    if b == 0:
        return 1 if abs(a) == 1 else 0
    r = 1
    if b < 0:
        b = -b
        if a < 0:
            r = -r
    while b % 2 == 0:
        b //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            r = -r
    if b == 1:
        return r
    return r * int(sympy.jacobi_symbol(a, b))


def _square_class_int(x):
    """Integer in the same rational square class as x."""
    x = Fraction(x)
    return x.numerator * x.denominator


def hilbert_symbol(a, b, ell):
    """Hilbert symbol (a, b)_ell for nonzero rationals; ell = -1 means the real place."""
    if a == 0 or b == 0:
        raise ArithError("hilbert_symbol needs nonzero arguments")
    a, b = _square_class_int(a), _square_class_int(b)
    if ell == -1:
        return -1 if a < 0 and b < 0 else 1
    if not is_prime(ell):
        raise ArithError(f"{ell} is not prime")
    al, bl = valuation(a, ell), valuation(b, ell)
    u, v = a // ell ** al, b // ell ** bl
    if ell != 2:
        s = (-1) ** (al * bl * ((ell - 1) // 2))
        return s * kronecker(u, ell) ** bl * kronecker(v, ell) ** al
    eps = lambda x: ((x - 1) // 2) % 2
    omega = lambda x: ((x * x - 1) // 8) % 2
    e = eps(u) * eps(v) + al * omega(v) + bl * omega(u)
    return -1 if e % 2 else 1


def is_local_square(x, ell):
    """Whether the nonzero rational x is a square in Q_ell."""
    x = _square_class_int(x)
    v = valuation(x, ell)
    if v % 2:
        return False
    u = x // ell ** v
    if ell == 2:
        return u % 8 == 1
    return kronecker(u, ell) == 1


def local_square_class_equal(m, n, primes):
    return all(is_local_square(Fraction(m, n), ell) for ell in primes)


# ---------------------------------------------------------------- class numbers

class _ClassNumberTable:
    """Hurwitz and primitive weighted class numbers by enumerating reduced forms."""

    def __init__(self, bound=10 ** 6):
        self.max_bound = bound
        self.size = 0
        self.hurwitz = None
        self.lock = threading.Lock()

    def ensure(self, n):
        if n < self.size:
            return
        if n > self.max_bound:
            raise ArithError(f"class number table bound {self.max_bound} exceeded")
        with self.lock:
            if n < self.size:
                return
            size = min(self.max_bound + 1, max(2 * n + 1, 4096))
            # counts in units of 1/6 to keep integers
            cnt = np.zeros(size, dtype=np.int64)
            a = 1
            while 3 * a * a < size:
                for b in range(-a + 1, a + 1):
                    c0 = a
                    d0 = 4 * a * c0 - b * b
                    if d0 >= size:
                        continue
                    cs = np.arange(c0, (size - 1 + b * b) // (4 * a) + 1)
                    ds = 4 * a * cs - b * b
                    w = np.full(len(cs), 6, dtype=np.int64)
                    # a == c forces b >= 0
                    if b < 0:
                        keep = cs != a
                        ds, w = ds[keep], w[keep]
                    elif b == 0:
                        w[0] = 3  # a x^2 + a y^2
                    elif b == a:
                        if cs[0] == a:
                            w[0] = 2  # a(x^2+xy+y^2)
                    np.add.at(cnt, ds, w)
                a += 1
            self.hurwitz = cnt
            self.size = size

    def hw6_table(self, n):
        """Integer array h[m] = 6 h_w(-m) for m < n (zero off discriminants)."""
        self.ensure(n)
        with self.lock:
            tab = getattr(self, "_hw6", None)
            if tab is not None and len(tab) >= n and len(tab) == self.size:
                return tab
            H6 = self.hurwitz.copy()
            valid = np.zeros(self.size, dtype=bool)
            valid[0::4] = True
            valid[3::4] = True
            valid[0] = False
            H6[~valid] = 0
            h = H6.copy()
            f = 2
            while f * f < self.size:
                mu = moebius(f)
                if mu:
                    m = np.arange(1, (self.size - 1) // (f * f) + 1)
                    m = m[valid[m]]
                    h[f * f * m] += mu * H6[m]
                f += 1
            self._hw6 = h
            return h

    def H(self, n):
        if n == 0:
            return Fraction(-1, 12)
        if n % 4 not in (0, 3):
            return Fraction(0)
        self.ensure(n)
        return Fraction(int(self.hurwitz[n]), 6)

    def h_w(self, d):
        """Weighted class number of primitive forms of discriminant d < 0."""
        n = -d
        if n <= 0 or n % 4 not in (0, 3):
            return Fraction(0)
        total = Fraction(0)
        f = 1
        while f * f <= n:
            if n % (f * f) == 0 and (n // (f * f)) % 4 in (0, 3):
                mu = moebius(f)
                if mu:
                    total += mu * self.H(n // (f * f))
            f += 1
        return total


CLASS_NUMBERS = _ClassNumberTable()


def hurwitz_class_number(n):
    if n < 0:
        raise ArithError("hurwitz_class_number expects n >= 0")
    return CLASS_NUMBERS.H(n)


# ---------------------------------------------------------------- characters

@lru_cache(maxsize=None)
def _primitive_root(p, e):
    g = 2
    m = p ** e
    phi = p ** (e - 1) * (p - 1)
    qs = [q for q, _ in factor(phi)]
    while True:
        if math.gcd(g, p) == 1 and all(pow(g, phi // q, m) != 1 for q in qs):
            return g
        g += 1


def _crt(residues, moduli):
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        t = ((r - x) * pow(m, -1, n)) % n
        x += m * t
        m *= n
    return x % m


@lru_cache(maxsize=None)
def unit_generators(M):
    """Fixed generators of (Z/M)^x with their orders, ordered by prime."""
    parts = factor(M) if M > 1 else ()
    mods = [p ** e for p, e in parts]
    gens = []
    for i, (p, e) in enumerate(parts):
        local = []
        if p == 2:
            if e >= 2:
                local.append((-1 % 2 ** e, 2))
            if e >= 3:
                local.append((5, 2 ** (e - 2)))
        else:
            local.append((_primitive_root(p, e), p ** (e - 1) * (p - 1)))
        for g, order in local:
            res = [1] * len(mods)
            res[i] = g
            gens.append((_crt(res, mods) if mods else 0, order))
    return tuple(gens)


@lru_cache(maxsize=None)
def _dlog_table(M):
    """Map unit x mod M to its exponent tuple on unit_generators(M)."""
    gens = unit_generators(M)
    table = {1 % M: tuple(0 for _ in gens)}
    for j, (g, order) in enumerate(gens):
        new = {}
        for x, vec in table.items():
            y = x
            for i in range(order):
                v = list(vec)
                v[j] = i
                new[y] = tuple(v)
                y = y * g % M
        table = new
    return table


class DirichletCharacter:
    """Character mod M with chi(g_j) = exp(2 pi i e_j / n_j) on the fixed generators."""

    def __init__(self, modulus, exponents=None):
        self.modulus = int(modulus)
        gens = unit_generators(self.modulus)
        if exponents is None:
            exponents = [0] * len(gens)
        if len(exponents) != len(gens):
            raise ArithError("exponent vector length does not match the unit generators")
        self.exponents = tuple(int(e) % n for e, (_, n) in zip(exponents, gens))
        order = 1
        for e, (_, n) in zip(self.exponents, gens):
            order = math.lcm(order, n // math.gcd(e, n))
        self.order = order

    @classmethod
    def trivial(cls, modulus=1):
        return cls(modulus)

    @classmethod
    def from_function(cls, modulus, fn):
        """Build from fn(g) returning the value at g as a Fraction of a full turn."""
        gens = unit_generators(modulus)
        exps = []
        for g, n in gens:
            t = Fraction(fn(g)) % 1
            if (t * n).denominator != 1:
                raise ArithError("value is not an n-th root of unity")
            exps.append(int(t * n))
        return cls(modulus, exps)

    def turn(self, x):
        """chi(x) as a fraction of a full turn, or None if gcd(x, M) > 1."""
        M = self.modulus
        if math.gcd(x, M) != 1:
            return None
        if M == 1:
            return Fraction(0)
        vec = _dlog_table(M)[x % M]
        gens = unit_generators(M)
        return sum((Fraction(e * v, n) for e, v, (_, n) in zip(self.exponents, vec, gens)), Fraction(0)) % 1

    def exponent(self, x):
        """chi(x) = zeta_order^exponent, or None off units."""
        t = self.turn(x)
        return None if t is None else int(t * self.order)

    def __call__(self, x):
        t = self.turn(x)
        if t is None:
            return 0
        if t == 0:
            return 1
        if t == Fraction(1, 2):
            return -1
        return cmath.exp(2j * math.pi * t)

    def value_algebraic(self, x, p=None):
        """chi(x) in Q(zeta_order) as an AlgebraicNumber."""
        K = cyclotomic_field(self.order, p)
        e = self.exponent(x)
        if e is None:
            return K(0)
        return K.gen() ** e

    def is_trivial(self):
        return self.order == 1

    def is_rational(self):
        return self.order <= 2

    def is_even(self):
        return self.turn(self.modulus - 1 if self.modulus > 1 else 1) == 0

    def parity(self):
        return 1 if self.is_even() else -1

    def _key(self):
        return (self.modulus, self.exponents)

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        if self.modulus == other.modulus:
            return self.exponents == other.exponents
        M = math.lcm(self.modulus, other.modulus)
        return self.extend(M)._key() == other.extend(M)._key()

    def __hash__(self):
        return hash((self.conductor(), self.order))

    def extend(self, M):
        """Same character viewed modulo a multiple M of the modulus."""
        if M % self.modulus:
            raise ArithError("can only extend to a multiple of the modulus")
        return DirichletCharacter.from_function(M, lambda g: self.turn(g % self.modulus))

    def restrict(self, M):
        """Character mod M inducing self; M must be divisible by the conductor."""
        if self.modulus % M or M % self.conductor():
            raise ArithError("modulus must lie between the conductor and the modulus")
        prim = self.primitive()
        return prim.extend(M) if M % prim.modulus == 0 else prim

    def __mul__(self, other):
        M = math.lcm(self.modulus, other.modulus)
        a, b = self.extend(M), other.extend(M)
        return DirichletCharacter(M, [x + y for x, y in zip(a.exponents, b.exponents)])

    def __pow__(self, n):
        return DirichletCharacter(self.modulus, [n * e for e in self.exponents])

    def inverse(self):
        return self ** -1

    def values(self):
        return [self.turn(x) for x in range(self.modulus)]

    def conductor(self):
        c = getattr(self, "_conductor", None)
        if c is None:
            c = self._compute_conductor()
            self._conductor = c
        return c

    def _compute_conductor(self):
        M = self.modulus
        cond = 1
        for p, e in factor(M) if M > 1 else ():
            rest = M // p ** e
            f = e
            for f in range(e + 1):
                # trivial on units congruent to 1 mod p^f and to 1 away from p
                ok = True
                step = p ** f
                for y in range(1, p ** e, step):
                    if y % p == 0:
                        continue
                    x = _crt([y, 1], [p ** e, rest]) if rest > 1 else y
                    if self.turn(x) != 0:
                        ok = False
                        break
                if ok:
                    break
            cond *= p ** f
        return cond

    def primitive(self):
        c = self.conductor()
        return DirichletCharacter.from_function(c, lambda g: self.turn(_lift_unit(g, c, self.modulus)))

    def __repr__(self):
        return f"DirichletCharacter(mod {self.modulus}, order {self.order}, conductor {self.conductor()})"

    def label(self):
        return f"{self.modulus}:{','.join(map(str, self.exponents))}"

    @classmethod
    def from_label(cls, s):
        m, _, e = s.partition(":")
        return cls(int(m), [int(x) for x in e.split(",")] if e else [])


def _lift_unit(g, c, M):
    """A unit mod M congruent to g mod c."""
    g %= c
    for x in range(g, M + c, c):
        if math.gcd(x, M) == 1:
            return x
    raise ArithError("no unit lift")


def character_from_kronecker(D):
    """Character n -> (D/n) of modulus |D| for a fundamental discriminant D."""
    m = abs(D)
    return DirichletCharacter.from_function(m, lambda g: Fraction(0) if kronecker(D, g) == 1 else Fraction(1, 2))


def fundamental_discriminant(n):
    d = squarefree_part(abs(n)) * (1 if n > 0 else -1)
    return d if d % 4 == 1 else 4 * d


def quadratic_char(n):
    """Primitive character of Q(sqrt n) for squarefree n (negative allowed)."""
    if n == 0 or not is_squarefree(abs(n)):
        raise ArithError(f"{n} is not squarefree")
    if n == 1:
        return DirichletCharacter.trivial(1)
    return character_from_kronecker(fundamental_discriminant(n))


def chi_minus4():
    return quadratic_char(-1)


def chi_zero(chi, k):
    if k % 2 == 0:
        raise ArithError("chi_zero needs odd k")
    return chi * chi_minus4() if ((k - 1) // 2) % 2 else chi


def decompose_at(chi, ell):
    """Split chi into its ell-power-modulus part and the prime-to-ell part."""
    M = chi.modulus
    e = valuation(M, ell) if M > 1 else 0
    A = ell ** e
    B = M // A
    if A == 1:
        return DirichletCharacter.trivial(1), chi
    part_l = DirichletCharacter.from_function(
        A, lambda g: chi.turn(_crt([g, 1], [A, B]) if B > 1 else g))
    part_r = DirichletCharacter.from_function(
        B, lambda g: chi.turn(_crt([1, g], [A, B]))) if B > 1 else DirichletCharacter.trivial(1)
    return part_l.primitive(), part_r.primitive()


def all_characters(M):
    gens = unit_generators(M)
    vecs = [[]]
    for _, n in gens:
        vecs = [v + [i] for v in vecs for i in range(n)]
    return [DirichletCharacter(M, v) for v in vecs]


def choose_nebentypus_sqrt(psi, n, N):
    """Square root chi mod 8N of psi with the prescribed ramification behaviour."""
    M = 8 * N
    target = psi.extend(math.lcm(psi.modulus, M)) if M % psi.modulus == 0 else None
    if target is None:
        raise ArithError("psi must have modulus dividing 8N")
    for chi in all_characters(M):
        if chi * chi != target:
            continue
        if _nebentypus_conditions(chi, psi, n, N):
            return chi
    if not any(chi * chi == target for chi in all_characters(M)):
        raise ArithError("no square root exists")
    raise ArithError("no square root satisfies the ramification conditions")


def _nebentypus_conditions(chi, psi, n, N):
    for ell in [2] + [p for p, _ in factor(N)] if N > 1 else [2]:
        psi_l, _ = decompose_at(psi, ell)
        if psi_l.conductor() != 1:
            continue
        chi_l, _ = decompose_at(chi, ell)
        if ell != 2:
            if (chi_l.conductor() == 1) != (n % ell == 0):
                return False
        else:
            # chi_0 differs from chi by (-1/.), which is trivial on 1 + 4Z_2
            trivial_on_1_4 = chi_l.conductor() <= 4
            if trivial_on_1_4 != (n % 2 == 0):
                return False
    return True


class WeightCharacter:
    def __init__(self, k, kappa_prime=None, half_integral=True):
        if k % 2 == 0:
            raise ArithError("weight character needs odd k")
        self.k = k
        self.kappa_prime = kappa_prime or DirichletCharacter.trivial(1)
        self.half_integral = half_integral

    def eval_half(self, t):
        return t ** Fraction(self.k - 1, 2) * self.kappa_prime(t)

    def eval_integral(self, t):
        return t ** (self.k - 1) * self.kappa_prime(t) ** 2

    def __repr__(self):
        return f"WeightCharacter(k={self.k}, kappa'={self.kappa_prime!r})"


# ---------------------------------------------------------------- number fields

def _poly_mulmod(a, b, m):
    """Product of coefficient lists (low degree first) reduced mod monic m."""
    d = len(m) - 1
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    for i in range(len(out) - 1, d - 1, -1):
        c = out[i]
        if c:
            for j in range(d):
                out[i - d + j] -= c * m[j]
    out = out[:d] + [Fraction(0)] * max(0, d - len(out))
    return out


def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(a, b):
    a = [Fraction(x) for x in a]
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, y in enumerate(b):
                a[i + j] -= c * y
    return _poly_trim(q), _poly_trim(a[:len(b) - 1])


def _poly_inverse_mod(a, m):
    """Inverse of a modulo m over Q by the extended Euclidean algorithm."""
    r0, r1 = _poly_trim(m), _poly_trim(a)
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        qs = [Fraction(0)] * (len(q) + len(s1))
        for i, x in enumerate(q):
            for j, y in enumerate(s1):
                qs[i + j] += x * y
        s2 = [Fraction(0)] * max(len(s0), len(qs))
        for i, x in enumerate(s0):
            s2[i] += x
        for i, x in enumerate(qs):
            s2[i] -= x
        r0, r1, s0, s1 = r1, r, s1, _poly_trim(s2)
    if not r1:
        raise ZeroDivisionError("element is not invertible")
    c = r1[0]
    out = [x / c for x in s1]
    d = len(m) - 1
    return _poly_divmod(out, m)[1] if len(out) > d else out


def _hensel_roots(poly, p, prec):
    """Roots in Z_p of a squarefree integer polynomial, to precision p^prec, sorted by residue.

    Repeated roots mod p are separated by substituting x -> r + p y and recursing.
    """
    M = p ** prec
    ev = lambda f, x, m: sum(c * pow(x, i, m) for i, c in enumerate(f)) % m
    out = []

    def shift(f, r, s):
        # coefficients of f(r + s y)
        n = len(f)
        g = [0] * n
        for i, c in enumerate(f):
            if c:
                for j in range(i + 1):
                    g[j] += c * math.comb(i, j) * r ** (i - j) * s ** j
        return g

    def content_strip(f):
        g = 0
        for c in f:
            g = math.gcd(g, c)
        if g == 0:
            return f, prec
        v = 0
        while g % p == 0:
            g //= p
            v += 1
        return [c // p ** v for c in f], v

    def rec(f, base, scale, depth):
        if scale >= M:
            out.append(base % M)
            return
        f, _ = content_strip(f)
        df = [i * c for i, c in enumerate(f)][1:]
        for r in range(p):
            if ev(f, r, p):
                continue
            if ev(df, r, p):
                x, m = r, p
                target = max(1, -(-M // scale))
                while m < target:
                    m = min(m * m, p ** prec)
                    x = (x - ev(f, x, m) * pow(ev(df, x, m), -1, m)) % m
                out.append((base + scale * x) % M)
            elif depth < prec:
                rec(shift(f, r, p), base + scale * r, scale * p, depth + 1)

    rec([int(c) for c in poly], 0, 1, 0)
    return sorted(set(out))


class NumberField:
    """Q[x]/(m) with a chosen complex root and, if available, a chosen p-adic root."""

    def __init__(self, poly, complex_index=0, p=None, prec=40, padic_root=None, name="a"):
        poly = [Fraction(c) for c in poly]
        if poly[-1] != 1:
            raise ArithError("defining polynomial must be monic")
        self.poly = poly
        self.degree = len(poly) - 1
        self.name = name
        if self.degree == 1:
            self.complex_roots = [complex(-poly[0])]
        else:
            rts = np.roots([float(c) for c in reversed(poly)])
            self.complex_roots = sorted(rts, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
        self.complex_index = complex_index
        self.p = p
        self.prec = prec
        self.padic_root = None
        if p is not None:
            if padic_root is not None:
                self.padic_root = padic_root
            else:
                den = math.lcm(*[c.denominator for c in poly])
                ipoly = [int(c * den) for c in poly]
                if den % p == 0:
                    raise ArithError("defining polynomial is not p-integral")
                rts = _hensel_roots(ipoly, p, prec)
                self.padic_root = rts[0] if rts else None

    def __call__(self, x):
        if isinstance(x, AlgebraicNumber):
            return x
        return AlgebraicNumber(self, [Fraction(x)] + [Fraction(0)] * (self.degree - 1))

    def gen(self):
        if self.degree == 1:
            return self(-self.poly[0])
        return AlgebraicNumber(self, [Fraction(0), Fraction(1)] + [Fraction(0)] * (self.degree - 2))

    def complex_root(self):
        return self.complex_roots[self.complex_index]

    def padic_roots(self):
        den = math.lcm(*[c.denominator for c in self.poly])
        return _hensel_roots([int(c * den) for c in self.poly], self.p, self.prec)

    def with_padic_root(self, root):
        K = NumberField(self.poly, self.complex_index, None, self.prec, name=self.name)
        K.p, K.padic_root = self.p, root
        return K

    def with_complex_index(self, i):
        K = NumberField(self.poly, i, None, self.prec, name=self.name)
        K.p, K.padic_root = self.p, self.padic_root
        return K

    def same_field(self, other):
        return self.poly == other.poly

    def embedding_record(self):
        return {"poly": [str(c) for c in self.poly], "complexRoot": str(self.complex_root()),
                "p": self.p, "padicRoot": self.padic_root, "padicPrecision": self.prec}

    def __repr__(self):
        return f"NumberField({[str(c) for c in self.poly]})"


@lru_cache(maxsize=None)
def cyclotomic_field(m, p=None):
    if m <= 2:
        return NumberField([0, 1], p=p)
    poly = sympy.Poly(sympy.cyclotomic_poly(m, sympy.Symbol("x")))
    coeffs = [int(c) for c in reversed(poly.all_coeffs())]
    K = NumberField(coeffs, p=p)
    # complex root exp(2 pi i / m)
    z = cmath.exp(2j * math.pi / m)
    K.complex_index = min(range(len(K.complex_roots)), key=lambda i: abs(K.complex_roots[i] - z))
    return K


class AlgebraicNumber:
    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = tuple(Fraction(c) for c in coords)

    def _coerce(self, other):
        if isinstance(other, AlgebraicNumber):
            if not other.field.same_field(self.field):
                if other.is_rational():
                    return self.field(other.coords[0])
                if self.is_rational():
                    return None
                raise ArithError("elements of different number fields")
            return other
        return self.field(other)

    def is_rational(self):
        return all(c == 0 for c in self.coords[1:])

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return other + self
        return AlgebraicNumber(self.field, [a + b for a, b in zip(self.coords, o.coords)])

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.field, [-a for a in self.coords])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return other * self
        if o.is_rational():
            return AlgebraicNumber(self.field, [a * o.coords[0] for a in self.coords])
        return AlgebraicNumber(self.field, _poly_mulmod(list(self.coords), list(o.coords), self.field.poly))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        r = self.field(1)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return self.field(1 / self.coords[0])
        s = _poly_inverse_mod(list(self.coords), self.field.poly)
        return AlgebraicNumber(self.field, s + [Fraction(0)] * (self.field.degree - len(s)))

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.field(other) * self.inverse()

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except ArithError:
            return False
        if o is None:
            return self.is_rational() and other.is_rational() and self.coords[0] == other.coords[0]
        return self.coords == o.coords

    def __hash__(self):
        return hash(self.coords)

    def __complex__(self):
        z = self.field.complex_root()
        return complex(sum(float(c) * z ** i for i, c in enumerate(self.coords)))

    def to_padic(self, prec=None):
        from .padic import PadicNumber
        K = self.field
        if K.p is None:
            raise ArithError("no p-adic embedding chosen for this field")
        if K.degree > 1 and K.padic_root is None:
            raise ArithError("defining polynomial has no simple root in Q_p")
        prec = prec or K.prec
        root = K.padic_root if K.degree > 1 else 0
        val = sum((c * root ** i for i, c in enumerate(self.coords)), Fraction(0))
        return PadicNumber(K.p, val, prec)

    def trace(self):
        return sum(complex(AlgebraicNumber(self.field.with_complex_index(i), self.coords))
                   for i in range(self.field.degree))

    def norm_float(self):
        r = 1
        for i in range(self.field.degree):
            r *= complex(AlgebraicNumber(self.field.with_complex_index(i), self.coords))
        return r

    def minpoly(self):
        x = sympy.Symbol("x")
        a = sum(sympy.Rational(c.numerator, c.denominator) * sympy.Symbol("t") ** i
                for i, c in enumerate(self.coords))
        m = sum(sympy.Rational(c.numerator, c.denominator) * sympy.Symbol("t") ** i
                for i, c in enumerate(self.field.poly))
        res = sympy.resultant(m, x - a, sympy.Symbol("t"))
        return sympy.Poly(res, x)

    def __repr__(self):
        if self.is_rational():
            return str(self.coords[0])
        terms = [f"{c}*{self.field.name}^{i}" if i else str(c) for i, c in enumerate(self.coords) if c]
        return " + ".join(terms) or "0"

    def to_json(self):
        return {"field": [str(c) for c in self.field.poly], "coords": [str(c) for c in self.coords]}


def rational_field(p=None):
    return NumberField([0, 1], p=p)
