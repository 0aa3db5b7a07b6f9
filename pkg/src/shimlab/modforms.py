"""Classical cusp forms of integral and half-integral weight.

Integral-weight spaces come from Eichler-Selberg trace forms (lifted from every
level between the conductor and the level), level-one spaces may use the Miller
basis, and half-integral spaces are cut out of integral ones by multiplication
with theta. Everything is validated against independent dimension formulas.
"""

import math
import random
from fractions import Fraction
from functools import lru_cache

import sympy

from .arith import (
    CLASS_NUMBERS, DirichletCharacter, NumberField, AlgebraicNumber, decompose_at, _hensel_roots,
    chi_minus4, divisors, euler_phi, factor, is_prime, kronecker, psi_index,
    valuation,
)
from .padic import PadicNumber, kernel, rref, transpose, hessenberg_charpoly
from .qseries import (
    QExpansion, coordinates_in, echelonize, linear_combination, miller_basis,
    sturm_bound, theta,
)


class ModformsError(ValueError):
    pass


def _trivial():
    return DirichletCharacter.trivial(1)


def _on_level(chi, N):
    chi = chi or _trivial()
    if N % chi.conductor():
        raise ModformsError(f"character of conductor {chi.conductor()} does not live at level {N}")
    return chi.primitive().extend(N) if N % chi.primitive().modulus == 0 else chi


def _check_rational(chi):
    if not chi.is_rational():
        raise ModformsError("only characters of order at most 2 are supported for spaces")


# ---------------------------------------------------------------- dimension formulas

def _lambda(r, s, p):
    if 2 * s <= r:
        if r % 2 == 0:
            return p ** (r // 2) + p ** (r // 2 - 1)
        return 2 * p ** ((r - 1) // 2)
    return 2 * p ** (r - s)


def dim_cusp_integral(k, N, chi=None):
    """Cohen-Oesterle dimension of S_k(Gamma_0(N), chi) for integral k >= 2."""
    chi = _on_level(chi, N)
    if chi.parity() != (-1) ** k:
        return 0
    if k < 2:
        raise ModformsError("weight one is not supported")
    f = chi.conductor()
    idx = psi_index(N)
    lam = Fraction(1)
    for p, r in factor(N) if N > 1 else ():
        lam *= _lambda(r, valuation(f, p) if f > 1 else 0, p)
    if k % 4 == 2:
        gamma = Fraction(-1, 4)
    elif k % 4 == 0:
        gamma = Fraction(1, 4)
    else:
        gamma = Fraction(0)
    mu = {0: Fraction(1, 3), 1: Fraction(0), 2: Fraction(-1, 3)}[k % 3]
    s4 = sum(chi(x) for x in range(N) if (x * x + 1) % N == 0) if N > 1 else 1
    s3 = sum(chi(x) for x in range(N) if (x * x + x + 1) % N == 0) if N > 1 else 1
    d = Fraction(k - 1, 12) * idx - lam / 2 + gamma * s4 + mu * s3
    if k == 2 and chi.is_trivial():
        d += 1
    if d.denominator != 1:
        raise ModformsError("dimension formula returned a non-integer")
    return int(d)


def cusps_gamma0(N):
    """Cusp representatives a/d of Gamma_0(N) with their widths."""
    out = []
    for d in divisors(N):
        g = math.gcd(d, N // d)
        width = N // math.gcd(d * d, N)
        seen = set()
        a = 1
        while len(seen) < euler_phi(g):
            if math.gcd(a, d) == 1 and a % g not in seen:
                seen.add(a % g)
                out.append((a, d, width))
            a += 1
    return out


def genus_x0(N):
    idx = psi_index(N)
    nu2 = 0 if N % 4 == 0 else math.prod(1 + kronecker(-4, p) for p, _ in factor(N)) if N > 1 else 1
    nu3 = 0 if N % 9 == 0 else math.prod(1 + kronecker(-3, p) for p, _ in factor(N)) if N > 1 else 1
    c = len(cusps_gamma0(N))
    g = 1 + Fraction(idx, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(c, 2)
    return int(g)


def _theta_order(N, d):
    """Order of theta = eta(2z)^5 / (eta(z)^2 eta(4z)^2) at the cusps a/d of Gamma_0(N) (Ligozat)."""
    r = {1: -2, 2: 5, 4: -2}
    s = Fraction(0)
    for delta, rd in r.items():
        s += Fraction(math.gcd(d, delta) ** 2 * rd, delta)
    return Fraction(N, 24) * s / (math.gcd(d, N // d) * d)


def dim_cusp_half(k, N, chi=None):
    """dim S_{k/2}(Gamma_0(N), chi) for odd k >= 5 and 4 | N, from Riemann-Roch with the theta multiplier.

    At each cusp the vanishing order of a form lies in mu + Z where mu is the
    fractional part of k*ord(theta) plus the character's twist along the cusp stabilizer.
    """
    if N % 4 or k % 2 == 0:
        raise ModformsError("half-integral weight needs odd k and 4 | N")
    chi = _on_level(chi, N)
    if not chi.is_even():
        return 0
    if k < 5:
        raise ModformsError("dimension oracle implemented for k >= 5")
    w = Fraction(k, 2)
    g = genus_x0(N)
    total = (w - 1) * (g - 1)
    for a, d, h in cusps_gamma0(N):
        mu = (k * _theta_order(N, d)) % 1
        t = chi.turn(1 + a * d * h)
        mu = (mu + (t or 0)) % 1
        m = mu if mu else Fraction(1)
        total += w / 2 - m
    if total.denominator != 1:
        raise ModformsError("half-integral dimension is not an integer")
    return int(total)


# ---------------------------------------------------------------- trace formula

class TraceFormula:
    """Tr T_n on S_k(Gamma_0(N), chi) for a rational-valued character."""

    def __init__(self, k, N, chi=None):
        chi = _on_level(chi, N)
        _check_rational(chi)
        if chi.parity() != (-1) ** k:
            raise ModformsError("parity violation: chi(-1) must equal (-1)^k")
        if k < 2:
            raise ModformsError("trace formula needs k >= 2")
        self.k, self.N, self.chi = k, N, chi
        self.cond = chi.conductor()
        self.idx = psi_index(N)
        self.chival = [chi(x) for x in range(N)] if N > 1 else [1]
        self.cache = {}
        self._mu_tables = {}
        self._divN = divisors(N)
        self._hw6 = CLASS_NUMBERS.hw6_table(4096)

    def chi_(self, x):
        return self.chival[x % self.N]

    def _mu_sum(self, nf, t, n):
        """sum over x mod N with x^2 - t x + n = 0 mod N*nf of chi(x)."""
        NN = self.N * nf
        key = (nf, t % NN, n % NN)
        v = self._mu_tables.get(key)
        if v is None:
            tt, nn = t % NN, n % NN
            v = 0
            for x in range(self.N):
                if (x * x - tt * x + nn) % NN == 0:
                    v += self.chival[x]
            self._mu_tables[key] = v
        return v

    def _psi_ratio(self, nf):
        return self.idx // psi_index(self.N // nf)

    def trace(self, n):
        v = self.cache.get(n)
        if v is None:
            v = self._trace(n)
            self.cache[n] = v
        return v

    def _sq_divs(self, m):
        """(f, 6 h_w(-m/f^2)) for f^2 | m with m/f^2 a discriminant."""
        v = _SQDIV.get(m)
        if v is None:
            tab = self._hw6
            v = []
            f = 1
            while f * f <= m:
                if m % (f * f) == 0:
                    h = int(tab[m // (f * f)])
                    if h:
                        v.append((f, h))
                f += 1
            _SQDIV[m] = v
        return v

    def _trace(self, n):
        # everything in units of 1/12
        k, N = self.k, self.N
        total = 0
        r = math.isqrt(n)
        if r * r == n:
            c = self.chi_(r)
            total += (k - 1) * self.idx * c * r ** (k - 2)
        if len(self._hw6) <= 4 * n:
            self._hw6 = CLASS_NUMBERS.hw6_table(max(8 * n, 4096))
        a2 = 0
        t = 0
        while t * t < 4 * n:
            u0, u1 = 0, 1
            for _ in range(k - 2):
                u0, u1 = u1, t * u1 - n * u0
            inner = 0
            for f, h in self._sq_divs(4 * n - t * t):
                if N == 1:
                    inner += h
                else:
                    nf = math.gcd(N, f)
                    s = self._mu_sum(nf, t, n)
                    if s:
                        inner += h * self._psi_ratio(nf) * s
            a2 += u1 * inner if t == 0 else 2 * u1 * inner
            t += 1
        total -= a2
        a3 = 0
        for d in divisors(n):
            e = n // d
            if N == 1:
                a3 += min(d, e) ** (k - 1)
                continue
            s = 0
            for tau in self._divN:
                g = math.gcd(tau, N // tau)
                if math.gcd(N // self.cond, e - d) % g:
                    continue
                y = self._crt_pair(d, tau, e, N // tau)
                if y is None:
                    continue
                s += euler_phi(g) * self.chi_(y)
            a3 += min(d, e) ** (k - 1) * s
        total -= 6 * a3
        if k == 2 and self.chi.is_trivial():
            total += 12 * sum(t for t in divisors(n) if math.gcd(N, n // t) == 1)
        return Fraction(total, 12)

    def _crt_pair(self, a, m1, b, m2):
        g = math.gcd(m1, m2)
        if (a - b) % g:
            return None
        L = m1 // g * m2
        # solve y = a mod m1, y = b mod m2
        t = ((b - a) // g * pow(m1 // g, -1, m2 // g)) % (m2 // g) if m2 // g > 1 else 0
        y = (a + m1 * t) % L
        # extend to a unit class mod N if possible
        for c in range(self.N // L if self.N % L == 0 else 1):
            z = y + c * L
            if math.gcd(z, self.N) == 1:
                return z
        return y


@lru_cache(maxsize=None)
def _trace_formula(k, N, chi_label):
    return TraceFormula(k, N, DirichletCharacter.from_label(chi_label))


def trace_formula(k, N, chi=None):
    chi = _on_level(chi, N)
    return _trace_formula(k, N, chi.label())


def trace_Tn(k, N, chi, n):
    return trace_formula(k, N, chi).trace(n)


def trace_form(k, N, chi, m, B):
    """sum_n Tr(T_m T_n) q^n at level N."""
    tf = trace_formula(k, N, chi)
    chi = tf.chi
    cs = [Fraction(0)] * B
    for n in range(1, B):
        s = Fraction(0)
        for d in divisors(math.gcd(m, n)):
            c = chi(d) if N > 1 else 1
            if c:
                s += c * d ** (k - 1) * tf.trace(m * n // (d * d))
        cs[n] = s
    return QExpansion(cs)


# ---------------------------------------------------------------- spaces

class CuspSpace:
    """Echelonized basis of a cusp form space to precision B."""

    def __init__(self, weight, level, character, basis, prec, half=False):
        self.weight = weight
        self.level = level
        self.character = character
        self.basis = basis
        self.prec = prec
        self.half = half

    @property
    def dim(self):
        return len(self.basis)

    def pivots(self):
        return [f.valuation() for f in self.basis]

    def coordinates(self, f):
        return coordinates_in(self.basis, f)

    def element(self, coeffs):
        return linear_combination(self.basis, coeffs)

    def hecke_matrix(self, op):
        return hecke_matrix(self, op)

    def subspace(self, vectors):
        """Span of coordinate vectors, echelonized."""
        fs = [self.element(v) for v in vectors]
        return CuspSpace(self.weight, self.level, self.character, echelonize(fs), self.prec, self.half)

    def to_json(self):
        return {"weight": str(self.weight), "level": self.level, "character": self.character.label(),
                "precision": self.prec, "half": self.half, "basis": [f.to_json() for f in self.basis]}

    @classmethod
    def from_json(cls, d):
        w = Fraction(d["weight"])
        return cls(w if d["half"] else int(w), d["level"], DirichletCharacter.from_label(d["character"]),
                   [QExpansion.from_json(b) for b in d["basis"]], d["precision"], d["half"])

    def __repr__(self):
        kind = "half-integral" if self.half else "integral"
        return f"CuspSpace({kind} weight {self.weight}, level {self.level}, {self.character!r}, dim {self.dim}, B={self.prec})"


_MODP = (1 << 61) - 1
_SQDIV = {}


class _ModpRank:
    """Incremental rank tracking modulo a large prime."""

    def __init__(self):
        self.rows = []
        self.piv = []

    def add(self, coeffs):
        r = []
        for c in coeffs:
            c = Fraction(c)
            r.append(c.numerator % _MODP * pow(c.denominator % _MODP, -1, _MODP) % _MODP)
        for pr, pc in zip(self.rows, self.piv):
            if r[pc]:
                c = r[pc]
                r = [(a - c * b) % _MODP for a, b in zip(r, pr)]
        lead = next((i for i, x in enumerate(r) if x), None)
        if lead is None:
            return False
        inv = pow(r[lead], -1, _MODP)
        r = [x * inv % _MODP for x in r]
        self.rows.append(r)
        self.piv.append(lead)
        return True


def _space_cache_key(k, N, chi, B):
    return (k, N, chi.label(), B)


_SPACES = {}


def cusp_space(k, N, chi=None, B=None, method="auto"):
    """S_k(Gamma_0(N), chi) to precision B from trace forms at all intermediate levels."""
    chi = _on_level(chi, N)
    _check_rational(chi)
    if chi.parity() != (-1) ** k:
        raise ModformsError("parity violation: chi(-1) must equal (-1)^k")
    if B is None:
        B = 4 * sturm_bound(k, N)
    key = _space_cache_key(k, N, chi, B)
    if key in _SPACES:
        return _SPACES[key]
    for (k2, N2, lab, B2), sp in _SPACES.items():
        if (k2, N2, lab) == (k, N, chi.label()) and B2 >= B:
            return _truncate_space(sp, B)
    dim = dim_cusp_integral(k, N, chi)
    if dim == 0:
        sp = CuspSpace(k, N, chi, [], B)
    elif N == 1 and method in ("auto", "miller"):
        sp = CuspSpace(k, N, chi, miller_basis(k, B), B)
    else:
        sp = CuspSpace(k, N, chi, _trace_basis(k, N, chi, B, dim), B)
    if sp.dim != dim:
        raise ModformsError(f"space construction gave dimension {sp.dim}, expected {dim}; raise B")
    _SPACES[key] = sp
    return sp


def _truncate_space(sp, B):
    basis = echelonize([f.truncate(B) for f in sp.basis])
    if len(basis) != sp.dim:
        raise ModformsError("precision below Sturm bound")
    return CuspSpace(sp.weight, sp.level, sp.character, basis, B, sp.half)


def _trace_basis(k, N, chi, B, dim):
    tracker = _ModpRank()
    gens = []
    cond = chi.conductor()
    levels = [M for M in divisors(N) if M % cond == 0]
    # lower levels first: their traces are cheap and cover the old space
    for M in levels:
        chiM = chi.restrict(M) if M != N else chi
        dM = dim_cusp_integral(k, M, chiM)
        if dM == 0:
            continue
        mmax = sturm_bound(k, M, margin=0) + 1
        for m in range(1, mmax + 1):
            for d in divisors(N // M):
                f = trace_form(k, M, chiM, m, (B - 1) // d + 1)
                if d > 1:
                    f = _lift(f, d, B)
                if tracker.add(f.coeffs):
                    gens.append(f)
                    if len(gens) == dim:
                        return echelonize(gens)
    raise ModformsError("trace-form generators degenerate at this precision; raise B")


def _lift(f, d, B):
    cs = [Fraction(0)] * B
    for i, c in enumerate(f.coeffs):
        if i * d < B:
            cs[i * d] = c
    return QExpansion(cs)


# ---------------------------------------------------------------- Hecke operators

def _op(op):
    if isinstance(op, str):
        name = op.rstrip("0123456789")
        return name, int(op[len(name):])
    return op


def _apply_integral(space, f, name, n, B_out):
    k, N, chi = space.weight, space.level, space.character
    if name == "T":
        if math.gcd(n, N) != 1:
            raise ModformsError(f"T_{n} is not legal at level {N}; use U")
        out = []
        for m in range(B_out):
            s = Fraction(0)
            for d in divisors(math.gcd(m, n)) if m else [1]:
                c = chi(d)
                if c:
                    s += c * d ** (k - 1) * f[m * n // (d * d)]
            if m == 0:
                s = f[0] * sum(chi(d) * d ** (k - 1) for d in divisors(n)) if n > 1 else f[0]
            out.append(s)
        return QExpansion(out)
    if name == "U":
        if N % n:
            raise ModformsError(f"U_{n} needs {n} | level")
        return QExpansion([f[m * n] for m in range(B_out)])
    if name == "diamond":
        return f.scale(chi(n)).truncate(B_out)
    raise ModformsError(f"operator {name} is not legal in integral weight")


def _apply_half(space, f, name, ell, B_out):
    k = 2 * space.weight  # odd integer
    lam = (k - 1) // 2
    N, chi = space.level, space.character
    if name == "T2":
        if N % ell == 0:
            raise ModformsError(f"T_{ell}^2 is not legal at level {N}; use U2")
        out = []
        l2 = ell * ell
        c1 = chi(ell) * ell ** (lam - 1)
        c2 = chi(l2) * ell ** (k - 2)
        for n in range(B_out):
            s = f[l2 * n]
            if n:
                s += c1 * kronecker((-1) ** lam * n, ell) * f[n]
                if n % l2 == 0:
                    s += c2 * f[n // l2]
            else:
                s += c1 * 0 + c2 * f[0]
            out.append(s)
        return QExpansion(out)
    if name == "U2":
        if N % ell:
            raise ModformsError(f"U_{ell}^2 needs {ell} | level")
        return QExpansion([f[ell * ell * n] for n in range(B_out)])
    if name == "diamond":
        return f.scale(chi(ell)).truncate(B_out)
    raise ModformsError(f"operator {name} is not legal in half-integral weight")


def apply_hecke(space, f, op):
    name, n = _op(op)
    idx = n * n if name in ("T2", "U2") else n
    if name == "diamond":
        idx = 1
    B_out = (f.prec - 1) // idx + 1
    if space.half:
        return _apply_half(space, f, name, n, B_out)
    return _apply_integral(space, f, name, n, B_out)


def hecke_matrix(space, op):
    """Matrix (row i = coordinates of op(basis_i)) of a Hecke operator in the stored basis."""
    if space.dim == 0:
        return []
    name, n = _op(op)
    if space.half and name in ("T", "U"):
        raise ModformsError("use T2/U2 on half-integral weight spaces")
    if not space.half and name in ("T2", "U2"):
        raise ModformsError("T2/U2 are only legal in half-integral weight")
    piv = space.pivots()
    rows = []
    for f in space.basis:
        g = apply_hecke(space, f, op)
        if g.prec <= max(piv):
            raise ModformsError(f"precision insufficient for index {op}: need B > {max(piv)} after the operator")
        basis_t = [b.truncate(g.prec) for b in space.basis]
        c = coordinates_in(basis_t, g)
        if c is None:
            raise ModformsError(f"operator {op} does not preserve the space at this precision")
        rows.append(c)
    return rows


def charpoly(M):
    """Characteristic polynomial of a rational matrix as a sympy Poly in x."""
    x = sympy.Symbol("x")
    if not M:
        return sympy.Poly(1, x)
    cp = hessenberg_charpoly([[Fraction(a) for a in r] for r in M])
    return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(cp)], x)


def mat_mul_q(A, B):
    return [[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in zip(*B)] for r in A]


def poly_at_matrix(poly, M):
    """Evaluate a sympy Poly at a rational matrix."""
    n = len(M)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in poly.all_coeffs()]
    acc = [[Fraction(0)] * n for _ in range(n)]
    for c in coeffs:
        acc = mat_mul_q(acc, M)
        for i in range(n):
            acc[i][i] += c
    return acc


def left_kernel(M):
    """Row vectors v with v M = 0 (rational)."""
    if not M:
        return []
    K = kernel(transpose(M))
    return transpose(K) if K and K[0] else []


def row_space(M):
    R, piv = rref(M)
    return [r for r in R[:len(piv)]]


# ---------------------------------------------------------------- newforms

class Newform:
    """Normalized newform with coefficients in a number field."""

    def __init__(self, weight, level, character, field, coeffs, label=""):
        self.weight = weight
        self.level = level
        self.character = character
        self.field = field
        self.coeffs = coeffs
        self.label = label
        self.local_types = {}

    @property
    def prec(self):
        return len(self.coeffs)

    def a(self, n):
        if n >= len(self.coeffs):
            raise ModformsError(f"a_{n} is beyond the stored precision {len(self.coeffs)}")
        return self.coeffs[n]

    def degree(self):
        return self.field.degree

    def is_rational(self):
        return self.field.degree == 1

    def rational_coeffs(self):
        if not self.is_rational():
            raise ModformsError("newform is not rational")
        return [c.coords[0] for c in self.coeffs]

    def complex_coeffs(self):
        return [complex(c) for c in self.coeffs]

    def qexp(self):
        return QExpansion(self.rational_coeffs()) if self.is_rational() else QExpansion(self.coeffs, "field")

    def conjugates(self):
        """The Galois conjugates as newforms over the same field with other complex embeddings."""
        return [Newform(self.weight, self.level, self.character, self.field.with_complex_index(i),
                        [AlgebraicNumber(self.field.with_complex_index(i), c.coords) for c in self.coeffs],
                        f"{self.label}#{i}") for i in range(self.field.degree)]

    def with_field(self, K):
        return Newform(self.weight, self.level, self.character, K,
                       [AlgebraicNumber(K, c.coords) for c in self.coeffs], self.label)

    def to_json(self):
        return {"weight": self.weight, "level": self.level, "character": self.character.label(),
                "field": [str(c) for c in self.field.poly], "label": self.label,
                "coefficients": [[str(x) for x in c.coords] for c in self.coeffs]}

    def __repr__(self):
        return f"Newform({self.label or '?'}: weight {self.weight}, level {self.level}, degree {self.degree()})"


def old_subspace(k, N, chi, B):
    """Coordinates (in the level-N basis) spanning the old space."""
    space = cusp_space(k, N, chi, B)
    chi = space.character
    gens = []
    for M in divisors(N):
        if M == N or M % chi.conductor():
            continue
        sub = cusp_space(k, M, chi.restrict(M), B)
        for f in sub.basis:
            for d in divisors(N // M):
                g = _lift(f.truncate((B - 1) // d + 1), d, B) if d > 1 else f
                c = space.coordinates(g)
                if c is None:
                    raise ModformsError("oldform lift is not in the space")
                gens.append(c)
    return row_space(gens) if gens else []


def _good_primes(N, count):
    out, ell = [], 2
    while len(out) < count:
        if N % ell and is_prime(ell):
            out.append(ell)
        ell += 1
    return out


def new_subspace(k, N, chi=None, B=None):
    """(space, coordinate rows spanning the new subspace, generic Hecke matrix)."""
    space = cusp_space(k, N, chi, B)
    if space.dim == 0:
        return space, [], None
    old = old_subspace(k, N, space.character, space.prec)
    primes = _good_primes(N, 4)
    mats = {ell: hecke_matrix(space, ("T", ell)) for ell in primes if (space.prec - 1) // ell >= max(space.pivots()) + 1}
    if not mats:
        raise ModformsError("precision too small for any Hecke operator")
    rng = random.Random(12345)
    ells = sorted(mats)
    for attempt in range(20):
        coeffs = [1] + [rng.randint(-3, 3) for _ in ells[1:]] if attempt else [1] + [0] * (len(ells) - 1)
        T = [[sum(c * mats[l][i][j] for c, l in zip(coeffs, ells)) for j in range(space.dim)] for i in range(space.dim)]
        if old:
            Told = _restrict_rows(T, old)
            g_old = charpoly(Told)
            Pnew = poly_at_matrix(g_old, T)
            new = row_space(Pnew) if not _is_zero_matrix(Pnew) else []
        else:
            new = [[Fraction(int(i == j)) for j in range(space.dim)] for i in range(space.dim)]
        if len(new) + len(old) != space.dim:
            continue
        if new:
            Tnew = _restrict_rows(T, new)
            cp = charpoly(Tnew)
            if sympy.gcd(cp, cp.diff()).degree() > 0:
                continue
        return space, new, (coeffs, ells, T)
    raise ModformsError("no generic Hecke operator separates the new space")


def _is_zero_matrix(M):
    return all(x == 0 for r in M for x in r)


def _restrict_rows(T, W):
    """Matrix of the operator (acting on row vectors by v -> v T) restricted to the row span of W."""
    WT = mat_mul_q(W, T)
    out = []
    R, piv = rref(W)
    for v in WT:
        out.append(_coords_rows(W, v))
    return out


def _coords_rows(W, v):
    """c with c W = v."""
    aug = [list(col) + [x] for col, x in zip(zip(*W), v)]
    R, piv = rref(aug)
    n = len(W)
    if any(p >= n for p in piv):
        raise ModformsError("vector not in the row span")
    c = [Fraction(0)] * n
    for i, p in enumerate(piv):
        c[p] = R[i][n]
    return c


def newforms(k, N, chi=None, B=None, p=None, prec=40):
    """Galois orbits of newforms of S_k(Gamma_0(N), chi), one Newform per orbit."""
    chi = _on_level(chi, N)
    space, new, data = new_subspace(k, N, chi, B)
    if not new:
        return []
    coeffs, ells, T = data
    Tnew = _restrict_rows(T, new)
    cp = charpoly(Tnew)
    x = cp.gens[0]
    out = []
    _, facs = sympy.factor_list(cp.as_expr(), x)
    facs = sorted(facs, key=lambda fe: (sympy.degree(fe[0], x), str(fe[0])))
    for idx, (fac, _) in enumerate(facs):
        fac = sympy.Poly(fac, x).monic()
        Kr = left_kernel(poly_at_matrix(fac, Tnew))
        if len(Kr) != fac.degree():
            raise ModformsError("eigenspace dimension does not match the factor degree")
        TK = _restrict_rows(Tnew, Kr)
        cs = [Fraction(int(c.p), int(c.q)) for c in reversed(fac.all_coeffs())]
        scale = _integral_scale(cs)
        mon = [c * scale ** (len(cs) - 1 - i) for i, c in enumerate(cs)]
        K = NumberField(mon, p=p, prec=prec)
        alpha = K.gen() / scale  # root of fac
        dim = len(TK)
        M = [[K(TK[j][i]) - (alpha if i == j else 0) for j in range(dim)] for i in range(dim)]
        v = kernel(M)
        if not v or len(v[0]) != 1:
            raise ModformsError("eigenvalue field construction failed")
        vec = [row[0] for row in v]
        # eigenvector in new-space coordinates -> full coordinates -> q-expansion
        full = [K(0)] * space.dim
        for ci, kr in zip(vec, Kr):
            for j in range(space.dim):
                wj = sum((kr[t] * new[t][j] for t in range(len(new))), Fraction(0))
                if wj:
                    full[j] = full[j] + ci * wj
        qs = [K(0)] * space.prec
        for cj, f in zip(full, space.basis):
            if cj.is_zero():
                continue
            for n, c in enumerate(f.coeffs):
                if c:
                    qs[n] = qs[n] + cj * c
        a1 = qs[1]
        if a1.is_zero():
            raise ModformsError("eigenvector has a_1 = 0")
        inv = a1.inverse()
        qs = [c * inv for c in qs]
        nf = Newform(k, N, chi, K, qs, f"{k}.{N}.{chi.label()}.{idx}")
        out.append(nf)
    return out


def _integral_scale(cs):
    """Smallest positive integer s making x^n + ... monic integral after x -> x/s scaling."""
    n = len(cs) - 1
    s = 1
    while True:
        if all((c * s ** (n - i)).denominator == 1 for i, c in enumerate(cs)):
            return s
        s += 1


def newform_from_qexp(f, k, N, chi=None, label=""):
    K = NumberField([0, 1])
    return Newform(k, N, _on_level(chi, N), K, [K(c) for c in f.coeffs], label)


# ---------------------------------------------------------------- half-integral weight

def half_space(k, N, chi=None, B=None):
    """S_{k/2}(Gamma_0(N), chi) as {g/theta : g in S_(k+1)/2(N)} cut down by a cuspidality test.

    g/theta is automatically cuspidal away from the cusps where theta vanishes
    (those a/d with 2 || d). There the form theta_1 = 2 theta(4z) - theta(z), which
    carries the same multiplier on Gamma_0(16), is nonzero, so we require
    g theta_1 / theta to be a cusp form at level lcm(N, 16); equivalently
    g theta_1 lies in theta * S_(k+1)/2(lcm(N, 16)) as a holomorphic identity.
    """
    if N % 4:
        raise ModformsError("half-integral weight needs 4 | level")
    if k % 2 == 0 or k < 5:
        raise ModformsError("half-integral weight needs odd k >= 5")
    chi = _on_level(chi, N)
    _check_rational(chi)
    w = Fraction(k, 2)
    N2 = math.lcm(N, 16)
    need = sturm_bound(w + 1, N2, margin=1)
    if B is None:
        B = max(4 * sturm_bound(w, N), need)
    elif B < need:
        raise ModformsError(f"precision B={B} is below the validation bound {need}")
    expected = dim_cusp_half(k, N, chi)
    k1 = (k + 1) // 2
    chi1 = chi * chi_minus4() ** k1 if k1 % 2 else chi
    chi1 = chi1.primitive()
    S1 = cusp_space(k1, N, chi1.extend(N), B)
    S2 = cusp_space(k1, N2, chi1.extend(N2), B)
    th = theta(B)
    th1 = th.V(4).scale(2) - th
    sols = []
    if S1.dim:
        targets = [b * th for b in S2.basis]
        tech = echelonize(targets)
        resid = []
        for g in S1.basis:
            r = list((g * th1).coeffs)
            for b in tech:
                pc = b.valuation()
                c = r[pc]
                if c:
                    r = [x - c * y for x, y in zip(r, b.coeffs)]
            resid.append(r)
        if not any(x != 0 for r in resid for x in r):
            sols = [[Fraction(int(i == j)) for j in range(S1.dim)] for i in range(S1.dim)]
        else:
            sols = left_kernel(resid)
    inv_theta = th.inverse()
    basis = echelonize([linear_combination(S1.basis, c) * inv_theta for c in sols])
    space = CuspSpace(w, N, chi, basis, B, half=True)
    if space.dim != expected:
        raise ModformsError(f"half-integral construction failed validation: dim {space.dim} vs oracle {expected}")
    return space


def lift_half(space_from, N_to, d):
    """Degeneracy embedding f(z) -> f(dz) of a half-integral weight space into level N_to."""
    return [_lift(f.truncate((f.prec - 1) // d + 1), d, f.prec) for f in space_from.basis]


def waldspurger_subspace(space, f0, L=None, extra=None):
    """Simultaneous eigenspace T_{l^2} = a_l(f0) for good l <= L (rational f0 only via exact arithmetic,
    otherwise the eigenspace over the Hecke field is returned as a basis of K-vectors)."""
    N = space.level
    if L is None:
        L = max(7, sturm_bound(2 * space.weight - 1, N // 2, margin=0))
    ells = [l for l in range(3, L + 1) if is_prime(l) and N % l and l * l * (max(space.pivots(), default=0) + 1) < space.prec]
    if not ells:
        raise ModformsError("precision too small for any T_{l^2}")
    if space.dim == 0:
        return space, ells
    K = f0.field
    vecs = None
    for ell in ells:
        M = hecke_matrix(space, ("T2", ell))
        a = f0.a(ell)
        # row vectors v with v M = a v
        A = [[K(M[j][i]) - (a if i == j else 0) for j in range(space.dim)] for i in range(space.dim)]
        if vecs is None:
            ker = kernel(A)
            vecs = transpose(ker) if ker and ker[0] else []
        else:
            if not vecs:
                break
            # restrict to current span: coefficients c with (c V) (M - a) = 0
            VA = [[sum((v[i] * A[j][i] for i in range(space.dim)), K(0)) for j in range(space.dim)] for v in vecs]
            ker = kernel(transpose(VA))
            cs = transpose(ker) if ker and ker[0] else []
            vecs = [[sum((c[t] * vecs[t][j] for t in range(len(vecs))), K(0)) for j in range(space.dim)] for c in cs]
    return (vecs or []), ells


def eigenspace_forms(space, vecs):
    """q-expansions (over the field of the vectors) of coordinate vectors."""
    out = []
    for v in vecs:
        K = v[0].field if v and hasattr(v[0], "field") else None
        qs = [K(0) if K else Fraction(0)] * space.prec
        for c, f in zip(v, space.basis):
            if (hasattr(c, "is_zero") and c.is_zero()) or c == 0:
                continue
            for n, x in enumerate(f.coeffs):
                if x:
                    qs[n] = qs[n] + c * x
        out.append(qs)
    return out


def rational_eigenspace(space, f0, L=None):
    """Waldspurger subspace for a rational newform as a rational CuspSpace."""
    if not f0.is_rational():
        raise ModformsError("rational_eigenspace needs a rational newform")
    vecs, ells = waldspurger_subspace(space, f0, L)
    rows = [[c.coords[0] for c in v] for v in vecs]
    sub = space.subspace(rows) if rows else CuspSpace(space.weight, space.level, space.character, [], space.prec, True)
    return sub, ells


def shimura_match(space, vec, candidates, L=None):
    """The unique candidate newform whose a_l match the T_{l^2}-eigenvalues of a half-integral eigenvector."""
    if all((getattr(c, "is_zero", None) and c.is_zero()) or c == 0 for c in vec):
        raise ModformsError("zero vector")
    N = space.level
    if L is None:
        L = max(7, sturm_bound(2 * space.weight - 1, N // 2, margin=0))
    ells = [l for l in range(3, L + 1) if is_prime(l) and N % l]
    piv = space.pivots()
    eig = {}
    for ell in ells:
        if ell * ell * (max(piv) + 1) >= space.prec:
            raise ModformsError(f"precision too small for T_{ell}^2")
        M = hecke_matrix(space, ("T2", ell))
        w = [sum((vec[i] * M[i][j] for i in range(space.dim)), vec[0] * 0) for j in range(space.dim)]
        # w = lambda * vec
        i0 = next(i for i, c in enumerate(vec) if not ((getattr(c, "is_zero", None) and c.is_zero()) or c == 0))
        lam = w[i0] / vec[i0]
        if any(not _eq0(w[j] - lam * vec[j]) for j in range(space.dim)):
            raise ModformsError("vector is not a T_{l^2} eigenvector")
        eig[ell] = lam
    matches = [f for f in candidates if all(_eq0(f.a(l) - eig[l]) for l in ells)]
    if not matches:
        raise ModformsError("no match")
    if len(matches) > 1:
        raise ModformsError("multiple matches; raise L")
    return matches[0]


def _eq0(x):
    z = getattr(x, "is_zero", None)
    return z() if z is not None else x == 0


NewformData = Newform


# ---------------------------------------------------------------- points and local types

class EigenPoint:
    """A system of Hecke eigenvalues with weight data.

    ``weight`` is the integer k for integral points and the odd k of weight k/2
    for half-integral ones. ``eigenvalues`` maps labels like "T3", "U5", "T2_3",
    "U2_5" to AlgebraicNumber or PadicNumber values.
    """

    def __init__(self, weight, level, p, character, eigenvalues, half=False, newform=None, kappa_prime=None):
        self.weight = weight
        self.level = level
        self.p = p
        self.character = character
        self.eigenvalues = dict(eigenvalues)
        self.half = half
        self.newform = newform
        self.kappa_prime = kappa_prime
        up = self.up_label()
        if up in self.eigenvalues and _eq0(self.eigenvalues[up]):
            raise ModformsError("not finite slope")

    def up_label(self):
        return f"U2_{self.p}" if self.half else f"U{self.p}"

    def up_eigenvalue(self):
        try:
            return self.eigenvalues[self.up_label()]
        except KeyError:
            raise ModformsError(f"missing {self.up_label()} data") from None

    def slope(self):
        v = self.up_eigenvalue()
        if isinstance(v, AlgebraicNumber):
            v = v.to_padic()
        return v.valuation()

    def __repr__(self):
        w = f"{self.weight}/2" if self.half else str(self.weight)
        return f"EigenPoint(weight {w}, tame level {self.level}, p={self.p}, slope {self.slope()})"


def _stabilization_field(a_p, c, p, prec):
    """Field containing the roots of X^2 - a_p X + c, with both roots as field elements."""
    a_p, c = Fraction(a_p), Fraction(c)
    disc = a_p * a_p - 4 * c
    num, den = disc.numerator, disc.denominator
    rn, rd = math.isqrt(abs(num)), math.isqrt(den)
    if num >= 0 and rn * rn == num and rd * rd == den:
        K = NumberField([0, 1], p=p, prec=prec)
        r = Fraction(rn, rd)
        roots = [K((a_p + r) / 2), K((a_p - r) / 2)]
        return K, roots
    K = NumberField([c, -a_p, 1], p=p, prec=prec)
    a = K.gen()
    return K, [a, K(a_p) - a]


def p_stabilize(f0, p, choice="alpha", half=False, prec=40, ells=(2, 3, 7, 11, 13)):
    """p-stabilization of a newform of level prime to p.

    alpha is the root of X^2 - a_p X + chi(p) p^(k-1) of smaller p-adic valuation,
    beta the other one. With ``half`` the point is recorded on the half-integral
    side (weight k+1 over 2) with the root as U_{p^2}-eigenvalue.
    """
    if f0.level % p == 0:
        raise ModformsError(f"p = {p} divides the level {f0.level}")
    if not f0.is_rational():
        raise ModformsError("p_stabilize supports rational newforms")
    k, chi = f0.weight, f0.character
    ap = f0.rational_coeffs()[p]
    c = chi(p) * Fraction(p) ** (k - 1)
    K, roots = _stabilization_field(ap, c, p, prec)
    if K.degree == 2:
        pr = _hensel_roots([int(c), -int(ap), 1], p, prec)
        if len(pr) != 2:
            raise ModformsError("roots of the Hecke polynomial are not in Q_p")
        vals = [PadicNumber(p, r, prec).valuation() for r in pr]
        K = K.with_padic_root(pr[vals.index(min(vals))])
        roots = [K.gen(), K(ap) - K.gen()]
    roots = [AlgebraicNumber(K, r.coords) for r in roots]
    roots.sort(key=lambda r: r.to_padic(prec).valuation())
    if roots[0].to_padic(prec).valuation() == roots[1].to_padic(prec).valuation() and \
            not _eq0(roots[0] - roots[1]) and choice not in ("alpha", "beta"):
        raise ModformsError("roots have equal slope")
    if choice not in ("alpha", "beta"):
        raise ModformsError("choice must be 'alpha' or 'beta'")
    root = roots[0] if choice == "alpha" else roots[1]
    if _eq0(root):
        raise ModformsError("not finite slope")
    eig = {}
    qs = f0.rational_coeffs()
    for ell in ells:
        if f0.level % ell == 0 or ell == p or ell >= len(qs):
            continue
        eig[f"T2_{ell}" if half else f"T{ell}"] = K(qs[ell])
    eig[f"U2_{p}" if half else f"U{p}"] = root
    w = k + 1 if half else k
    return EigenPoint(w, f0.level, p, chi, eig, half=half, newform=f0)


class LocalType:
    TAGS = ("unramified-PS", "ramified-PS", "Steinberg")

    def __init__(self, prime, tag, sign=None):
        if tag not in self.TAGS:
            raise ModformsError(f"unknown local type {tag}")
        if tag == "Steinberg" and sign not in (1, -1, None):
            raise ModformsError("Steinberg sign must be +1 or -1")
        self.prime = prime
        self.tag = tag
        self.sign = sign if tag == "Steinberg" else None

    def __eq__(self, other):
        return isinstance(other, LocalType) and (self.prime, self.tag, self.sign) == (other.prime, other.tag, other.sign)

    def __repr__(self):
        s = "" if self.sign is None else ("+" if self.sign > 0 else "-")
        return f"LocalType({self.prime}, {self.tag}{s})"


def _steinberg_sign(lam, chi_rest_ell, ell, w):
    """sign with lam = sign * chi(ell) ell^((w-2)/2), or None when that is irrational."""
    if (w - 2) % 2:
        return None
    ref = chi_rest_ell * ell ** ((w - 2) // 2)
    if _eq0(lam - ref):
        return 1
    if _eq0(lam + ref):
        return -1
    return None


def local_type(x, ell):
    """Local type at ell of the automorphic representation attached to a newform or eigen point."""
    if isinstance(x, EigenPoint):
        w = x.weight - 1 if x.half else x.weight
        if ell == x.p:
            lam = x.up_eigenvalue()
            chi = x.character
            target = chi(ell) ** 2 * Fraction(ell) ** (w - 2) if x.level % ell else None
            if target is not None and _eq0(lam * lam - target):
                return LocalType(ell, "Steinberg", _steinberg_sign(lam, chi(ell), ell, w))
            if x.kappa_prime is not None and not x.kappa_prime.is_trivial():
                return LocalType(ell, "ramified-PS")
            return LocalType(ell, "unramified-PS")
        if x.newform is None:
            if x.level % ell:
                return LocalType(ell, "unramified-PS")
            raise ModformsError("local type away from p needs the newform")
        return local_type(x.newform, ell)
    f = x
    M, w, chi = f.level, f.weight, f.character
    if M % ell:
        return LocalType(ell, "unramified-PS")
    v = valuation(M, ell)
    cond = chi.conductor()
    c_ell = valuation(cond, ell) if cond > 1 else 0
    if c_ell:
        if v == c_ell:
            return LocalType(ell, "ramified-PS")
        raise ModformsError(f"level exponent {v} at {ell} exceeds the character's; unsupported local type")
    if v == 1:
        _, rest = decompose_at(chi, ell)
        r = rest(ell) if rest.modulus > 1 else 1
        lam = f.a(ell)
        if not _eq0(lam * lam - r * Fraction(ell) ** (w - 2)):
            raise ModformsError("Steinberg relation fails at a prime dividing the level exactly once")
        return LocalType(ell, "Steinberg", _steinberg_sign(lam, r, ell, w))
    if ell == 2:
        raise ModformsError("supercuspidal at 2 is excluded (conductor 2-part >= 4 with trivial character there)")
    raise ModformsError(f"non-squarefree level at odd prime {ell} is unsupported")


def low_slope(x):
    """v(lambda(U_{p^2})) < k - 2 for a half-integral point of weight k/2."""
    if not x.half:
        raise ModformsError("low_slope is defined for half-integral points")
    v = x.slope()
    return v < x.weight - 2
