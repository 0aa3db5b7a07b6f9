"""Sections of finitely presented modules over a one-parameter ring.

The ring is R = K[w] with K = Q (exact rationals). p-adic data enters through
rational lifts at a stated precision. R is a principal ideal domain, so Frac(R) is an
honest field and "non-zerodivisor" simply means "nonzero polynomial". A module is
R^n modulo the column span of a relation matrix, and a section is a vector in R^n.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction


class SectionsError(ValueError):
    pass


# ---------------------------------------------------------------- polynomials

class Poly:
    """Polynomial in w with Fraction coefficients, constant term first."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = c

    @classmethod
    def w(cls):
        return cls([0, 1])

    @classmethod
    def const(cls, x):
        return cls([x])

    def _lift(self, o):
        return o if isinstance(o, Poly) else Poly([o])

    @property
    def degree(self):
        return len(self.c) - 1      # -1 for zero

    def is_zero(self):
        return not self.c

    def lead(self):
        return self.c[-1]

    def __add__(self, o):
        o = self._lift(o)
        n = max(len(self.c), len(o.c))
        return Poly([(self.c[i] if i < len(self.c) else 0) + (o.c[i] if i < len(o.c) else 0) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-x for x in self.c])

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        if self.is_zero() or o.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __eq__(self, o):
        return (self - self._lift(o)).is_zero()

    __hash__ = None

    def divmod(self, o):
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(0, len(self.c) - len(o.c) + 1)
        r = list(self.c)
        inv = 1 / o.lead()
        for i in range(len(q) - 1, -1, -1):
            coef = r[i + len(o.c) - 1] * inv
            q[i] = coef
            if coef:
                for j, b in enumerate(o.c):
                    r[i + j] -= coef * b
        return Poly(q), Poly(r)

    def __call__(self, x):
        acc = Fraction(0) if not isinstance(x, Poly) else Poly()
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def translate(self, x0):
        """The polynomial w -> self(w + x0)."""
        return self(Poly([x0, 1]))

    def order_at_zero(self):
        for i, a in enumerate(self.c):
            if a:
                return i
        return None

    def monic(self):
        return self * (1 / self.lead()) if self.c else self

    def to_json(self):
        return [str(x) for x in self.c]

    def __repr__(self):
        if not self.c:
            return "0"
        terms = []
        for i, a in enumerate(self.c):
            if a:
                terms.append(f"{a}" if i == 0 else f"({a})*w^{i}")
        return " + ".join(terms)


def pgcd(a, b):
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic() if not a.is_zero() else a


def as_poly(x):
    if isinstance(x, Poly):
        return x
    coeffs = getattr(x, "coeffs", None)
    if coeffs is not None:            # DiscElement: drop the certified tail
        return Poly([c.lift() for c in coeffs])
    if hasattr(x, "lift"):
        return Poly([x.lift()])
    return Poly([x])


# ---------------------------------------------------------------- Frac(R) linear algebra

def _rank_and_kernel(cols):
    """Rank of the matrix with the given columns over Frac(R) and a polynomial kernel basis.

    Gaussian elimination in Frac(R) represented by (numerator, denominator) would
    be costly; instead we eliminate with cross-multiplication, which stays in R.
    """
    if not cols:
        return 0, []
    n = len(cols[0])
    m = len(cols)
    A = [[as_poly(cols[j][i]) for j in range(m)] for i in range(n)]
    pivots = []
    row = 0
    for col in range(m):
        pr = next((i for i in range(row, n) if not A[i][col].is_zero()), None)
        if pr is None:
            continue
        A[row], A[pr] = A[pr], A[row]
        piv = A[row][col]
        for i in range(n):
            if i != row and not A[i][col].is_zero():
                c = A[i][col]
                A[i] = [piv * a - c * b for a, b in zip(A[i], A[row])]
                g = _content_gcd(A[i])
                if g is not None and g.degree > 0:
                    A[i] = [a.divmod(g)[0] for a in A[i]]
        pivots.append(col)
        row += 1
    free = [j for j in range(m) if j not in pivots]
    kernel = []
    for f in free:
        # solve: for each pivot row r with pivot column pc: A[r][pc] x_pc + A[r][f] = 0
        den = Poly([1])
        for r, pc in enumerate(pivots):
            den = den * A[r][pc]
        v = [Poly() for _ in range(m)]
        v[f] = den
        for r, pc in enumerate(pivots):
            num, rem = (-(A[r][f] * den)).divmod(A[r][pc])
            if not rem.is_zero():
                raise SectionsError("internal: non-exact kernel division")
            v[pc] = num
        g = _content_gcd(v)
        if g is not None and g.degree > 0:
            v = [a.divmod(g)[0] for a in v]
        kernel.append(v)
    return len(pivots), kernel


def _content_gcd(vec):
    g = None
    for a in vec:
        if a.is_zero():
            continue
        g = a.monic() if g is None else pgcd(g, a)
        if g.degree == 0:
            return g
    return g


# ---------------------------------------------------------------- modules

@dataclass
class ModuleModel:
    """R^n modulo the column span of ``relations`` (list of vectors); sections are named vectors."""

    n: int
    relations: list = field(default_factory=list)
    sections: dict = field(default_factory=dict)
    degree_bound: int = None

    @classmethod
    def free(cls, n, **kw):
        return cls(n, [], **kw)

    def add_section(self, name, vec):
        self.sections[name] = self._vec(vec)
        return self.sections[name]

    def _vec(self, v):
        if isinstance(v, str):
            v = self.sections[v]
        v = [as_poly(x) for x in v]
        if len(v) != self.n:
            raise SectionsError(f"section has {len(v)} entries, module rank {self.n}")
        return v

    def rels(self):
        return [[as_poly(x) for x in r] for r in self.relations]

    def generic_rank(self):
        r, _ = _rank_and_kernel(self.rels())
        return self.n - r

    def in_image(self, v):
        """Exact membership of v in the R-span of the relations (v is zero in M)."""
        v = self._vec(v)
        if all(x.is_zero() for x in v):
            return True
        rels = self.rels()
        if not rels:
            return False
        r0, _ = _rank_and_kernel(rels)
        if r0 != len(rels):
            raise SectionsError("relations must be independent")
        r1, ker = _rank_and_kernel(rels + [v])
        if r1 != r0:
            return False
        # the kernel is a line; its primitive generator has a unit last entry
        # exactly when v is an R-combination of the relations
        c = ker[0][-1]
        return c.degree == 0 and not c.is_zero()


def _section(M, s):
    return M._vec(s)


def annihilator(s, M):
    """A nonzero r in R with r s in the relation span, or None (s not torsion)."""
    s = _section(M, s)
    if all(x.is_zero() for x in s):
        return Poly([1])
    rels = M.rels()
    if not rels:
        return None
    r0, _ = _rank_and_kernel(rels)
    r1, ker = _rank_and_kernel(rels + [s])
    if r1 != r0:
        return None
    for k in ker:
        if not k[-1].is_zero():
            return k[-1].monic()
    return None


def is_degenerate(s, M):
    """True iff some non-zerodivisor of R kills s in M (s is zero in M tensor Frac(R))."""
    return annihilator(s, M) is not None


def is_degenerate_by_rank(s, M):
    """Second implementation: the image of s in M tensor Frac(R) spans a rank-0 subspace."""
    s = _section(M, s)
    rels = M.rels()
    r0, _ = _rank_and_kernel(rels) if rels else (0, [])
    r1, _ = _rank_and_kernel(rels + [s])
    return r1 == r0


def wedge_is_zero(s1, s2, M):
    """s1 ^ s2 = 0 in the exterior square of M tensor Frac(R)."""
    s1, s2 = _section(M, s1), _section(M, s2)
    rels = M.rels()
    r0, _ = _rank_and_kernel(rels) if rels else (0, [])
    r2, _ = _rank_and_kernel(rels + [s1, s2])
    return r2 - r0 <= 1


def vanishing_on_dense_set_implies_zero(s, sampleZeros, M=None, degree_bound=None):
    """Verdict "zero" when s vanishes at more points than its degree allows, else "inconclusive".

    M must be free. Points where s does not vanish are rejected.
    """
    if M is not None and M.relations:
        raise SectionsError("the dense-set criterion is modeled on free modules only")
    v = [as_poly(x) for x in (M._vec(s) if M is not None else s)]
    if all(x.is_zero() for x in v):
        return "zero"
    pts = []
    for x in sampleZeros:
        x = Fraction(x)
        if any(c(x) != 0 for c in v):
            raise SectionsError(f"s does not vanish at {x}")
        if x not in pts:
            pts.append(x)
    bound = degree_bound
    if bound is None:
        bound = M.degree_bound if M is not None and M.degree_bound is not None else max(c.degree for c in v)
    if len(pts) > bound:
        # a nonzero polynomial of degree <= bound has at most bound zeros
        if not all(c.is_zero() for c in v):
            raise SectionsError("internal: degree bound violated")
        return "zero"
    return "inconclusive"


@dataclass
class Meromorphic:
    """Phi = f / g in Frac(R), g nonzero, reduced by the gcd."""

    f: Poly
    g: Poly

    def __call__(self, x):
        gx = self.g(Fraction(x))
        if gx == 0:
            raise SectionsError("pole-or-indeterminate")
        return self.f(Fraction(x)) / gx

    def equals(self, other):
        return self.f * other.g == other.f * self.g

    def to_json(self):
        return {"numerator": self.f.to_json(), "denominator": self.g.to_json()}


def solve_meromorphic_ratio(s1, s2, M):
    """Phi with s1 (x) 1 = s2 (x) Phi, as f/g with s1 g - s2 f = 0 in M."""
    s1v, s2v = _section(M, s1), _section(M, s2)
    if is_degenerate(s2v, M):
        raise SectionsError("denominator section generically zero")
    if not wedge_is_zero(s1v, s2v, M):
        raise SectionsError("sections not dependent")
    rels = M.rels()
    _, ker = _rank_and_kernel(rels + [s1v, [-x for x in s2v]])
    for k in ker:
        g, f = k[-2], k[-1]
        if not g.is_zero():
            break
    else:
        raise SectionsError("internal: no kernel vector with nonzero s1 coefficient")
    d = pgcd(f, g) if not f.is_zero() else g.monic()
    if d.degree > 0:
        f, g = f.divmod(d)[0], g.divmod(d)[0]
    c = g.lead()
    f, g = f * (1 / c), g * (1 / c)
    resid = [a * g - b * f for a, b in zip(s1v, s2v)]
    if not M.in_image(resid):
        raise SectionsError("internal: s1 g - s2 f is not zero in M")
    return Meromorphic(f, g)


def regular_at(Phi, x, s2_nonzero=None):
    """Value of Phi at w = x, or "pole-or-indeterminate".

    When s2 is known not to vanish at x the valuation argument applies: after moving
    x to the origin the order of g cannot exceed that of f.
    """
    if s2_nonzero is False:
        return "pole-or-indeterminate"
    f, g = Phi.f.translate(Fraction(x)), Phi.g.translate(Fraction(x))
    b = g.order_at_zero()
    a = f.order_at_zero()
    if a is None:
        return Fraction(0)
    if b > a:
        return "pole-or-indeterminate"
    if b < a:
        return Fraction(0)
    return f.c[a] / g.c[b]


# ---------------------------------------------------------------- random models

def random_poly(rng, deg, lo=-5, hi=5):
    return Poly([rng.randint(lo, hi) for _ in range(deg + 1)])


def planted_model(seed, n=3, deg=2):
    """A module with a torsion-free part and a relation, sections s2 and s1 = Phi s2 + torsion."""
    rng = random.Random(seed)
    f = random_poly(rng, deg)
    while f.is_zero():
        f = random_poly(rng, deg)
    g = random_poly(rng, deg)
    while g.is_zero() or g.degree < 1:
        g = random_poly(rng, deg)
    rel = [random_poly(rng, 1) for _ in range(n)]
    while all(x.is_zero() for x in rel):
        rel = [random_poly(rng, 1) for _ in range(n)]
    M = ModuleModel(n, [rel])
    base = [random_poly(rng, deg) for _ in range(n)]
    while is_degenerate(base, M):
        base = [random_poly(rng, deg) for _ in range(n)]
    c = random_poly(rng, 1)
    s2 = [g * b for b in base]
    s1 = [f * b + g * c * r for b, r in zip(base, rel)]
    M.add_section("s1", s1)
    M.add_section("s2", s2)
    return M, Meromorphic(f, g)


# ---------------------------------------------------------------- live family demo

def classical_coefficient(k, n, p=5, slope=1, prec=30):
    """a_n of the level-one eigenform of weight k whose p-stabilization has the given slope.

    Returned as a PadicNumber under the p-adic embedding with v(a_p) = slope, which
    selects the stabilization of that slope whenever slope < (k - 1)/2.
    """
    from . import modforms
    from .arith import AlgebraicNumber
    hits = []
    for f in modforms.newforms(k, 1, p=p, prec=prec, B=max(2 * n, 2 * p) + 2):
        K = f.field
        roots = K.padic_roots() if K.degree > 1 else [0]
        for r in roots:
            Kr = K.with_padic_root(r) if K.degree > 1 else K
            ap = AlgebraicNumber(Kr, f.a(p).coords).to_padic(prec)
            if ap.valuation() == slope:
                hits.append(AlgebraicNumber(Kr, f.a(n).coords).to_padic(prec))
    if len(hits) != 1:
        raise SectionsError(f"expected one slope-{slope} eigenform in weight {k}, found {len(hits)}")
    return hits[0]


def family_ratio_demo(n=41, h=1, center=12, points=(0, 1, 2), d=20, compare_digits=10):
    """Phi = a_n / a_1 on the slope-h piece over the weight disc around ``center``.

    The family sections a_n and a_1 live in the free rank-one module of the piece,
    so the ratio is solved there and then specialized. Each specialization is
    compared with the classical coefficient of the slope-h eigenform.
    """
    from . import eigen
    from .padic import PadicNumber
    disc = eigen.WeightDisc(5, center)
    piece = eigen.family_piece(disc, h, d=d)
    if piece.rank != 1:
        raise SectionsError(f"demo expects a rank-one piece, got rank {piece.rank}")
    s_n, s_1 = piece.sections[f"a{n}"], piece.sections["a1"]
    M = ModuleModel.free(1, degree_bound=disc.T)
    M.add_section(f"a{n}", [s_n[0]])
    M.add_section("a1", [s_1[0]])
    Phi = solve_meromorphic_ratio(f"a{n}", "a1", M)
    prec = min(piece.tail, compare_digits + 8)
    rows = []
    for t in points:
        val = regular_at(Phi, t, s2_nonzero=M.sections["a1"][0](Fraction(t)) != 0)
        k = disc.weight(t)
        ref = classical_coefficient(k, n, prec=prec + 5)
        v = PadicNumber(5, val, prec)
        diff = (v - ref).valuation()
        rows.append({"t": t, "weight": k, "agreement": min(diff, prec), "ok": diff >= compare_digits})
    return {"Phi": Phi, "tail": piece.tail, "rows": rows, "ok": all(r["ok"] for r in rows)}
