"""Overconvergent U_p at tame level 1, characteristic series over weight discs, local pieces.

Model. For p in {5, 7, 13} we have p - 1 | 12, so E = E_{p-1} is a lift of the Hasse
invariant with q-expansion congruent to 1 mod p, and the weight-0 overconvergent
functions have the orthogonal-style basis

    m_s = p^{sigma(s)} (Delta / E^{12/(p-1)})^s,   sigma(s) = floor(12 s / (p^2 - 1)).

Weight-k forms (p - 1 | k) are g E^{k/(p-1)} with g of weight 0, and U_p acts on g by

    g  ->  U_p(g (E / V E)^{k/(p-1)}).

Cusp forms correspond to s >= 1, so the cuspidal operator is the lower-right block.

Weight discs use the chart k(t) = k0 + (p - 1) p t with t in Z_p. Two-variable data is
obtained by running the single-weight machine at integral nodes t_i and interpolating
coefficientwise in t; the error is controlled because the matrix entries are analytic
in t with t^j coefficients of valuation >= 2j - v(j!). Nothing here fixes a radius of
overconvergence: every output is certified only by stability under increasing the
truncation d, and the reports say so.
"""

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

from . import padic as pa
from .padic import PadicNumber, DiscElement
from .qseries import int_convolve, delta, level_one_eisenstein


class EigenError(ValueError):
    pass


SUPPORTED_P = (5, 7, 13)
CERTIFICATION = "stable under truncation d -> d + 10 (no radius fixed)"


def _sigma(p, s):
    return (12 * s) // (p * p - 1)


# ---------------------------------------------------------------- q-series mod p^M

def _mulmod(a, b, n, mod):
    return [x % mod for x in int_convolve(a, b, n)]


def _invmod(a, n, mod):
    """Inverse of a power series with unit constant term, modulo mod."""
    c0 = pow(a[0], -1, mod)
    out = [0] * n
    out[0] = c0
    # Newton doubling
    m = 1
    while m < n:
        m2 = min(2 * m, n)
        e = _mulmod(a[:m2], out[:m2], m2, mod)
        e = [(-x) % mod for x in e]
        e[0] = (e[0] + 2) % mod
        out = _mulmod(out[:m2], e, m2, mod) + [0] * (n - m2)
        m = m2
    return out


def _powmod(a, e, n, mod):
    result = [1] + [0] * (n - 1)
    base = a[:n]
    while e:
        if e & 1:
            result = _mulmod(result, base, n, mod)
        e >>= 1
        if e:
            base = _mulmod(base, base, n, mod)
    return result


class _KatzData:
    """q-expansions needed for one (p, d) at working modulus p^Mw, shared across weights."""

    _cache = {}

    def __init__(self, p, d, Mw, B):
        self.p, self.d, self.Mw, self.B = p, d, Mw, B
        mod = p ** Mw
        self.mod = mod
        E = [int(c) % mod for c in level_one_eisenstein(p - 1, B).coeffs]
        D = [int(c) % mod for c in delta(B).coeffs]
        Einv = _invmod(_powmod(E, 12 // (p - 1), B, mod), B, mod)
        r = _mulmod(D, Einv, B, mod)
        self.powers = [[1] + [0] * (B - 1)]
        for _ in range(1, d):
            self.powers.append(_mulmod(self.powers[-1], r, B, mod))
        VE = [0] * B
        for n in range(0, (B + p - 1) // p):
            VE[n * p] = E[n]
        self.ratio = _mulmod(E, _invmod(VE, B, mod), B, mod)
        self.E = E

    @classmethod
    def get(cls, p, d, Mw, B):
        key = (p, d, Mw, B)
        if key not in cls._cache:
            cls._cache[key] = cls(p, d, Mw, B)
        return cls._cache[key]


def _reexpand(h, powers, d, mod):
    """Coordinates x_j with h = sum x_j r^j to q-precision d (triangular, r = q + ...)."""
    h = list(h[:d])
    x = [0] * d
    for j in range(d):
        c = h[j] % mod
        x[j] = c
        if c:
            pj = powers[j]
            for i in range(j, d):
                h[i] = (h[i] - c * pj[i]) % mod
    return x


@dataclass
class WeightDisc:
    """Disc of weights k(t) = center + step * t, t in Z_p, with step = (p - 1) p."""

    p: int
    center: int
    M: int = 20
    T: int = 12

    @property
    def step(self):
        return (self.p - 1) * self.p

    def weight(self, t):
        return self.center + self.step * t

    def parameter(self, k):
        t, r = divmod(k - self.center, self.step)
        if r:
            raise EigenError(f"weight {k} is not in the disc around {self.center}")
        return t

    def contains(self, k):
        return (k - self.center) % self.step == 0

    def to_json(self):
        return {"p": self.p, "center": self.center, "chart": f"k = {self.center} + {self.step} t",
                "M": self.M, "T": self.T}


@dataclass
class OperatorModel:
    """U_p on the truncated model: an integral matrix known modulo p^prec.

    Columns hold the coordinates of the images of the basis vectors.
    """

    p: int
    tame_level: int
    weight: int
    d: int
    B: int
    entries: list
    prec: int
    cusp: bool = True
    data: object = field(default=None, repr=False)

    @property
    def dim(self):
        return len(self.entries)

    @property
    def matrix(self):
        return [[PadicNumber(self.p, x, self.prec) for x in r] for r in self.entries]

    def weight_factor(self):
        return _powmod(self.data.E, self.weight // (self.p - 1), self.data.B, self.data.mod)

    def basis_qexp(self, j, Ek=None):
        """q-expansion (integers mod p^Mw) of the weight-k form attached to basis vector j."""
        s = j + (1 if self.cusp else 0)
        Ek = Ek or self.weight_factor()
        f = _mulmod(self.data.powers[s], Ek, self.data.B, self.data.mod)
        c = self.p ** _sigma(self.p, s)
        return [c * x for x in f]


def up_matrix(p, Nt, weight, d, B=None, M=20, cusp=True):
    """Matrix of U_p on the truncated Katz model in weight ``weight`` (p - 1 | weight).

    The entries are correct modulo p^M for the truncated operator; the working modulus
    carries the extra room consumed by the basis scaling.
    """
    if Nt != 1:
        raise EigenError("only tame level 1 is supported by the Katz model")
    if p not in SUPPORTED_P:
        raise EigenError(f"p = {p} unsupported; need p - 1 | 12 and p >= 5")
    if isinstance(weight, WeightDisc):
        return disc_up_model(weight, d, B=B)
    if weight % (p - 1):
        raise EigenError(f"weight {weight} not divisible by p - 1 = {p - 1}")
    off = 1 if cusp else 0
    need = p * (d + off)
    if B is None:
        B = need
    if B < need:
        raise EigenError(f"q-precision {B} < p * d = {need}")
    Mw = M + _sigma(p, d + off) + 2
    data = _KatzData.get(p, d + off, Mw, B)
    mod = data.mod
    twist = _powmod(data.ratio, weight // (p - 1), B, mod)
    cols = []
    for s in range(off, off + d):
        g = _mulmod(data.powers[s], twist, B, mod)
        h = [g[p * i] for i in range(off + d)]
        cols.append(_reexpand(h, data.powers, off + d, mod))
    outmod = p ** M
    A = [[0] * d for _ in range(d)]
    for ss in range(d):
        s = ss + off
        for jj in range(d):
            j = jj + off
            shift = _sigma(p, s) - _sigma(p, j)
            x = cols[ss][j]
            if shift < 0:
                q, r = divmod(x, p ** -shift)
                if r:
                    raise EigenError("basis re-expansion fails: non-integral entry at this precision")
                x = q
            else:
                x *= p ** shift
            A[jj][ss] = x % outmod
    return OperatorModel(p, Nt, weight, d, B, A, M, cusp, data)


def char_series(phi, method=None):
    """det(1 - phi T) as a list of coefficients (constant term first).

    OperatorModel input goes through the local-ring Hessenberg routine; plain matrices
    (PadicNumber or DiscElement entries) through the generic one.
    """
    if isinstance(phi, DiscOperatorModel):
        return list(phi.P)
    if isinstance(phi, OperatorModel):
        cp = pa.charpoly_mod(phi.entries, phi.p, phi.prec)
        return [PadicNumber(phi.p, c, phi.prec) for c in reversed(cp)]
    return pa.char_series(phi, method)


def slopes(P, p=None):
    return pa.slopes_list(P, p)


# ---------------------------------------------------------------- weight discs

def default_nodes(disc):
    """Interpolation nodes t = 3, ..., T + 3; t = 0, 1, 2 stay free for checks."""
    return list(range(3, disc.T + 4))


def tail_bound(p, T):
    """Lower bound for v(coefficient of t^j), j > T, of functions of (p^2 t)^j / j! type."""
    return min(2 * j - _vfact(j, p) for j in range(T + 1, T + 40))


def _vfact(n, p):
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


@dataclass
class DiscOperatorModel:
    """Characteristic series over a weight disc, interpolated from single-weight runs."""

    disc: WeightDisc
    d: int
    nodes: list
    P: list                  # DiscElement coefficients of det(1 - U_p T)
    node_series: list = field(repr=False, default_factory=list)

    def specialize(self, t):
        return [c(t) for c in self.P]

    def specialize_weight(self, k):
        return self.specialize(self.disc.parameter(k))


def disc_up_model(disc, d, B=None, nodes=None, degree=None):
    if disc.p not in SUPPORTED_P:
        raise EigenError(f"p = {disc.p} unsupported")
    if disc.center % (disc.p - 1):
        raise EigenError("disc center must be divisible by p - 1")
    nodes = nodes or default_nodes(disc)
    if len(nodes) > disc.T + 1:
        raise EigenError("more nodes than the t-truncation allows")
    series = []
    for t in nodes:
        op = up_matrix(disc.p, 1, disc.weight(t), d, B=B, M=disc.M)
        series.append(char_series(op))
    D = degree if degree is not None else d
    tail = tail_bound(disc.p, disc.T)
    P = [interpolate_values(disc, nodes, [s[i] for s in series], tail) for i in range(D + 1)]
    return DiscOperatorModel(disc, d, list(nodes), P, series)


def interpolate_values(disc, nodes, values, tail=None):
    tail = tail_bound(disc.p, disc.T) if tail is None else tail
    return pa.interpolate(disc.p, nodes, values, disc.T, tail=tail)


# ---------------------------------------------------------------- local pieces

@dataclass
class LocalPiece:
    """Slope-<= h part of the spectral decomposition, with its Hecke algebra data.

    Matrices act on coordinate columns in the basis ``N_basis``: column i of
    ``hecke[label]`` holds the coordinates of label(N_i). ``sections`` maps "a<n>" to
    the row (a_n(N_1), ..., a_n(N_r)) of Fourier-coefficient functionals.
    """

    p: int
    h: Fraction
    Q: list
    N_basis: list
    hecke: dict
    up_label: str
    weight: object = None          # integer weight, or None over a disc
    disc: object = None
    projector: list = field(default=None, repr=False)
    phi: list = field(default=None, repr=False)
    sections: dict = field(default_factory=dict)
    tame_level: int = 1
    certification: str = CERTIFICATION

    @property
    def rank(self):
        return len(self.Q) - 1

    def generators(self):
        return [self.up_label] + sorted(k for k in self.hecke if k != self.up_label)

    def is_disc(self):
        return isinstance(self.Q[0], DiscElement)

    def specialize(self, t):
        """Piece at the weight with parameter t (t is ignored for single-weight pieces)."""
        if not self.is_disc():
            return self
        sp = lambda x: x(t)
        spm = lambda A: [[sp(x) for x in r] for r in A] if A is not None else None
        return LocalPiece(self.p, self.h, [sp(c) for c in self.Q], spm(self.N_basis),
                          {k: spm(v) for k, v in self.hecke.items()}, self.up_label,
                          weight=self.disc.weight(t), disc=None,
                          projector=spm(self.projector), phi=spm(self.phi),
                          sections={k: [sp(x) for x in v] for k, v in self.sections.items()},
                          tame_level=self.tame_level, certification=self.certification)

    def specialize_weight(self, k):
        if not self.is_disc():
            if k != self.weight:
                raise EigenError(f"piece lives at weight {self.weight}, not {k}")
            return self
        return self.specialize(self.disc.parameter(k))

    def hecke_charpolys(self):
        return {k: pa.char_series(v) for k, v in self.hecke.items()}

    def to_json(self):
        enc = lambda x: str(x)
        return {
            "p": self.p, "tameLevel": self.tame_level,
            "disc": self.disc.to_json() if self.disc else {"weight": self.weight},
            "Q": [enc(c) for c in self.Q],
            "slopes": [str(s) for s in _slopes_of(self.Q)],
            "heckeCharPolys": {k: [enc(c) for c in v] for k, v in self.hecke_charpolys().items()},
            "precision": min(_prec(c) for c in self.Q),
            "certification": self.certification,
        }


def _prec(x):
    return x.prec() if isinstance(x, DiscElement) else x.prec


def _slopes_of(Q):
    cs = [c.constant_term() if isinstance(c, DiscElement) else c for c in Q]
    return pa.slopes_list(cs)


def local_piece(P, h, phi, heckeOps=None, up_label="U5", weight=None, disc=None):
    """Factor P at slope h, split phi by the Riesz projector and restrict Hecke operators.

    phi is a square matrix over PadicNumber or DiscElement (or an OperatorModel);
    heckeOps maps labels to matrices commuting with phi.
    """
    if isinstance(phi, OperatorModel):
        weight = phi.weight if weight is None else weight
        up_label = f"U{phi.p}"
        phi = phi.matrix
    h = Fraction(h)
    Q, Qp = pa.fredholm_factor(P, h)
    if len(pa._trim(Q)) == 1:
        raise EigenError("empty piece: no slopes <= h (Q = 1)")
    Q = pa._trim(Q)
    e, N = pa.riesz_decompose(phi, Q)
    U = pa.restrict(phi, N)
    pa.invert_on_N(U, Q)
    hecke = {up_label: U}
    for label, T in (heckeOps or {}).items():
        hecke[label] = pa.coordinates(N, pa.mat_mul(e, pa.mat_mul(T, N)))
    p = _p_of(Q[0])
    return LocalPiece(p, h, Q, N, hecke, up_label, weight=weight, disc=disc,
                      projector=e, phi=phi)


def _p_of(x):
    return x.p


def check_piece(piece, ring_prec=None):
    """The structural identities of a local piece; returns a dict of booleans."""
    out = {}
    e, phi = piece.projector, piece.phi
    U = piece.hecke[piece.up_label]
    if e is not None:
        out["idempotent"] = pa.mat_is_zero(pa.mat_add(pa.mat_mul(e, e), e, -1))
        out["commutes"] = pa.mat_is_zero(pa.mat_add(pa.mat_mul(e, phi), pa.mat_mul(phi, e), -1))
    cs = pa.char_series(U)
    out["det_equals_Q"] = all(pa._is_zero(a - b) for a, b in zip(cs, piece.Q)) and len(cs) == len(piece.Q)
    Uinv = pa.inverse(U)
    out["Q_of_inverse_zero"] = pa.mat_is_zero(pa.poly_eval_matrix(list(piece.Q), Uinv))
    mats = list(piece.hecke.values())
    out["commuting"] = all(pa.mat_is_zero(pa.mat_add(pa.mat_mul(A, B), pa.mat_mul(B, A), -1))
                           for i, A in enumerate(mats) for B in mats[i + 1:])
    return out


# ---------------------------------------------------------------- pieces from the Katz model

def _qexp_rows(op, N):
    """q-expansions (PadicNumber lists) of the forms with Katz coordinates the columns of N."""
    p = op.p
    Ek = op.weight_factor()
    B = op.B
    r = len(N[0])
    rows = [[PadicNumber(p, 0, op.prec) for _ in range(B)] for _ in range(r)]
    for j in range(len(N)):
        f = op.basis_qexp(j, Ek)
        for i in range(r):
            c = N[j][i]
            if c.is_zero():
                continue
            row = rows[i]
            for n in range(B):
                if f[n]:
                    row[n] = row[n] + c * f[n]
    return rows


def _hecke_on_qexp(a, ell, k, nmax):
    """Coefficients n < nmax of T_ell applied to the q-expansion a (weight k, level 1)."""
    out = []
    for n in range(nmax):
        v = a[ell * n]
        if n % ell == 0:
            v = v + a[n // ell] * ell ** (k - 1)
        out.append(v)
    return out


_WEIGHT_CACHE = {}


def weight_piece(k, h, d=20, ells=(2, 3), nsections=50, M=None, p=5, certify=True):
    """Slope-<= h piece at weight k.

    With ``certify`` the piece is recomputed with d + 10 basis vectors and every
    reported quantity (Q, Hecke matrices, sections) is capped at the precision to
    which the two runs agree. Uncertified pieces carry the working precision of
    the truncated model, which overstates their accuracy as approximations of
    the true operator.
    """
    key = (k, Fraction(h), d, tuple(ells), nsections, M, p, certify)
    if key in _WEIGHT_CACHE:
        return _WEIGHT_CACHE[key]
    if not certify:
        piece = _weight_piece(k, h, d, ells, nsections, M, p)
    else:
        raw = weight_piece(k, h, d, ells, nsections, M, p, certify=False)
        ref = weight_piece(k, h, d + 10, ells, nsections, None, p, certify=False)
        if ref.rank != raw.rank:
            raise EigenError(f"rank of the slope-<= {h} piece is not stable under d -> d + 10")
        pairs = list(zip(raw.Q, ref.Q))
        pairs += [(x, y) for g in raw.hecke for rx, ry in zip(raw.hecke[g], ref.hecke[g]) for x, y in zip(rx, ry)]
        pairs += [(x, y) for lab in raw.sections for x, y in zip(raw.sections[lab], ref.sections[lab])]
        cert = min(min(x.prec, y.prec) if (x - y).is_zero() else (x - y).valuation() for x, y in pairs)
        cap = lambda x: x.add_bigoh(cert)
        piece = replace(raw, Q=[cap(c) for c in raw.Q],
                        hecke={g: [[cap(x) for x in row] for row in A] for g, A in raw.hecke.items()},
                        sections={lab: [cap(x) for x in v] for lab, v in raw.sections.items()},
                        certification=f"stable under truncation d = {d} -> {d + 10}: agreement to {p}^{cert}")
        piece.positions = raw.positions
        piece.certified_prec = cert
    _WEIGHT_CACHE[key] = piece
    return piece


def _weight_piece(k, h, d, ells, nsections, M, p):
    """Local piece of U_p in weight k from the Katz model, Hecke data through q-expansions.

    The basis of N is renormalized so that the q-expansions are in echelon form at the
    first r independent positions; this makes it canonical, so it varies
    analytically with the weight.
    """
    M = M or 60 + 4 * d
    op = up_matrix(p, 1, k, d, M=M)
    P = char_series(op)
    A = op.matrix
    Q, _ = pa.fredholm_factor(P, Fraction(h))
    Q = pa._trim(Q)
    if len(Q) == 1:
        raise EigenError("empty piece: no slopes <= h (Q = 1)")
    e, N = pa.riesz_decompose(A, Q)
    qs = _qexp_rows(op, N)
    r = len(Q) - 1
    R, piv = pa.rref([row[:op.B // max(ells + (2,))] for row in qs])
    if len(piv) < r:
        raise EigenError("q-expansions of the piece are dependent at this precision")
    pos = piv[:r]
    C = [[qs[i][n] for i in range(r)] for n in pos]         # C[k][i] = a_{pos_k}(N_i)
    Cinv = pa.inverse(C)
    N = pa.mat_mul(N, Cinv)
    qs = [[sum((qs[j][n] * Cinv[j][i] for j in range(1, r)), qs[0][n] * Cinv[0][i]) for n in range(op.B)]
          for i in range(r)]
    hecke = {f"U{p}": pa.restrict(A, N)}
    for ell in ells:
        if ell == p:
            continue
        nmax = (op.B - 1) // ell + 1
        if max(pos) >= nmax:
            raise EigenError(f"q-precision too small for T{ell}")
        imgs = [_hecke_on_qexp(qs[i], ell, k, nmax) for i in range(r)]
        # coordinates: T(N_i) = sum_j c_ji N_j, read off at the echelon positions
        hecke[f"T{ell}"] = [[imgs[i][pos[j]] for i in range(r)] for j in range(r)]
    sections = {f"a{n}": [qs[i][n] for i in range(r)] for n in range(1, min(nsections + 1, op.B))}
    piece = LocalPiece(p, Fraction(h), Q, N, hecke, f"U{p}", weight=k, projector=e, phi=A,
                       sections=sections)
    piece.positions = pos
    return piece


_FAMILY_CACHE = {}


def family_piece(disc, h, d=20, nodes=None, ells=(2, 3), nsections=50):
    """Local piece over a weight disc, interpolated from canonical single-weight pieces.

    Q is produced twice: by factoring the interpolated two-variable series, and by
    interpolating the single-weight factors; the two must agree (specialization
    commutes with factorization), otherwise an error is raised.
    """
    nodes = list(nodes or default_nodes(disc))
    key = (disc.p, disc.center, disc.M, disc.T, Fraction(h), d, tuple(nodes), tuple(ells), nsections)
    if key in _FAMILY_CACHE:
        return _FAMILY_CACHE[key]
    M = max(disc.M, 60 + 4 * d)
    pieces = [weight_piece(disc.weight(t), h, d, ells, nsections, M=M, p=disc.p, certify=False) for t in nodes]
    t_out = max(nodes) + 1
    held = weight_piece(disc.weight(t_out), h, d, ells, nsections, M=M, p=disc.p, certify=False)
    ranks = {pc.rank for pc in pieces}
    if len(ranks) != 1:
        raise EigenError(f"slope-<= {h} part has non-constant degree across the disc: {sorted(ranks)}")
    if len({tuple(pc.positions) for pc in pieces}) != 1:
        raise EigenError("echelon positions vary across the disc")
    r = ranks.pop()
    tail = tail_bound(disc.p, disc.T)
    interp = lambda vals: interpolate_values(disc, nodes, vals, tail)
    Q_interp = [interp([pc.Q[i] for pc in pieces]) for i in range(r + 1)]
    hecke = {lab: [[interp([pc.hecke[lab][i][j] for pc in pieces]) for j in range(r)] for i in range(r)]
             for lab in pieces[0].hecke}
    sections = {lab: [interp([pc.sections[lab][i] for pc in pieces]) for i in range(r)]
                for lab in pieces[0].sections}
    dd = len(pieces[0].N_basis)
    N = [[interp([pc.N_basis[i][j] for pc in pieces]) for j in range(r)] for i in range(dd)]
    # a-posteriori tail: the a-priori bound covers the operator entries, but derived
    # quantities (eigenvectors, factors) converge on a smaller disc; measure the
    # interpolation error at a held-out node and keep a safety margin
    if held.rank != r:
        raise EigenError("slope-<= h part changes degree at the held-out node")
    errs = [tail]
    checks = [(Q_interp, held.Q)]
    checks += [(sum(hecke[lab], []), sum(held.hecke[lab], [])) for lab in hecke]
    checks += [(sections[lab], held.sections[lab]) for lab in sections]
    for A, B in checks:
        for x, y in zip(A, B):
            diff = x(t_out) - y
            if not diff.is_zero():
                errs.append(diff.valuation())
    tail_obs = min(errs) - 2
    for x in Q_interp + sum(N, []) + [c for lab in hecke for row in hecke[lab] for c in row] + \
            [c for lab in sections for c in sections[lab]]:
        x.tail = min(x.tail, tail_obs)
    piece = LocalPiece(disc.p, Fraction(h), Q_interp, N, hecke, f"U{disc.p}", disc=disc,
                       sections=sections)
    piece.tail = tail_obs
    piece.node_pieces = pieces
    piece.nodes = nodes
    _FAMILY_CACHE[key] = piece
    return piece


def disc_factor_check(piece, degree=None):
    """Factor the interpolated two-variable series and compare with the interpolated Q."""
    disc = piece.disc
    nodes = piece.nodes
    series = [char_series_of_piece_node(pc) for pc in piece.node_pieces]
    D = degree or min(len(s) for s in series) - 1
    tail = tail_bound(disc.p, disc.T)
    P = [interpolate_values(disc, nodes, [s[i] for s in series], tail) for i in range(D + 1)]
    Q, _ = pa.fredholm_factor(P, piece.h)
    Q = pa._trim(Q)
    if len(Q) != len(piece.Q):
        return False, Q
    # truncated-ring products are not evaluation-compatible beyond the tail, so the
    # two constructions are compared as functions at sample points of the disc
    for t in [0, 1, 2] + list(nodes[:2]):
        for a, b in zip(Q, piece.Q):
            if not (a(t) - b(t)).is_zero():
                return False, Q
    return True, Q


def char_series_of_piece_node(pc):
    return pa.char_series(pc.phi)


# ---------------------------------------------------------------- points

class PiecePoint:
    """An eigenpoint of a piece at one weight, with its local factor inside N."""

    def __init__(self, point, multiplicity, factor, piece):
        self.point = point
        self.multiplicity = multiplicity
        self.factor = factor        # r x m basis of the generalized eigenspace
        self.piece = piece

    @property
    def eigenvalues(self):
        return self.point.eigenvalues

    @property
    def weight(self):
        return self.point.weight

    def __repr__(self):
        return f"PiecePoint(weight {self.weight}, multiplicity {self.multiplicity})"


def _sub_identity(A, lam):
    return [[x - lam if i == j else x for j, x in enumerate(r)] for i, r in enumerate(A)]


def _mat_pow(A, e):
    R = pa.identity(len(A), A[0][0])
    for _ in range(e):
        R = pa.mat_mul(R, A)
    return R


def _deriv(c):
    return [i * c[i] for i in range(1, len(c))]


def _centered(c, p):
    """Signed integer lift of an integral PadicNumber (or 0)."""
    if c.is_zero():
        return 0
    m = p ** c.prec
    x = int(c.lift()) % m
    return x - m if 2 * x > m else x


def _eigenvalues_padic(A, prec):
    """Distinct Z_p-eigenvalues of a PadicNumber matrix with generalized multiplicities.

    A root of multiplicity m is unstable under perturbation of the characteristic
    polynomial but is a simple root of its (m-1)-st derivative, so candidates are
    collected from all derivatives and kept when the generalized eigenspace is
    nonzero.
    """
    from .arith import _hensel_roots
    p = A[0][0].p
    n = len(A)
    cp = pa.hessenberg_charpoly(A)
    if any(c.valuation() < 0 for c in cp if not c.is_zero()):
        raise EigenError("eigenvalue field construction failure: non-integral characteristic polynomial")
    ints = [_centered(c, p) for c in cp]
    thr = max(1, prec // (2 * n))
    vdiff = lambda a, b: pa._int_valuation(Fraction(a - b), p) if a != b else prec
    cands, d = [], ints
    for _ in range(n):
        if len(d) < 2:
            break
        for r in _hensel_roots(d, p, prec):
            if all(vdiff(r, c) < thr for c in cands):
                cands.append(r)
        d = _deriv(d)
    out = []
    for r0 in cands:
        lam = PadicNumber(p, r0, prec)
        K = pa.kernel(_mat_pow(_sub_identity(A, lam), n))
        mult = len(K[0]) if K and K[0] else 0
        if mult:
            out.append((lam, mult))
    if sum(m for _, m in out) != n:
        raise EigenError("eigenvalue field construction failure: eigenvalues outside Q_p at this precision")
    return out


def eigen_points(piece, specialization=None, prec=None):
    """Maximal ideals of the specialized Hecke algebra, as points with multiplicities."""
    from .modforms import EigenPoint
    sp = piece.specialize(specialization) if piece.is_disc() else piece
    gens = sp.generators()
    r = sp.rank
    prec = prec or min(x.prec for A in sp.hecke.values() for row in A for x in row)
    o = sp.Q[0] * 0 + 1
    factors = [(pa.identity(r, o), {})]
    for g in gens:
        new = []
        for F, lam in factors:
            Ag = pa.restrict(sp.hecke[g], F)
            for mu, m in _eigenvalues_padic(Ag, prec):
                K = pa.kernel(_mat_pow(_sub_identity(Ag, mu), len(Ag)))
                new.append((pa.mat_mul(F, K), {**lam, g: mu}))
        factors = new
    pts = []
    for F, lam in factors:
        pt = EigenPoint(sp.weight, sp.tame_level, sp.p, None, lam)
        pts.append(PiecePoint(pt, len(F[0]), F, sp))
    return pts


def dual_fiber(piece, x):
    """Dimension of the joint lambda_x-eigenspace of N and a dual basis of functionals."""
    sp = x.piece
    r = sp.rank
    stack = []
    for g, lam in x.eigenvalues.items():
        stack.extend(_sub_identity(sp.hecke[g], lam))
    K = pa.kernel(stack)
    m = len(K[0]) if K and K[0] else 0
    if m == 0:
        return 0, []
    # functionals: rows of a left inverse supported on pivot rows of K
    _, piv = pa.rref(pa.transpose(K))
    sub = [K[i] for i in piv]
    Linv = pa.inverse(sub)
    z = K[0][0] * 0
    funcs = []
    for a in range(m):
        row = [z] * r
        for b, i in enumerate(piv):
            row[i] = Linv[a][b]
        funcs.append(row)
    return m, funcs


def nilpotency_bound_check(piece, x, e_max=8, points=None):
    """Smallest e with (t - lambda(t))^e = 0 on the factor of x for every generator t.

    Also verifies separation: on the factor of every other point some generator
    minus lambda_x is invertible.
    """
    sp = x.piece
    F = x.factor
    e_found = 0
    for g, lam in x.eigenvalues.items():
        A = _sub_identity(pa.restrict(sp.hecke[g], F), lam)
        e = 1
        while not pa.mat_is_zero(_mat_pow(A, e)):
            e += 1
            if e > e_max:
                raise EigenError(f"nilpotency exponent exceeds e_max = {e_max}")
        e_found = max(e_found, e)
    for y in points or []:
        if y is x:
            continue
        ok = False
        for g, lam in x.eigenvalues.items():
            A = _sub_identity(pa.restrict(sp.hecke[g], y.factor), lam)
            K = pa.kernel(A)
            if not (K and K[0]):
                ok = True
                break
        if not ok:
            raise EigenError("separation fails: no generator separates two points")
    return e_found


def gluing_check(piece1, piece2, weights=None, min_prec=10):
    """Agreement of Q and all Hecke characteristic polynomials at common weights."""
    if weights is None:
        if piece1.is_disc() and piece2.is_disc():
            c = piece1.disc.center
            weights = [w for w in (c, c + piece1.disc.step, c + 2 * piece1.disc.step) if piece2.disc.contains(w)]
        else:
            weights = [piece1.weight if not piece1.is_disc() else piece2.weight]
    if not weights:
        raise EigenError("discs do not overlap")
    for k in weights:
        a, b = piece1.specialize_weight(k), piece2.specialize_weight(k)
        if a.rank != b.rank or set(a.hecke) != set(b.hecke):
            return False
        pairs = [(a.Q, b.Q)] + [(pa.char_series(a.hecke[g]), pa.char_series(b.hecke[g])) for g in a.hecke]
        for u, v in pairs:
            for x, y in zip(u, v):
                diff = x - y
                shared = min(x.prec, y.prec)
                if shared < min_prec:
                    raise EigenError("precision insufficient to compare")
                if not diff.is_zero():
                    return False
    return True


# ---------------------------------------------------------------- classicality

def _hull_heights(Q):
    segs = pa.newton_polygon(Q)[0]
    out, hgt = [Fraction(0)], Fraction(0)
    for s, m in segs:
        for _ in range(m):
            hgt += s
            out.append(hgt)
    return out


def classical_series(w, p=5, prec=200):
    """det(1 - U_p T) on S_w(Gamma_0(p)) from the trace-formula space, exactly."""
    from .modforms import cusp_space, hecke_matrix, charpoly
    S = cusp_space(w, p)
    if S.dim == 0:
        return [PadicNumber(p, 1, prec)]
    cp = charpoly(hecke_matrix(S, ("U", p))).all_coeffs()      # high degree first
    return [PadicNumber(p, Fraction(int(c.p), int(c.q)), prec) for c in cp]


def classical_comparison(w, p=5, d=40, rel_prec=10, d_check=50):
    """Compare the slope < w - 1 part of the overconvergent series with S_w(Gamma_0(p)).

    The comparison is coefficientwise, scaled by the Newton polygon: coefficient i of
    the two factors must agree modulo p^(rel_prec + H(i)) where H is the height of
    the classical polygon at i. That is what relative precision p^rel_prec on every
    eigenvalue amounts to.
    """
    if w < 2:
        raise EigenError("weight must be at least 2")
    h = Fraction(w - 1) - Fraction(1, 1000)
    M = rel_prec + 4 * w + 20
    res = {"weight": w, "p": p, "d": d, "relPrec": rel_prec, "certification": CERTIFICATION}
    Qs = {}
    for dd in (d, d_check):
        P = char_series(up_matrix(p, 1, w, dd, M=M))
        Q, _ = pa.fredholm_factor(P, h)
        Qs[dd] = pa._trim(Q)
    Pc = classical_series(w, p)
    Qc, _ = pa.fredholm_factor(Pc, h)
    Qc = pa._trim(Qc)
    res["slopesOverconvergent"] = [str(s) for s in _slopes_of(Qs[d])]
    res["slopesClassical"] = [str(s) for s in _slopes_of(Qc)]

    def agree(A, B):
        if len(A) != len(B):
            return False, None
        H = _hull_heights(B)
        worst = None
        for i, (a, b) in enumerate(zip(A, B)):
            diff = a - b
            got = (min(diff.valuation(), diff.prec) if diff.is_zero() else diff.valuation()) - H[i]
            worst = got if worst is None else min(worst, got)
            if got < rel_prec:
                return False, worst
        return True, worst

    res["match"], res["achievedRelPrec"] = agree(Qs[d], Qc)
    res["stable"], _ = agree(Qs[d_check], Qs[d])
    res["eigenvalues"] = [str(-c) for c in Qc[1:2]] if len(Qc) == 2 else None
    res["Q"] = [str(c.lift()) for c in Qc]
    if not res["match"]:
        raise EigenError(f"classical comparison failed at weight {w}: {res}")
    return res


# ---------------------------------------------------------------- synthetic families

def synthetic_family(p=5, r=2, extra=2, T=4, prec=30, seed=0, jordan=False, gap=2):
    """Random operator family phi(t) = S D(t) S^-1 with a planted slope-0 block of size r.

    D(t) is block diagonal: the planted block has unit eigenvalues a_i + p b_i t
    (a Jordan block when ``jordan``) and the rest has eigenvalues of valuation >= gap.
    A second operator T2 is diagonal in the same basis (or shares the Jordan
    structure) so that it commutes with phi. All t-dependence carries a factor p^2,
    as for genuine weight families, so the t-truncation error stays below p^(2T+2).
    Returns (phi, T2, planted) over DiscElement.
    """
    rng = random.Random(seed)
    n = r + extra
    D = lambda c: DiscElement(p, c, T, prec)
    zero = D([0])
    units = rng.sample([u for u in range(1, 4 * p) if u % p], r)
    p2 = p * p
    lam = [D([units[i], p2 * rng.randint(-3, 3)]) for i in range(r)]
    if jordan:
        lam = [lam[0]] * r
    big = [D([p ** (gap + i) * rng.choice([1, 2, -1, 3]), p ** (gap + i) * p2 * rng.randint(-2, 2)])
           for i in range(extra)]
    diag = lam + big
    Dm = [[diag[i] if i == j else zero for j in range(n)] for i in range(n)]
    if jordan:
        for i in range(r - 1):
            Dm[i][i + 1] = D([1])
    # T2: distinct values on the planted block unless jordan, where it is c + N-part
    if jordan:
        t2 = [[D([7]) if i == j else zero for j in range(n)] for i in range(n)]
        for i in range(r - 1):
            t2[i][i + 1] = D([p])
    else:
        vals = rng.sample(range(1, 60), n)
        t2 = [[D([vals[i], p2 * rng.randint(0, 3)]) if i == j else zero for j in range(n)] for i in range(n)]
    S, Sinv = _random_unimodular(p, n, T, prec, rng)
    phi = pa.mat_mul(pa.mat_mul(S, Dm), Sinv)
    T2 = pa.mat_mul(pa.mat_mul(S, t2), Sinv)
    planted = {"eigenvalues": lam, "block": [[Dm[i][j] for j in range(r)] for i in range(r)],
               "S": S}
    return phi, T2, planted


def _random_unimodular(p, n, T, prec, rng):
    D = lambda c: DiscElement(p, c, T, prec)
    L = [[D([1]) if i == j else (D([rng.randint(-3, 3), p * p * rng.randint(-2, 2)]) if i > j else D([0]))
          for j in range(n)] for i in range(n)]
    U = [[D([1]) if i == j else (D([rng.randint(-3, 3)]) if i < j else D([0])) for j in range(n)]
         for i in range(n)]
    S = pa.mat_mul(L, U)
    return S, pa.inverse(S)
