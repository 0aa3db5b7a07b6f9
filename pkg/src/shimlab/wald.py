"""Waldspurger-side bookkeeping: local tags, fiber dimensions, vanishing criteria and the
square-root ratio Phi_{m,n}.

Conventions: k is odd and the half-integral weight is k/2; f0 has weight k - 1.
chi is a character mod 8N whose square is the nebentypus of f0, and
chi_0(n) = chi(n) (-1/n)^((k-1)/2).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import (
    DirichletCharacter, AlgebraicNumber, chi_zero, decompose_at, factor, hilbert_symbol,
    is_squarefree, local_square_class_equal, choose_nebentypus_sqrt, valuation,
)
from .modforms import (
    ModformsError, local_type, _stabilization_field, _eq0,
)
from .lfunc import LValueResult


class WaldError(ValueError):
    pass


def _trivial():
    return DirichletCharacter.trivial(1)


def _part(chi, ell):
    """(ell-part, prime-to-ell part) of a character, both primitive."""
    if chi is None:
        return _trivial(), _trivial()
    return decompose_at(chi, ell)


def _val_at(chi, x):
    return chi(x) if chi.modulus > 1 else 1


def _trivial_on_1_plus_4(chi):
    two, _ = _part(chi, 2)
    return two.conductor() <= 4


@dataclass
class WaldContext:
    f0: object
    k: int
    chi: DirichletCharacter
    p: int
    N: int = 1
    kappa_prime: DirichletCharacter = None
    local_types: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.k % 2 == 0 or self.k < 5:
            raise WaldError("k must be odd and at least 5")
        if self.f0.weight != self.k - 1:
            raise WaldError(f"f0 has weight {self.f0.weight}, expected k - 1 = {self.k - 1}")
        if self.N % 2 == 0 or not is_squarefree(self.N) or math.gcd(self.N, self.p) != 1:
            raise WaldError("N must be odd, squarefree and prime to p")
        if (8 * self.N) % self.chi.conductor():
            raise WaldError("chi must be defined mod 8N")
        if self.kappa_prime is None:
            self.kappa_prime = _trivial()
        psi = self.f0.character
        if self.chi * self.chi != psi:
            raise WaldError("chi^2 must equal the nebentypus of f0")
        for ell in self.primes():
            if ell not in self.local_types:
                try:
                    self.local_types[ell] = local_type(self.f0, ell)
                except ModformsError as exc:
                    self.local_types[ell] = exc

    @classmethod
    def for_newform(cls, f0, p, n=1, chi=None, kappa_prime=None):
        M = f0.level
        N = M // 2 ** valuation(M, 2) if M > 1 else 1
        N //= p ** valuation(N, p) if N % p == 0 else 1
        if chi is None:
            chi = choose_nebentypus_sqrt(f0.character.primitive().extend(8 * N), n, N)
        return cls(f0, f0.weight + 1, chi, p, N, kappa_prime)

    @property
    def chi0(self):
        return chi_zero(self.chi, self.k)

    def primes(self):
        ps = {2, self.p}
        if self.N > 1:
            ps |= {q for q, _ in factor(self.N)}
        return sorted(ps)

    def lt(self, ell):
        t = self.local_types.get(ell)
        if t is None:
            t = local_type(self.f0, ell)
        if isinstance(t, Exception):
            raise WaldError(str(t))
        return t

    def lam(self, ell):
        """underlined lambda_ell: the T_ell or U_ell eigenvalue of f0."""
        return self.f0.a(ell)

    def chikappa_ramified(self, ell):
        c = self.chi * self.kappa_prime if self.kappa_prime.modulus > 1 else self.chi
        part, _ = _part(c, ell)
        return part.conductor() > 1


def hypotheses_ok(ctx):
    """Sufficient conditions for (H1), (H2): tame local characters even with conductor dividing ell, pi_2 not supercuspidal."""
    for ell in ctx.primes():
        t = ctx.local_types.get(ell)
        if t is None:
            try:
                t = local_type(ctx.f0, ell)
            except ModformsError:
                return False
        if isinstance(t, Exception):
            return False
        if t.tag == "ramified-PS":
            part, _ = _part(ctx.f0.character, ell)
            if part.conductor() not in (1, ell) or not part.is_even():
                return False
    return True


@dataclass
class LocalFunctionTag:
    prime: int
    label: str
    operator: str  # "T2" or "U2"
    eigenvalue: object  # value of the operator, None when the tag is not an eigenvector
    semisimple: bool = True

    def __repr__(self):
        return f"{self.label}@{self.prime}"


def _alpha_pair(ctx, ell):
    """Underlined alpha, alpha' : roots of X^2 - lam X + (chi' kappa')(ell)^2 ell^(k-2)."""
    _, rest = _part(ctx.chi, ell)
    c = _val_at(rest, ell)
    kp = _val_at(ctx.kappa_prime, ell) if ell != ctx.p else 1
    lam = ctx.lam(ell)
    lam = lam.coords[0] if isinstance(lam, AlgebraicNumber) and lam.is_rational() else lam
    const = Fraction(c * kp) ** 2 * Fraction(ell) ** (ctx.k - 2)
    K, roots = _stabilization_field(lam, const, None, 40)
    return roots, _eq0(roots[0] - roots[1])


def local_function_tags(ctx, ell):
    """Row of the local table for ell with the Hecke behavior of each local function."""
    lam = ctx.lam(ell) if ell < getattr(ctx.f0, "prec", 10 ** 9) else None
    if ell not in ctx.primes():
        return [LocalFunctionTag(ell, "c0[lambda]", "T2", lam)]
    t = ctx.lt(ell)
    if ell == 2:
        one4 = _trivial_on_1_plus_4(ctx.chi0)
        if t.tag == "unramified-PS":
            (a, b), equal = _alpha_pair(ctx, 2)
            gam = "gamma0[0]" if one4 else "gamma''[0]"
            if one4:
                first = [LocalFunctionTag(2, "c'[alpha]", "U2", a)]
                second = LocalFunctionTag(2, "c''[alpha]", "U2", a, semisimple=False) if equal \
                    else LocalFunctionTag(2, "c'[alpha']", "U2", b)
            else:
                first = [LocalFunctionTag(2, "'c[alpha]", "U2", a)]
                second = LocalFunctionTag(2, "''c[alpha]", "U2", a, semisimple=False) if equal \
                    else LocalFunctionTag(2, "'c[alpha']", "U2", b)
            return first + [second, LocalFunctionTag(2, gam, "U2", 0)]
        if t.tag == "ramified-PS":
            return [LocalFunctionTag(2, "c*[sqrt(lambda)]", "U2", lam), LocalFunctionTag(2, "gamma''[0]", "U2", 0)]
        if one4:
            return [LocalFunctionTag(2, "c^s[lambda]", "U2", lam), LocalFunctionTag(2, "gamma0[0]", "U2", 0)]
        return [LocalFunctionTag(2, "^sc[lambda]", "U2", lam), LocalFunctionTag(2, "gamma''[0]", "U2", 0)]
    ram = ctx.chikappa_ramified(ell)
    if t.tag == "unramified-PS":
        (a, b), equal = _alpha_pair(ctx, ell)
        if not ram:
            return [LocalFunctionTag(ell, "c0[lambda]", "T2", lam), LocalFunctionTag(ell, "c'[alpha]", "U2", a)]
        if equal:
            return [LocalFunctionTag(ell, "'c[alpha]", "U2", a),
                    LocalFunctionTag(ell, "''c[alpha]", "U2", a, semisimple=False)]
        return [LocalFunctionTag(ell, "'c[alpha]", "U2", a), LocalFunctionTag(ell, "'c[alpha']", "U2", b)]
    if t.tag == "ramified-PS":
        return [LocalFunctionTag(ell, "c*[sqrt(lambda)]", "U2", lam)]
    if not ram:
        return [LocalFunctionTag(ell, "c^s[lambda]", "U2", lam)]
    return [LocalFunctionTag(ell, "^sc[lambda]", "U2", lam)]


def fiber_dimension(ctx):
    """prod over ell | 2N of (1 or 2) + v_2(ell), according as pi_ell is ramified or not."""
    if not hypotheses_ok(ctx):
        raise WaldError("hypotheses fail")
    if ctx.f0.level % 4 == 0:
        raise WaldError("pi_2 must have conductor at most 2")
    d = 1
    ells = [2] + ([q for q, _ in factor(ctx.N)] if ctx.N > 1 else [])
    for ell in ells:
        unram = ctx.lt(ell).tag == "unramified-PS"
        d *= (2 if unram else 1) + (1 if ell == 2 else 0)
    return d


# ---------------------------------------------------------------- vanishing criteria

@dataclass
class Verdict:
    n: int
    vanishes: object  # True, False or "indeterminate"
    reason: str

    def to_json(self):
        return {"n": self.n, "vanishes": self.vanishes, "reason": self.reason}


def _hilbert(a, b, ell):
    return hilbert_symbol(a, b, ell)


def _condition_ii(ctx, n, ell):
    t = ctx.lt(ell)
    if t.tag != "Steinberg":
        return False
    _, rest0 = _part(ctx.chi0, ell)
    kp = _val_at(ctx.kappa_prime, ell)
    target = _hilbert(ell, n, ell) * _val_at(rest0, ell) * kp * Fraction(ell) ** ((ctx.k - 3) // 2)
    if not _eq0(ctx.lam(ell) - target):
        return False
    if ell == 2:
        two0, _ = _part(ctx.chi0, 2)
        if _hilbert(n, -1, 2) != _val_at(two0, -1):
            return False
        one4 = _trivial_on_1_plus_4(ctx.chi0)
        return (n % 2 == 1 and one4) or (n % 2 == 0 and not one4)
    ram = _part(ctx.chi, ell)[0].conductor() > 1
    return (n % ell != 0 and not ram) or (n % ell == 0 and ram)


def _condition_iii(ctx, n, lam_up2):
    p = ctx.p
    if lam_up2 is None:
        return False
    if not _eq0(lam_up2 * lam_up2 - Fraction(_val_at(ctx.chi, p)) ** 2 * Fraction(p) ** (ctx.k - 3)):
        return False  # not Steinberg at p
    target = _hilbert(p, n, p) * _val_at(ctx.chi0, p) * Fraction(p) ** ((ctx.k - 3) // 2)
    if not _eq0(ctx.lam(p) - target) or not _eq0(lam_up2 - target):
        return False
    kp_ram = ctx.kappa_prime.conductor() > 1
    return (n % p != 0 and not kp_ram) or (n % p == 0 and kp_ram)


def vanishing_criteria(ctx, n, Lvalue, lam_up2=None):
    """Decide whether a_n vanishes on the whole fiber: L-value (i), Steinberg conditions (ii), (iii)."""
    if not is_squarefree(n) or n <= 0:
        raise WaldError("n must be a positive squarefree integer")
    for ell in [2] + ([q for q, _ in factor(ctx.N)] if ctx.N > 1 else []):
        if _condition_ii(ctx, n, ell):
            return Verdict(n, True, f"condition-ii({ell})")
    if _condition_iii(ctx, n, lam_up2):
        return Verdict(n, True, "condition-iii")
    if Lvalue is None:
        return Verdict(n, "indeterminate", "L-value missing")
    if isinstance(Lvalue, LValueResult):
        if Lvalue.sign == -1:
            return Verdict(n, True, "L-value")
        near = abs(Lvalue.value) <= 10 * max(Lvalue.estimatedError, 1e-10)
        if near:
            return Verdict(n, "indeterminate", "L-value within error bar")
        return Verdict(n, False, "none")
    return Verdict(n, _eq0(Lvalue), "L-value" if _eq0(Lvalue) else "none")


# ---------------------------------------------------------------- ratio identities

def _complex(x):
    if isinstance(x, LValueResult):
        return x.value
    if isinstance(x, Fraction):
        return complex(float(x))
    return complex(x)


def _coeff(F, n):
    if hasattr(F, "coeffs"):
        return F.coeffs[n] if n < len(F.coeffs) else _raise_prec(n)
    return F[n]


def _raise_prec(n):
    raise WaldError(f"coefficient a_{n} not available")


def _chi_ratio(chi, m, n):
    cm, cn = _val_at(chi, m), _val_at(chi, n)
    if cn == 0:
        raise WaldError("chi(n) = 0")
    return cm * cn if cn in (1, -1) else cm / cn


def check_square_class(m, n, ctx):
    primes = [2] + ([q for q, _ in factor(ctx.N)] if ctx.N > 1 else [])
    return local_square_class_equal(m, n, primes)


def ratio_identity_check(F, ctx, m, n, L_m, L_n, noise=1e-300):
    """Relative residual of a_n^2 L_m chi(m/n) m^(k/2-1) = a_m^2 L_n n^(k/2-1)."""
    if m == n:
        return 0.0
    if not check_square_class(m, n, ctx):
        raise WaldError("m/n is not a local square at the primes dividing 2N")
    an, am = _complex(_coeff(F, n)), _complex(_coeff(F, m))
    e = ctx.k / 2 - 1
    lhs = an * an * _complex(L_m) * _chi_ratio(ctx.chi, m, n) * m ** e
    rhs = am * am * _complex(L_n) * n ** e
    scale = max(abs(lhs), abs(rhs))
    if scale <= noise:
        return 0.0
    return abs(lhs - rhs) / scale


def phi_value(fiber, m, n):
    """a_m(F)/a_n(F), checked to be the same for every F in the fiber."""
    if m == n:
        return Fraction(1)
    pairs = [(_coeff(F, n), _coeff(F, m)) for F in fiber]
    nz = [(an, am) for an, am in pairs if not _eq0(an)]
    if not nz:
        raise WaldError("denominator section vanishes at x")
    an0, am0 = nz[0]
    phi = am0 / an0
    for an, am in pairs:
        if not _eq0(am - phi * an):
            raise WaldError("a_m / a_n is not constant on the fiber")
    return phi


def phi_rhs(ctx, m, n, L_m, L_n):
    Ln = _complex(L_n)
    if isinstance(L_n, LValueResult) and (L_n.sign == -1 or L_n.is_zero()):
        raise WaldError("L_n is numerically zero")
    if Ln == 0:
        raise WaldError("L_n is numerically zero")
    kp = complex(_val_at(ctx.kappa_prime, m)) / complex(_val_at(ctx.kappa_prime, n))
    return _complex(L_m) / Ln * _chi_ratio(ctx.chi, m, n) * kp * (m / n) ** ((ctx.k - 2) / 2)


def phi_square_identity(phi, ctx, m, n, L_m, L_n):
    """Relative residual of phi^2 = (L_m/L_n) chi(m/n) kappa'(m/n) (m/n)^((k-2)/2)."""
    if m == n:
        return abs(_complex(phi) ** 2 - 1)
    rhs = phi_rhs(ctx, m, n, L_m, L_n)
    lhs = _complex(phi) ** 2
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


# ---------------------------------------------------------------- components

@dataclass
class ComponentDescriptor:
    """Generic data of an irreducible component: local types with Steinberg signs, chi, and k for chi_0."""
    chi: DirichletCharacter
    k: int
    N: int = 1
    local_types: dict = field(default_factory=dict)
    sampled_signs: list = field(default_factory=list)

    @property
    def chi0(self):
        return chi_zero(self.chi, self.k)


def degenerate_component(desc, n):
    """Corollary-style test: exact Steinberg-sign conditions, plus a sampling heuristic for L-vanishing."""
    ells = [2] + ([q for q, _ in factor(desc.N)] if desc.N > 1 else [])
    for ell in ells:
        t = desc.local_types.get(ell)
        if t is None or t.tag != "Steinberg" or t.sign is None:
            continue
        if t.sign != hilbert_symbol(ell, n, ell):
            continue
        if ell == 2:
            two0, _ = _part(desc.chi0, 2)
            if hilbert_symbol(n, -1, 2) != _val_at(two0, -1):
                continue
            one4 = _trivial_on_1_plus_4(desc.chi0)
            if (n % 2 == 1 and one4) or (n % 2 == 0 and not one4):
                return {"degenerate": True, "reason": "b", "prime": 2, "heuristic": False}
        else:
            ram = _part(desc.chi, ell)[0].conductor() > 1
            if (n % ell != 0 and not ram) or (n % ell == 0 and ram):
                return {"degenerate": True, "reason": "b", "prime": ell, "heuristic": False}
    if desc.sampled_signs and all(s == -1 for s in desc.sampled_signs):
        return {"degenerate": True, "reason": "a", "heuristic": True}
    return {"degenerate": False, "reason": "none", "heuristic": bool(desc.sampled_signs)}
