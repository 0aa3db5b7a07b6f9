"""Central values of quadratic twists via the smoothed approximate functional equation.

For f of weight w and conductor Q = N D^2 (twist by a character of conductor D
prime to N) we use, with A = sqrt(Q) / 2 pi and the regularized upper incomplete
gamma function G(a, x),

    L(f x psi, w/2) = sum_n b_n n^(-1/2) [G(w/2, n t / A) + eps G(w/2, n / (t A))]

where b_n = a_n psi(n) / n^((w-1)/2). The right side is independent of t > 0
exactly when eps is the root number, which is how the sign is detected.
"""

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy.special import gammaincc

from .arith import DirichletCharacter


class LFunctionError(ValueError):
    pass


@dataclass
class LValueResult:
    value: complex
    estimatedError: float
    sign: object  # +1, -1 or "undetermined"
    termsUsed: int

    def is_zero(self, scale=1.0):
        thresh = max(self.estimatedError, 1e-10, 1e3 * np.finfo(float).eps * scale)
        return abs(self.value) <= thresh

    def to_json(self):
        d = asdict(self)
        d["value"] = [self.value.real, self.value.imag]
        return d


def _coeffs_complex(f0):
    if hasattr(f0, "complex_coeffs"):
        return np.array(f0.complex_coeffs(), dtype=complex)
    return np.array([complex(c) for c in f0.coeffs], dtype=complex)


def twist(f0, psi=None, n=None):
    """Coefficients a_n psi(n) through the complex embedding, as a numpy array."""
    a = _coeffs_complex(f0)
    if n is not None:
        a = a[:n]
    if psi is None or psi.is_trivial() and psi.modulus == 1:
        return a
    vals = np.array([psi(i) for i in range(psi.modulus)], dtype=complex)
    idx = np.arange(len(a)) % psi.modulus
    return a * vals[idx]


def _setup(f0, psi):
    psi = psi or DirichletCharacter.trivial(1)
    D = psi.conductor()
    N = f0.level
    if math.gcd(D, N) != 1:
        raise LFunctionError(f"twist conductor {D} is not coprime to the level {N}")
    return psi.primitive(), N * D * D


def _smoothed(b, w, A, t):
    n = np.arange(1, len(b))
    return np.sum(b[1:] / np.sqrt(n) * gammaincc(w / 2, n * t / A))


def _terms_needed(w, A, t_min, digits=16):
    # G(w/2, x) < 10^-digits once x is comfortably past w/2 + digits * ln 10
    x = w / 2 + digits * math.log(10) + 3 * math.sqrt(w / 2 + digits * math.log(10))
    return int(math.ceil(A / t_min * x)) + 1


def _evaluate(f0, psi, weight, t_pair=(1.0, 1.5), term_cap=10 ** 6):
    psi, Q = _setup(f0, psi)
    w = weight
    A = math.sqrt(Q) / (2 * math.pi)
    t_min = min(min(t_pair), 1 / max(t_pair))
    nmax = _terms_needed(w, A, t_min)
    if nmax > term_cap:
        raise LFunctionError("non-convergence at term cap")
    if nmax >= f0.prec:
        raise LFunctionError(f"need {nmax} coefficients, newform stored to {f0.prec}")
    a = twist(f0, psi, nmax + 1)
    n = np.arange(len(a), dtype=float)
    n[0] = 1.0
    b = a / n ** ((w - 1) / 2)
    b[0] = 0
    F = {}
    for t in t_pair:
        F[t] = _smoothed(b, w, A, t)
        F[1 / t] = _smoothed(b, w, A, 1 / t)
    vals = {}
    for eps in (1, -1):
        vals[eps] = [F[t] + eps * F[1 / t] for t in t_pair]
    scale = max(1.0, float(np.max(np.abs(b[1:]) / np.sqrt(np.arange(1, len(b))))))
    return vals, nmax, scale


def sign_of_functional_equation(f0, psi=None, k=None, tol=1e-8):
    """Root number of f0 x psi, detected from the t-independence of the smoothed sum."""
    vals, nmax, scale = _evaluate(f0, psi, f0.weight)
    disc = {eps: abs(v[0] - v[1]) for eps, v in vals.items()}
    good = [eps for eps, d in disc.items() if d < tol * max(scale, max(abs(x) for x in vals[eps]))]
    if len(good) != 1:
        raise LFunctionError("sign undetermined; raise terms")
    return good[0]


def central_value(f0, psi=None, k=None, tol=1e-8):
    """L(f0 x psi, s) at the center s = (k - 1)/2 where k - 1 is the weight of f0."""
    w = f0.weight
    if k is not None and k - 1 != w:
        raise LFunctionError(f"k - 1 = {k - 1} does not match the weight {w}")
    vals, nmax, scale = _evaluate(f0, psi, w)
    disc = {eps: abs(v[0] - v[1]) for eps, v in vals.items()}
    good = [eps for eps, d in disc.items() if d < tol * max(scale, max(abs(x) for x in vals[eps]))]
    if len(good) == 1:
        eps = good[0]
        sign = eps
    else:
        eps = min(disc, key=disc.get)
        sign = "undetermined"
    v = vals[eps]
    err = disc[eps] + 1e-14 * scale
    return LValueResult(complex(v[0]), float(err), sign, nmax)
