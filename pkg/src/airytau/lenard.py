"""Exact differential polynomials in u, u_x, u_xx, ... and the Lenard-Magri recursion.

A monomial u^{e0} u_x^{e1} ... u_(m)^{em} is stored as the exponent tuple
(e0, e1, ..., em) with trailing zeros trimmed; the constant monomial is ().
Coefficients are ``fractions.Fraction`` throughout.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import MissingDerivative, NotExact, ValidationError

Monomial = tuple


def _trim(exps: Iterable[int]) -> Monomial:
    e = list(exps)
    while e and e[-1] == 0:
        e.pop()
    return tuple(e)


def weight(m: Monomial) -> int:
    return sum(e * (k + 2) for k, e in enumerate(m))


def _grlex_key(m: Monomial):
    return (weight(m), sum(m), m)


class DiffPolynomial:
    """Immutable polynomial in u and its x-derivatives with rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                m = _trim(m)
                clean[m] = clean.get(m, Fraction(0)) + c
                if not clean[m]:
                    del clean[m]
        self._terms = dict(sorted(clean.items(), key=lambda kv: _grlex_key(kv[0])))

    @classmethod
    def constant(cls, c) -> "DiffPolynomial":
        return cls({(): c})

    @classmethod
    def u(cls, k: int = 0) -> "DiffPolynomial":
        """The generator u_(k)."""
        return cls({(0,) * k + (1,): 1})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = DiffPolynomial.constant(other)
        return isinstance(other, DiffPolynomial) and self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __add__(self, other):
        other = _lift(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return DiffPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffPolynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                n = max(len(m1), len(m2))
                m = tuple((m1[i] if i < len(m1) else 0) + (m2[i] if i < len(m2) else 0)
                          for i in range(n))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return DiffPolynomial(out)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self._terms

    def weights(self) -> set:
        return {weight(m) for m in self._terms}

    def order(self) -> int:
        """Highest derivative index present, -1 for constants."""
        return max((len(m) - 1 for m in self._terms), default=-1)

    def __repr__(self):
        return f"DiffPolynomial({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m, c in self._terms.items():
            factors = []
            for k, e in enumerate(m):
                if e:
                    name = "u" + ("_" + "x" * k if k else "") if k <= 3 else f"u_({k})"
                    factors.append(name if e == 1 else f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_latex(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for m, c in self._terms.items():
            factors = []
            for k, e in enumerate(m):
                if not e:
                    continue
                base = "u" + ("'" * k if k <= 3 else f"^{{({k})}}")
                if e > 1:
                    base = f"({base})^{{{e}}}" if 0 < k <= 3 else f"{base}^{{{e}}}"
                factors.append(base)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if a.denominator == 1:
                coef = "" if a == 1 and factors else str(a.numerator)
            else:
                coef = f"\\frac{{{a.numerator}}}{{{a.denominator}}}"
            out.append(f"{sign} {coef}{''.join(factors)}")
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _lift(x) -> DiffPolynomial:
    if isinstance(x, DiffPolynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return DiffPolynomial.constant(x)
    raise TypeError(f"cannot combine DiffPolynomial with {type(x).__name__}")


def _dx_monomial(m: Monomial) -> dict:
    out: dict = {}
    for k, e in enumerate(m):
        if not e:
            continue
        new = list(m) + [0]
        new[k] -= 1
        new[k + 1] += 1
        key = _trim(new)
        out[key] = out.get(key, 0) + e
    return out


def apply_dx(P: DiffPolynomial) -> DiffPolynomial:
    """Total x-derivative by the Leibniz rule."""
    out: dict = {}
    for m, c in P:
        for m2, mult in _dx_monomial(m).items():
            out[m2] = out.get(m2, Fraction(0)) + c * mult
    return DiffPolynomial(out)


def apply_recursion_operator(P: DiffPolynomial) -> DiffPolynomial:
    """(1/4 d^3 + u d + 1/2 u_x) P."""
    d1 = apply_dx(P)
    d3 = apply_dx(apply_dx(d1))
    u, ux = DiffPolynomial.u(0), DiffPolynomial.u(1)
    return Fraction(1, 4) * d3 + u * d1 + Fraction(1, 2) * ux * P


def monomials_of_weight(w: int) -> list:
    """All monomials of weight w; u_(k) carries weight k + 2."""
    out = []

    def rec(k: int, remaining: int, exps: list):
        if remaining == 0:
            out.append(_trim(exps))
            return
        if k + 2 > remaining:
            return
        part = k + 2
        for e in range(remaining // part, -1, -1):
            rec(k + 1, remaining - e * part, exps + [e])

    if w == 0:
        return [()]
    rec(0, w, [])
    return sorted(set(out), key=_grlex_key)


def _solve_exact(columns: list, target: dict) -> list:
    """Solve sum_j x_j columns[j] = target over Q; columns/target are sparse dicts."""
    rows = sorted({m for col in columns for m in col} | set(target), key=_grlex_key)
    n = len(columns)
    A = [[Fraction(col.get(m, 0)) for col in columns] + [Fraction(target.get(m, 0))]
         for m in rows]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] != 0 for row in A[r:]):
        raise NotExact("no exact antiderivative exists")
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = A[i][-1]
    return x


def integrate_dx(P: DiffPolynomial) -> DiffPolynomial:
    """Q with d/dx Q = P and no constant term."""
    if P.is_zero():
        return DiffPolynomial()
    ws = P.weights()
    if len(ws) != 1:
        raise ValidationError("integrate_dx needs a weight-homogeneous polynomial")
    w = ws.pop()
    if w < 3:
        raise NotExact(f"weight-{w} polynomial {P} is not a total derivative")
    basis = [m for m in monomials_of_weight(w - 1) if m]
    cols = [_dx_monomial(m) for m in basis]
    x = _solve_exact(cols, P.terms)
    return DiffPolynomial({m: c for m, c in zip(basis, x)})


N_MAX = 8
_cache: dict = {0: DiffPolynomial.constant(1)}
_lock = threading.Lock()


def lenard(n: int) -> DiffPolynomial:
    """The Lenard-Magri polynomial L_n with L_0 = 1, L_n[0] = 0."""
    if not 0 <= n <= N_MAX:
        raise ValidationError(f"lenard(n) supports 0 <= n <= {N_MAX}")
    with _lock:
        k = max(_cache)
        while k < n:
            _cache[k + 1] = integrate_dx(apply_recursion_operator(_cache[k]))
            k += 1
        return _cache[n]


def eval_diffpoly(P: DiffPolynomial, samples: Sequence):
    """Substitute samples[k] for u_(k).  Exact for Fraction/int samples."""
    need = P.order() + 1
    if len(samples) < need:
        raise MissingDerivative(f"need derivatives up to order {need - 1}, got {len(samples)} samples")
    exact = all(isinstance(s, (int, Fraction)) for s in samples[:need])
    total = Fraction(0) if exact else 0
    for m, c in P:
        term = c if exact else c.numerator
        for k, e in enumerate(m):
            if e:
                term = term * samples[k] ** e
        total = total + (term if exact else term / c.denominator)
    return total
