"""Sparse multivariate polynomials over a prime field GF(p).

Coefficients are least non-negative residues mod p, exponent vectors are
plain tuples, and a polynomial is a term map {exponents: coefficient} with
no zero coefficient ever stored.  Everything here is immutable by
convention: arithmetic builds new objects and never mutates inputs, so
rings and polynomials can be shared freely between concurrent tasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_PRIME = 32749  # largest prime below 2**15

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for everything below 3.3e24."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class MonomialOrder:
    """A global monomial order: graded reverse lex, lex, or a block
    elimination order whose trailing block (variables with index >= split)
    dominates."""

    kind: str
    split: int | None = None

    def __post_init__(self):
        if self.kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block":
            if self.split is None or self.split <= 0:
                raise ValueError("block order needs a positive split index")
        elif self.split is not None:
            raise ValueError("split index only makes sense for block orders")


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def elimination_order(split: int) -> MonomialOrder:
    """Block order eliminating the variables with index >= split."""
    return MonomialOrder("block", split)


class PolyRing:
    """GF(p)[x_0, ..., x_k] with named variables and a preferred order.

    The order is advisory (Groebner routines may override it); arithmetic
    compatibility only requires equal modulus and variable list.
    """

    __slots__ = ("p", "variables", "nvars", "order", "_index")

    def __init__(self, variables: Sequence[str], p: int = DEFAULT_PRIME,
                 order: MonomialOrder = GREVLEX):
        variables = tuple(variables)
        if len(variables) < 1:
            raise ValueError("need at least one variable")
        if len(set(variables)) != len(variables):
            raise ValueError("variable names must be unique")
        if p <= 2 or not is_prime(p):
            raise ValueError(f"modulus {p} is not an odd prime")
        if order.kind == "block" and not 0 < order.split < len(variables):
            raise ValueError("block split must lie strictly inside the variable list")
        self.p = p
        self.variables = variables
        self.nvars = len(variables)
        self.order = order
        self._index = {name: i for i, name in enumerate(variables)}

    # -- constructors -------------------------------------------------

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {(0,) * self.nvars: 1})

    def constant(self, c: int) -> "Polynomial":
        c %= self.p
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def var(self, i: int) -> "Polynomial":
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): 1})

    def var_named(self, name: str) -> "Polynomial":
        return self.var(self._index[name])

    def monomial(self, exponents: Sequence[int], coeff: int = 1) -> "Polynomial":
        exponents = tuple(exponents)
        if len(exponents) != self.nvars or any(e < 0 for e in exponents):
            raise ValueError("bad exponent vector")
        coeff %= self.p
        return Polynomial(self, {exponents: coeff} if coeff else {})

    # -- derived rings ------------------------------------------------

    def extend(self, extra: Sequence[str], order: MonomialOrder | None = None) -> "PolyRing":
        return PolyRing(self.variables + tuple(extra), self.p, order or self.order)

    def restrict(self, keep: int, order: MonomialOrder | None = None) -> "PolyRing":
        """Subring on the first `keep` variables."""
        return PolyRing(self.variables[:keep], self.p, order or GREVLEX)

    def fresh_name(self, base: str = "t") -> str:
        if base not in self._index:
            return base
        k = 0
        while f"{base}{k}" in self._index:
            k += 1
        return f"{base}{k}"

    def compatible(self, other: "PolyRing") -> bool:
        return self is other or (self.p == other.p and self.variables == other.variables)

    def __repr__(self):
        return f"PolyRing(GF({self.p})[{', '.join(self.variables)}])"

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.p == other.p \
            and self.variables == other.variables

    def __hash__(self):
        return hash((self.p, self.variables))


class Polynomial:
    """Immutable sparse polynomial: dict from exponent tuple to coefficient."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict, normalized: bool = False):
        self.ring = ring
        if normalized:
            self.terms = terms
        else:
            p = ring.p
            clean = {}
            for e, c in terms.items():
                c %= p
                if c:
                    clean[tuple(e)] = c
            self.terms = clean

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> int:
        return self.terms.get((0,) * self.ring.nvars, 0)

    def total_degree(self) -> int:
        """Maximum term degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def homogeneous_degree(self) -> int | None:
        """Common degree of all terms, or None if inhomogeneous.

        Raises on the zero polynomial, which has no well-defined degree.
        """
        if not self.terms:
            raise ValueError("zero polynomial has no homogeneous degree")
        degs = {sum(e) for e in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def inhomogeneous_witness(self) -> tuple | None:
        """An exponent tuple of minority degree, for error reporting."""
        if self.homogeneous_degree() is not None:
            return None
        by_deg = {}
        for e in self.terms:
            by_deg.setdefault(sum(e), []).append(e)
        # report a term away from the dominant degree
        dominant = max(by_deg, key=lambda d: len(by_deg[d]))
        for d, es in sorted(by_deg.items()):
            if d != dominant:
                return es[0]
        return None

    # -- arithmetic ----------------------------------------------------

    def _check(self, other: "Polynomial"):
        if not self.ring.compatible(other.ring):
            raise ValueError("polynomials live in different rings")

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        self._check(other)
        p = self.ring.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = (out.get(e, 0) + c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial(self.ring, out, normalized=True)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial(self.ring, {e: p - c for e, c in self.terms.items()},
                          normalized=True)

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            c = other % self.ring.p
            if not c:
                return self.ring.zero()
            return Polynomial(self.ring,
                              {e: c * v % self.ring.p for e, v in self.terms.items()},
                              normalized=True)
        self._check(other)
        p = self.ring.p
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                v = (out.get(e, 0) + ca * cb) % p
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Polynomial(self.ring, out, normalized=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def derivative(self, i: int) -> "Polynomial":
        """Formal partial derivative with respect to variable i."""
        if not 0 <= i < self.ring.nvars:
            raise ValueError(f"no variable with index {i}")
        p = self.ring.p
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                v = c * e[i] % p
                if v:
                    ne = e[:i] + (e[i] - 1,) + e[i + 1:]
                    out[ne] = (out.get(ne, 0) + v) % p
                    if not out[ne]:
                        del out[ne]
        return Polynomial(self.ring, out, normalized=True)

    def evaluate(self, point: Sequence[int]) -> int:
        """Value at a point with coordinates in GF(p)."""
        p = self.ring.p
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * pow(x, k, p) % p
            total = (total + v) % p
        return total

    def compose(self, target: PolyRing, images: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute images[i] for variable i; images live in `target`."""
        if len(images) != self.ring.nvars:
            raise ValueError("need one image per variable")
        p = target.p
        powers: list[list[dict]] = [[{(0,) * target.nvars: 1}] for _ in images]
        out: dict = {}
        for e, c in self.terms.items():
            term = {(0,) * target.nvars: c}
            for i, k in enumerate(e):
                if not k:
                    continue
                cache = powers[i]
                while len(cache) <= k:
                    cache.append(_dict_mul(cache[-1], images[i].terms, p))
                term = _dict_mul(term, cache[k], p)
            for m, v in term.items():
                w = (out.get(m, 0) + v) % p
                if w:
                    out[m] = w
                else:
                    del out[m]
        return Polynomial(target, out, normalized=True)

    # -- structural ----------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            return self.terms == self.ring.constant(other).terms
        return isinstance(other, Polynomial) and self.ring.compatible(other.ring) \
            and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring.p, self.ring.variables, frozenset(self.terms.items())))

    def sorted_terms(self):
        """Terms in a display-stable order: degree, then lexicographic."""
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        p = self.ring.p
        names = self.ring.variables
        parts = []
        for e, c in self.sorted_terms():
            if c > p // 2:
                sign, mag = "-", p - c
            else:
                sign, mag = "+", c
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Polynomial({self})"


def _dict_mul(a: dict, b: dict, p: int) -> dict:
    if len(a) > len(b):
        a, b = b, a
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = (out.get(e, 0) + ca * cb) % p
            if v:
                out[e] = v
            else:
                del out[e]
    return out


def random_scalar(ring: PolyRing, rng) -> int:
    """Uniform draw from all of GF(p)."""
    return rng.randrange(ring.p)


def random_linear_combination(polys: Sequence[Polynomial], rng) -> tuple[list[int], Polynomial]:
    """Random GF(p)-combination of equal-degree polynomials.

    Returns the drawn scalars together with the combination so callers can
    log or replay the choice.  Zero polynomials are tolerated; all nonzero
    inputs must share one degree.
    """
    if not polys:
        raise ValueError("need at least one polynomial")
    ring = polys[0].ring
    degs = {q.homogeneous_degree() for q in polys if not q.is_zero()}
    if len(degs) > 1:
        raise ValueError(f"mixed degrees {sorted(degs)} in combination")
    coeffs = [rng.randrange(ring.p) for _ in polys]
    acc = ring.zero()
    for lam, q in zip(coeffs, polys):
        if lam and not q.is_zero():
            acc = acc + q * lam
    return coeffs, acc


def random_linear_form(ring: PolyRing, affine: bool, rng) -> Polynomial:
    """A random form sum(c_j x_j); with affine=True, 1 - sum(c_j x_j)."""
    acc = ring.one() if affine else ring.zero()
    for j in range(ring.nvars):
        c = rng.randrange(ring.p)
        if c:
            acc = acc - ring.var(j) * c if affine else acc + ring.var(j) * c
    return acc
