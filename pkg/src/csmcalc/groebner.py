"""Groebner bases over GF(p) and the ideal operations built on them.

The engine is a Buchberger loop with Gebauer-Moller pair pruning and the
normal (minimal lcm) selection strategy.  Monomials are packed into single
integers whose natural ordering realizes the monomial order, so the hot
loops run on dict[int, int] polynomial maps with integer arithmetic only:

  grevlex   [total degree | C-e_last | ... | C-e_0]
  lex       [e_0 | ... | e_last]
  block     [tail degree | tail complements | head degree | head complements]

with one guard bit per field so divisibility is two masked subtractions.
Elimination uses the block layout (trailing variables dominant), saturation
the usual 1 - t*f adjunction, and the irrelevant-ideal saturation comes in
a deterministic flavour (intersection of per-variable saturations) and a
probabilistic generic-linear flavour.
"""

from __future__ import annotations

import heapq
from itertools import combinations, groupby

from .ring import (GREVLEX, LEX, MonomialOrder, PolyRing, Polynomial,
                   elimination_order, random_linear_form)


class CodecOverflow(Exception):
    """Monomial degree outgrew the packed field width."""


class _Codec:
    """Packs exponent vectors into order-comparable integers."""

    def __init__(self, nvars: int, order: MonomialOrder, width: int = 8):
        self.nvars = nvars
        self.order = order
        self.width = width
        C = (1 << (width - 1)) - 1
        self.maxexp = C
        fieldmask = (1 << width) - 1
        self.fieldmask = fieldmask
        kind = order.kind
        if kind == "grevlex":
            shifts = [width * i for i in range(nvars)]
            self.degshift = width * nvars
            self.ck = sum(C << s for s in shifts)
            mask = (1 << (width * nvars)) - 1
            guard = sum(1 << (s + width - 1) for s in shifts)
            self.groups = ((mask, guard, True),)
        elif kind == "lex":
            shifts = [width * (nvars - 1 - i) for i in range(nvars)]
            self.degshift = None
            self.ck = 0
            mask = (1 << (width * nvars)) - 1
            guard = sum(1 << (s + width - 1) for s in shifts)
            self.groups = ((mask, guard, False),)
        else:  # block: tail (index >= split) dominates in grevlex, then head
            split = order.split
            if not 0 < split < nvars:
                raise ValueError("block split outside variable list")
            head, tail = split, nvars - split
            shifts = [width * i for i in range(head)]
            self.hdegshift = width * head
            tailbase = width * head + 2 * width
            shifts += [tailbase + width * i for i in range(tail)]
            self.tdegshift = tailbase + width * tail
            self.degshift = None
            self.ck = sum(C << s for s in shifts)
            hmask = (1 << (width * head)) - 1
            hguard = sum(1 << (width * i + width - 1) for i in range(head))
            tmask = ((1 << (width * tail)) - 1) << tailbase
            tguard = sum(1 << (tailbase + width * i + width - 1) for i in range(tail))
            self.groups = ((tmask, tguard, True), (hmask, hguard, True))
            self.split = split
        self.shifts = shifts
        self.unit = self.encode((0,) * nvars)

    # -- scalar ops ------------------------------------------------------

    def encode(self, exps) -> int:
        C = self.maxexp
        if any(e > C or e < 0 for e in exps):
            raise CodecOverflow(f"exponent out of range for width {self.width}")
        kind = self.order.kind
        key = 0
        if kind == "grevlex":
            key = sum(exps) << self.degshift
            for e, s in zip(exps, self.shifts):
                key += (C - e) << s
        elif kind == "lex":
            for e, s in zip(exps, self.shifts):
                key += e << s
        else:
            split = self.split
            key = (sum(exps[split:]) << self.tdegshift) + (sum(exps[:split]) << self.hdegshift)
            for e, s in zip(exps, self.shifts):
                key += (C - e) << s
        return key

    def decode(self, key: int) -> tuple:
        C = self.maxexp
        fm = self.fieldmask
        if self.order.kind == "lex":
            return tuple((key >> s) & fm for s in self.shifts)
        return tuple(C - ((key >> s) & fm) for s in self.shifts)

    def degree(self, key: int) -> int:
        kind = self.order.kind
        if kind == "grevlex":
            return key >> self.degshift
        if kind == "block":
            return (key >> self.tdegshift) + ((key >> self.hdegshift) & ((1 << (2 * self.width)) - 1))
        return sum(self.decode(key))

    def divides(self, a: int, b: int) -> bool:
        """True when monomial a divides monomial b."""
        for mask, guard, complemented in self.groups:
            t = (a & mask) - (b & mask) if complemented else (b & mask) - (a & mask)
            if t < 0 or (t & guard):
                return False
        return True

    def quotient(self, b: int, a: int) -> int:
        """Key of b/a; caller guarantees divisibility."""
        return b - a + self.ck

    def lcm(self, a: int, b: int) -> int:
        ea, eb = self.decode(a), self.decode(b)
        return self.encode(tuple(map(max, ea, eb)))

    def encode_poly(self, poly: Polynomial) -> dict:
        enc = self.encode
        return {enc(e): c for e, c in poly.terms.items()}

    def decode_poly(self, d: dict, ring: PolyRing) -> Polynomial:
        dec = self.decode
        return Polynomial(ring, {dec(k): c for k, c in d.items()}, normalized=True)


def _normal_form_packed(f: dict, leads, tails, degs, alive, codec, p) -> dict:
    """Full remainder of f modulo a monic packed basis."""
    if not f:
        return {}
    divides = codec.divides
    degree = codec.degree
    ck = codec.ck
    nbasis = len(leads)
    work = dict(f)
    heap = [-k for k in work]
    heapq.heapify(heap)
    out = {}
    pop = heapq.heappop
    push = heapq.heappush
    while heap:
        k = -pop(heap)
        c = work.pop(k, None)
        if c is None:
            continue
        kd = degree(k)
        red = -1
        for idx in range(nbasis):
            if alive[idx] and degs[idx] <= kd and divides(leads[idx], k):
                red = idx
                break
        if red < 0:
            out[k] = c
            continue
        shift = k - leads[red]  # quotient key offset; ck cancels in tk + (k-l+ck) - ck
        for tk, tc in tails[red].items():
            nk = tk + shift
            prev = work.get(nk)
            if prev is None:
                work[nk] = (-c * tc) % p
                push(heap, -nk)
            else:
                prev = (prev - c * tc) % p
                if prev:
                    work[nk] = prev
                else:
                    del work[nk]
    return out


def _buchberger_packed(inputs, codec, p):
    """Reduced monic Groebner basis of the given packed polynomials."""
    divides = codec.divides
    degree = codec.degree
    lcm = codec.lcm
    ck = codec.ck
    maxdeg = codec.maxexp

    leads: list[int] = []
    tails: list[dict] = []
    degs: list[int] = []
    alive: list[bool] = []
    pairs: dict[tuple, int] = {}
    pheap: list = []

    def add_element(r: dict):
        lk = max(r)
        cinv = pow(r[lk], p - 2, p)
        if cinv != 1:
            r = {k: c * cinv % p for k, c in r.items()}
        tail = dict(r)
        del tail[lk]
        h = len(leads)
        dh = degree(lk)
        # chain criterion on pending pairs
        for ij in list(pairs):
            L = pairs[ij]
            if divides(lk, L):
                i, j = ij
                if lcm(leads[i], lk) != L and lcm(leads[j], lk) != L:
                    del pairs[ij]
        # candidate pairs with the survivors, Gebauer-Moller pruned
        cand = []
        for g in range(h):
            if alive[g]:
                L = lcm(leads[g], lk)
                if degree(L) > maxdeg:
                    raise CodecOverflow("pair lcm degree exceeds packed width")
                cand.append((L, g))
        cand.sort()
        reps = []
        for L, grp in groupby(cand, key=lambda t: t[0]):
            grp = list(grp)
            pick = next((t for t in grp if degree(L) == degs[t[1]] + dh), grp[0])
            reps.append(pick)
        kept = []
        for L, g in reps:
            if any(divides(L2, L) for L2, _ in kept):
                continue
            kept.append((L, g))
        for L, g in kept:
            if degree(L) == degs[g] + dh:  # coprime leads: S-poly reduces to zero
                continue
            pairs[(g, h)] = L
            heapq.heappush(pheap, (L, g, h))
        # retire basis elements with divisible leading terms
        for g in range(h):
            if alive[g] and divides(lk, leads[g]):
                alive[g] = False
        leads.append(lk)
        tails.append(tail)
        degs.append(dh)
        alive.append(True)

    for f in sorted(inputs, key=max):
        r = _normal_form_packed(f, leads, tails, degs, alive, codec, p)
        if r:
            add_element(r)

    while pheap:
        L, i, j = heapq.heappop(pheap)
        if pairs.get((i, j)) != L:
            continue
        del pairs[(i, j)]
        qi = L - leads[i]
        qj = L - leads[j]
        s = {tk + qi: tc for tk, tc in tails[i].items()}
        for tk, tc in tails[j].items():
            nk = tk + qj
            prev = s.get(nk)
            if prev is None:
                s[nk] = (-tc) % p
            else:
                prev = (prev - tc) % p
                if prev:
                    s[nk] = prev
                else:
                    del s[nk]
        r = _normal_form_packed(s, leads, tails, degs, alive, codec, p)
        if r:
            add_element(r)

    # tail interreduction; alive leading terms are pairwise non-divisible
    out = []
    for t in range(len(leads)):
        if not alive[t]:
            continue
        tail = _normal_form_packed(tails[t], leads, tails, degs, alive, codec, p)
        full = {leads[t]: 1}
        full.update(tail)
        out.append(full)
    out.sort(key=max, reverse=True)
    return out


class Ideal:
    """Finitely generated ideal of a PolyRing; caches Groebner bases."""

    __slots__ = ("ring", "generators", "_gb_cache", "_krull")

    def __init__(self, ring: PolyRing, generators):
        self.ring = ring
        gens = []
        for g in generators:
            if isinstance(g, Polynomial):
                if not ring.compatible(g.ring):
                    raise ValueError("generator from a different ring")
                gens.append(g)
            else:
                raise TypeError("generators must be Polynomials")
        self.generators = tuple(gens)
        self._gb_cache = {}
        self._krull = None

    def nonzero_generators(self) -> tuple:
        return tuple(g for g in self.generators if not g.is_zero())

    def degrees(self) -> list[int]:
        return [g.homogeneous_degree() for g in self.nonzero_generators()]

    def is_homogeneous(self) -> bool:
        return all(g.homogeneous_degree() is not None for g in self.nonzero_generators())

    def groebner(self, order: MonomialOrder | None = None) -> "GroebnerBasis":
        order = order or self.ring.order
        gb = self._gb_cache.get(order)
        if gb is None:
            gb = buchberger(self, order)
            self._gb_cache[order] = gb
        return gb

    def contains(self, f: Polynomial) -> bool:
        return self.groebner().normal_form(f).is_zero()

    def equals(self, other: "Ideal") -> bool:
        return all(self.contains(g) for g in other.generators) and \
            all(other.contains(g) for g in self.generators)

    def __repr__(self):
        inside = ", ".join(str(g) for g in self.generators[:4])
        if len(self.generators) > 4:
            inside += ", ..."
        return f"Ideal({inside})"


class GroebnerBasis:
    """Reduced Groebner basis: monic elements, pairwise non-divisible
    leading terms, every element fully tail-reduced."""

    __slots__ = ("ring", "order", "elements", "source",
                 "_codec", "_packed", "_leads", "_tails", "_degs", "_alive")

    def __init__(self, ring, order, packed, codec, source=None):
        self.ring = ring
        self.order = order
        self.source = source
        self._codec = codec
        self._packed = packed
        self._leads = [max(d) for d in packed]
        self._tails = []
        for d in packed:
            t = dict(d)
            del t[max(d)]
            self._tails.append(t)
        self._degs = [codec.degree(k) for k in self._leads]
        self._alive = [True] * len(packed)
        self.elements = tuple(codec.decode_poly(d, ring) for d in packed)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def is_unit(self) -> bool:
        return len(self._leads) == 1 and self._leads[0] == self._codec.unit

    def is_zero(self) -> bool:
        return not self._leads

    def leading_exponents(self) -> list[tuple]:
        return [self._codec.decode(k) for k in self._leads]

    def normal_form(self, f: Polynomial) -> Polynomial:
        """Remainder of multivariate division: no term of the result is
        divisible by any leading term of the basis."""
        if not self.ring.compatible(f.ring):
            raise ValueError("polynomial from a different ring")
        fd = self._codec.encode_poly(f)
        r = _normal_form_packed(fd, self._leads, self._tails, self._degs,
                                self._alive, self._codec, self.ring.p)
        return self._codec.decode_poly(r, self.ring)

    def contains(self, f: Polynomial) -> bool:
        return self.normal_form(f).is_zero()

    def quotient_dimension(self) -> int | None:
        """Number of standard monomials, or None when infinite."""
        return _standard_monomial_count(self.leading_exponents(), self._codec.nvars)

    def verify(self) -> bool:
        """Re-check the defining invariants, including S-polynomial descent."""
        codec, p = self._codec, self.ring.p
        leads = self._leads
        for i, d in enumerate(self._packed):
            if d[leads[i]] != 1:
                return False
        for i in range(len(leads)):
            for j in range(i + 1, len(leads)):
                if codec.divides(leads[i], leads[j]) or codec.divides(leads[j], leads[i]):
                    return False
        for i in range(len(leads)):
            for tk in self._tails[i]:
                if any(codec.divides(lk, tk) for lk in leads):
                    return False
        for i in range(len(leads)):
            for j in range(i + 1, len(leads)):
                L = codec.lcm(leads[i], leads[j])
                qi, qj = L - leads[i], L - leads[j]
                s = {tk + qi: tc for tk, tc in self._tails[i].items()}
                for tk, tc in self._tails[j].items():
                    nk = tk + qj
                    v = (s.get(nk, 0) - tc) % p
                    if v:
                        s[nk] = v
                    else:
                        s.pop(nk, None)
                if _normal_form_packed(s, leads, self._tails, self._degs,
                                       self._alive, codec, p):
                    return False
        return True


def buchberger(ideal: Ideal | list, order: MonomialOrder | None = None,
               ring: PolyRing | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of an ideal under the given order."""
    if isinstance(ideal, Ideal):
        ring = ideal.ring
        gens = ideal.nonzero_generators()
        source = ideal
    else:
        gens = tuple(g for g in ideal if not g.is_zero())
        if ring is None:
            if not gens:
                raise ValueError("cannot infer ring from empty generator list")
            ring = gens[0].ring
        source = None
    order = order or ring.order
    for width in (8, 16, 32):
        codec = _Codec(ring.nvars, order, width)
        try:
            packed = [codec.encode_poly(g) for g in gens]
            reduced = _buchberger_packed(packed, codec, ring.p)
            return GroebnerBasis(ring, order, reduced, codec, source)
        except CodecOverflow:
            continue
    raise CodecOverflow("monomial degrees exceed every supported packing")


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    return G.normal_form(f)


# -- standard monomial counting ---------------------------------------------


def _minimalize(gens):
    """Componentwise-minimal elements of a set of exponent tuples."""
    out = []
    for g in sorted(set(gens), key=sum):
        if not any(all(x <= y for x, y in zip(m, g)) for m in out):
            out.append(g)
    return tuple(out)


def _standard_monomial_count(lead_exponents, nvars) -> int | None:
    gens = _minimalize(tuple(map(tuple, lead_exponents)))
    if any(not any(g) for g in gens):
        return 0  # unit ideal
    for i in range(nvars):
        if not any(g[i] and all(g[j] == 0 for j in range(nvars) if j != i) for g in gens):
            return None  # staircase leaves variable i unbounded
    memo = {}
    return _count_standard(gens, nvars, memo)


def _count_standard(gens, nv, memo):
    if nv == 0:
        return 0 if gens else 1
    key = (nv, gens)
    hit = memo.get(key)
    if hit is not None:
        return hit
    bound = min(g[0] for g in gens if not any(g[1:]))
    cuts = sorted({g[0] for g in gens if g[0] < bound} | {0})
    total = 0
    for idx, t in enumerate(cuts):
        nxt = cuts[idx + 1] if idx + 1 < len(cuts) else bound
        sub = _minimalize(tuple(g[1:] for g in gens if g[0] <= t))
        total += (nxt - t) * _count_standard(sub, nv - 1, memo)
    memo[key] = total
    return total


# -- dimension ---------------------------------------------------------------


def krull_dimension(ideal: Ideal) -> int:
    """Dimension of the projective scheme V(I): the affine cone dimension
    minus one, read off maximal independent variable sets of the leading
    term ideal.  Empty scheme gives -1 (also used for the unit ideal)."""
    if not ideal.nonzero_generators():
        return ideal.ring.nvars - 1  # zero ideal: all of projective space
    if ideal._krull is not None:
        return ideal._krull
    gb = ideal.groebner(GREVLEX)
    if gb.is_unit():
        ideal._krull = -1
        return -1
    supports = {frozenset(i for i, e in enumerate(le) if e)
                for le in gb.leading_exponents()}
    nv = ideal.ring.nvars
    allvars = range(nv)
    affine = 0
    for size in range(nv, 0, -1):
        found = False
        for S in combinations(allvars, size):
            sset = frozenset(S)
            if not any(sup <= sset for sup in supports):
                found = True
                break
        if found:
            affine = size
            break
    ideal._krull = affine - 1
    return ideal._krull


# -- elimination and saturation ----------------------------------------------


def eliminate_last(ideal: Ideal, count: int) -> Ideal:
    """Intersect with the subring that omits the trailing `count` variables."""
    ring = ideal.ring
    split = ring.nvars - count
    gb = buchberger(ideal, elimination_order(split))
    small = ring.restrict(split)
    keep = []
    for poly in gb.elements:
        if all(not any(e[split:]) for e in poly.terms):
            keep.append(Polynomial(small, {e[:split]: c for e, c in poly.terms.items()},
                                   normalized=True))
    return Ideal(small, keep)


def saturate(ideal: Ideal, f: Polynomial) -> Ideal:
    """I : f^infinity via the 1 - t*f adjunction and elimination of t."""
    if f.is_zero():
        raise ValueError("cannot saturate by zero")
    ring = ideal.ring
    ext = ring.extend([ring.fresh_name("t")])
    lift = [Polynomial(ext, {e + (0,): c for e, c in g.terms.items()}, normalized=True)
            for g in ideal.nonzero_generators()]
    flift = Polynomial(ext, {e + (0,): c for e, c in f.terms.items()}, normalized=True)
    t = ext.var(ext.nvars - 1)
    lift.append(ext.one() - t * flift)
    return eliminate_last(Ideal(ext, lift), 1)


def saturate_variable(ideal: Ideal, v: int) -> tuple[Ideal, bool]:
    """I : x_v^infinity for homogeneous I, via the reverse-lex trick: in a
    grevlex basis with x_v cheapest, dividing each element by its maximal
    x_v power generates the saturation.  Returns (ideal, changed)."""
    ring = ideal.ring
    nv = ring.nvars
    perm = [i for i in range(nv) if i != v] + [v]
    pring = PolyRing([ring.variables[i] for i in perm], ring.p)
    fwd = [
        Polynomial(pring, {tuple(e[i] for i in perm): c for e, c in g.terms.items()},
                   normalized=True)
        for g in ideal.nonzero_generators()
    ]
    gb = buchberger(Ideal(pring, fwd), GREVLEX)
    inv = [perm.index(i) for i in range(nv)]
    changed = False
    out = []
    for poly in gb.elements:
        drop = min(e[nv - 1] for e in poly.terms)
        if drop:
            changed = True
            terms = {e[:nv - 1] + (e[nv - 1] - drop,): c for e, c in poly.terms.items()}
        else:
            terms = poly.terms
        out.append(Polynomial(ring, {tuple(e[inv[i]] for i in range(nv)): c
                                     for e, c in terms.items()}, normalized=True))
    return Ideal(ring, out), changed


def intersect(a: Ideal, b: Ideal) -> Ideal:
    """Ideal intersection via t*a + (1-t)*b and elimination of t."""
    ring = a.ring
    if not ring.compatible(b.ring):
        raise ValueError("ideals live in different rings")
    ext = ring.extend([ring.fresh_name("t")])
    t = ext.var(ext.nvars - 1)
    one_minus_t = ext.one() - t
    gens = []
    for g in a.nonzero_generators():
        gens.append(t * Polynomial(ext, {e + (0,): c for e, c in g.terms.items()},
                                   normalized=True))
    for g in b.nonzero_generators():
        gens.append(one_minus_t * Polynomial(ext, {e + (0,): c for e, c in g.terms.items()},
                                             normalized=True))
    return eliminate_last(Ideal(ext, gens), 1)


def saturate_irrelevant(ideal: Ideal, mode: str = "deterministic", rng=None) -> Ideal:
    """Saturation by the irrelevant ideal (x_0, ..., x_n).

    deterministic: intersection of the per-variable saturations, with an
    early exit as soon as one variable leaves the ideal unchanged (then the
    ideal is already saturated).  generic-linear: a single saturation by a
    random linear form, correct off a measure-zero set of draws.
    """
    if not ideal.nonzero_generators():
        return ideal
    if not ideal.is_homogeneous():
        raise ValueError("irrelevant saturation expects a homogeneous ideal")
    if krull_dimension(ideal) == -1:
        ring = ideal.ring
        return Ideal(ring, [ring.one()])
    if mode == "generic":
        if rng is None:
            raise ValueError("generic saturation needs an rng")
        ell = random_linear_form(ideal.ring, affine=False, rng=rng)
        return saturate(ideal, ell)
    if mode != "deterministic":
        raise ValueError(f"unknown saturation mode {mode!r}")
    parts = []
    base = Ideal(ideal.ring, ideal.groebner(GREVLEX).elements)
    for v in range(ideal.ring.nvars):
        part, changed = saturate_variable(base, v)
        if not changed:
            return base  # x_v-saturated implies irrelevant-saturated
        parts.append(part)
    acc = parts[0]
    for part in parts[1:]:
        acc = intersect(acc, part)
    return Ideal(ideal.ring, acc.groebner(GREVLEX).elements)


# -- assorted ideal arithmetic ------------------------------------------------


def ideal_sum(a: Ideal, b: Ideal) -> Ideal:
    if not a.ring.compatible(b.ring):
        raise ValueError("ideals live in different rings")
    return Ideal(a.ring, a.generators + b.generators)


def ideal_product(a: Ideal, b: Ideal) -> Ideal:
    if not a.ring.compatible(b.ring):
        raise ValueError("ideals live in different rings")
    gens = [f * g for f in a.nonzero_generators() for g in b.nonzero_generators()]
    return Ideal(a.ring, gens)


def jacobian_minors(polys, k: int) -> Ideal:
    """Ideal of all k x k minors of the Jacobian matrix d(f_i)/d(x_j),
    by Laplace expansion with memoized sub-minors."""
    polys = list(polys)
    if not polys:
        raise ValueError("need at least one polynomial")
    ring = polys[0].ring
    nv = ring.nvars
    if k > min(len(polys), nv):
        raise ValueError(f"no {k} x {k} minors in a {len(polys)} x {nv} matrix")
    rows = [[f.derivative(j) for j in range(nv)] for f in polys]
    memo = {}

    def det(ridx, cidx):
        if len(ridx) == 1:
            return rows[ridx[0]][cidx[0]]
        key = (ridx, cidx)
        hit = memo.get(key)
        if hit is not None:
            return hit
        r0 = ridx[0]
        rest = ridx[1:]
        acc = ring.zero()
        for pos, c in enumerate(cidx):
            entry = rows[r0][c]
            if entry.is_zero():
                continue
            sub = det(rest, cidx[:pos] + cidx[pos + 1:])
            if sub.is_zero():
                continue
            term = entry * sub
            acc = acc + term if pos % 2 == 0 else acc - term
        memo[key] = acc
        return acc

    seen = set()
    gens = []
    for ridx in combinations(range(len(polys)), k):
        for cidx in combinations(range(nv), k):
            m = det(ridx, cidx)
            if m.is_zero():
                continue
            fs = frozenset(m.terms.items())
            if fs in seen:
                continue
            seen.add(fs)
            gens.append(m)
    return Ideal(ring, gens)
