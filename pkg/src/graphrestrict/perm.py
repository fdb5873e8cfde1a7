"""Exact permutation-group algebra.

Conventions (binding everywhere in this package):

* points are the integers 1..m,
* permutations act on the right, so ``p ** (f * g) == (p ** f) ** g``,
* composition is left-to-right: ``(f * g)(p) == g(f(p))``,
* everything is exact integer arithmetic.

Groups are represented by generators plus a lazily built stabiliser chain
(base and strong generating set) which gives exact order and membership.
The chain construction is the deterministic Schreier-Sims procedure: base
points are first moved points, appended greedily, so identical input always
produces an identical chain.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass

from .errors import CapacityError, InputError, ParseError

DEFAULT_ELEMENT_CAP = 100_000


@functools.total_ordering
class Permutation:
    """An immutable permutation of {1..m}.

    ``images[p-1]`` is the image of the point ``p``.
    """

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(images)
        if not images:
            raise InputError("degree 0 permutations are not allowed")
        if sorted(images) != list(range(1, len(images) + 1)):
            raise InputError(f"not a permutation of 1..{len(images)}: {images}")
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):  # immutability guard
        raise AttributeError("Permutation is immutable")

    @classmethod
    def _raw(cls, images: tuple) -> "Permutation":
        """Unchecked constructor for results that are permutations by
        construction (products, inverses, powers)."""
        p = object.__new__(cls)
        object.__setattr__(p, "images", images)
        return p

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls._raw(tuple(range(1, degree + 1)))

    @classmethod
    def from_cycles(cls, degree: int, cycles) -> "Permutation":
        """Build from a list of cycles of 1-based points, applied left to right."""
        out = cls.identity(degree)
        for cyc in cycles:
            images = list(range(1, degree + 1))
            seen = set()
            for p in cyc:
                if not 1 <= p <= degree:
                    raise InputError(f"point {p} out of range 1..{degree}")
                if p in seen:
                    raise InputError(f"point {p} repeated in cycle {tuple(cyc)}")
                seen.add(p)
            for a, b in zip(cyc, cyc[1:]):
                images[a - 1] = b
            if len(cyc) > 1:
                images[cyc[-1] - 1] = cyc[0]
            out = out * cls(images)
        return out

    def apply(self, point: int) -> int:
        if not 1 <= point <= self.degree:
            raise InputError(f"point {point} out of range 1..{self.degree}")
        return self.images[point - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """self then other."""
        oi = other.images
        if len(oi) != len(self.images):
            raise InputError("degree mismatch in product")
        return Permutation._raw(tuple(oi[i - 1] for i in self.images))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for p, q in enumerate(self.images, start=1):
            inv[q - 1] = p
        return Permutation._raw(tuple(inv))

    def __pow__(self, n: int) -> "Permutation":
        if n < 0:
            return self.inverse() ** (-n)
        out = Permutation.identity(self.degree)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self, by: "Permutation") -> "Permutation":
        """Return ``by^-1 * self * by``."""
        return by.inverse() * self * by

    def is_identity(self) -> bool:
        return all(q == p for p, q in enumerate(self.images, start=1))

    def fixed_points(self):
        return tuple(p for p, q in enumerate(self.images, start=1) if p == q)

    def cycles(self):
        """Nontrivial cycles, each rotated to start at its minimum, sorted."""
        seen = set()
        out = []
        for p in range(1, self.degree + 1):
            if p in seen or self.images[p - 1] == p:
                continue
            cyc = [p]
            q = self.images[p - 1]
            while q != p:
                cyc.append(q)
                seen.add(q)
                q = self.images[q - 1]
            out.append(tuple(cyc))
        return tuple(out)

    def cycle_string(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycs)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({self.cycle_string()}, degree={self.degree})"


_CYCLE_RE = re.compile(r"\(\s*((?:\d+[\s,]*)*)\)")


def parse_permutation(text: str, degree: int) -> Permutation:
    """Parse cycle notation ``(1 2)(4 5)`` or an image list ``2 1 3``.

    The empty cycle ``()`` is the identity.  Image lists must have exactly
    ``degree`` entries.
    """
    s = text.strip()
    if not s:
        raise ParseError("empty permutation")
    if s.startswith("("):
        cycles = []
        pos = 0
        while pos < len(s):
            if s[pos].isspace():
                pos += 1
                continue
            m = _CYCLE_RE.match(s, pos)
            if m is None:
                raise ParseError(f"bad cycle notation {text!r}", column=pos + 1)
            body = m.group(1).replace(",", " ").split()
            if body:
                cycles.append([int(p) for p in body])
            pos = m.end()
        try:
            return Permutation.from_cycles(degree, cycles)
        except InputError as exc:
            raise ParseError(str(exc)) from None
    try:
        images = [int(tok) for tok in s.replace(",", " ").split()]
    except ValueError as exc:
        raise ParseError(f"bad image list {text!r}: {exc}") from None
    if len(images) != degree:
        raise ParseError(f"image list has {len(images)} entries, expected {degree}")
    try:
        return Permutation(images)
    except InputError as exc:
        raise ParseError(str(exc)) from None


class _ChainLevel:
    __slots__ = ("point", "transversal", "inverse_transversal")

    def __init__(self, point: int, degree: int):
        self.point = point
        # orbit point -> representative u with point^u == orbit point
        ident = Permutation.identity(degree)
        self.transversal = {point: ident}
        self.inverse_transversal = {point: ident}


class StabiliserChain:
    """Base and strong generating set for a permutation group.

    ``base`` is the sequence of base points; level ``i`` records the orbit of
    ``base[i]`` under the strong generators fixing ``base[:i]`` pointwise,
    together with a transversal.  The group order is the product of the orbit
    lengths and membership is decided by sifting.
    """

    def __init__(self, degree: int, generators, base_prefix=()):
        self.degree = degree
        self.strong_gens: list[Permutation] = []
        self.levels: list[_ChainLevel] = []
        for p in base_prefix:
            if not 1 <= p <= degree:
                raise InputError(f"base point {p} out of range 1..{degree}")
            self.levels.append(_ChainLevel(p, degree))
        for g in generators:
            if g.degree != degree:
                raise InputError("generator degree mismatch")
            if not g.is_identity() and g not in self.strong_gens:
                self.strong_gens.append(g)
                self._ensure_base_covers(g)
        self._complete()

    # -- construction ---------------------------------------------------

    def _ensure_base_covers(self, g: Permutation) -> None:
        """Append base points until g moves some base point (first moved point rule)."""
        residue = g
        for lev in self.levels:
            if residue.apply(lev.point) != lev.point:
                return
        for p in range(1, self.degree + 1):
            if residue.apply(p) != p:
                self.levels.append(_ChainLevel(p, self.degree))
                return

    def _level_gens(self, i: int) -> list[Permutation]:
        pts = [lev.point for lev in self.levels[:i]]
        return [s for s in self.strong_gens
                if all(s.images[p - 1] == p for p in pts)]

    def _rebuild_orbit(self, i: int) -> None:
        lev = self.levels[i]
        gens = self._level_gens(i)
        ident = Permutation.identity(self.degree)
        lev.transversal = {lev.point: ident}
        lev.inverse_transversal = {lev.point: ident}
        queue = [lev.point]
        while queue:
            p = queue.pop(0)
            u = lev.transversal[p]
            for s in gens:
                q = s.images[p - 1]
                if q not in lev.transversal:
                    rep = u * s
                    lev.transversal[q] = rep
                    lev.inverse_transversal[q] = rep.inverse()
                    queue.append(q)

    def _sift(self, g: Permutation, from_level: int = 0):
        """Return (residue, level) where sifting stopped."""
        h = g
        for i in range(from_level, len(self.levels)):
            lev = self.levels[i]
            img = h.images[lev.point - 1]
            inv = lev.inverse_transversal.get(img)
            if inv is None:
                return h, i
            h = h * inv
        return h, len(self.levels)

    def _complete(self) -> None:
        """Deterministic Schreier-Sims: make every level's Schreier generators
        sift to the identity through the deeper levels."""
        for i in range(len(self.levels)):
            self._rebuild_orbit(i)
        i = len(self.levels) - 1
        while i >= 0:
            self._rebuild_orbit(i)
            lev = self.levels[i]
            gens = self._level_gens(i)
            new_level = None
            for p in sorted(lev.transversal):
                u = lev.transversal[p]
                for s in gens:
                    q = s.images[p - 1]
                    schreier = u * s * lev.inverse_transversal[q]
                    if schreier.is_identity():
                        continue
                    residue, j = self._sift(schreier, i + 1)
                    if residue.is_identity():
                        continue
                    self.strong_gens.append(residue)
                    if j == len(self.levels):
                        for r in range(1, self.degree + 1):
                            if residue.images[r - 1] != r:
                                self.levels.append(_ChainLevel(r, self.degree))
                                break
                    new_level = j
                    break
                if new_level is not None:
                    break
            if new_level is not None:
                for l in range(i, new_level + 1):
                    self._rebuild_orbit(l)
                i = new_level
            else:
                i -= 1

    # -- queries --------------------------------------------------------

    @property
    def base(self):
        return tuple(lev.point for lev in self.levels)

    def order(self) -> int:
        n = 1
        for lev in self.levels:
            n *= len(lev.transversal)
        return n

    def contains(self, g: Permutation) -> bool:
        if g.degree != self.degree:
            return False
        residue, _ = self._sift(g)
        return residue.is_identity()

    def stabiliser_generators(self) -> list[Permutation]:
        """Strong generators fixing the first base point; they generate the
        point stabiliser of ``base[0]`` exactly."""
        if not self.levels:
            return []
        p = self.levels[0].point
        return [s for s in self.strong_gens if s.apply(p) == p]


class PermutationGroup:
    """A finite permutation group given by generators.

    The stabiliser chain is computed on first use and cached; all values are
    immutable afterwards, so instances are safe to share between threads.
    """

    def __init__(self, degree: int, generators=()):
        if degree < 1:
            raise InputError("degree must be a positive integer")
        gens = tuple(generators)
        for g in gens:
            if g.degree != degree:
                raise InputError("generator degree mismatch")
        self.degree = degree
        self.generators = gens
        self._chain: StabiliserChain | None = None
        self._elements: tuple[Permutation, ...] | None = None

    @classmethod
    def trivial(cls, degree: int) -> "PermutationGroup":
        return cls(degree, ())

    def chain(self) -> StabiliserChain:
        if self._chain is None:
            self._chain = StabiliserChain(self.degree, self.generators)
        return self._chain

    def order(self) -> int:
        return self.chain().order()

    def contains(self, g: Permutation) -> bool:
        return self.chain().contains(g)

    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def elements(self, cap: int = DEFAULT_ELEMENT_CAP) -> tuple[Permutation, ...]:
        """All elements, sorted by image tuple (deterministic enumeration
        order).  Computed by breadth-first closure of the generators."""
        if self._elements is None:
            known = {self.identity()}
            frontier = [self.identity()]
            while frontier:
                nxt = []
                for x in frontier:
                    for s in self.generators:
                        y = x * s
                        if y not in known:
                            known.add(y)
                            if len(known) > cap:
                                raise CapacityError("element enumeration cap", cap,
                                                    f"> {cap}")
                            nxt.append(y)
                frontier = nxt
            self._elements = tuple(sorted(known))
        return self._elements

    def orbit(self, point: int) -> tuple[int, ...]:
        if not 1 <= point <= self.degree:
            raise InputError(f"point {point} out of range 1..{self.degree}")
        seen = {point}
        queue = [point]
        while queue:
            p = queue.pop(0)
            for s in self.generators:
                q = s.apply(p)
                if q not in seen:
                    seen.add(q)
                    queue.append(q)
        return tuple(sorted(seen))

    def __repr__(self):
        gens = ", ".join(g.cycle_string() for g in self.generators) or "()"
        return f"PermutationGroup(degree={self.degree}, <{gens}>)"


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------


def orbits(group: PermutationGroup) -> tuple[tuple[int, ...], ...]:
    """Orbit partition of {1..degree}: each part sorted ascending, parts
    ordered by minimal element."""
    remaining = set(range(1, group.degree + 1))
    parts = []
    while remaining:
        p = min(remaining)
        orb = group.orbit(p)
        parts.append(orb)
        remaining.difference_update(orb)
    return tuple(parts)


def build_chain(group: PermutationGroup) -> StabiliserChain:
    return group.chain()


def order(group: PermutationGroup) -> int:
    return group.order()


def contains(group: PermutationGroup, perm: Permutation) -> bool:
    return group.contains(perm)


def point_stabiliser(group: PermutationGroup, point: int) -> PermutationGroup:
    """The subgroup of elements fixing ``point``, at the same degree.

    Built from a stabiliser chain whose first base point is forced to be
    ``point``; the strong generators fixing it generate the stabiliser.
    """
    if not 1 <= point <= group.degree:
        raise InputError(f"point {point} out of range 1..{group.degree}")
    chain = StabiliserChain(group.degree, group.generators, base_prefix=(point,))
    return PermutationGroup(group.degree, tuple(chain.stabiliser_generators()))


@dataclass(frozen=True)
class GroupPredicates:
    is_transitive: bool
    is_semiregular: bool


def predicates(group: PermutationGroup) -> GroupPredicates:
    """Transitivity and semiregularity, by the definitions: one orbit, and
    every point stabiliser trivial."""
    transitive = len(orbits(group)) == 1
    semiregular = all(point_stabiliser(group, p).order() == 1
                      for p in range(1, group.degree + 1))
    return GroupPredicates(transitive, semiregular)


def normal_closure(group: PermutationGroup, element: Permutation) -> PermutationGroup:
    """Smallest normal subgroup of ``group`` containing ``element``: close the
    generating set under conjugation by the group's generators."""
    if not group.contains(element):
        raise InputError("element is not a member of the group")
    if element.is_identity():
        return PermutationGroup.trivial(group.degree)
    closure = [element]
    seen = {element}
    queue = [element]
    while queue:
        x = queue.pop(0)
        for s in group.generators:
            y = x.conjugate(s)
            if y not in seen:
                seen.add(y)
                closure.append(y)
                queue.append(y)
    return PermutationGroup(group.degree, tuple(closure))


def core(group: PermutationGroup, subgroup: PermutationGroup,
         cap: int = DEFAULT_ELEMENT_CAP) -> PermutationGroup:
    """Largest normal subgroup of ``group`` contained in ``subgroup``.

    Computed as the kernel of the action of ``group`` on the right cosets of
    ``subgroup``: an element lies in the kernel iff every transversal
    representative conjugates it back into ``subgroup``.
    """
    if group.degree != subgroup.degree:
        raise InputError("degree mismatch between group and subgroup")
    for g in subgroup.generators:
        if not group.contains(g):
            raise InputError("subgroup is not contained in group")
    sub_elements = subgroup.elements(cap)
    sub_set = set(sub_elements)

    def coset_key(x: Permutation) -> Permutation:
        return min(h * x for h in sub_elements)

    # transversal of right cosets, found by orbiting the trivial coset
    reps = [coset_key(group.identity())]
    keys = {reps[0]}
    queue = list(reps)
    while queue:
        r = queue.pop(0)
        for s in group.generators:
            key = coset_key(r * s)
            if key not in keys:
                keys.add(key)
                reps.append(key)
                queue.append(key)
    kernel = [x for x in sub_elements
              if all(r * x * r.inverse() in sub_set for r in reps)]
    kernel = [x for x in kernel if not x.is_identity()]
    return PermutationGroup(group.degree, tuple(kernel))


def is_semiprimitive(group: PermutationGroup, cap: int = DEFAULT_ELEMENT_CAP) -> bool:
    """True iff every normal subgroup is transitive or semiregular.

    Criterion: every non-identity element with a fixed point must have a
    transitive normal closure.  A normal subgroup violating semiprimitivity
    contains such an element whose closure stays inside it, hence is
    intransitive; conversely an intransitive closure of such an element is
    itself a normal, intransitive, non-semiregular subgroup.
    """
    if group.order() > cap:
        raise CapacityError("semiprimitivity enumeration cap", cap, group.order())
    for x in group.elements(cap):
        if x.is_identity() or not x.fixed_points():
            continue
        closure = normal_closure(group, x)
        if len(orbits(closure)) != 1:
            return False
    return True


def _point_invariants(group: PermutationGroup):
    """(orbit size, stabiliser order, orbit id by minimal element) per point."""
    inv = {}
    n = group.order()
    for orb in orbits(group):
        size = len(orb)
        stab = n // size
        for p in orb:
            inv[p] = (size, stab, orb[0])
    return inv


def permutation_isomorphic(g1: PermutationGroup,
                           g2: PermutationGroup) -> Permutation | None:
    """A bijection sigma of the points with ``sigma^-1 * g1 * sigma == g2`` as
    a set of permutations, or None.

    Backtracking over point images, pruning on orbit size and point
    stabiliser order, with orbit-block consistency; a completed assignment is
    accepted once every generator of g1 conjugates into g2 (orders being
    equal, the conjugated group then coincides with g2).
    """
    if g1.degree != g2.degree:
        return None
    if g1.order() != g2.order():
        return None
    m = g1.degree
    inv1 = _point_invariants(g1)
    inv2 = _point_invariants(g2)
    if sorted(v[:2] for v in inv1.values()) != sorted(v[:2] for v in inv2.values()):
        return None

    orbit_map: dict[int, int] = {}  # g1 orbit id -> g2 orbit id
    sigma = [0] * m
    used = [False] * (m + 1)

    def accept() -> bool:
        s = Permutation(sigma)
        s_inv = s.inverse()
        return all(g2.contains(s_inv * g * s) for g in g1.generators)

    def extend(p: int) -> bool:
        if p > m:
            return accept()
        size1, stab1, oid1 = inv1[p]
        for q in range(1, m + 1):
            if used[q]:
                continue
            size2, stab2, oid2 = inv2[q]
            if (size1, stab1) != (size2, stab2):
                continue
            if oid1 in orbit_map:
                if orbit_map[oid1] != oid2:
                    continue
                added = False
            else:
                if oid2 in orbit_map.values():
                    continue
                orbit_map[oid1] = oid2
                added = True
            sigma[p - 1] = q
            used[q] = True
            if extend(p + 1):
                return True
            used[q] = False
            sigma[p - 1] = 0
            if added:
                del orbit_map[oid1]
        return False

    if extend(1):
        return Permutation(sigma)
    return None
