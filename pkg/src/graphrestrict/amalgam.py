"""Structured element algebra for the star amalgam.

Given an intransitive, non-semiregular local group L with orbit
representatives r_1..r_k (r_1 the anchor, whose stabiliser S is nontrivial)
and an integer n >= 2, the star consists of

* the product group  A = L x S^n,  stored as explicit (head, tail) tuples,
* for each edge i the subgroup  C_i = { a in A : head(a) fixes r_i },
* an order-2 twist automorphism phi_i of C_i:
    - edge 1: full reversal of the n+1 coordinates (head, tail_1..tail_n),
      legal because members of C_1 have their head inside S,
    - edge 2: reversal of the tail, head fixed,
    - edges 3..k: the identity,
* the extension of C_i by a flip of order 2 acting as phi_i.

Elements of A are stored in a fixed enumeration (lexicographic by head then
tail, both in sorted-element order), which makes every transversal and every
certificate deterministic.  Right cosets of C_i in A are classified by the
image of r_i under the head, left cosets by the image under the inverse
head; both facts are used for transversals throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import classify, perm
from .errors import CapacityError, InputError, TheoryViolationError, ValidationError
from .perm import Permutation, PermutationGroup

DEFAULT_CARRIER_CAP = 10_000

FULL_REVERSAL = "full-reversal"
TAIL_REVERSAL = "tail-reversal"
IDENTITY_TWIST = "identity"


@dataclass(frozen=True)
class StarElement:
    """An element of the product group A: a head in L and n tail entries in S."""

    head: Permutation
    tail: tuple[Permutation, ...]

    def __mul__(self, other: "StarElement") -> "StarElement":
        return StarElement(self.head * other.head,
                           tuple(a * b for a, b in zip(self.tail, other.tail)))

    def inverse(self) -> "StarElement":
        return StarElement(self.head.inverse(),
                           tuple(t.inverse() for t in self.tail))

    def is_identity(self) -> bool:
        return self.head.is_identity() and all(t.is_identity() for t in self.tail)

    def __repr__(self):
        tails = ", ".join(t.cycle_string() for t in self.tail)
        return f"({self.head.cycle_string()}; {tails})"


@dataclass(frozen=True)
class EdgeElement:
    """An element of the edge extension: a base element of C_i and a flip bit.

    Multiplication is (c, e)(c', e') = (c * phi_i^e(c'), e xor e'); the flip
    squares to the identity and conjugation by it realises phi_i.
    """

    edge: int
    base: StarElement
    flip: int


class EdgeTwist:
    """Descriptor of the order-2 automorphism attached to one edge."""

    def __init__(self, edge: int, n: int):
        self.edge = edge
        self.n = n
        if edge == 1:
            self.kind = FULL_REVERSAL
        elif edge == 2:
            self.kind = TAIL_REVERSAL
        else:
            self.kind = IDENTITY_TWIST

    def apply(self, elem: StarElement) -> StarElement:
        if self.kind == FULL_REVERSAL:
            coords = (elem.head,) + elem.tail
            rev = coords[::-1]
            return StarElement(rev[0], rev[1:])
        if self.kind == TAIL_REVERSAL:
            return StarElement(elem.head, elem.tail[::-1])
        return elem

    @property
    def is_identity(self) -> bool:
        return self.kind == IDENTITY_TWIST

    def __repr__(self):
        return f"EdgeTwist(edge={self.edge}, {self.kind})"


@dataclass(frozen=True)
class EdgeData:
    index: int                       # 1-based edge number
    orbit_rep: int                   # the point r_i
    twist: EdgeTwist
    subgroup_indices: tuple[int, ...]          # element indices of C_i
    subgroup_order: int
    coset_index: int                           # |A : C_i| = orbit length of r_i
    right_transversal: tuple[int, ...]         # element index per right coset
    right_coset_points: tuple[int, ...]        # image of r_i labelling each right coset
    left_transversal: tuple[int, ...]          # element index per left coset
    left_coset_points: tuple[int, ...]


class AmalgamStar:
    """The fully enumerated star: A, the C_i with their twists, transversals."""

    def __init__(self, analysis: classify.LocalGroupAnalysis, n: int,
                 elements: tuple[StarElement, ...], edges: tuple[EdgeData, ...]):
        self.analysis = analysis
        self.n = n
        self.elements = elements
        self.index = {e: i for i, e in enumerate(elements)}
        self.edges = edges
        self.order = len(elements)
        self.identity = elements[0]
        assert self.identity.is_identity()

    @property
    def local_group(self) -> PermutationGroup:
        return self.analysis.source

    @property
    def anchor_stabiliser_order(self) -> int:
        return self.analysis.stabiliser_orders[0]

    @property
    def k(self) -> int:
        return self.analysis.k

    def edge(self, i: int) -> EdgeData:
        if not 1 <= i <= len(self.edges):
            raise InputError(f"edge index {i} out of range 1..{len(self.edges)}")
        return self.edges[i - 1]

    def in_edge_subgroup(self, i: int, elem: StarElement) -> bool:
        rep = self.edge(i).orbit_rep
        return elem.head.apply(rep) == rep

    def right_coset_point(self, i: int, elem: StarElement) -> int:
        """Key of the right coset C_i * elem: the image of r_i under the head."""
        return elem.head.apply(self.edge(i).orbit_rep)

    def left_coset_point(self, i: int, elem: StarElement) -> int:
        """Key of the left coset elem * C_i: the image of r_i under the inverse head."""
        return elem.head.inverse().apply(self.edge(i).orbit_rep)

    def generators(self) -> tuple[StarElement, ...]:
        """Generators of A: the local group's generators lifted to the head,
        plus each stabiliser generator in each tail slot."""
        L = self.local_group
        stab = self.analysis.anchor_stabiliser
        ident_head = L.identity()
        ident_tail = tuple(ident_head for _ in range(self.n))
        gens = [StarElement(g, ident_tail) for g in L.generators]
        for slot in range(self.n):
            for s in stab.generators:
                tail = list(ident_tail)
                tail[slot] = s
                gens.append(StarElement(ident_head, tuple(tail)))
        return tuple(gens)

    def __repr__(self):
        return (f"AmalgamStar(|A|={self.order}, n={self.n}, k={self.k}, "
                f"degree={self.local_group.degree})")


def build_star(analysis: classify.LocalGroupAnalysis, n: int,
               carrier_cap: int = DEFAULT_CARRIER_CAP) -> AmalgamStar:
    """Enumerate A = L x S^n and the edge data for each orbit representative."""
    if analysis.verdict != classify.NOT_RESTRICTIVE:
        raise InputError("construction requires intransitive non-semiregular L "
                         f"(verdict is {analysis.verdict})")
    if n < 2:
        raise InputError(f"n must be at least 2, got {n}")
    L = analysis.source
    stab = analysis.anchor_stabiliser
    total = L.order() * stab.order() ** n
    if total > carrier_cap:
        raise CapacityError("carrier cap", carrier_cap, total)

    head_elements = L.elements()
    tail_elements = stab.elements()
    elements = tuple(StarElement(head, tails)
                     for head in head_elements
                     for tails in itertools.product(tail_elements, repeat=n))
    assert len(elements) == total
    index = {e: i for i, e in enumerate(elements)}

    edges = []
    for i, rep in enumerate(analysis.orbit_reps, start=1):
        members = tuple(idx for idx, e in enumerate(elements)
                        if e.head.apply(rep) == rep)
        right_seen: dict[int, int] = {}
        left_seen: dict[int, int] = {}
        for idx, e in enumerate(elements):
            rp = e.head.apply(rep)
            if rp not in right_seen:
                right_seen[rp] = idx
            lp = e.head.inverse().apply(rep)
            if lp not in left_seen:
                left_seen[lp] = idx
        orbit_len = len(L.orbit(rep))
        if len(right_seen) != orbit_len or len(left_seen) != orbit_len:
            raise ValidationError("coset count", f"edge {i}")
        # cosets ordered by the minimal element index of the coset
        right_items = sorted(right_seen.items(), key=lambda kv: kv[1])
        left_items = sorted(left_seen.items(), key=lambda kv: kv[1])
        edges.append(EdgeData(
            index=i,
            orbit_rep=rep,
            twist=EdgeTwist(i, n),
            subgroup_indices=members,
            subgroup_order=len(members),
            coset_index=orbit_len,
            right_transversal=tuple(idx for _, idx in right_items),
            right_coset_points=tuple(p for p, _ in right_items),
            left_transversal=tuple(idx for _, idx in left_items),
            left_coset_points=tuple(p for p, _ in left_items),
        ))
        if total // len(members) != orbit_len:
            raise ValidationError("index identity |A:C_i| = |L:L_i|", f"edge {i}")
    return AmalgamStar(analysis, n, elements, tuple(edges))


def phi(star: AmalgamStar, i: int, elem: StarElement) -> StarElement:
    """Apply the edge twist phi_i; the element must lie in C_i."""
    if elem not in star.index:
        raise InputError("element does not belong to A")
    if not star.in_edge_subgroup(i, elem):
        raise InputError(f"element is not in the edge subgroup C_{i}")
    return star.edge(i).twist.apply(elem)


def star_multiply(star: AmalgamStar, side, u, v):
    """Multiply in the named group: side 'A', or 'B1'/'B2'/... for an edge
    extension."""
    if side == "A":
        if not (isinstance(u, StarElement) and isinstance(v, StarElement)):
            raise InputError("A-side multiplication needs StarElements")
        if u not in star.index or v not in star.index:
            raise InputError("element does not belong to A")
        return u * v
    if isinstance(side, str) and side.startswith("B"):
        i = int(side[1:])
    else:
        raise InputError(f"unknown side {side!r}; expected 'A' or 'B<i>'")
    if not (isinstance(u, EdgeElement) and isinstance(v, EdgeElement)):
        raise InputError("B-side multiplication needs EdgeElements")
    if u.edge != i or v.edge != i:
        raise InputError("edge index mismatch")
    for w in (u, v):
        if w.base not in star.index or not star.in_edge_subgroup(i, w.base):
            raise InputError(f"base element is not in C_{i}")
        if w.flip not in (0, 1):
            raise InputError("flip bit must be 0 or 1")
    right = phi(star, i, v.base) if u.flip else v.base
    return EdgeElement(i, u.base * right, u.flip ^ v.flip)


@dataclass(frozen=True)
class StarValidation:
    checks: tuple[str, ...]
    core_size: int
    edge_subgroup_orders: tuple[int, ...]
    coset_indices: tuple[int, ...]


def validate_star(star: AmalgamStar) -> StarValidation:
    """Verify the structural facts the downstream construction relies on.

    Checks, raising ValidationError naming the first failure:
      (a) each twist squares to the identity on all of C_i,
      (b) each twist is multiplicative on C_i,
      (c) the index identities |B_i:C_i| = 2 and |A:C_i| = |L:L_i|,
      (d) the intersection of all C_i has core {head = identity} in A,
          of size |S|^n (brute-force over conjugates),
      (e) the two reversal twists generate a transitive permutation group on
          the n+1 coordinate positions (this is what later forces cores of
          the completed group to be trivial).
    """
    checks = []
    elements = star.elements
    for edge in star.edges:
        members = [elements[idx] for idx in edge.subgroup_indices]
        tw = edge.twist
        for c in members:
            if tw.apply(tw.apply(c)) != c:
                raise ValidationError("twist involution", f"edge {edge.index}")
        checks.append(f"phi_{edge.index}^2 = identity on C_{edge.index}")
        for c in members:
            for d in members:
                if tw.apply(c * d) != tw.apply(c) * tw.apply(d):
                    raise ValidationError("twist multiplicative",
                                          f"edge {edge.index}")
        checks.append(f"phi_{edge.index} multiplicative")
        expected_index = len(star.local_group.orbit(edge.orbit_rep))
        if star.order // edge.subgroup_order != expected_index:
            raise ValidationError("index identity", f"edge {edge.index}")
        if edge.coset_index != expected_index:
            raise ValidationError("coset index", f"edge {edge.index}")
        checks.append(f"|A:C_{edge.index}| = {expected_index}, |B:C| = 2")

    # (d) brute-force core of the intersection of the edge subgroups
    inter = [e for e in elements
             if all(star.in_edge_subgroup(i, e) for i in range(1, star.k + 1))]
    inter_set = set(inter)
    core = [d for d in inter
            if all((a * d) * a.inverse() in inter_set for a in elements)]
    expected_core = {e for e in elements if e.head.is_identity()}
    if set(core) != expected_core:
        raise ValidationError("core of edge-subgroup intersection",
                              f"got {len(core)} elements, "
                              f"expected {len(expected_core)}")
    expected_size = star.anchor_stabiliser_order ** star.n
    if len(core) != expected_size:
        raise ValidationError("core size", f"{len(core)} != {expected_size}")
    checks.append(f"core of intersection = 1 x S^n of size {expected_size}")

    # (e) transitivity of the two reversals on coordinate positions
    m = star.n + 1
    full = Permutation(tuple(range(m, 0, -1)))
    tail_only = Permutation((1,) + tuple(range(m, 1, -1)))
    pos_group = PermutationGroup(m, (full, tail_only))
    if len(pos_group.orbit(1)) != m:
        raise ValidationError("reversals transitive on coordinate positions")
    checks.append("reversals act transitively on the n+1 coordinate positions")

    return StarValidation(tuple(checks), len(core),
                          tuple(e.subgroup_order for e in star.edges),
                          tuple(e.coset_index for e in star.edges))


@dataclass(frozen=True)
class LocalModel:
    """The neighbourhood of the base vertex, seen from inside A.

    Slots are the right cosets of the C_i, ordered by (edge, transversal
    order); ``labels[j]`` is the point of the local group's domain attached
    to slot ``j``.  The slot action of an element of A is right
    multiplication on cosets, and its kernel is exactly the head-trivial
    subgroup 1 x S^n.
    """

    slots: tuple[tuple[int, int], ...]   # (edge index, rep element index)
    labels: tuple[int, ...]
    kernel_size: int

    @property
    def size(self) -> int:
        return len(self.slots)


def local_model(star: AmalgamStar) -> LocalModel:
    """Build and certify the radius-1 model of the base vertex."""
    slots = []
    labels = []
    for edge in star.edges:
        for rep_idx in edge.right_transversal:
            rep = star.elements[rep_idx]
            slots.append((edge.index, rep_idx))
            labels.append(rep.head.apply(edge.orbit_rep))
    degree = star.local_group.degree
    if sorted(labels) != list(range(1, degree + 1)):
        raise TheoryViolationError(
            "the coset labelling is not a bijection onto the domain; "
            "this indicates a bug, not an input condition")

    kernel = [a for a in star.elements
              if all(star.right_coset_point(i, star.elements[rep_idx] * a)
                     == star.right_coset_point(i, star.elements[rep_idx])
                     for i, rep_idx in slots)]
    expected = {e for e in star.elements if e.head.is_identity()}
    if set(kernel) != expected:
        raise TheoryViolationError("slot-action kernel differs from 1 x S^n")
    return LocalModel(tuple(slots), tuple(labels), len(kernel))


def slot_action(star: AmalgamStar, model: LocalModel,
                elem: StarElement) -> Permutation:
    """The permutation of the model's slots induced by right multiplication."""
    point_to_slot = {}
    for j, (i, rep_idx) in enumerate(model.slots):
        point_to_slot[(i, model.labels[j])] = j
    images = [0] * model.size
    for j, (i, rep_idx) in enumerate(model.slots):
        moved = star.right_coset_point(i, star.elements[rep_idx] * elem)
        images[j] = point_to_slot[(i, moved)] + 1
    return Permutation(images)
