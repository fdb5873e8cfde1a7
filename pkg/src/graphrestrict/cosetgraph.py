"""Coset graphs of accepted completions, certification, and growth reports.

The graph of a completion has the right cosets of rho(A) in G as vertices;
the neighbours of a coset are the cosets reached through the edge
involutions, ``rho(A) * beta_i * rho(a) * x`` over the edge transversals.
The conditions V1-V4 of the completion make the graph simple, connected,
vertex-transitive and regular of valency equal to the local group's degree,
with vertex stabiliser isomorphic to A.

When the vertex count exceeds the enumeration cap the graph is kept
implicit: the base vertex's neighbourhood and local action are still fully
certified (the action is vertex-transitive by construction, so base-vertex
certification transports everywhere), but exports are disabled.

``verify_locally_L`` is the independent verifier: it takes any graph with a
claimed automorphism group and the local group and checks the locally-L
property from scratch, sharing only the permutation core with the
constructor.
"""

from __future__ import annotations

import dataclasses
import random
from dataclasses import dataclass

from . import amalgam, classify, perm
from .completion import (CompletionCandidate, CompletionReport, SearchConfig,
                         find_completion)
from .errors import (CompletionSearchError, InputError, NotEnumeratedError,
                     ParseError, TheoryViolationError, ValidationError)
from .perm import Permutation, PermutationGroup

DEFAULT_VERTEX_CAP = 1_000_000
_KEY_CHECK_PAIRS = 1000


@dataclass(frozen=True)
class FiniteGraph:
    """A finite simple undirected graph on 0-based vertex ids."""

    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.vertex_count:
            raise InputError("adjacency length does not match vertex count")
        for v, nbrs in enumerate(self.adjacency):
            if tuple(sorted(set(nbrs))) != nbrs:
                raise InputError(f"adjacency of {v} not sorted and duplicate-free")
            for w in nbrs:
                if not 0 <= w < self.vertex_count:
                    raise InputError(f"neighbour {w} out of range")
                if w == v:
                    raise InputError(f"loop at vertex {v}")
                if v not in self.adjacency[w]:
                    raise InputError(f"edge {v}-{w} not symmetric")

    @classmethod
    def from_edges(cls, vertex_count: int, edges) -> "FiniteGraph":
        adj = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if u == v:
                raise InputError(f"loop at vertex {u}")
            adj[u].add(v)
            adj[v].add(u)
        return cls(vertex_count, tuple(tuple(sorted(s)) for s in adj))

    def edges(self):
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return True
        seen = {0}
        queue = [0]
        while queue:
            u = queue.pop(0)
            for v in self.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.vertex_count

    def is_regular(self) -> int | None:
        degrees = {len(nbrs) for nbrs in self.adjacency}
        return degrees.pop() if len(degrees) == 1 else None


@dataclass(frozen=True)
class CosetTable:
    """Canonical representatives and generator transition maps for the right
    cosets of rho(A) in the completed group."""

    representatives: tuple[Permutation, ...]
    index: dict[tuple[int, ...], int]
    transitions: tuple[tuple[int, ...], ...]    # per generator of G

    @property
    def size(self) -> int:
        return len(self.representatives)


def enumerate_cosets(candidate: CompletionCandidate, cap: int = DEFAULT_VERTEX_CAP,
                     report: CompletionReport | None = None,
                     key_check_seed: int = 0) -> CosetTable | None:
    """Enumerate the cosets of rho(A) in G, or None when they exceed ``cap``.

    Each coset is keyed by the image array of its canonical representative
    (the unique coset element sending the basepoint to the least possible
    point).  When the exact vertex count is already known from the group
    order it is compared with the cap up front; the breadth-first orbit also
    aborts incrementally as a safety net.  Key soundness is cross-checked on
    seeded random pairs: equal keys exactly when the quotient lies in rho(A).
    """
    carrier = candidate.carrier
    if report is not None and report.order_g // report.order_a > cap:
        return None
    generators = candidate.group_generators()
    start = carrier.canonical_coset_rep(Permutation.identity(carrier.degree))
    reps = [start]
    index = {start.images: 0}
    transitions: list[list[int]] = [[] for _ in generators]
    frontier = [0]
    while frontier:
        v = frontier.pop(0)
        for gi, g in enumerate(generators):
            target = carrier.canonical_coset_rep(reps[v] * g)
            ti = index.get(target.images)
            if ti is None:
                ti = len(reps)
                if ti >= cap:
                    return None
                reps.append(target)
                index[target.images] = ti
                frontier.append(ti)
            while len(transitions[gi]) <= v:
                transitions[gi].append(-1)
            transitions[gi][v] = ti
    # transitions may be ragged if a generator row was filled late; square up
    table = []
    for gi, g in enumerate(generators):
        row = transitions[gi]
        row.extend(-1 for _ in range(len(reps) - len(row)))
        for v in range(len(reps)):
            if row[v] == -1:
                row[v] = index[carrier.canonical_coset_rep(reps[v] * g).images]
        table.append(tuple(row))

    rng = random.Random(key_check_seed)
    n = len(reps)
    for _ in range(min(_KEY_CHECK_PAIRS, 4 * n)):
        x = reps[rng.randrange(n)]
        y = reps[rng.randrange(n)]
        shifted = carrier.rho_index(rng.randrange(carrier.size)) * x
        if carrier.canonical_coset_rep(shifted).images != x.images:
            raise ValidationError("canonical coset key",
                                  "same coset produced different keys")
        same_key = x.images == y.images
        in_rho = carrier.in_rho(x * y.inverse())
        if same_key != in_rho:
            raise ValidationError("canonical coset key",
                                  "key equality disagrees with membership")
    return CosetTable(tuple(reps), index, tuple(table))


@dataclass(frozen=True)
class LocalActionWitness:
    """Certificate that the base neighbourhood action is the local group.

    ``labels[j]`` is the domain point attached to neighbour slot ``j``;
    transporting the induced slot action through the labels yields exactly
    the local group, and ``conjugation`` is an independently found point
    bijection conjugating the induced group onto it.
    """

    labels: tuple[int, ...]
    conjugation: Permutation
    induced_generators: tuple[Permutation, ...]
    kernel_order: int
    transported_equal: bool


@dataclass(frozen=True)
class FiniteLocallyLPair:
    """An explicit certified pair: the graph, the acting group, and the data
    of its base vertex."""

    graph: FiniteGraph
    action_generators: tuple[Permutation, ...]   # vertex permutations, 1-based
    base_vertex: int
    stabiliser_order: int
    valency: int
    vertex_count: int
    neighbour_slots: tuple[tuple[int, int], ...]  # (edge, transversal element idx)
    base_neighbours: tuple[int, ...]              # vertex ids, slot order
    candidate: CompletionCandidate
    report: CompletionReport
    witness: LocalActionWitness | None = None

    def local_action_group(self) -> PermutationGroup:
        """The stabiliser's induced action on the base neighbour slots."""
        if self.witness is None:
            raise InputError("local action has not been certified yet")
        return PermutationGroup(self.valency, self.witness.induced_generators)


@dataclass(frozen=True)
class BaseLocalCertificate:
    """The implicit form: base-vertex data only, exports disabled."""

    stabiliser_order: int
    valency: int
    vertex_count: None
    neighbour_slots: tuple[tuple[int, int], ...]
    neighbour_keys: tuple[tuple[int, ...], ...]
    candidate: CompletionCandidate
    report: CompletionReport
    witness: LocalActionWitness | None = None


def _neighbour_slots(candidate: CompletionCandidate) -> list[tuple[int, int]]:
    star = candidate.carrier.star
    slots = []
    for i in range(1, star.k + 1):
        for a_idx in star.edge(i).right_transversal:
            slots.append((i, a_idx))
    return slots


def _slot_elements(candidate: CompletionCandidate) -> list[Permutation]:
    carrier = candidate.carrier
    return [candidate.betas[i - 1] * carrier.rho_index(a_idx)
            for i, a_idx in _neighbour_slots(candidate)]


def build_graph(candidate: CompletionCandidate, report: CompletionReport,
                cap: int = DEFAULT_VERTEX_CAP):
    """The coset graph of an accepted completion, explicit when it fits.

    Explicit mode returns a FiniteLocallyLPair with the full graph and the
    acting group as vertex permutations; implicit mode returns a
    BaseLocalCertificate carrying the base vertex's certified data only.
    """
    if not report.accepted:
        raise InputError("completion was not accepted; cannot build the graph")
    carrier = candidate.carrier
    star = carrier.star
    valency = star.local_group.degree
    slots = _neighbour_slots(candidate)
    slot_elems = _slot_elements(candidate)
    table = enumerate_cosets(candidate, cap, report)

    if table is None:
        keys = tuple(carrier.canonical_coset_rep(e).images for e in slot_elems)
        if len(set(keys)) != valency:
            raise TheoryViolationError(
                "base vertex valency defect in implicit mode (V4 should have "
                "excluded this)")
        return BaseLocalCertificate(
            stabiliser_order=star.order, valency=valency, vertex_count=None,
            neighbour_slots=tuple(slots), neighbour_keys=keys,
            candidate=candidate, report=report)

    n = table.size
    edges = set()
    base_neighbours = []
    for v in range(n):
        rep = table.representatives[v]
        nbrs = set()
        for e in slot_elems:
            w = table.index[carrier.canonical_coset_rep(e * rep).images]
            nbrs.add(w)
            if v == 0:
                base_neighbours.append(w)
        if len(nbrs) != valency or v in nbrs:
            raise TheoryViolationError(
                f"vertex {v} has {len(nbrs)} distinct neighbours, expected "
                f"{valency} (V2/V4 should have excluded this)")
        for w in nbrs:
            edges.add((min(v, w), max(v, w)))
    graph = FiniteGraph.from_edges(n, edges)
    if not graph.is_connected():
        raise TheoryViolationError("coset graph is not connected")
    if graph.is_regular() != valency:
        raise TheoryViolationError("coset graph is not regular of the right valency")

    action = tuple(Permutation(tuple(row[v] + 1 for v in range(n)))
                   for row in table.transitions)
    if report.order_g != star.order * n:
        raise TheoryViolationError("orbit-stabiliser identity failed")
    return FiniteLocallyLPair(
        graph=graph, action_generators=action, base_vertex=0,
        stabiliser_order=star.order, valency=valency, vertex_count=n,
        neighbour_slots=tuple(slots), base_neighbours=tuple(base_neighbours),
        candidate=candidate, report=report)


def local_action(pair, local_group: PermutationGroup) -> LocalActionWitness:
    """Certify the base vertex's neighbourhood action against the local group.

    The induced permutation of the neighbour slots under each generator of
    the vertex stabiliser is computed from coset identities on the carrier
    (independent of the labelling theory); the slot labels come from the
    radius-1 model.  The transported action must equal the local group
    exactly as a permutation set, and a conjugating witness bijection is
    found independently.
    """
    candidate: CompletionCandidate = pair.candidate
    carrier = candidate.carrier
    star = carrier.star
    if star.local_group.degree != local_group.degree:
        raise InputError("local group degree mismatch")
    slots = _neighbour_slots(candidate)
    slot_elems = _slot_elements(candidate)
    keys = [carrier.canonical_coset_rep(e).images for e in slot_elems]
    key_to_slot = {k: j for j, k in enumerate(keys)}
    if len(key_to_slot) != len(slots):
        raise TheoryViolationError("neighbour slots are not distinct cosets")

    def induced(element_index: int) -> Permutation:
        g = carrier.rho_index(element_index)
        images = []
        for e in slot_elems:
            key = carrier.canonical_coset_rep(e * g).images
            j = key_to_slot.get(key)
            if j is None:
                raise TheoryViolationError(
                    "stabiliser element moved a base neighbour outside the "
                    "neighbourhood")
            images.append(j + 1)
        return Permutation(images)

    gens = [induced(star.index[g]) for g in carrier.generator_elements]

    model = amalgam.local_model(star)
    labels = model.labels
    if tuple(slots) != model.slots:
        raise TheoryViolationError("slot order differs from the radius-1 model")

    label_perm = Permutation(labels)  # slot j+1 -> domain point labels[j]
    transported = [label_perm.inverse() * g * label_perm for g in gens]
    ok = all(local_group.contains(t) for t in transported)
    induced_group = PermutationGroup(len(slots), tuple(gens))
    ok = ok and induced_group.order() == local_group.order()

    kernel = sum(1 for ia in range(star.order)
                 if induced(ia).is_identity())
    expected_kernel = star.anchor_stabiliser_order ** star.n
    if kernel != expected_kernel:
        raise TheoryViolationError(
            f"base local-action kernel has order {kernel}, expected "
            f"{expected_kernel}")
    if not ok:
        raise TheoryViolationError(
            "transported neighbourhood action differs from the local group")

    conj = perm.permutation_isomorphic(induced_group, local_group)
    if conj is None:
        raise TheoryViolationError(
            "no conjugating witness although the transported action matches")
    return LocalActionWitness(labels=labels, conjugation=conj,
                              induced_generators=tuple(gens),
                              kernel_order=kernel, transported_equal=ok)


# ---------------------------------------------------------------------------
# the independent verifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairCertificate:
    vertex_transitive: bool
    stabiliser_order: int
    valency: int
    locally_l: bool
    witness: Permutation | None
    semiregular_bound_ok: bool | None   # stab order <= valency, when L semiregular
    detail: str


def verify_locally_L(graph: FiniteGraph, generators,
                     local_group: PermutationGroup) -> PairCertificate:
    """Check a claimed pair from scratch.

    Verifies the generators are automorphisms, the vertex action is
    transitive, computes the stabiliser of vertex 0 by a stabiliser chain
    based there, induces its action on the neighbourhood, and searches for a
    permutation isomorphism onto the local group.  Shares only the
    permutation core with the construction pipeline.
    """
    n = graph.vertex_count
    gens = tuple(generators)
    for idx, g in enumerate(gens):
        if g.degree != n:
            raise InputError(f"generator {idx + 1} acts on {g.degree} points, "
                             f"graph has {n} vertices")
        for u, v in graph.edges():
            gu, gv = g.apply(u + 1) - 1, g.apply(v + 1) - 1
            if gu not in graph.adjacency[gv]:
                raise InputError(
                    f"generator {idx + 1} ({g.cycle_string()}) is not an "
                    f"automorphism: edge {u}-{v} maps to non-edge {gu}-{gv}")
    if not graph.is_connected():
        raise InputError("graph is not connected")

    group = PermutationGroup(n, gens)
    chain = perm.StabiliserChain(n, gens, base_prefix=(1,))
    orbit_size = len(chain.levels[0].transversal) if chain.levels else 1
    transitive = orbit_size == n
    stab_gens = tuple(chain.stabiliser_generators())
    stab_order = 1
    for lev in chain.levels[1:]:
        stab_order *= len(lev.transversal)

    neighbours = graph.adjacency[0]
    valency = len(neighbours)
    slot_of = {v: j + 1 for j, v in enumerate(neighbours)}
    induced = []
    for g in stab_gens:
        images = [slot_of[g.apply(v + 1) - 1] for v in neighbours]
        induced.append(Permutation(images) if valency else None)
    induced_group = PermutationGroup(valency, tuple(induced)) if valency else None

    witness = None
    locally_l = False
    detail = ""
    if not transitive:
        detail = "vertex action is not transitive"
    elif valency != local_group.degree:
        detail = (f"valency {valency} differs from local group degree "
                  f"{local_group.degree}")
    else:
        witness = perm.permutation_isomorphic(induced_group, local_group)
        locally_l = witness is not None
        if not locally_l:
            detail = ("induced neighbourhood action is not permutation "
                      "isomorphic to the local group")

    bound_ok = None
    if perm.predicates(local_group).is_semiregular:
        bound_ok = stab_order <= valency
        if not bound_ok:
            detail = (detail + "; " if detail else "") + (
                f"stabiliser order {stab_order} exceeds valency {valency} "
                "although the local group is semiregular")

    assert group.order() == stab_order * orbit_size
    return PairCertificate(transitive, stab_order, valency, locally_l,
                           witness, bound_ok, detail)


# ---------------------------------------------------------------------------
# end-to-end pipeline and growth reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstructionResult:
    analysis: classify.LocalGroupAnalysis
    star: amalgam.AmalgamStar
    validation: amalgam.StarValidation
    candidate: CompletionCandidate
    report: CompletionReport
    pair: FiniteLocallyLPair | BaseLocalCertificate
    witness: LocalActionWitness

    @property
    def explicit(self) -> bool:
        return isinstance(self.pair, FiniteLocallyLPair)


def construct_pair(local_group: PermutationGroup, n: int,
                   search: SearchConfig = SearchConfig(),
                   vertex_cap: int = DEFAULT_VERTEX_CAP,
                   analysis: classify.LocalGroupAnalysis | None = None
                   ) -> ConstructionResult:
    """Full pipeline: analyse, build and validate the star, find a
    completion, build the graph, certify the local action."""
    if analysis is None:
        analysis = classify.analyze_local_group(local_group)
    star = amalgam.build_star(analysis, n, search.carrier_cap)
    validation = amalgam.validate_star(star)
    candidate, report = find_completion(star, search)
    pair = build_graph(candidate, report, vertex_cap)
    witness = local_action(pair, local_group)
    pair = dataclasses.replace(pair, witness=witness)
    return ConstructionResult(analysis, star, validation, candidate, report,
                              pair, witness)


@dataclass(frozen=True)
class GrowthRow:
    n: int
    stabiliser_order: int
    order_g: int | None
    vertex_count: int | None        # None = not enumerated
    v1: tuple[bool, ...] | None
    v2: tuple[bool, ...] | None
    v3: bool | None
    v4: bool | None
    locally_l: bool
    accepted: bool
    failure: str | None


@dataclass(frozen=True)
class GrowthTable:
    local_group_order: int
    growth_ratio: int
    rows: tuple[GrowthRow, ...]

    @property
    def all_accepted(self) -> bool:
        return all(r.accepted for r in self.rows)


def growth_report(local_group: PermutationGroup, n_values,
                  search: SearchConfig = SearchConfig(),
                  vertex_cap: int = DEFAULT_VERTEX_CAP) -> GrowthTable:
    """One certified construction per n; failed rows are recorded and the
    remaining rows still attempted.  The stabiliser column is exactly
    |L| * s^n, hence strictly increasing."""
    analysis = classify.analyze_local_group(local_group)
    if analysis.verdict != classify.NOT_RESTRICTIVE:
        raise InputError("growth report requires an intransitive "
                         f"non-semiregular group (verdict {analysis.verdict})")
    ratio = analysis.stabiliser_orders[0]
    base = local_group.order()
    rows = []
    for n in n_values:
        try:
            result = construct_pair(local_group, n, search, vertex_cap,
                                    analysis=analysis)
        except (CompletionSearchError, InputError, ValidationError) as exc:
            rows.append(GrowthRow(n, base * ratio ** n, None, None,
                                  None, None, None, None,
                                  locally_l=False, accepted=False,
                                  failure=str(exc).splitlines()[0]))
            continue
        rep = result.report
        rows.append(GrowthRow(
            n=n, stabiliser_order=result.pair.stabiliser_order,
            order_g=rep.order_g, vertex_count=result.pair.vertex_count,
            v1=rep.v1, v2=rep.v2, v3=rep.v3, v4=rep.v4,
            locally_l=result.witness.transported_equal,
            accepted=rep.accepted, failure=None))
    accepted_orders = [r.stabiliser_order for r in rows]
    if any(b <= a for a, b in zip(accepted_orders, accepted_orders[1:])):
        raise TheoryViolationError("stabiliser column is not strictly increasing")
    return GrowthTable(base, ratio, tuple(rows))


# ---------------------------------------------------------------------------
# graph text formats
# ---------------------------------------------------------------------------


def _graph6_bytes(n: int) -> bytes:
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes([126, (n >> 12) + 63, ((n >> 6) & 63) + 63, (n & 63) + 63])
    if n <= 68719476735:
        return bytes([126, 126] + [((n >> s) & 63) + 63
                                   for s in (30, 24, 18, 12, 6, 0)])
    raise InputError("graph too large for the graph6 format")


def export_graph(graph, fmt: str):
    """Byte-exact exports: ``edge-list`` (sorted "u v" lines),
    ``adjacency-list`` ("v: n1 n2 ..."), or ``graph6``.

    Accepts a FiniteGraph or an explicit pair; an implicit base-local
    certificate has no enumerated graph and raises NotEnumeratedError.
    """
    if isinstance(graph, BaseLocalCertificate):
        raise NotEnumeratedError("graph")
    if isinstance(graph, FiniteLocallyLPair):
        graph = graph.graph
    if fmt == "edge-list":
        return "".join(f"{u} {v}\n" for u, v in sorted(graph.edges()))
    if fmt == "adjacency-list":
        return "".join(f"{v}: {' '.join(str(w) for w in nbrs)}".rstrip() + "\n"
                       for v, nbrs in enumerate(graph.adjacency))
    if fmt == "graph6":
        n = graph.vertex_count
        bits = []
        for col in range(1, n):
            col_adj = graph.adjacency[col]
            for row in range(col):
                bits.append(1 if row in col_adj else 0)
        while len(bits) % 6:
            bits.append(0)
        data = bytearray(_graph6_bytes(n))
        for i in range(0, len(bits), 6):
            chunk = 0
            for b in bits[i:i + 6]:
                chunk = (chunk << 1) | b
            data.append(chunk + 63)
        return bytes(data)
    raise InputError(f"unknown graph format {fmt!r}")


def _parse_graph6(data: bytes) -> FiniteGraph:
    if data.startswith(b">>graph6<<"):
        data = data[10:]
    data = data.strip()
    if not data:
        raise ParseError("empty graph6 data")
    pos = 0
    if data[0] == 126:
        if len(data) > 1 and data[1] == 126:
            n = 0
            for b in data[2:8]:
                n = (n << 6) | (b - 63)
            pos = 8
        else:
            n = 0
            for b in data[1:4]:
                n = (n << 6) | (b - 63)
            pos = 4
    else:
        n = data[0] - 63
        pos = 1
    bits = []
    for b in data[pos:]:
        if not 63 <= b <= 126:
            raise ParseError(f"invalid graph6 byte {b}")
        bits.extend((b - 63) >> s & 1 for s in (5, 4, 3, 2, 1, 0))
    edges = []
    i = 0
    for col in range(1, n):
        for row in range(col):
            if i < len(bits) and bits[i]:
                edges.append((row, col))
            i += 1
    return FiniteGraph.from_edges(n, edges)


def parse_graph(text_or_bytes) -> FiniteGraph:
    """Parse edge-list, adjacency-list, or graph6 input, by content."""
    if isinstance(text_or_bytes, bytes):
        try:
            text = text_or_bytes.decode("ascii")
        except UnicodeDecodeError:
            return _parse_graph6(text_or_bytes)
    else:
        text = text_or_bytes
    lines = [ln for ln in (l.strip() for l in text.splitlines()) if ln]
    if not lines:
        raise ParseError("empty graph file")
    if all(":" in ln for ln in lines):
        adj: dict[int, list[int]] = {}
        for no, ln in enumerate(lines, start=1):
            head, _, rest = ln.partition(":")
            try:
                v = int(head)
                nbrs = [int(tok) for tok in rest.split()]
            except ValueError:
                raise ParseError(f"bad adjacency line {ln!r}", line=no) from None
            adj[v] = nbrs
        n = max(adj) + 1 if adj else 0
        edges = {(min(v, w), max(v, w)) for v, nbrs in adj.items() for w in nbrs}
        return FiniteGraph.from_edges(n, edges)
    if all(len(ln.split()) == 2 and all(t.isdigit() for t in ln.split())
           for ln in lines):
        edges = [tuple(int(t) for t in ln.split()) for ln in lines]
        n = max(max(e) for e in edges) + 1
        return FiniteGraph.from_edges(n, edges)
    if len(lines) == 1:
        return _parse_graph6(lines[0].encode("ascii"))
    raise ParseError("unrecognized graph format")
