"""Command-line front end.

Subcommands:

* ``classify``  - verdict report for a group file,
* ``construct`` - run the construction pipeline and write a certificate
                  plus graph exports,
* ``verify``    - independently check a (graph, group, local group) triple,
* ``report``    - growth table over a range of n.

Group files use the grammar::

    # comment
    degree 5
    (1 2 3)(4 5)
    2 1 3 4 5

one generator per line after the degree line, in cycle notation or as an
image list; ``#`` starts a comment.  Exit codes: 0 success, 1 verification
negative, 2 input error, 3 search exhaustion.

Caps may be overridden through the single environment variable
``GRAPHRESTRICT_CAPS`` (comma-separated ``name=value`` entries with names
``vertices``, ``carrier``, ``copies``, ``attempts``); command-line flags
take precedence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from . import amalgam, classify, cosetgraph, perm
from .completion import SearchConfig
from .cosetgraph import DEFAULT_VERTEX_CAP, FiniteLocallyLPair
from .errors import (CompletionSearchError, GraphRestrictError, InputError,
                     ParseError)
from .perm import PermutationGroup

CERTIFICATE_SCHEMA = "graphrestrict.certificate/1"
CAPS_ENV_VAR = "GRAPHRESTRICT_CAPS"

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_EXHAUSTED = 3


def parse_group_spec(text: str) -> PermutationGroup:
    """Parse the group file grammar; errors carry the offending line."""
    degree = None
    generators = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if degree is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "degree":
                raise ParseError("expected 'degree <m>' as the first entry",
                                 line=no)
            try:
                degree = int(parts[1])
            except ValueError:
                raise ParseError(f"bad degree {parts[1]!r}", line=no) from None
            if degree < 1:
                raise ParseError("degree must be positive", line=no)
            continue
        try:
            generators.append(perm.parse_permutation(line, degree))
        except ParseError as exc:
            raise ParseError(str(exc), line=no) from None
    if degree is None:
        raise ParseError("missing 'degree <m>' line")
    return PermutationGroup(degree, tuple(generators))


def load_group(path: str) -> PermutationGroup:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read group file {path}: {exc}") from None
    return parse_group_spec(text)


def _caps_from_env() -> dict:
    caps = {}
    raw = os.environ.get(CAPS_ENV_VAR, "")
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, value = item.partition("=")
        try:
            caps[name.strip()] = int(value)
        except ValueError:
            raise InputError(f"bad {CAPS_ENV_VAR} entry {item!r}") from None
    return caps


def _search_config(args) -> tuple[SearchConfig, int]:
    caps = _caps_from_env()
    vertex_cap = caps.get("vertices", DEFAULT_VERTEX_CAP)
    carrier_cap = caps.get("carrier", amalgam.DEFAULT_CARRIER_CAP)
    copies = caps.get("copies", 4)
    attempts = caps.get("attempts", 256)
    if getattr(args, "max_vertices", None) is not None:
        vertex_cap = args.max_vertices
    seed = getattr(args, "seed", 0) or 0
    return (SearchConfig(seed=seed, carrier_cap=carrier_cap, max_copies=copies,
                         combo_attempts=attempts), vertex_cap)


def _analysis_dict(analysis: classify.LocalGroupAnalysis) -> dict:
    return {
        "orbits": [list(part) for part in analysis.orbit_parts],
        "orbit_representatives": list(analysis.orbit_reps),
        "stabiliser_orders": list(analysis.stabiliser_orders),
        "k": analysis.k,
        "flags": {
            "transitive": analysis.flags.transitive,
            "semiregular": analysis.flags.semiregular,
            "semiprimitive": analysis.flags.semiprimitive,
        },
        "verdict": analysis.verdict,
    }


def _group_dict(group: PermutationGroup) -> dict:
    return {"degree": group.degree,
            "generators": [g.cycle_string() for g in group.generators]}


def cmd_classify(args) -> int:
    group = load_group(args.group)
    analysis = classify.analyze_local_group(group)
    verdict = classify.restrictive_verdict(analysis)
    if args.json:
        doc = {"schema": "graphrestrict.classify/1",
               "tool_version": __version__,
               "input": _group_dict(group),
               "analysis": _analysis_dict(analysis),
               "message": verdict.message,
               "bound": verdict.bound,
               "growth_base": verdict.growth_base,
               "growth_ratio": verdict.growth_ratio}
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(verdict.message)
        print(f"orbits: {' '.join('{' + ' '.join(map(str, p)) + '}' for p in analysis.orbit_parts)}")
        print(f"orbit representatives: {list(analysis.orbit_reps)}")
        print(f"stabiliser orders: {list(analysis.stabiliser_orders)}")
        if analysis.flags.semiprimitive is not None:
            print(f"semiprimitive: {analysis.flags.semiprimitive}")
    return EXIT_OK


def _certificate(group, result, graph_files) -> dict:
    pair = result.pair
    witness = result.witness
    cert = {
        "schema": CERTIFICATE_SCHEMA,
        "tool_version": __version__,
        "input": _group_dict(group),
        "analysis": _analysis_dict(result.analysis),
        "n": result.star.n,
        "strategy": result.candidate.strategy.descriptor(),
        "carrier": {"points": result.candidate.carrier.degree,
                    "copies": result.candidate.carrier.t},
        "beta": [list(b.images) for b in result.candidate.betas],
        "verification": result.report.as_dict(),
        "graph": {
            "vertices": pair.vertex_count if pair.vertex_count is not None
                        else "implicit",
            "valency": pair.valency,
            "stabiliser_order": pair.stabiliser_order,
            "files": graph_files,
        },
        "local_action": {
            "labels": list(witness.labels),
            "conjugation": list(witness.conjugation.images),
            "kernel_order": witness.kernel_order,
        },
    }
    return cert


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_construct(args) -> int:
    group = load_group(args.group)
    analysis = classify.analyze_local_group(group)
    if analysis.verdict != classify.NOT_RESTRICTIVE:
        verdict = classify.restrictive_verdict(analysis)
        raise InputError(f"construction requires verdict NOT_RESTRICTIVE; "
                         f"this group is {analysis.verdict}: {verdict.message}")
    if args.n < 2:
        raise InputError(f"--n must be at least 2, got {args.n}")
    search, vertex_cap = _search_config(args)

    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise InputError(f"output directory not writable: {exc}") from None

    try:
        result = cosetgraph.construct_pair(group, args.n, search, vertex_cap,
                                           analysis=analysis)
    except CompletionSearchError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_EXHAUSTED

    graph_files = None
    if result.explicit:
        pair: FiniteLocallyLPair = result.pair
        graph_files = {"edge_list": "graph.edgelist",
                       "adjacency_list": "graph.adjlist",
                       "graph6": "graph.g6",
                       "group": "group.gens"}
        (out_dir / "graph.edgelist").write_text(
            cosetgraph.export_graph(pair.graph, "edge-list"))
        (out_dir / "graph.adjlist").write_text(
            cosetgraph.export_graph(pair.graph, "adjacency-list"))
        (out_dir / "graph.g6").write_bytes(
            cosetgraph.export_graph(pair.graph, "graph6") + b"\n")
        lines = [f"degree {pair.graph.vertex_count}"]
        lines += [" ".join(str(q) for q in g.images)
                  for g in pair.action_generators]
        (out_dir / "group.gens").write_text("\n".join(lines) + "\n")

    cert = _certificate(group, result, graph_files)
    (out_dir / "certificate.json").write_text(_dump_json(cert))

    pair = result.pair
    vertices = pair.vertex_count if pair.vertex_count is not None else "implicit"
    print(f"accepted completion: |G| = {result.report.order_g}, "
          f"stabiliser order {pair.stabiliser_order}, valency {pair.valency}, "
          f"vertices {vertices}")
    print(f"certificate: {out_dir / 'certificate.json'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        data = Path(args.graph).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read graph file {args.graph}: {exc}") from None
    graph = cosetgraph.parse_graph(data)
    group = load_group(args.group)
    local = load_group(args.local_group)
    cert = cosetgraph.verify_locally_L(graph, group.generators, local)
    doc = {
        "schema": "graphrestrict.verify/1",
        "tool_version": __version__,
        "vertex_transitive": cert.vertex_transitive,
        "stabiliser_order": cert.stabiliser_order,
        "valency": cert.valency,
        "locally_L": cert.locally_l,
        "witness": list(cert.witness.images) if cert.witness else None,
        "semiregular_bound_ok": cert.semiregular_bound_ok,
        "detail": cert.detail,
    }
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(f"vertex-transitive: {cert.vertex_transitive}")
        print(f"stabiliser order: {cert.stabiliser_order}")
        print(f"valency: {cert.valency}")
        print(f"locally-L: {cert.locally_l}")
        if cert.witness is not None:
            print(f"witness: {cert.witness.cycle_string()}")
        if cert.semiregular_bound_ok is not None:
            print(f"semiregular bound |G_v| <= valency: {cert.semiregular_bound_ok}")
        if cert.detail:
            print(f"detail: {cert.detail}")
    return EXIT_OK if cert.locally_l else EXIT_NEGATIVE


def cmd_report(args) -> int:
    group = load_group(args.group)
    analysis = classify.analyze_local_group(group)
    if analysis.verdict != classify.NOT_RESTRICTIVE:
        raise InputError(f"growth report requires verdict NOT_RESTRICTIVE; "
                         f"this group is {analysis.verdict}")
    if args.n_from > args.n_to:
        rows = []
        table = None
    else:
        search, vertex_cap = _search_config(args)
        table = cosetgraph.growth_report(group, range(args.n_from, args.n_to + 1),
                                         search, vertex_cap)
        rows = table.rows
    if args.json:
        doc = {
            "schema": "graphrestrict.report/1",
            "tool_version": __version__,
            "input": _group_dict(group),
            "growth_base": group.order(),
            "growth_ratio": analysis.stabiliser_orders[0],
            "rows": [
                {"n": r.n, "stabiliser_order": r.stabiliser_order,
                 "order_G": r.order_g,
                 "vertices": (r.vertex_count if r.vertex_count is not None
                              else ("not enumerated" if r.accepted else None)),
                 "V1": list(r.v1) if r.v1 else None,
                 "V2": list(r.v2) if r.v2 else None,
                 "V3": r.v3, "V4": r.v4,
                 "locally_L": r.locally_l, "accepted": r.accepted,
                 "failure": r.failure}
                for r in rows
            ],
        }
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        header = f"{'n':>3} {'|G_v|':>10} {'|G|':>14} {'vertices':>12} {'V1-V4':>6} {'locally-L':>10}"
        print(header)
        for r in rows:
            if not r.accepted:
                print(f"{r.n:>3} {r.stabiliser_order:>10} {'-':>14} {'-':>12} "
                      f"{'-':>6} {'FAILED':>10}  {r.failure}")
                continue
            vs = r.vertex_count if r.vertex_count is not None else "implicit"
            vflags = "".join("+" if ok else "-"
                             for ok in (all(r.v1), all(r.v2), r.v3, r.v4))
            print(f"{r.n:>3} {r.stabiliser_order:>10} {r.order_g:>14} "
                  f"{vs!s:>12} {vflags:>6} {str(r.locally_l):>10}")
    if rows and not all(r.accepted for r in rows):
        return EXIT_EXHAUSTED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphrestrict",
        description="Decide graph-restrictiveness for intransitive permutation "
                    "groups and construct certified finite locally-L pairs.",
        epilog=f"Cap overrides: set {CAPS_ENV_VAR}=vertices=...,carrier=...,"
               "copies=...,attempts=... (flags take precedence).")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="verdict report for a group file")
    p.add_argument("group", help="group file (degree line plus generators)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("construct",
                       help="construct and certify a locally-L pair")
    p.add_argument("group")
    p.add_argument("--n", type=int, required=True,
                   help="growth parameter (at least 2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-vertices", type=int, default=None)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify",
                       help="verify a (graph, group, local group) triple")
    p.add_argument("graph", help="graph file (edge list, adjacency list, or graph6)")
    p.add_argument("group", help="group file of vertex permutations")
    p.add_argument("local_group", help="local group file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="growth table over a range of n")
    p.add_argument("group")
    p.add_argument("--n-from", type=int, required=True)
    p.add_argument("--n-to", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-vertices", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CompletionSearchError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_EXHAUSTED
    except GraphRestrictError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main_entry():  # console-script entry point
    raise SystemExit(main())


if __name__ == "__main__":
    main_entry()
