"""Command-line surface: graph I/O, prediction, loci, covers, selection, evaluation.

All randomness flows from the single --seed flag through named substreams,
one per consumer (generation, summarization, Gibbs draws, per-trial
selection), so subcommands are byte-deterministic given identical inputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import zlib

import numpy as np

from . import frechet, graphs
from . import locus as locus_mod
from .active import gibbs_sample_classes, run_selection
from .errors import BudgetExceededError, ValidationError
from .evaluate import compare_policies, evaluate, simplex_regions

EDGE_LIST_EXAMPLE = """\
edge list (TSV, optional '#labels:' header restricting Y):
    #labels: 0,2
    0\t1
    1\t2\t2.5
"""

PROBS_EXAMPLE = """\
probability/logit matrix (CSV; header = observed class ids):
    0,2
    0.5,0.5
    0.9,0.1
"""

PREDICTIONS_EXAMPLE = """\
predictions (CSV):
    sample_index,canonical_label,tie_set_size
    0,1,1
    1,0,1
"""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _stream_seed(seed: int, name: str) -> int:
    return int(np.random.SeedSequence([seed, zlib.crc32(name.encode())]).generate_state(1)[0])


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_space(path: str, embeddings: bool) -> graphs.LabelSpace:
    if embeddings:
        return graphs.space_from_embeddings(graphs.load_embeddings_csv(_read(path)))
    return graphs.LabelSpace.from_graph(graphs.load_edge_list(_read(path)))


def _parse_ids(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise ValidationError(f"malformed id list {text!r}; expected e.g. '0,2,5'") from None


def _fmt(x: float) -> str:
    return repr(float(x))


def _read_prob_matrix(path: str, observed: tuple[int, ...] | None):
    """Probability matrix CSV: a header row of observed class ids, then one
    row of floats per sample.  --lambda, when given, must match the header."""
    lines = [ln.strip() for ln in _read(path).splitlines() if ln.strip()]
    if len(lines) < 2:
        raise ValidationError(f"{path}: need a header row of class ids plus data rows")
    try:
        anchors = tuple(int(tok) for tok in lines[0].split(","))
    except ValueError:
        raise ValidationError(
            f"{path} line 1: expected a header row of integer class ids"
        ) from None
    if observed is not None and tuple(observed) != anchors:
        raise ValidationError(
            f"--lambda {list(observed)} does not match the matrix header {list(anchors)}"
        )
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            row = [float(tok) for tok in line.split(",")]
        except ValueError:
            raise ValidationError(f"{path} line {lineno}: non-numeric entry") from None
        if len(row) != len(anchors):
            raise ValidationError(
                f"{path} line {lineno}: expected {len(anchors)} columns, found {len(row)}"
            )
        rows.append(row)
    return anchors, np.asarray(rows, dtype=np.float64)


def _read_label_column(path: str) -> list[int]:
    """One label per line, or the predictions CSV written by `predict`."""
    lines = [ln.strip() for ln in _read(path).splitlines() if ln.strip()]
    if not lines:
        raise ValidationError(f"{path} is empty")
    if lines[0].startswith("sample_index"):
        out = []
        for ln in lines[1:]:
            fields = ln.split(",")
            if len(fields) != 3:
                raise ValidationError(f"{path}: malformed predictions row {ln!r}")
            out.append(int(fields[1]))
        return out
    try:
        return [int(ln) for ln in lines]
    except ValueError:
        raise ValidationError(f"{path}: expected one integer label per line") from None


def cmd_gen(args) -> int:
    seed = _stream_seed(args.seed, "gen")
    fam = args.family
    if fam == "grid":
        if args.cols is None:
            raise ValidationError("family grid needs --cols; n is the row count")
        graph = graphs.make_grid(args.n, args.cols)
    elif fam == "complete":
        graph = graphs.make_complete(args.n)
    elif fam == "watts_strogatz":
        if args.k is None or args.p is None:
            raise ValidationError("watts_strogatz needs --k and --p")
        graph = graphs.generate_random(fam, args.n, seed, k=args.k, p=args.p)
    elif fam == "erdos_renyi":
        if args.p is None:
            raise ValidationError("erdos_renyi needs --p")
        graph = graphs.generate_random(fam, args.n, seed, p=args.p)
    elif fam == "barabasi_albert":
        if args.m is None:
            raise ValidationError("barabasi_albert needs --m")
        graph = graphs.generate_random(fam, args.n, seed, m=args.m)
    else:
        graph = graphs.generate_random(fam, args.n, seed)
    _write(graphs.save_edge_list(graph), args.output)
    return 0


def cmd_summarize(args) -> int:
    graph = graphs.load_edge_list(_read(args.graph))
    quotient, mapping = graphs.summarize_graph(
        graph, args.target, _stream_seed(args.seed, "summarize")
    )
    _write(graphs.save_edge_list(quotient), args.output)
    if args.mapping:
        lines = ["vertex,supernode"]
        lines += [f"{v},{int(s)}" for v, s in enumerate(mapping)]
        _write("\n".join(lines) + "\n", args.mapping)
    return 0


def cmd_predict(args) -> int:
    space = _load_space(args.graph, args.embeddings)
    observed = _parse_ids(args.observed) if args.observed else None
    anchors, matrix = _read_prob_matrix(args.probs, observed)
    if args.temperature is not None:
        matrix = frechet.softmax_with_temperature(matrix, args.temperature)
    if args.beta is not None and args.beta != 2.0:
        preds = [frechet.beta_predict(space, anchors, row, args.beta) for row in matrix]
    else:
        adaptor = frechet.build_adaptor(space, anchors)
        preds = frechet.predict_batch(adaptor, matrix)
    lines = ["sample_index,canonical_label,tie_set_size"]
    lines += [f"{i},{p.canonical},{p.tie_set_size}" for i, p in enumerate(preds)]
    _write("\n".join(lines) + "\n", args.output)
    return 0


def cmd_locus(args) -> int:
    space = _load_space(args.graph, args.embeddings)
    anchors = _parse_ids(args.observed)
    method = args.method
    if method == "auto":
        method = "pairwise" if space.kind in locus_mod.PAIRWISE_KINDS else "general"
    decomposable = None
    counterexample = None
    if method == "pairwise":
        loc = locus_mod.locus_pairwise(space, anchors, args.resolution)
    elif method == "general":
        loc = locus_mod.locus_general(space, anchors, args.resolution, budget=args.budget)
    else:  # check: run both; keep the general result, flag any mismatch
        decomposable, counterexample = locus_mod.check_pairwise_decomposable(
            space, anchors, args.resolution, budget=args.budget
        )
        loc = locus_mod.locus_general(space, anchors, args.resolution, budget=args.budget)
    header = "label," + ",".join(f"w[{a}]" for a in loc.anchors)
    lines = [header]
    for member in loc.members:
        w = loc.witnesses[member]
        lines.append(f"{member}," + ",".join(_fmt(x) for x in w))
    _write("\n".join(lines) + "\n", args.output)
    if args.report:
        target = set(int(v) for v in space.labels)
        report = {
            "anchors": list(loc.anchors),
            "method": loc.method,
            "resolution": loc.resolution,
            "exact": loc.exact,
            "members": list(loc.members),
            "is_locus_cover": set(loc.members) >= target,
        }
        if decomposable is not None:
            report["pairwise_decomposable"] = decomposable
            report["counterexample"] = counterexample
        _write(json.dumps(report, indent=2, sort_keys=True) + "\n", args.report)
    return 0


def _coerce_grid(space: graphs.LabelSpace) -> graphs.LabelSpace:
    """View a loaded generic lattice as a grid space (loaders cannot infer it)."""
    if space.kind == "grid":
        return space
    shape = graphs.detect_grid_shape(space.graph)
    if shape is None:
        raise ValidationError("graph is not a row-major grid lattice")
    regraded = dataclasses.replace(space.graph, kind="grid", grid_shape=shape)
    return graphs.LabelSpace(regraded, space.distance, space.oracle)


def cmd_cover(args) -> int:
    space = _load_space(args.graph, args.embeddings)
    kind = space.kind
    ctype = args.type
    if ctype == "auto":
        ctype = {
            "tree": "tree",
            "grid": "grid",
            "phylogenetic_tree": "phylo",
            "complete": "complete",
        }.get(kind)
        if ctype is None and graphs.detect_grid_shape(space.graph) is not None:
            ctype = "grid"
        if ctype is None:
            raise ValidationError(
                f"no cover construction for kind {kind!r}; "
                f"use `locus` to verify a candidate set instead"
            )
    if ctype == "tree":
        report = locus_mod.min_cover_tree(space).to_dict()
    elif ctype == "grid":
        report = locus_mod.min_cover_grid(_coerce_grid(space)).to_dict()
    elif ctype == "phylo":
        report = locus_mod.phylo_cover(space, args.resolution).to_dict()
    elif ctype == "identifying":
        report = locus_mod.identifying_cover_grid(_coerce_grid(space), args.resolution).to_dict()
    else:  # complete
        labels = [int(v) for v in space.labels]
        report = {
            "cover": labels,
            "is_locus_cover": True,
            "is_identifying": True,
            "certificates": {},
            "missing": [],
            "note": (
                "no nontrivial locus cover exists for a complete graph; "
                "the trivial cover (all labels) is reported"
            ),
        }
    report["kind"] = kind
    _write(json.dumps(report, indent=2, sort_keys=True) + "\n", args.output)
    return 0


def cmd_active(args) -> int:
    space = _load_space(args.graph, args.embeddings)
    policies = ["active", "passive"] if args.policy == "both" else [args.policy]
    trajectories = []
    rows = ["trial,round,num_observed,locus_size,policy,seed"]
    for trial in range(args.trials):
        trial_seed = _stream_seed(args.seed, f"trial{trial}")
        if args.observed:
            init = _parse_ids(args.observed)
        elif args.gibbs_k is not None:
            theta = args.gibbs_theta if args.gibbs_theta is not None else 0.0
            init = gibbs_sample_classes(
                space, args.gibbs_k, theta, _stream_seed(args.seed, f"gibbs{trial}")
            )
        else:
            raise ValidationError("give an initial --lambda or --gibbs-k [--gibbs-theta]")
        for policy in policies:
            traj = run_selection(space, init, args.rounds, policy, trial_seed)
            trajectories.append(traj)
            for round_index, n_obs, locus_size in traj.points:
                rows.append(
                    f"{trial},{round_index},{n_obs},{locus_size},{policy},{trial_seed}"
                )
    _write("\n".join(rows) + "\n", args.output)
    if args.summary:
        summary = compare_policies(trajectories)
        lines = ["policy,round,n_trials,mean_locus_size,stderr"]
        lines += [
            f"{s.policy},{s.round_index},{s.n_trials},{_fmt(s.mean_locus_size)},{_fmt(s.stderr)}"
            for s in summary
        ]
        _write("\n".join(lines) + "\n", args.summary)
    return 0


def cmd_eval(args) -> int:
    space = _load_space(args.graph, args.embeddings)
    preds = _read_label_column(args.predictions)
    truths = _read_label_column(args.truths)
    report = evaluate(space, preds, truths)
    _write(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", args.output)
    return 0


def cmd_regions(args) -> int:
    space = _load_space(args.graph, args.embeddings)
    anchors = _parse_ids(args.observed)
    grid = simplex_regions(space, anchors, args.resolution)
    lines = ["a,b,c,label"]
    lines += [
        f"{a},{b},{c},{label}"
        for (a, b, c), label in zip(grid.points, grid.assignments)
    ]
    _write("\n".join(lines) + "\n", args.output)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="labelgeo",
        description=(
            "Adapt classifier probability vectors to a metric label space via the "
            "Frechet mean; compute loci, locus covers, and active class selection."
        ),
        epilog="All randomness derives from --seed via named per-consumer substreams.",
    )
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, epilog=""):
        p = sub.add_parser(
            name,
            help=help_,
            epilog=epilog,
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        p.set_defaults(fn=fn)
        return p

    p = add(
        "gen",
        cmd_gen,
        "generate a graph and print its edge list",
        EDGE_LIST_EXAMPLE,
    )
    p.add_argument("family", choices=[
        "tree", "phylo_tree", "watts_strogatz", "erdos_renyi", "barabasi_albert",
        "grid", "complete",
    ])
    p.add_argument("n", type=int, help="vertex count (phylo_tree: leaves; grid: rows)")
    p.add_argument("--k", type=int, help="watts_strogatz ring degree")
    p.add_argument("--p", type=float, help="rewire/edge probability")
    p.add_argument("--m", type=int, help="barabasi_albert attachment count")
    p.add_argument("--cols", type=int, help="grid column count")
    p.add_argument("--output", help="output path (default stdout)")

    p = add(
        "summarize",
        cmd_summarize,
        "coarsen a graph into supernodes",
        EDGE_LIST_EXAMPLE + "mapping (CSV): vertex,supernode",
    )
    p.add_argument("graph", help="edge-list file")
    p.add_argument("target", type=int, help="max number of supernodes")
    p.add_argument("--mapping", help="write the vertex->supernode mapping CSV here")
    p.add_argument("--output", help="output path (default stdout)")

    p = add(
        "predict",
        cmd_predict,
        "batch-predict labels from per-class probabilities",
        PROBS_EXAMPLE + PREDICTIONS_EXAMPLE,
    )
    p.add_argument("graph", help="edge-list file (or embeddings CSV with --embeddings)")
    p.add_argument("probs", help="probability/logit matrix CSV")
    p.add_argument("--lambda", dest="observed", help="observed class ids, e.g. '0,2'")
    p.add_argument("--beta", type=float, help="distance exponent (default 2, the mean)")
    p.add_argument("--temperature", type=float, help="treat rows as logits; apply softmax")
    p.add_argument("--embeddings", action="store_true", help="graph file is an embeddings CSV")
    p.add_argument("--output", help="output path (default stdout)")

    p = add(
        "locus",
        cmd_locus,
        "compute the locus of an observed set",
        "locus (CSV): label,w[<anchor>],...  one witness weight vector per member",
    )
    p.add_argument("graph")
    p.add_argument("--lambda", dest="observed", required=True, help="anchor ids, e.g. '0,4'")
    p.add_argument("--method", choices=["auto", "pairwise", "general", "check"], default="auto")
    p.add_argument("--resolution", type=int, help="weight grid steps (default: diameter)")
    p.add_argument("--budget", type=int, default=locus_mod.DEFAULT_BUDGET)
    p.add_argument("--report", help="also write a JSON report here")
    p.add_argument("--embeddings", action="store_true")
    p.add_argument("--output", help="output path (default stdout)")

    p = add(
        "cover",
        cmd_cover,
        "construct a locus cover for the space",
        'report (JSON): {"cover": [...], "is_locus_cover": true, "certificates": {...}}',
    )
    p.add_argument("graph")
    p.add_argument(
        "--type", choices=["auto", "tree", "grid", "phylo", "identifying"], default="auto"
    )
    p.add_argument("--resolution", type=int)
    p.add_argument("--embeddings", action="store_true")
    p.add_argument("--output", help="output path (default stdout)")

    p = add(
        "active",
        cmd_active,
        "run active/passive next-class selection trials",
        "trajectory (CSV): trial,round,num_observed,locus_size,policy,seed",
    )
    p.add_argument("graph")
    p.add_argument("--lambda", dest="observed", help="fixed initial anchors, e.g. '0,1'")
    p.add_argument("--gibbs-k", type=int, help="draw the initial anchors: number of classes")
    p.add_argument("--gibbs-theta", type=float, help="Gibbs concentration (default 0)")
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--policy", choices=["active", "passive", "both"], default="both")
    p.add_argument("--summary", help="write the per-round policy summary CSV here")
    p.add_argument("--embeddings", action="store_true")
    p.add_argument("--output", help="output path (default stdout)")

    p = add(
        "eval",
        cmd_eval,
        "score predictions against truths",
        PREDICTIONS_EXAMPLE + "truths: one integer label per line",
    )
    p.add_argument("graph")
    p.add_argument("predictions", help="predictions CSV or one label per line")
    p.add_argument("truths", help="one label per line")
    p.add_argument("--embeddings", action="store_true")
    p.add_argument("--output", help="output path (default stdout)")

    p = add(
        "regions",
        cmd_regions,
        "classification regions over the probability simplex of 3 anchors",
        "regions (CSV): a,b,c,label  with a+b+c = resolution",
    )
    p.add_argument("graph")
    p.add_argument("--lambda", dest="observed", required=True, help="exactly 3 anchor ids")
    p.add_argument("--resolution", type=int, default=30)
    p.add_argument("--embeddings", action="store_true")
    p.add_argument("--output", help="output path (default stdout)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BudgetExceededError as exc:
        print(f"labelgeo: budget exceeded: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"labelgeo: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
