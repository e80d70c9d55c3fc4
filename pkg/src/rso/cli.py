"""Command-line front end: generators, transforms, verifiers, local ordering, reductions, demo.

Every run writes its artifacts plus a `<stem>.manifest.json` into --out.
Artifacts embed the manifest hash, which covers the subcommand, parameters
and seed only, so re-running a manifest reproduces byte-identical artifacts.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import io as gio
from .graph import ColoredMultiGraph, DirectedColoredMultiGraph, Graph, GraphError, LocalGraphOracle

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2
_GLOBAL_DEFAULTS = {"out": ".", "threads": 1, "format": "json"}
_NOT_PARAMS = {"func", "out", "threads", "report", "manifest"}


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    subcommand: str
    params: dict
    seed: int | None
    artifacts: dict[str, str] = field(default_factory=dict)
    timing: dict[str, float] = field(default_factory=dict)

    @property
    def key(self) -> dict:
        return {"subcommand": self.subcommand, "params": self.params, "seed": self.seed}

    @property
    def hash(self) -> str:
        blob = json.dumps(self.key, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_dict(self) -> dict:
        return {**asdict(self), "hash": self.hash}

    @classmethod
    def from_dict(cls, doc: dict) -> "RunManifest":
        try:
            m = cls(doc["subcommand"], doc["params"], doc["seed"], dict(doc.get("artifacts", {})), dict(doc.get("timing", {})))
        except KeyError as exc:
            raise GraphError(f"manifest is missing field {exc}") from None
        if doc.get("hash") != m.hash:
            raise GraphError("manifest hash does not match its own parameters")
        return m


class Run:
    """Collects artifacts for one invocation and writes them with the manifest."""

    def __init__(self, args: argparse.Namespace, stem: str):
        self.out = Path(args.out)
        self.stem = stem
        params = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_PARAMS and k != "seed"}
        self.manifest = RunManifest(_subcommand(args), params, getattr(args, "seed", None))
        self.fmt = getattr(args, "format", "json")
        self.t0 = time.perf_counter()

    def _write(self, name: str, text: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        data = text.encode("utf-8")
        path.write_bytes(data)
        self.manifest.artifacts[name] = hashlib.sha256(data).hexdigest()
        return path

    def graph(self, suffix: str, G) -> Path:
        h = self.manifest.hash
        if self.fmt == "edgelist":
            head, _, rest = gio.to_edgelist(G).partition("\n")
            return self._write(f"{self.stem}{suffix}.txt", f"{head}\n# manifest={h}\n{rest}")
        doc = gio.to_dict(G)
        doc["manifest"] = h
        return self._write(f"{self.stem}{suffix}.json", _dumps(doc))

    def doc(self, suffix: str, doc: dict) -> Path:
        return self._write(f"{self.stem}{suffix}.json", _dumps({**doc, "manifest": self.manifest.hash}))

    def finish(self) -> Path:
        self.manifest.timing["seconds"] = round(time.perf_counter() - self.t0, 4)
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / f"{self.stem}.manifest.json"
        path.write_text(_dumps(self.manifest.to_dict()), encoding="utf-8")
        return path


def _subcommand(args) -> str:
    return " ".join(x for x in (getattr(args, "cmd", None), getattr(args, "sub", None)) if x)


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (set, tuple)):
        return list(x)
    if hasattr(x, "to_dict"):
        return x.to_dict()
    raise TypeError(type(x).__name__)


def _dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=1, default=_jsonable) + "\n"


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True, default=_jsonable) + "\n")


def threads_from(args) -> int:
    env = os.environ.get("RSO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"RSO_THREADS must be an integer, got {env!r}") from None
    return max(1, args.threads)


# ------------------------------------------------------------------ reading inputs

_EMBED = re.compile(r"^# manifest=([0-9a-f]+)\s*$", re.M)


def read_artifact(path: str):
    """(object, embedded manifest hash or None); JSON documents may be graphs or plain dicts."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GraphError(f"cannot read {path}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise gio.ParseError(f"{path} line {exc.lineno}: invalid JSON ({exc.msg})") from None
        embedded = doc.get("manifest")
        if "edges" in doc and "n" in doc:
            return gio.from_dict(doc), embedded
        return doc, embedded
    m = _EMBED.search(text)
    return gio.from_edgelist(text), (m.group(1) if m else None)


def read_graph(path: str, kind=Graph):
    G, _ = read_artifact(path)
    if kind is not None and not isinstance(G, kind):
        want = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise GraphError(f"{path} holds a {type(G).__name__}, expected {want}")
    return G


def check_manifest(args, path: str) -> str | None:
    """Refuse an artifact whose embedded hash or bytes disagree with --manifest."""
    if not getattr(args, "manifest", None):
        return None
    try:
        doc = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphError(f"cannot load manifest {args.manifest}: {exc}") from None
    man = RunManifest.from_dict(doc)
    _, embedded = read_artifact(path)
    if embedded != man.hash:
        raise GraphError(f"{path} was not produced by the run in {args.manifest} (parameters differ)")
    name = Path(path).name
    if name in man.artifacts:
        digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        if digest != man.artifacts[name]:
            raise GraphError(f"{path} was modified after the run recorded in {args.manifest}")
    return man.hash


def _params(path: str):
    from .threestep import ThreeStepParams

    doc, _ = read_artifact(path)
    if not isinstance(doc, dict) or "ell" not in doc:
        raise GraphError(f"{path} does not hold three-step parameters")
    return ThreeStepParams.from_dict(doc)


def _bits(text: str) -> list[int]:
    if not text or set(text) - {"0", "1"}:
        raise GraphError(f"expected a 0/1 string, got {text!r}")
    return [int(c) for c in text]


# ------------------------------------------------------------------ gen


def cmd_gen_schreier(args) -> int:
    from .schreier import M1, M2, primary_graph, secondary_graph, sl2_projective_perms

    P = sl2_projective_perms(args.p, (M1, M2))
    run = Run(args, f"schreier_p{args.p}")
    run.graph("_primary", primary_graph(P))
    run.graph("_secondary", secondary_graph(P))
    run.finish()
    _emit({"points": P.n, "pairs": P.n * (P.n - 1), "artifacts": sorted(run.manifest.artifacts)})
    return EXIT_OK


def cmd_gen_three_step(args) -> int:
    from .local import augment_for_local_ordering
    from .threestep import assemble, build_three_step

    params = build_three_step(args.n, args.ell, args.dprime, args.seed, local_code=args.local_code, delta=args.delta)
    G = assemble(params)
    run = Run(args, "three_step")
    run.graph("", G)
    run.doc(".params", params.to_dict())
    out = {"n": G.n, "edges": G.m, "components": params.components, "regular": params.regular}
    if args.augment:
        aug = augment_for_local_ordering(G, seed=args.seed)
        run.graph("_augmented", aug.graph)
        out["augmented_n"] = aug.graph.n
    run.finish()
    _emit(out)
    return EXIT_OK


def cmd_gen_rso_small(args) -> int:
    from .threestep import find_rso_small

    g, rep = find_rso_small(args.ell, args.d, args.seed, regular=not args.bounded)
    run = Run(args, f"rso_small_{args.ell}_{args.d}")
    run.graph("", g)
    run.doc(".report", rep.to_dict())
    run.finish()
    _emit({"n": g.n, "gamma": rep.to_dict()})
    return EXIT_OK


def cmd_gen_perms(args) -> int:
    from .permutations import code_based_perm, greedy_far_collection, make_small_code

    run = Run(args, f"perms_{args.kind}")
    if args.kind == "code":
        C = make_small_code(args.k, args.rate, args.seed)
        perms = [code_based_perm(C, i) for i in range(1, C.size + 1)]
        run.doc("", {"code": C.to_dict(), "perms": [list(p.images) for p in perms]})
        out = {"count": len(perms), "points": 2 * C.L, "distance": C.min_distance}
    else:
        perms = greedy_far_collection(args.ell, args.count, args.delta, args.seed)
        run.doc("", {"ell": args.ell, "delta": args.delta, "perms": [list(p.images) for p in perms]})
        out = {"count": len(perms), "points": args.ell}
    run.finish()
    _emit(out)
    return EXIT_OK


def cmd_gen_dense(args) -> int:
    from . import dense

    run = Run(args, f"dense_{args.kind}")
    if args.kind == "random":
        G = dense.random_dense(args.n, args.seed)
        out = {"n": G.n, "edges": G.m}
    elif args.kind in ("nmE", "tri"):
        F = dense.search_small_nmE(args.N, args.eps, args.seed, mode=args.mode, samples=args.samples)
        run.doc(".table", F.to_dict())
        if args.kind == "nmE":
            G = dense.nmE_graph(F)
        else:
            G = dense.tri_graph(F, dense.small_bias_bipartite(args.bias_ell))
        out = {"n": G.n, "edges": G.m, "eps_qo": F.eps_qo, "eps_nm": F.eps_nm}
    else:
        E = dense.efficient_so_graph(args.m, args.s, args.seed)
        G = E.graph
        run.doc(".meta", {**E.meta(), "seed": args.seed})
        out = {"n": G.n, "edges": G.m, **E.meta()}
    run.graph("", G)
    run.finish()
    _emit(out)
    return EXIT_OK


# ------------------------------------------------------------------ transform


def cmd_transform(args) -> int:
    from . import transforms as T

    sub = args.sub
    if sub == "eligibility":
        out = T.eligibility_pass(read_graph(args.input, ColoredMultiGraph), args.d, args.c)
    elif sub == "gadgetize":
        M = read_graph(args.input, ColoredMultiGraph)
        T.check_eligible(M)
        gadgets = T.find_gadgets(args.gadget_degree, max(M.colors), args.k, seed=args.seed)
        out = T.gadgetize(M, gadgets)
    elif sub == "directed-to-undirected":
        out = T.directed_to_undirected(read_graph(args.input, DirectedColoredMultiGraph))
    elif sub == "superimpose":
        out = T.superimpose(read_graph(args.input), read_graph(args.other))
    elif sub == "regular-expanding":
        X = read_graph(args.expander) if args.expander else None
        out = T.make_regular_expanding(read_graph(args.input), args.d_target, X)
    else:
        out = T.degree_reduce_dense(read_graph(args.input))
    run = Run(args, sub.replace("-", "_"))
    run.graph("", out)
    run.finish()
    _emit({"n": out.n, "edges": out.m})
    return EXIT_OK


# ------------------------------------------------------------------ verify


def _write_report(directory: str, stem: str, rows: list[dict], figures) -> list[str]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    if rows:
        path = d / f"{stem}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
        written.append(str(path))
    for name, fn in figures:
        written.append(str(fn(d / f"{stem}_{name}.png")))
    return written


def cmd_verify(args) -> int:
    from . import verify as V

    sub = args.sub
    embedded = check_manifest(args, args.input)
    threads = threads_from(args)
    if sub == "robustness":
        G = read_graph(args.input, None)
        if isinstance(G, dict):
            raise GraphError(f"{args.input} is not a graph")
        if args.exact:
            if isinstance(G, Graph):
                rep = V.robustness_exact(G, partitions=args.partitions, threads=threads)
            elif isinstance(G, ColoredMultiGraph):
                rep = V.colored_robustness_exact(G, partitions=args.partitions, threads=threads)
            else:
                rep = V.directed_colored_robustness_exact(G, partitions=args.partitions, threads=threads)
        else:
            if args.seed is None:
                raise UsageError("--seed is required for the adversarial battery")
            rep = V.robustness_adversarial(G, samples=args.samples, seed=args.seed)
        doc = rep.to_dict()
        if args.report:
            from . import plotting

            floor = float(rep.gamma_exact if rep.gamma_exact is not None else rep.gamma_upper)
            seed = 0 if args.seed is None else args.seed
            moved, ratio = plotting.ratio_samples(G, 2000, seed)
            rows = [{"moved": int(a), "ratio": float(b)} for a, b in zip(moved, ratio)]
            figs = [("ratios", lambda p: plotting.ratio_profile(G, p, 2000, seed, floor))]
            if isinstance(G, Graph):
                figs.append(("degrees", lambda p: plotting.degree_histogram(G, p)))
            doc["report_files"] = _write_report(args.report, "robustness", rows, figs)
    elif sub == "self-ordered":
        ok, aut = V.is_self_ordered(read_graph(args.input, None))
        doc = {"self_ordered": ok, "automorphism": None if aut is None else list(aut.images)}
    elif sub == "expansion":
        G = read_graph(args.input, None)
        if args.exact:
            rep = V.expansion_combinatorial(G, n_limit=args.n_limit)
        else:
            if args.seed is None:
                raise UsageError("--seed is required for sampled expansion bounds")
            rep = V.expansion_bounds(G, samples=args.samples, seed=args.seed)
        doc = rep.to_dict()
    elif sub == "distance":
        G, H = read_graph(args.input), read_graph(args.other)
        mode = "exact" if args.exact else "sampled"
        if mode == "sampled" and args.seed is None:
            raise UsageError("--seed is required for sampled distance")
        rep = V.far_from_isomorphic(G, H, mode=mode, samples=args.samples, seed=args.seed or 0)
        doc = asdict(rep)
    else:
        from .dense import TwoSourceFunction

        raw, _ = read_artifact(args.input)
        if not isinstance(raw, dict) or "bits" not in raw:
            raise GraphError(f"{args.input} does not hold a two-source table")
        F = TwoSourceFunction.from_dict(raw)
        if sub == "qo":
            doc = {"eps_qo": V.quasi_orthogonality_error(F.table)}
        else:
            if args.mode == "sampled" and args.seed is None:
                raise UsageError("--seed is required for the sampled non-malleability error")
            doc = {"eps_nm": V.nm_extractor_error(F.table, mode=args.mode, samples=args.samples, seed=args.seed or 0)}
    doc["manifest_checked"] = embedded
    _emit(doc)
    return EXIT_OK


def cmd_verify_schreier(args) -> int:
    from .schreier import M1, M2, check_sufficient_condition, sl2_projective_perms

    rep = check_sufficient_condition(sl2_projective_perms(args.p, (M1, M2)), samples=args.samples, seed=args.seed)
    _emit(rep.to_dict())
    return EXIT_OK


# ------------------------------------------------------------------ order


def cmd_order_local(args) -> int:
    from .local import LocalOrderer, augment_for_local_ordering
    from .threestep import assemble

    check_manifest(args, args.graph)
    params = _params(args.params)
    G = read_graph(args.graph)
    aug = None
    if G.n != params.n:
        aug = augment_for_local_ordering(assemble(params), seed=args.augment_seed)
        if aug.graph.n != G.n:
            raise GraphError(f"graph has {G.n} vertices; expected {params.n} or the augmented {aug.graph.n}")
    orderer = LocalOrderer(LocalGraphOracle.of_graph(G), params, aug, query_constant=args.query_constant)
    if args.reverse is not None:
        start = args.vertex
        w = orderer.reverse_any(args.reverse, start) if aug is not None else None
        if w is None:
            raise GraphError("reversed ordering needs the augmented graph")
        doc = {"target": args.reverse, "start": start, "preimage": w}
    else:
        doc = {"vertex": args.vertex, "image": orderer.order_any(args.vertex)}
    doc.update(queries=orderer.last_queries, budget=orderer.budget, query_constant=args.query_constant)
    _emit(doc)
    return EXIT_OK


# ------------------------------------------------------------------ reduce


def _matrix(text: str, m: int) -> np.ndarray:
    rows = [_bits(r) for r in text.split(",")]
    if len(rows) != m or any(len(r) != m for r in rows):
        raise GraphError(f"string matrix must be {m} comma-separated rows of {m} bits")
    return np.array(rows, dtype=np.uint8)


def cmd_reduce(args) -> int:
    from . import reduction as R

    sub = args.sub
    if sub == "encode-bd":
        base = read_graph(args.base)
        G = R.encode_string_bd(_bits(args.string), base)
        run = Run(args, "encoded_bd")
        run.graph("", G)
        run.finish()
        _emit({"n": G.n, "edges": G.m})
    elif sub == "decode-bd":
        base = read_graph(args.base)
        Gp = read_graph(args.input)
        if args.mode == "local":
            from .local import augment_for_local_ordering
            from .threestep import assemble

            if not args.params:
                raise UsageError("--params is required for local decoding")
            params = _params(args.params)
            aug = augment_for_local_ordering(assemble(params), seed=args.augment_seed)
            if aug.graph.edges != base.edges:
                raise GraphError("base graph differs from the augmented graph built from --params")
            s = R.decode_graph_bd(Gp, base, mode="local", params=params, augmented=aug)
        else:
            s = R.decode_graph_bd(Gp, base)
        _emit({"string": "".join(map(str, s))})
    elif sub == "encode-dense":
        small, big = read_graph(args.small), read_graph(args.big)
        G = R.encode_string_dense(_matrix(args.string, small.n), small, big)
        run = Run(args, "encoded_dense")
        run.graph("", G)
        run.finish()
        _emit({"n": G.n, "edges": G.m})
    elif sub == "decode-dense":
        S = R.decode_graph_dense(read_graph(args.input), read_graph(args.small), read_graph(args.big))
        _emit({"string": ",".join("".join(map(str, r)) for r in S.tolist())})
    else:
        base = read_graph(args.base)
        s = _bits(args.string)
        if len(s) != base.n:
            raise GraphError(f"string length {len(s)} differs from base size {base.n}")
        ad = R.query_adapter_bd(lambda i: s[i - 1], base)
        rng = np.random.default_rng(args.seed)
        for _ in range(args.queries):
            u, v = (int(x) for x in rng.integers(1, ad.n + 1, 2))
            ad.adjacent(u, v) if rng.random() < 0.5 else ad.neighbors(u)
        run = Run(args, "query_log")
        run.doc("", ad.log.to_dict())
        run.finish()
        _emit({"graph_queries": ad.log.graph_queries, "string_queries": ad.log.string_queries})
    return EXIT_OK


# ------------------------------------------------------------------ demo


def cmd_demo(args) -> int:
    from .acceptance import run_all

    wanted = None
    if args.criteria:
        try:
            wanted = {int(x) for x in args.criteria.split(",")}
        except ValueError:
            raise UsageError(f"--criteria takes comma-separated numbers, got {args.criteria!r}") from None
    threads = threads_from(args)
    results = run_all(wanted, threads=threads, progress=lambda r: print(r.line(), flush=True))
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    if args.report:
        from . import plotting

        rows = [r.row() for r in results]
        written = _write_report(args.report, "acceptance", rows, [("timing", lambda p: plotting.acceptance_timing(rows, p))])
        (Path(args.report) / "acceptance.json").write_text(
            _dumps({"threads": threads, "results": [{**r.row(), "data": r.data} for r in results]}), encoding="utf-8"
        )
        print("report: " + ", ".join(written + [str(Path(args.report) / "acceptance.json")]))
    return EXIT_OK if passed == len(results) else EXIT_INVALID


# ------------------------------------------------------------------ parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps leaf parsers from overwriting values given before the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS, help="directory for artifacts and manifests (default .)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker threads (RSO_THREADS overrides)")
    common.add_argument("--format", choices=("json", "edgelist"), default=argparse.SUPPRESS)

    p = _Parser(prog="rso", description="Build and check robustly self-ordered graphs.", parents=[common])
    cmds = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    gen = cmds.add_parser("gen", help="generate graphs").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    g = gen.add_parser("schreier", parents=[common])
    g.add_argument("--p", type=int, required=True)
    g.set_defaults(func=cmd_gen_schreier)
    g = gen.add_parser("three-step", parents=[common])
    for flag in ("--n", "--ell", "--dprime", "--seed"):
        g.add_argument(flag, type=int, required=True)
    g.add_argument("--local-code", action="store_true")
    g.add_argument("--delta", type=float, default=0.5)
    g.add_argument("--augment", action="store_true", help="also write the graph augmented for reversed ordering")
    g.set_defaults(func=cmd_gen_three_step)
    g = gen.add_parser("rso-small", parents=[common])
    for flag in ("--ell", "--d", "--seed"):
        g.add_argument(flag, type=int, required=True)
    g.add_argument("--bounded", action="store_true", help="maximum degree d instead of d-regular")
    g.set_defaults(func=cmd_gen_rso_small)
    g = gen.add_parser("perms", parents=[common])
    g.add_argument("--kind", choices=("code", "greedy"), required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--k", type=int, default=6)
    g.add_argument("--rate", type=float, default=0.5)
    g.add_argument("--ell", type=int, default=12)
    g.add_argument("--count", type=int, default=8)
    g.add_argument("--delta", type=float, default=0.5)
    g.set_defaults(func=cmd_gen_perms)
    g = gen.add_parser("dense", parents=[common])
    g.add_argument("--kind", choices=("random", "nmE", "tri", "efficient-so"), required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--n", type=int, default=32)
    g.add_argument("--N", type=int, default=6)
    g.add_argument("--eps", type=float, default=0.35)
    g.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    g.add_argument("--samples", type=int, default=2000)
    g.add_argument("--bias-ell", type=int, default=3)
    g.add_argument("--m", type=int, default=100)
    g.add_argument("--s", type=int, default=9)
    g.set_defaults(func=cmd_gen_dense)

    tr = cmds.add_parser("transform", help="graph-to-graph transformations").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    t = tr.add_parser("eligibility", parents=[common])
    t.add_argument("--input", required=True)
    t.add_argument("--d", type=int, required=True)
    t.add_argument("--c", type=int, required=True)
    t = tr.add_parser("gadgetize", parents=[common])
    t.add_argument("--input", required=True)
    t.add_argument("--seed", type=int, required=True)
    t.add_argument("--k", type=int, default=6)
    t.add_argument("--gadget-degree", type=int, default=4)
    t = tr.add_parser("directed-to-undirected", parents=[common])
    t.add_argument("--input", required=True)
    t = tr.add_parser("superimpose", parents=[common])
    t.add_argument("--input", required=True)
    t.add_argument("--other", required=True)
    t = tr.add_parser("regular-expanding", parents=[common])
    t.add_argument("--input", required=True)
    t.add_argument("--d-target", type=int, required=True)
    t.add_argument("--expander")
    t = tr.add_parser("degree-reduce", parents=[common])
    t.add_argument("--input", required=True)
    for name in ("eligibility", "gadgetize", "directed-to-undirected", "superimpose", "regular-expanding", "degree-reduce"):
        tr.choices[name].set_defaults(func=cmd_transform)

    ve = cmds.add_parser("verify", help="robustness, expansion and table checks").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    for name in ("robustness", "self-ordered", "expansion", "distance", "qo", "nm"):
        v = ve.add_parser(name, parents=[common])
        v.add_argument("--input", required=True)
        v.add_argument("--manifest", help="refuse the input unless it came from this run")
        v.add_argument("--seed", type=int)
        v.add_argument("--samples", type=int, default=10_000)
        v.set_defaults(func=cmd_verify)
    v = ve.choices["robustness"]
    mode = v.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--adversarial", action="store_true")
    v.add_argument("--partitions", type=int, default=1)
    v.add_argument("--report", help="directory for CSV ratios and figures")
    v = ve.choices["expansion"]
    v.add_argument("--exact", action="store_true")
    v.add_argument("--n-limit", type=int, default=30)
    v = ve.choices["distance"]
    v.add_argument("--other", required=True)
    v.add_argument("--exact", action="store_true")
    ve.choices["nm"].add_argument("--mode", choices=("exact", "sampled"), default="exact")
    v = ve.add_parser("schreier", parents=[common])
    v.add_argument("--p", type=int, required=True)
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--samples", type=int, default=5000)
    v.set_defaults(func=cmd_verify_schreier)

    od = cmds.add_parser("order", help="local self-ordering").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    o = od.add_parser("local", parents=[common])
    o.add_argument("--graph", required=True)
    o.add_argument("--params", required=True)
    o.add_argument("--vertex", type=int, required=True, help="vertex to order, or the start vertex with --reverse")
    o.add_argument("--reverse", type=int, help="find the vertex mapped to this target instead")
    o.add_argument("--augment-seed", type=int, default=None)
    o.add_argument("--query-constant", type=int, default=16)
    o.add_argument("--manifest")
    o.set_defaults(func=cmd_order_local)

    rd = cmds.add_parser("reduce", help="string-to-graph reductions").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    r = rd.add_parser("encode-bd", parents=[common])
    r.add_argument("--base", required=True)
    r.add_argument("--string", required=True)
    r = rd.add_parser("decode-bd", parents=[common])
    r.add_argument("--base", required=True)
    r.add_argument("--input", required=True)
    r.add_argument("--mode", choices=("exact", "local"), default="exact")
    r.add_argument("--params")
    r.add_argument("--augment-seed", type=int, default=None)
    r = rd.add_parser("encode-dense", parents=[common])
    r.add_argument("--small", required=True)
    r.add_argument("--big", required=True)
    r.add_argument("--string", required=True, help="rows of bits separated by commas")
    r = rd.add_parser("decode-dense", parents=[common])
    r.add_argument("--small", required=True)
    r.add_argument("--big", required=True)
    r.add_argument("--input", required=True)
    r = rd.add_parser("query-log", parents=[common])
    r.add_argument("--base", required=True)
    r.add_argument("--string", required=True)
    r.add_argument("--queries", type=int, default=1000)
    r.add_argument("--seed", type=int, required=True)
    for name in rd.choices:
        rd.choices[name].set_defaults(func=cmd_reduce)

    d = cmds.add_parser("demo", help="run the acceptance battery", parents=[common])
    d.add_argument("--criteria", help="comma-separated criterion numbers (default: all)")
    d.add_argument("--report", help="directory for the CSV table, JSON and timing figure")
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for key, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    if getattr(args, "augment_seed", "x") is None:
        # the augmented graph is built with the generator's seed unless told otherwise
        args.augment_seed = _params(args.params).seed if getattr(args, "params", None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"rso: error: {exc}\n")
        return EXIT_USAGE
    except (GraphError, ValueError) as exc:
        sys.stderr.write(f"rso: invalid input: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
