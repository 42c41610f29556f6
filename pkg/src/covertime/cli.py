"""Command line front end.

Experiments are described by JSON configs; flags override individual
fields. Every output file carries the tool version and the SHA-256 of the
normalized config, so ``covertime replay`` can rerun it and check that the
result is bit-identical.

Model blocks (``"model": {...}``) by kind::

    {"kind": "explicit", "n": 3, "support": [[[0, 1], 0.5], [[2], 0.5]]}
    {"kind": "k_uniform", "n": 10000, "k": 25}
    {"kind": "lottery", "n": 10000, "p": 0.0005}        (or "c": 5)
    {"kind": "block_partition", "blocks": 100, "k": 100}
    {"kind": "graph_neighborhood", "graph": GRAPH}
    {"kind": "hypercube_subcube", "d": 10, "k": 3}
    {"kind": "spanning_tree", "graph": GRAPH, "method": "exact"|"sample"}

    GRAPH = {"generator": "cycle"|"complete"|"path", "n": 8}
          | {"generator": "random_regular", "n": 200, "d": 6, "seed": 0}
          | {"n": 4, "edges": [[0, 1], [1, 2]]} | {"edgelist": "graph.txt"}

Exit codes: 0 success, 2 config error, 3 model invariant violated,
4 oracle size cap, 5 replay mismatch.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import jsonschema

from . import __version__, analytic, apps, graphs, intensity, oracle, sim
from .model import ModelError
from .model import from_config as model_from_config

EXIT_OK, EXIT_CONFIG, EXIT_MODEL, EXIT_CAP, EXIT_REPLAY = 0, 2, 3, 4, 5

COMMANDS = ("bounds", "check", "simulate", "oracle", "app.sat", "app.graph", "app.disc", "app.tree")

_INT = {"type": "integer"}
_POS = {"type": "integer", "minimum": 1}
_NUM = {"type": "number"}

GRAPH_SCHEMA = {
    "type": "object",
    "properties": {"generator": {"enum": ["cycle", "complete", "path", "random_regular"]},
                   "n": _POS, "d": _POS, "seed": _INT, "edgelist": {"type": "string"},
                   "edges": {"type": "array", "items": {"type": "array", "items": _INT,
                                                         "minItems": 2, "maxItems": 2}},
                   "transitive": {"type": "boolean"}},
    "additionalProperties": False,
}


def _kind(name, props, required):
    props = dict(props, kind={"const": name})
    return {"type": "object", "properties": props, "required": ["kind", *required],
            "additionalProperties": False}


MODEL_SCHEMA = {"oneOf": [
    _kind("explicit", {"n": _POS, "support": {"type": "array", "minItems": 1, "items": {
        "type": "array", "prefixItems": [{"type": "array", "items": _INT}, _NUM],
        "minItems": 2, "maxItems": 2}}}, ["n", "support"]),
    _kind("k_uniform", {"n": _POS, "k": _POS}, ["n", "k"]),
    _kind("lottery", {"n": _POS, "p": _NUM, "c": _NUM}, ["n"]),
    _kind("block_partition", {"blocks": _POS, "k": _POS}, ["blocks", "k"]),
    _kind("graph_neighborhood", {"graph": GRAPH_SCHEMA}, ["graph"]),
    _kind("hypercube_subcube", {"d": _POS, "k": _INT}, ["d", "k"]),
    _kind("spanning_tree", {"graph": GRAPH_SCHEMA, "method": {"enum": ["exact", "sample"]}}, ["graph"]),
    _kind("full", {"n": _POS}, ["n"]),
]}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "model": MODEL_SCHEMA,
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "replicates": _POS,
        "output": {"type": "object", "properties": {"path": {"type": "string"},
                                                    "format": {"enum": ["json", "csv"]}},
                   "additionalProperties": False},
        "overrides": {"type": "object", "properties": {
            "epsilon": _NUM, "delta": _NUM, "omega": _NUM, "cap": _POS, "t_max": _POS,
            "trials_per_t": _POS, "budget": _POS, "draws": _POS, "half_time": {"type": "boolean"}},
            "additionalProperties": False},
        "oracle": {"type": "object", "properties": {
            "method": {"enum": ["ie", "chain", "exchangeable"]}, "t_max": _POS},
            "additionalProperties": False},
        "app": {"type": "object", "properties": {
            "n": _POS, "n_vars": _POS, "k": _POS, "area_n": _NUM, "radius": _NUM,
            "surface": {"enum": ["torus", "square"]}, "graph": GRAPH_SCHEMA,
            "dimacs": {"type": "string"}},
            "additionalProperties": False},
    },
    "required": ["command"],
    "additionalProperties": False,
}


class ConfigError(ValueError):
    pass


class ReplayMismatch(RuntimeError):
    pass


def validate(cfg: dict) -> dict:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {path}: {exc.message}") from None
    cmd = cfg["command"]
    if cmd in ("bounds", "check", "simulate", "oracle") and "model" not in cfg:
        raise ConfigError(f"command {cmd!r} needs a model block")
    if cmd.startswith("app.") and "app" not in cfg:
        raise ConfigError(f"command {cmd!r} needs an app block")
    return cfg


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _plain(obj):
    """JSON-safe copy with non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else "-inf" if obj < 0 else "nan"
    return obj


# ---------------------------------------------------------------------------
# commands; each returns (result dict, headline dict, csv rows)


def _bounds(cfg, ov, threads):
    m = model_from_config(cfg["model"])
    prof = intensity.profile(m)
    eps = ov.get("epsilon", 0.05)
    eb = analytic.elementary_bounds(prof, eps)
    curve = analytic.MomentCurve(prof)
    res = {"elementary": {"t_half_lo": eb.t_half_lo, "t_half_hi": eb.t_half_hi,
                          "whp_upper": eb.whp_upper, "failure_prob": eb.failure_prob, "epsilon": eps},
           "t_star": analytic.t_star(curve), "profile": prof.summary()}
    if m.kind == "lottery":
        lot = analytic.lottery_analytics(m.n, m.p) if m.p > 0 else None
        if lot is not None:
            res["lottery"] = {"c": lot.c, "t_half": lot.t_half, "expected_T": lot.expected_T}
    head = {"t_half_lo": eb.t_half_lo, "t_half_hi": eb.t_half_hi, "whp_upper": eb.whp_upper}
    rows = [["quantity", "value"]] + [[k, repr(v)] for k, v in head.items()] + [["t_star", repr(res["t_star"])]]
    return res, head, rows


def _check(cfg, ov, threads):
    m = model_from_config(cfg["model"])
    prof = intensity.profile(m, draws=ov.get("draws", 100_000), seed=cfg.get("seed", 0))
    omega = ov.get("omega")
    reports = []
    fm = analytic.first_moment_window(prof, omega)
    reports.append(fm)
    pairs = None
    try:
        pairs = intensity.pair_intensities(m, budget=ov.get("draws", 100_000), seed=cfg.get("seed", 0))
    except intensity.SizeCapError:
        pairs = None
    if pairs is not None:
        reports.append(analytic.bounded_correlation_check(prof, pairs, fm.window, omega))
        if prof.balanced:
            reports.append(analytic.balanced_checks(prof, pairs, omega=omega, epsilon=ov.get("epsilon", 0.05)))
            reports.append(analytic.negative_correlation_check(prof, pairs, delta=ov.get("delta", 0.01)))
    if prof.exchangeable:
        reports.append(analytic.exchangeable_checks(prof, omega, delta=ov.get("delta", 0.01)))
    if prof.transitive:
        reports.append(analytic.fast_conditions(m, prof, epsilon=ov.get("epsilon", 0.05),
                                                draws=ov.get("draws", 100_000), seed=cfg.get("seed", 0),
                                                omega=omega))
    res = {"reports": [r.to_dict() for r in reports]}
    head = {r.theorem: "holds" if r.all_hold else ("some clause holds" if r.any_holds else "fails")
            for r in reports}
    rows = [["theorem", "clause", "verdict", "margin", "surrogate"]]
    for r in reports:
        for c in r.clauses:
            rows.append([r.theorem, c.id, c.verdict, repr(c.margin), c.surrogate])
    return res, head, rows


def _simulate(cfg, ov, threads):
    m = model_from_config(cfg["model"])
    reps = cfg.get("replicates", 1000)
    s = sim.sample_times(m, reps, cfg.get("seed", 0), threads=threads, cap=ov.get("cap"))
    res = {"summary": s.to_dict(include_samples=reps <= 100_000)}
    if ov.get("half_time"):
        ht = sim.empirical_half_time(m, ov.get("trials_per_t", 2000), seed=cfg.get("seed", 0), threads=threads)
        res["half_time"] = ht.to_dict()
    head = {"mean": s.mean, "median": s.median if s.samples.size else None, "censored": s.censored}
    rows = [["replicate", "T"]] + [[i, "inf" if math.isinf(t) else int(t)]
                                   for i, t in enumerate(s.all_samples.tolist())]
    return res, head, rows


def _oracle(cfg, ov, threads):
    m = model_from_config(cfg["model"])
    oc = cfg.get("oracle", {})
    method = oc.get("method") or ("exchangeable" if m.exchangeable and m.n > oracle.CHAIN_MAX_N else "chain")
    t_max = oc.get("t_max") or ov.get("t_max")
    if method == "exchangeable":
        if not m.exchangeable:
            raise ModelError("exchangeable oracle needs an exchangeable model")
        d = oracle.exchangeable_exact(m.n, m.size_law(), t_max)
    elif method == "chain":
        d = oracle.chain_distribution(m, t_max)
    else:
        et = oracle.expected_T_ie(m)
        tm = t_max or 100
        pmf = oracle.ie_pmf(m, tm)
        d = oracle.ExactDistribution(pmf, max(0.0, 1 - math.fsum(pmf.tolist())), et)
    res = {"method": method, "distribution": d.to_dict()}
    head = {"expected_T": d.expected_T, "tail_mass": d.tail_mass}
    rows = [["t", "pmf"]] + [[t, repr(float(p))] for t, p in enumerate(d.pmf.tolist())]
    return res, head, rows


def _app(cfg, ov, threads):
    cmd, a = cfg["command"], cfg["app"]
    reps = cfg.get("replicates", 100)
    seed = cfg.get("seed", 0)
    if cmd == "app.graph":
        r = apps.connectivity_time(int(a.get("n", 1000)), reps, seed, threads)
        s = r.connect
        head = {"median_T_connect": s.median, "target": r.target}
    elif cmd == "app.disc":
        r = apps.disc_coverage_time(float(a.get("area_n", 1e4)), float(a.get("radius", 3.0)),
                                    a.get("surface", "torus"), reps, seed, threads)
        s = r.inner
        head = {"median_inner": s.median, "median_outer": r.outer.median, "target": r.target}
    elif cmd == "app.tree":
        try:
            g = graphs.from_config(a.get("graph", {"generator": "cycle", "n": 8}))
        except graphs.GraphError as exc:
            raise ModelError(str(exc)) from exc
        if not g.is_connected():
            raise ModelError("spanning tree covering needs a connected graph")
        r = apps.spanning_tree_cover(g, reps, seed, threads)
        s = r.summary
        head = {"median_T": s.median, "target": r.target}
    else:
        n_vars, k = int(a.get("n_vars", 24)), int(a.get("k", 3))
        if n_vars > 28:
            raise oracle.OracleSizeError("exact SAT mode supports n_vars <= 28")
        r = apps.sat_threshold(n_vars, k, reps, seed, ov.get("budget", 1_000_000), threads)
        s = r.summary
        head = {"median_ratio": r.median_ratio, "first_moment_ratio": r.first_moment_ratio}
        if "dimacs" in a:
            _, st = apps.sat_once(n_vars, k, apps.stream(seed, apps.APP, apps._SAT, 0), ov.get("budget", 1_000_000))
            apps.write_dimacs(st.clauses, n_vars, a["dimacs"])
    res = r.to_dict()
    res["samples"] = s.all_samples.tolist()
    rows = [["replicate", "T"]] + [[i, "inf" if math.isinf(t) else int(t)]
                                   for i, t in enumerate(s.all_samples.tolist())]
    return res, head, rows


HANDLERS = {"bounds": _bounds, "check": _check, "simulate": _simulate, "oracle": _oracle,
            "app.sat": _app, "app.graph": _app, "app.disc": _app, "app.tree": _app}


def execute(cfg: dict, threads: int | None = None) -> dict:
    """Validate and run ``cfg``; returns the output document (without writing it)."""
    cfg = validate(copy.deepcopy(cfg))
    ov = cfg.get("overrides", {})
    res, head, rows = HANDLERS[cfg["command"]](cfg, ov, threads)
    doc = {"tool": "covertime", "version": __version__, "config_sha256": config_hash(cfg),
           "config": cfg, "command": cfg["command"], "seed": cfg.get("seed", 0),
           "headline": _plain(head), "result": _plain(res)}
    doc["_rows"] = rows
    return doc


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render(doc: dict, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# covertime {doc['version']} config_sha256={doc['config_sha256']}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerows(doc["_rows"])
        return buf.getvalue()
    body = {k: v for k, v in doc.items() if k != "_rows"}
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def summary_line(doc: dict) -> str:
    cfg = doc["config"]
    kind = cfg.get("model", {}).get("kind", cfg["command"].split(".")[-1])
    head = " ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in doc["headline"].items())
    return f"model={kind} command={doc['command']} {head} seed={doc['seed']}"


def run(cfg: dict, out: str | None = None, fmt: str = "json", threads: int | None = None) -> dict:
    doc = execute(cfg, threads)
    if out:
        atomic_write(out, render(doc, fmt))
    return doc


def replay(summary_path, threads: int | None = None) -> dict:
    """Rerun the experiment stored in a JSON output and compare results exactly."""
    try:
        stored = json.loads(Path(summary_path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read summary: {exc}") from None
    for key in ("config", "result", "config_sha256"):
        if key not in stored:
            raise ConfigError(f"summary lacks {key!r}")
    problems = []
    if config_hash(stored["config"]) != stored["config_sha256"]:
        problems.append("config hash does not match the embedded config")
    doc = execute(stored["config"], threads)
    fresh = json.loads(render(doc, "json"))
    for key in ("headline", "result"):
        if fresh[key] != stored[key]:
            problems.append(f"{key} differs: " + _diff(stored[key], fresh[key]))
    if problems:
        raise ReplayMismatch("; ".join(problems))
    return fresh


def _diff(a, b, path="") -> str:
    if isinstance(a, dict) and isinstance(b, dict):
        for k in sorted(set(a) | set(b)):
            if a.get(k) != b.get(k):
                return _diff(a.get(k), b.get(k), f"{path}/{k}")
    if isinstance(a, list) and isinstance(b, list) and len(a) == len(b):
        for i, (x, y) in enumerate(zip(a, b)):
            if x != y:
                return _diff(x, y, f"{path}[{i}]")
    return f"{path or '/'}: stored {json.dumps(a)[:80]} vs replayed {json.dumps(b)[:80]}"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="covertime", description=__doc__.split("\n\n")[0],
                                 epilog=__doc__.split("\n\n", 1)[1],
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--version", action="version", version=f"covertime {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, config_required=False):
        p.add_argument("--config", required=config_required, help="JSON experiment config")
        p.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
        p.add_argument("--replicates", type=int)
        p.add_argument("--threads", type=int, help="worker threads (default $COVERTIME_THREADS or 1)")
        p.add_argument("--out", help="output path (written atomically)")
        p.add_argument("--format", choices=["json", "csv"])

    for name in ("bounds", "check", "simulate", "oracle", "run"):
        common(sub.add_parser(name, help=f"{name} experiment" if name != "run" else "run the config's command"),
               config_required=True)
    app = sub.add_parser("app", help="application experiments")
    app.add_argument("which", choices=["sat", "graph", "disc", "tree"])
    common(app)
    rp = sub.add_parser("replay", help="rerun a JSON output and compare")
    rp.add_argument("summary")
    rp.add_argument("--threads", type=int)
    return ap


def _load_config(args) -> dict:
    if args.config:
        try:
            cfg = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    else:
        cfg = {}
    if args.cmd == "app":
        want = f"app.{args.which}"
        cfg.setdefault("app", {})
    elif args.cmd == "run":
        want = cfg.get("command")
    else:
        want = args.cmd
    if want is None:
        raise ConfigError("config has no command; use a subcommand or set 'command'")
    cfg["command"] = want  # the subcommand wins over the config's own command
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.replicates is not None:
        cfg["replicates"] = args.replicates
    if args.out or args.format:
        outc = cfg.setdefault("output", {})
        if args.out:
            outc["path"] = args.out
        if args.format:
            outc["format"] = args.format
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = getattr(args, "threads", None)
    try:
        if args.cmd == "replay":
            doc = replay(args.summary, threads)
            print(f"replay ok: {summary_line(doc)}")
            return EXIT_OK
        cfg = _load_config(args)
        outc = cfg.get("output", {})
        doc = run(cfg, outc.get("path"), outc.get("format", "json"), threads)
        if not outc.get("path"):
            sys.stdout.write(render(doc, outc.get("format", "json")))
        print(summary_line(doc))
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (oracle.OracleSizeError, intensity.SizeCapError) as exc:
        print(f"size cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ModelError, graphs.GraphError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ReplayMismatch as exc:
        print(f"replay mismatch: {exc}", file=sys.stderr)
        return EXIT_REPLAY


if __name__ == "__main__":
    sys.exit(main())
