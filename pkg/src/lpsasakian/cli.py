"""Command-line front end.

Subcommands::

    lpsasakian verify <manifest|example3|example3-leaf> [options]
    lpsasakian report <report.json>
    lpsasakian manifest check <path>

Exit codes: 0 every scored identity passes, 1 some identity fails,
2 usage or manifest error, 3 internal error.
"""
from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .builtin import BUILTINS, builtin_manifest
from .connection import ConnectionParams, connection_suite, proposition_residuals, torsion_suite
from .curvature import (
    curvature_suite,
    lemma3_residuals,
    lemma5_residuals,
    ricci_suite,
    semisymmetry_suite,
    theorem44_verify,
)
from .expr import ExpressionError
from .frame import ManifoldError
from .manifest import Manifest, ManifestError, load_manifest
from .report import FAIL, FLAGS, MEASURED, NOT_APPLICABLE, PASS, VACUOUS, IdentityReport
from .structure import verify_lp_axioms
from .submanifold import (
    cr_structure_suite,
    generalized_gauss_weingarten_residuals,
    integrability_tests,
    lemma54_and_prop59_residuals,
)

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
MIN_SAMPLES = 8

STRUCTURE_SUITES = {
    "axioms": lambda st, p, seed, n: verify_lp_axioms(st, seed, n),
    "connection": connection_suite,
    "torsion": torsion_suite,
    "proposition": proposition_residuals,
    "curvature": curvature_suite,
    "lemma3": lemma3_residuals,
    "ricci": ricci_suite,
    "lemma5": lemma5_residuals,
    "semisymmetry": semisymmetry_suite,
    "theorem44": theorem44_verify,
}
SUBMANIFOLD_SUITES = {
    "cr_structure": cr_structure_suite,
    "gauss_weingarten": generalized_gauss_weingarten_residuals,
    "integrability": integrability_tests,
    "lemma54": lemma54_and_prop59_residuals,
}
SUITES = {**STRUCTURE_SUITES, **SUBMANIFOLD_SUITES}

GRIDS = {
    "default": ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.7, -1.3)),
    "square": tuple(itertools.product((-2.0, -1.0, 0.0, 1.0, 2.0), repeat=2)),
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    manifest: str
    suites: tuple[str, ...]
    alpha_values: tuple[float, ...]
    beta_values: tuple[float, ...]
    grid: tuple[tuple[float, float], ...]
    seed: int
    samples: int
    tolerance_overrides: tuple[tuple[str, float], ...]
    output_format: str

    def echo(self) -> dict:
        d = asdict(self)
        d["suites"] = list(self.suites)
        d["grid"] = [list(p) for p in self.grid]
        d["alpha_values"] = list(self.alpha_values)
        d["beta_values"] = list(self.beta_values)
        d["tolerance_overrides"] = dict(self.tolerance_overrides)
        return d


# ---------------------------------------------------------------------------
# configuration


def _parse_tol(items) -> tuple[tuple[str, float], ...]:
    out = {}
    for item in items or ():
        suite, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects suite=value, got {item!r}")
        if suite not in SUITES:
            raise UsageError(f"--tol names unknown suite {suite!r}")
        try:
            v = float(value)
        except ValueError:
            raise UsageError(f"--tol value for {suite} is not a number: {value!r}") from None
        if not (math.isfinite(v) and v >= 0):
            raise UsageError(f"--tol value for {suite} must be finite and non-negative")
        out[suite] = v
    return tuple(sorted(out.items()))


def load_target(target: str) -> Manifest:
    if target in BUILTINS:
        return builtin_manifest(target)
    path = Path(target)
    if not path.is_file():
        raise UsageError(f"no such manifest or builtin id: {target!r} (builtins: {', '.join(BUILTINS)})")
    return load_manifest(path.read_text(encoding="utf-8"))


def _default_suites(manifest: Manifest) -> tuple[str, ...]:
    names = list(STRUCTURE_SUITES)
    if manifest.submanifold is not None:
        names += list(SUBMANIFOLD_SUITES)
    return tuple(names)


def build_config(args, manifest: Manifest) -> SuiteConfig:
    if manifest.structure is None:
        raise ManifestError("manifest has no [structure] section; nothing to verify")
    if args.suites:
        suites = tuple(s.strip() for s in args.suites.split(",") if s.strip())
        if not suites:
            raise UsageError("--suites is empty")
        for s in suites:
            if s not in SUITES:
                raise UsageError(f"unknown suite id {s!r}; known: {', '.join(SUITES)}")
            if s in SUBMANIFOLD_SUITES and manifest.submanifold is None:
                raise UsageError(f"suite {s!r} needs a [submanifold] section")
        suites = tuple(dict.fromkeys(suites))
    else:
        suites = _default_suites(manifest)
    if args.samples < MIN_SAMPLES:
        raise UsageError(f"--samples must be at least {MIN_SAMPLES}")
    alphas = tuple(args.alpha or ())
    betas = tuple(args.beta or ())
    for v in alphas + betas:
        if not math.isfinite(v):
            raise UsageError("alpha and beta must be finite")
    if alphas or betas:
        alphas = alphas or (0.0,)
        betas = betas or (0.0,)
        grid = tuple(itertools.product(alphas, betas))
    else:
        grid = GRIDS[args.grid]
    return SuiteConfig(
        manifest=args.target,
        suites=suites,
        alpha_values=alphas,
        beta_values=betas,
        grid=grid,
        seed=args.seed,
        samples=args.samples,
        tolerance_overrides=_parse_tol(args.tol),
        output_format=args.format,
    )


# ---------------------------------------------------------------------------
# running


def _run_one(manifest: Manifest, config: SuiteConfig, point, suite: str) -> IdentityReport:
    params = ConnectionParams(*point)
    target = manifest.submanifold if suite in SUBMANIFOLD_SUITES else manifest.structure
    rep = SUITES[suite](target, params, config.seed, config.samples)
    rep.suite_name = suite
    tol = dict(config.tolerance_overrides).get(suite)
    return rep.with_tolerance(tol) if tol is not None else rep


def run(manifest: Manifest, config: SuiteConfig, workers: int = 1) -> dict:
    """Execute every suite at every grid point and assemble the report document."""
    jobs = [(pt, s) for pt in config.grid for s in config.suites]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _run_one(manifest, config, *job), jobs))
    else:
        results = [_run_one(manifest, config, *job) for job in jobs]

    per_point = []
    counts = {PASS: 0, FAIL: 0, VACUOUS: 0, NOT_APPLICABLE: 0, MEASURED: 0}
    flags = set()
    it = iter(results)
    for a, b in config.grid:
        reports = [next(it) for _ in config.suites]
        for rep in reports:
            for e in rep.entries:
                counts[e.status] += 1
                flags.update(e.flags)
        per_point.append({"alpha": a, "beta": b, "reports": [_report_dict(r) for r in reports]})
    return {
        "schema": SCHEMA,
        "tool_version": __version__,
        "config": config.echo(),
        "per_grid_point": per_point,
        "summary": {
            "passed": counts[PASS],
            "failed": counts[FAIL],
            "vacuous": counts[VACUOUS],
            "not_applicable": counts[NOT_APPLICABLE],
            "measured": counts[MEASURED],
            "ok": counts[FAIL] == 0,
        },
        "flags": [{"id": f, "description": FLAGS.get(f, "")} for f in sorted(flags)],
    }


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _report_dict(rep: IdentityReport) -> dict:
    d = rep.to_dict()
    for e in d["entries"]:
        e["max_residual"] = _clean(e["max_residual"])
    return d


# ---------------------------------------------------------------------------
# rendering


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def render_text(doc: dict) -> str:
    lines = [f"lpsasakian {doc['tool_version']}  manifest={doc['config']['manifest']}  seed={doc['config']['seed']}"]
    header = f"  {'suite':<18}{'identity':<32}{'max residual':>14}{'tol':>10}  status"
    for pt in doc["per_grid_point"]:
        lines.append("")
        lines.append(f"(alpha, beta) = ({pt['alpha']:g}, {pt['beta']:g})")
        lines.append(header)
        for rep in pt["reports"]:
            for e in rep["entries"]:
                r = e["max_residual"]
                r = "n/a" if r is None else (r if isinstance(r, str) else f"{r:.3e}")
                flag = f"  [{', '.join(e['flags'])}]" if e["flags"] else ""
                lines.append(
                    f"  {rep['suite']:<18}{e['id']:<32}{r:>14}{e['tolerance']:>10.0e}  {e['status'].upper()}{flag}"
                )
    s = doc["summary"]
    lines.append("")
    lines.append(
        f"summary: {s['passed']} passed, {s['failed']} failed, {s['vacuous']} vacuous, "
        f"{s['not_applicable']} not applicable, {s['measured']} measured"
    )
    if doc["flags"]:
        lines.append("flags:")
        lines.extend(f"  {f['id']}: {f['description']}" for f in doc["flags"])
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_verify(args) -> int:
    manifest = load_target(args.target)
    config = build_config(args, manifest)
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    doc = run(manifest, config, args.workers)
    _emit(render_json(doc) if config.output_format == "json" else render_text(doc), args.out)
    return EXIT_OK if doc["summary"]["ok"] else EXIT_FAIL


def cmd_report(args) -> int:
    try:
        doc = json.loads(Path(args.path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read report {args.path!r}: {exc}") from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise UsageError(f"unsupported report schema (expected {SCHEMA})")
    _emit(render_json(doc) if args.format == "json" else render_text(doc), args.out)
    return EXIT_OK if doc["summary"]["ok"] else EXIT_FAIL


def cmd_manifest_check(args) -> int:
    m = load_target(args.path)
    spec = m.spec
    lines = [
        f"manifest ok: {spec.name or args.path}",
        f"  dimension {spec.dimension}, coordinates {', '.join(spec.coordinates)}",
        f"  frame metric {'orthonormal' if spec.orthonormal else 'general'}, "
        f"{'Lorentzian' if spec.is_lorentzian else 'not Lorentzian'}",
        f"  structure: {'present' if m.structure is not None else 'absent'}",
    ]
    if m.submanifold is not None:
        sub = m.submanifold
        lines.append(
            f"  submanifold: dimension {len(sub.emb.coordinates)}, {sub.orientation}, "
            f"D = {list(sub.split.d)}, D_perp = {list(sub.split.d_perp)}"
        )
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lpsasakian", description="Verify LP-Sasakian identities numerically.")
    p.add_argument("--version", action="version", version=f"lpsasakian {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run identity suites over an (alpha, beta) grid")
    v.add_argument("target", help="manifest path or builtin id (" + ", ".join(BUILTINS) + ")")
    v.add_argument("--suites", help="comma-separated suite ids: " + ", ".join(SUITES))
    v.add_argument("--alpha", type=float, action="append", help="repeatable; grid is alpha x beta")
    v.add_argument("--beta", type=float, action="append", help="repeatable; grid is alpha x beta")
    v.add_argument("--grid", choices=sorted(GRIDS), default="default")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=64)
    v.add_argument("--tol", action="append", metavar="SUITE=VALUE")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--out")
    v.add_argument("--workers", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="render a saved JSON report")
    r.add_argument("path")
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("--out")
    r.set_defaults(func=cmd_report)

    m = sub.add_parser("manifest", help="manifest utilities")
    msub = m.add_subparsers(dest="manifest_command", required=True, parser_class=_Parser)
    mc = msub.add_parser("check", help="parse and validate a manifest")
    mc.add_argument("path")
    mc.set_defaults(func=cmd_manifest_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (UsageError, ManifestError, ManifoldError, ExpressionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - any other failure is an internal error
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
