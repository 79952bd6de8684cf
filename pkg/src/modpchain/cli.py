"""Command-line entry point.

Exit codes: 0 success or pass, 1 negative result (not equivalent, a check
failed), 2 usage, parse or input error, 3 internal invariant violated.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import io
from .chain import IntegerChain, boundary, exact_mass, mass
from .codim0 import check_grid_bound
from .errors import ChainError, InternalError, ParamOutOfRange, SchemaError
from .flatnorm import cone, flat_norm, flat_norm_mod_p, relaxed_flat_norm, zero_sum_check
from .generate import parallel_bundle, path_graph, random_1chain, random_grid
from .modp import equiv_mod_p, select_representative, select_residue
from .repair import repair, verify_repair

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
MODULAR = {"select", "pmass", "equiv", "repair", "verify", "grid-check", "grid-random", "zerosum"}
SEEDED = {"gen", "grid-random"}


@dataclass
class RunConfig:
    subcommand: str
    p: int | None = None
    seed: int | None = None
    paths: dict[str, str | None] = field(default_factory=dict)
    force: bool = False
    options: dict[str, Any] = field(default_factory=dict)
    json: bool = False

    def __post_init__(self) -> None:
        if self.subcommand in MODULAR and self.p is None:
            raise ParamOutOfRange(f"{self.subcommand} needs --p")
        if self.p is not None and self.p < 2:
            raise ParamOutOfRange(f"p must be >= 2, got {self.p}")
        if self.subcommand in SEEDED and self.seed is None:
            raise ParamOutOfRange(f"{self.subcommand} needs --seed")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise ParamOutOfRange(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass
class Outcome:
    code: int
    report: dict
    text: str | None = None  # replaces the key/value rendering when set


def _value(x) -> Any:
    if isinstance(x, Fraction):
        return io.rational_str(x)
    return x


def _pick(chains: dict[str, IntegerChain], name: str | None, source: str, degree: int | None = None) -> IntegerChain:
    if name is not None:
        if name not in chains:
            raise SchemaError(f"{source}: no chain named {name!r} (have {sorted(chains)})")
        ch = chains[name]
    elif len(chains) == 1:
        ch = next(iter(chains.values()))
    else:
        raise SchemaError(f"{source}: {len(chains)} chains, choose one with --chain")
    if degree is not None and ch.degree != degree:
        raise SchemaError(f"{source}: chain has degree {ch.degree}, expected {degree}")
    return ch


def _load(path: str, name: str | None, degree: int | None = None) -> IntegerChain:
    _, chains = io.read_chains(path)
    return _pick(chains, name, path, degree)


def _mass_fields(chain: IntegerChain, prefix: str) -> dict:
    exact = exact_mass(chain)
    return {prefix: _value(exact) if exact is not None else mass(chain)}


def _emit(path: str | None, doc: dict) -> str | None:
    text = io.write_json(path, doc)
    return None if path is not None else text


def cmd_select(cfg: RunConfig) -> Outcome:
    ch = _load(cfg.paths["in"], cfg.options.get("chain"))
    sel = select_representative(ch, cfg.p)
    text = _emit(cfg.paths.get("out"), io.chain_document(ch.complex, {"select": sel}))
    return Outcome(EXIT_OK, {"p": cfg.p, "coeffs": io.coeffs_json(sel)}, text)


def cmd_pmass(cfg: RunConfig) -> Outcome:
    ch = _load(cfg.paths["in"], cfg.options.get("chain"))
    rep = {"p": cfg.p, "degree": ch.degree}
    rep.update(_mass_fields(ch, "mass"))
    rep.update(_mass_fields(select_representative(ch, cfg.p), "pmass"))
    return Outcome(EXIT_OK, rep)


def cmd_equiv(cfg: RunConfig) -> Outcome:
    a = _load(cfg.paths["a"], cfg.options.get("chain"))
    b = _load(cfg.paths["b"], cfg.options.get("chain"))
    ok, cert = equiv_mod_p(a, b, cfg.p)
    rep: dict = {"p": cfg.p, "equivalent": ok}
    if ok:
        if not cert.checked:
            raise InternalError("quotient failed its own check")
        rep["quotient"] = io.coeffs_json(cert.quotient)
        rep["certificate_checked"] = cert.checked
    else:
        diff = a - b
        rep["witness_cell"] = next(i for i, c in diff if c % cfg.p)
    return Outcome(EXIT_OK if ok else EXIT_NEGATIVE, rep)


def cmd_repair(cfg: RunConfig) -> Outcome:
    ch = _load(cfg.paths["in"], cfg.options.get("chain"), degree=1)
    p = cfg.p
    out, cert = repair(ch, p)
    io.write_json(cfg.paths.get("out"), io.chain_document(ch.complex, {"repaired": out}))
    if cfg.paths.get("cert"):
        io.write_json(cfg.paths["cert"], io.certificate_json(cert))
    pm_bd = sum(abs(select_residue(c, p)) for _, c in boundary(ch))
    bd_out = mass(boundary(out))
    rep: dict = {
        "p": p,
        "iterations": cert.iterations,
        "boundary_mass_start": cert.trace[0].boundary_mass_before if cert.trace else mass(boundary(out)),
        "boundary_mass_repaired": bd_out,
        "pmass_boundary_input": pm_bd,
        "boundary_ratio": _value(Fraction(bd_out, pm_bd)) if pm_bd else None,
        "coeffs": io.coeffs_json(out),
    }
    rep.update(_mass_fields(out, "mass_repaired"))
    rep.update(_mass_fields(select_representative(ch, p), "pmass_input"))
    report_dir = cfg.paths.get("report_dir")
    if report_dir:
        from .plotting import plot_repair, write_tsv

        d = Path(report_dir)
        d.mkdir(parents=True, exist_ok=True)
        write_tsv(
            d / "repair_trace.tsv",
            ["iteration", "vertex", "start", "end", "path_edges", "boundary_mass_before", "boundary_mass_after"],
            (
                [i, st.vertex, st.path.start, st.path.end, " ".join(f"{e}{'+' if s > 0 else '-'}" for e, s in st.path.steps),
                 st.boundary_mass_before, st.boundary_mass_after]
                for i, st in enumerate(cert.trace)
            ),
        )
        plot_repair(cert, d / "repair.png")
    return Outcome(EXIT_OK, rep)


def cmd_verify(cfg: RunConfig) -> Outcome:
    p = cfg.p
    a = _load(cfg.paths["a"], cfg.options.get("chain"), degree=1)
    b = _load(cfg.paths["b"], cfg.options.get("chain_b"), degree=1)
    cert = io.read_certificate(cfg.paths["cert"])
    extra = []
    if cert.p != p:
        extra.append(f"certificate is for p={cert.p}")
    if cert.input != a:
        extra.append("certificate input differs from the original chain")
    if cert.output != b:
        extra.append("certificate output differs from the repaired chain")
    # a certificate for other data is not replayed; only the direct checks run
    report = verify_repair(a, b, p, None if extra else cert)
    lines = report.lines()
    lines += [f"FAIL binding {x}" for x in extra]
    passed = report.passed and not extra
    rep = {
        "p": p,
        "passed": passed,
        "checks": {c.name: c.passed for c in report.checks},
        "binding_problems": extra,
    }
    return Outcome(EXIT_OK if passed else EXIT_NEGATIVE, rep, None if cfg.json else "\n".join(lines) + "\n")


def cmd_flatnorm(cfg: RunConfig) -> Outcome:
    T = _load(cfg.paths["in"], cfg.options.get("chain"))
    B = cfg.options.get("bound")
    if cfg.p is None:
        dec = flat_norm(T, B, force=cfg.force)
    else:
        dec = flat_norm_mod_p(T, cfg.p, B, force=cfg.force)
    if dec.residual() != T:
        raise InternalError("flat-norm witness does not rebuild the input")
    rep: dict = {
        "p": cfg.p,
        "value": _value(dec.value),
        "exact": dec.exact,
        "bound": dec.bound_used,
        "saturated": dec.saturated,
        "R": io.coeffs_json(dec.R),
        "S": io.coeffs_json(dec.S) if dec.S is not None else None,
        "Q": io.coeffs_json(dec.Q),
    }
    if cfg.options.get("relax"):
        if cfg.p is not None or T.degree != 0:
            raise ParamOutOfRange("--relax applies to the classical flat norm of a 0-chain")
        rel = relaxed_flat_norm(T, dec.bound_used)
        rep["relaxation"] = _value(rel.value)
        rep["relaxation_method"] = rel.method
    return Outcome(EXIT_OK, rep)


def cmd_grid_check(cfg: RunConfig) -> Outcome:
    T = io.read_grid(cfg.paths["theta"])
    dims = cfg.options.get("dims")
    if dims is not None and tuple(dims) != T.dims:
        raise SchemaError(f"{cfg.paths['theta']}: dims {list(T.dims)} but --dims {list(dims)}")
    r = check_grid_bound(T, cfg.p)
    rep = _grid_row(r) | {"dims": list(T.dims), "passed": r.passed}
    report_dir = cfg.paths.get("report_dir")
    if report_dir:
        from .plotting import plot_grid

        Path(report_dir).mkdir(parents=True, exist_ok=True)
        plot_grid(T, cfg.p, Path(report_dir) / "grid.png")
    return Outcome(EXIT_OK if r.passed else EXIT_NEGATIVE, rep)


def _grid_row(r) -> dict:
    return {
        "p": r.p,
        "select_boundary_mass": _value(r.lhs),
        "bound": _value(r.rhs),
        "pmass_boundary": _value(r.rhs / (r.p - 1)),
        "ratio": _value(r.ratio) if r.ratio is not None else None,
        "constant": _value(r.constant) if r.constant is not None else None,
        "max_face_jump": r.max_face_jump,
    }


def _max(values) -> Fraction | None:
    vals = [v for v in values if v is not None]
    return max(vals) if vals else None


def cmd_grid_random(cfg: RunConfig) -> Outcome:
    from .rng import SplitMix64

    rng = SplitMix64(cfg.seed)
    count = cfg.options.get("count", 1)
    if not 1 <= count <= 10_000:
        raise ParamOutOfRange(f"count must be in 1..10000, got {count}")
    reports = []
    for _ in range(count):
        T = random_grid(rng, cfg.options["dims"], cfg.options["range"])
        reports.append(check_grid_bound(T, cfg.p))
    rows = [_grid_row(r) | {"instance": i, "passed": r.passed} for i, r in enumerate(reports)]
    failures = sum(not r.passed for r in reports)
    max_ratio = _max(r.ratio for r in reports)
    max_const = _max(r.constant for r in reports)
    rep = {
        "p": cfg.p,
        "seed": cfg.seed,
        "dims": list(cfg.options["dims"]),
        "range": cfg.options["range"],
        "count": count,
        "failures": failures,
        "max_ratio": _value(max_ratio),
        "max_constant": _value(max_const),
    }
    report_dir = cfg.paths.get("report_dir")
    if report_dir:
        from .plotting import plot_sweep, write_tsv

        d = Path(report_dir)
        d.mkdir(parents=True, exist_ok=True)
        cols = ["instance", "p", "select_boundary_mass", "pmass_boundary", "bound", "ratio", "constant", "max_face_jump", "passed"]
        write_tsv(d / "grid_sweep.tsv", cols, ([row[c] for c in cols] for row in rows))
        plot_sweep(rows, d / "grid_sweep.png")
    return Outcome(EXIT_OK if not failures else EXIT_NEGATIVE, rep)


def cmd_cone(cfg: RunConfig) -> Outcome:
    R = _load(cfg.paths["in"], cfg.options.get("chain"), degree=0)
    K2, C = cone(R, cfg.options["apex"])
    text = _emit(cfg.paths.get("out"), io.chain_document(K2, {"base": R.transfer(K2), "cone": C}))
    total = sum(c for _, c in R)
    return Outcome(EXIT_OK, {"apex_vertex": K2.edges[-1][1] if C else None, "apex_multiplicity": total, "coeffs": io.coeffs_json(C)}, text)


def cmd_zerosum(cfg: RunConfig) -> Outcome:
    R = _load(cfg.paths["in"], cfg.options.get("chain"), degree=0)
    ok = zero_sum_check(R, cfg.p)
    total = sum(c for _, c in R)
    return Outcome(EXIT_OK if ok else EXIT_NEGATIVE, {"p": cfg.p, "sum": total, "residue": total % cfg.p, "passed": ok})


def cmd_gen(cfg: RunConfig) -> Outcome:
    kind = cfg.options["kind"]
    o = cfg.options
    if kind == "random-1chain":
        K, ch = random_1chain(cfg.seed, o["vertices"], o["edges"], o["coeff_range"], o["dim"], o["coord_range"])
        doc = io.chain_document(K, {"T": ch})
    elif kind == "random-grid":
        if o.get("dims") is None:
            raise ParamOutOfRange("random-grid needs --dims")
        doc = io.grid_document(random_grid(cfg.seed, o["dims"], o["range"]))
    elif kind == "parallel-bundle":
        K, ch = parallel_bundle(o["k"])
        doc = io.chain_document(K, {"T": ch})
    elif kind == "path-graph":
        K, ch = path_graph(o["n"])
        doc = io.chain_document(K, {"T": ch})
    else:
        raise ParamOutOfRange(f"unknown generator {kind!r}")
    text = _emit(cfg.paths.get("out"), doc)
    return Outcome(EXIT_OK, {"kind": kind, "seed": cfg.seed}, text)


COMMANDS: dict[str, Callable[[RunConfig], Outcome]] = {
    "select": cmd_select,
    "pmass": cmd_pmass,
    "equiv": cmd_equiv,
    "repair": cmd_repair,
    "verify": cmd_verify,
    "flatnorm": cmd_flatnorm,
    "grid-check": cmd_grid_check,
    "grid-random": cmd_grid_random,
    "cone": cmd_cone,
    "zerosum": cmd_zerosum,
    "gen": cmd_gen,
}


def _render(out: Outcome, as_json: bool) -> str:
    # a document written to stdout takes precedence over the report
    if out.text is not None:
        return out.text
    if as_json:
        return io.dumps(out.report)
    lines = []
    for k, v in out.report.items():
        shown = json.dumps(io.plain(v), sort_keys=True) if isinstance(v, (dict, list)) else v
        lines.append(f"{k}: {shown}")
    return "\n".join(lines) + "\n"


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        out = COMMANDS[cfg.subcommand](cfg)
    except InternalError as exc:
        print(f"internal error: {exc}", file=stderr)
        return EXIT_INTERNAL
    except (ChainError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    stdout.write(_render(out, cfg.json))
    return out.code


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _rational_list(text: str) -> list[str]:
    parts = [x.strip() for x in text.split(",")]
    for x in parts:
        try:
            Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"bad coordinate {x!r}") from None
        if any(ch in x for ch in ".eE"):
            raise argparse.ArgumentTypeError(f"coordinate {x!r} must be an integer or p/q")
    return parts


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modpchain", description="Integral 1-chains modulo p.")
    parser.add_argument("--manifest", help="JSON file listing runs to execute in order")
    sub = parser.add_subparsers(dest="subcommand")

    def add(name: str, help: str, p: str = "required") -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help)
        if p == "required":
            sp.add_argument("--p", type=int, required=True)
        elif p == "optional":
            sp.add_argument("--p", type=int)
        sp.add_argument("--json", action="store_true", help="machine-readable report on stdout")
        return sp

    sp = add("select", "select representative")
    sp.add_argument("--in", dest="in_", required=True)
    sp.add_argument("--chain")
    sp.add_argument("--out")

    sp = add("pmass", "mass and p-mass")
    sp.add_argument("--in", dest="in_", required=True)
    sp.add_argument("--chain")

    sp = add("equiv", "test congruence mod p")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--chain")

    sp = add("repair", "repair a 1-chain mod p")
    sp.add_argument("--in", dest="in_", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--cert")
    sp.add_argument("--chain")
    sp.add_argument("--report-dir")

    sp = add("verify", "check a repair certificate")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("cert")
    sp.add_argument("--chain")
    sp.add_argument("--chain-b")

    sp = add("flatnorm", "bounded exact flat norm (mod p with --p)", p="optional")
    sp.add_argument("--in", dest="in_", required=True)
    sp.add_argument("--bound", type=int)
    sp.add_argument("--chain")
    sp.add_argument("--force", action="store_true")
    sp.add_argument("--relax", action="store_true", help="also report the continuous relaxation")

    sp = add("grid-check", "boundary mass of the select representative on a grid")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--dims", type=_int_list)
    sp.add_argument("--report-dir")

    sp = add("grid-random", "seeded sweep of grid checks")
    sp.add_argument("--dims", type=_int_list, required=True)
    sp.add_argument("--range", type=int, required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--report-dir")

    sp = add("cone", "cone over a 0-chain", p="none")
    sp.add_argument("--in", dest="in_", required=True)
    sp.add_argument("--apex", type=_rational_list, required=True)
    sp.add_argument("--chain")
    sp.add_argument("--out")

    sp = add("zerosum", "coefficient sum of a 0-chain mod p")
    sp.add_argument("--in", dest="in_", required=True)
    sp.add_argument("--chain")

    sp = add("gen", "generate a fixture", p="none")
    sp.add_argument("kind", choices=["random-1chain", "random-grid", "parallel-bundle", "path-graph"])
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.add_argument("--vertices", type=int, default=6)
    sp.add_argument("--edges", type=int, default=10)
    sp.add_argument("--coeff-range", type=int, default=5)
    sp.add_argument("--dim", type=int, default=2)
    sp.add_argument("--coord-range", type=int, default=10)
    sp.add_argument("--dims", type=_int_list)
    sp.add_argument("--range", type=int, default=10)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--n", type=int, default=3)
    return parser


_PATH_KEYS = {"in_": "in", "out": "out", "cert": "cert", "a": "a", "b": "b", "theta": "theta", "report_dir": "report_dir"}


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = dict(vars(ns))
    d.pop("manifest", None)
    sub = d.pop("subcommand")
    p = d.pop("p", None)
    seed = d.pop("seed", None)
    force = d.pop("force", False)
    as_json = d.pop("json", False)
    paths = {v: d.pop(k) for k, v in _PATH_KEYS.items() if k in d}
    return RunConfig(sub, p, seed, paths, force, d, as_json)


def _run_argv(parser: argparse.ArgumentParser, argv: list[str], stdout, stderr) -> int:
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if ns.manifest:
        if ns.subcommand:
            print("error: --manifest cannot be combined with a subcommand", file=stderr)
            return EXIT_USAGE
        return _run_manifest(parser, ns.manifest, stdout, stderr)
    if not ns.subcommand:
        parser.print_usage(stderr)
        return EXIT_USAGE
    try:
        cfg = config_from_args(ns)
    except ChainError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    return run(cfg, stdout, stderr)


def _run_manifest(parser, path: str, stdout, stderr) -> int:
    try:
        doc = io.load_json(path, "manifest")
    except ChainError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    worst = EXIT_OK
    for i, entry in enumerate(doc["runs"]):
        args = entry["args"]
        if "--manifest" in args:
            print(f"error: run {i}: nested manifests are not allowed", file=stderr)
            code = EXIT_USAGE
        else:
            code = _run_argv(parser, args, stdout, stderr)
        print(f"# run {i} exit {code}", file=stderr)
        worst = max(worst, code)
    return worst


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    return _run_argv(parser, sys.argv[1:] if argv is None else list(argv), sys.stdout, sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
