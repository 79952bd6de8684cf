"""JSON documents: loading with strict schema checks, deterministic dumping."""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
from jsonschema import Draft202012Validator

from .chain import IntegerChain
from .codim0 import GridChain
from .complex import GeometricComplex, as_rational, build_complex
from .errors import ChainError, SchemaError
from .repair import RepairCertificate, SegmentPath, TraceStep

VERSION = 1


@lru_cache(maxsize=1)
def _schema() -> dict:
    text = resources.files("modpchain").joinpath("schema/documents.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def validate(doc: Any, kind: str, source: str = "<document>") -> None:
    schema = {"$ref": f"#/$defs/{kind}", "$defs": _schema()["$defs"]}
    errors = sorted(Draft202012Validator(schema).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "$" + "".join(f"[{p!r}]" if isinstance(p, str) else f"[{p}]" for p in err.absolute_path)
        msg = err.message
        if isinstance(err.instance, Decimal):
            msg = f"floating-point value {err.instance} is not allowed (use an integer or a 'p/q' string)"
        raise SchemaError(f"{source}: {kind} invalid at {where}: {msg}")


def parse_json(text: str, source: str = "<string>") -> Any:
    try:
        # Decimal keeps floats recognisable so the schema can reject them
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_json(path: str | Path, kind: str) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read ({exc.strerror})") from None
    doc = parse_json(text, str(path))
    validate(doc, kind, str(path))
    return doc


def dumps(doc: Any) -> str:
    return json.dumps(plain(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path: str | Path | None, doc: Any) -> str:
    text = dumps(doc)
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def plain(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, Fraction):
        return rational_str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    return x


def rational_str(q: Fraction) -> int | str:
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def coeffs_json(chain: IntegerChain) -> dict[str, int]:
    return {str(i): c for i, c in chain}


def complex_json(K: GeometricComplex) -> dict:
    return {
        "ambient_dim": K.ambient_dim,
        "vertices": [[rational_str(c) for c in v] for v in K.vertices],
        "edges": [list(e) for e in K.edges],
    }


def complex_from_json(doc: dict, source: str = "<document>") -> GeometricComplex:
    try:
        K = build_complex([[as_rational(c) for c in v] for v in doc["vertices"]], doc["edges"])
    except (ValueError, ZeroDivisionError, IndexError) as exc:
        raise SchemaError(f"{source}: {exc}") from None
    if K.n_vertices and K.ambient_dim != doc["ambient_dim"]:
        raise SchemaError(f"{source}: ambient_dim {doc['ambient_dim']} but points have {K.ambient_dim} coordinates")
    if not K.n_vertices:
        K = GeometricComplex(doc["ambient_dim"], (), (), ())
    return K


def chain_document(K: GeometricComplex, chains: dict[str, IntegerChain]) -> dict:
    doc = {"version": VERSION, **complex_json(K), "chains": {}}
    for name, ch in chains.items():
        if ch.complex != K:
            raise ChainError(f"chain {name!r} lives on a different complex")
        doc["chains"][name] = {"degree": ch.degree, "coeffs": coeffs_json(ch)}
    return doc


def chains_from_document(doc: dict, source: str = "<document>") -> tuple[GeometricComplex, dict[str, IntegerChain]]:
    K = complex_from_json(doc, source)
    chains = {}
    for name, ch in doc["chains"].items():
        try:
            chains[name] = IntegerChain(K, ch["degree"], {int(i): c for i, c in ch["coeffs"].items()})
        except ChainError as exc:
            raise SchemaError(f"{source}: chain {name!r}: {exc}") from None
    return K, chains


def read_chains(path: str | Path) -> tuple[GeometricComplex, dict[str, IntegerChain]]:
    return chains_from_document(load_json(path, "chain_document"), str(path))


def grid_document(T: GridChain) -> dict:
    return {
        "version": VERSION,
        "dims": list(T.dims),
        "theta": T.theta.tolist(),
        "cell_edge": rational_str(T.cell_edge),
    }


def grid_from_document(doc: dict, source: str = "<document>") -> GridChain:
    dims = tuple(doc["dims"])
    try:
        theta = np.array(doc["theta"], dtype=object)
        if theta.size != int(np.prod(dims)) or not all(isinstance(x, int) and not isinstance(x, bool) for x in theta.flat):
            raise ValueError(f"theta must hold {int(np.prod(dims))} integers for dims {list(dims)}")
        return GridChain(dims, theta.astype(np.int64).reshape(dims), as_rational(doc.get("cell_edge", 1)))
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise SchemaError(f"{source}: {exc}") from None


def read_grid(path: str | Path) -> GridChain:
    return grid_from_document(load_json(path, "grid_document"), str(path))


def certificate_json(cert: RepairCertificate) -> dict:
    return {
        "version": VERSION,
        "kind": "repair-certificate",
        "p": cert.p,
        "complex": complex_json(cert.input.complex),
        "input": coeffs_json(cert.input),
        "output": coeffs_json(cert.output),
        "quotient": coeffs_json(cert.quotient),
        "trace": [
            {
                "vertex": st.vertex,
                "start": st.path.start,
                "end": st.path.end,
                "steps": [list(x) for x in st.path.steps],
                "boundary_mass_before": st.boundary_mass_before,
                "boundary_mass_after": st.boundary_mass_after,
            }
            for st in cert.trace
        ],
    }


def certificate_from_json(doc: dict, source: str = "<document>") -> RepairCertificate:
    K = complex_from_json(doc["complex"], source)

    def chain(key):
        try:
            return IntegerChain(K, 1, {int(i): c for i, c in doc[key].items()})
        except ChainError as exc:
            raise SchemaError(f"{source}: {key}: {exc}") from None

    for st in doc["trace"]:
        bad_vertex = any(v >= K.n_vertices for v in (st["vertex"], st["start"], st["end"]))
        if bad_vertex or any(e >= K.n_edges for e, _ in st["steps"]):
            raise SchemaError(f"{source}: trace step references a cell outside the complex")
    trace = tuple(
        TraceStep(
            st["vertex"],
            SegmentPath(tuple((e, s) for e, s in st["steps"]), st["start"], st["end"]),
            st["boundary_mass_before"],
            st["boundary_mass_after"],
        )
        for st in doc["trace"]
    )
    return RepairCertificate(doc["p"], chain("input"), chain("output"), chain("quotient"), trace)


def read_certificate(path: str | Path) -> RepairCertificate:
    return certificate_from_json(load_json(path, "certificate_document"), str(path))
