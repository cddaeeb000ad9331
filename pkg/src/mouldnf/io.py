"""JSON problem files, element serialization and deterministic output.

Scalars are encoded as strings (``"3/4-1/2*i"``) or integers; floats are
rejected.  Every problem file carries an ``engine`` tag and is validated
against a JSON schema that forbids unknown fields before anything is
computed.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Any, Dict, Mapping

import jsonschema

from .errors import SchemaError
from .liecore import HomogeneousProblem, SparseElement
from .moulds import Mould, letter_from_json
from .scalars import FrequencyModel, Scalar, as_scalar, build_frequency_model

__all__ = ["load_json", "validate_problem", "parse_problem", "ParsedProblem", "element_to_json",
           "element_from_json", "dumps", "write_bundle", "parse_gauge", "SCHEMAS"]


# ---------------------------------------------------------------------------
# Schemas
# ---------------------------------------------------------------------------

_SCALAR = {"type": ["string", "integer"]}
_INT_VEC = {"type": "array", "items": {"type": "integer"}}
_NAT_VEC = {"type": "array", "items": {"type": "integer", "minimum": 0}}
_MODEL = {
    "type": "object",
    "properties": {
        "q": {"type": "array", "items": _INT_VEC, "minItems": 1},
        "R": {"type": "integer", "minimum": 1},
    },
    "required": ["q"],
    "additionalProperties": False,
}
_MOULD = {
    "type": "object",
    "properties": {
        "alphabet": {"type": "array"},
        "max_len": {"type": "integer", "minimum": 0},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"word": {"type": "array"}, "value": _SCALAR},
                "required": ["word", "value"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["alphabet", "max_len", "entries"],
    "additionalProperties": False,
}
_GAUGE = {"oneOf": [{"const": "zero"}, _MOULD]}
_COMMON = {
    "engine": {"type": "string"},
    "order": {"type": "integer", "minimum": 1},
    "gauge": _GAUGE,
    "deep_verify": {"type": "boolean"},
    "description": {"type": "string"},
}
_FREQ = {"omega": {"type": "array", "items": _SCALAR}, "model": _MODEL}


def _engine_schema(engine: str, props: dict, required: list, freq: bool = True) -> dict:
    properties = dict(_COMMON)
    properties["engine"] = {"const": engine}
    properties.update(props)
    schema = {
        "type": "object",
        "properties": properties,
        "required": ["engine"] + required,
        "additionalProperties": False,
    }
    if freq:
        properties.update(_FREQ)
        schema["oneOf"] = [{"required": ["omega"]}, {"required": ["model"]}]
    return schema


def _terms(props: dict, required: list) -> dict:
    return {
        "type": "array",
        "items": {
            "type": "object",
            "properties": dict(props, c=_SCALAR),
            "required": required + ["c"],
            "additionalProperties": False,
        },
    }


SCHEMAS: Dict[str, dict] = {
    "mould": {
        "type": "object",
        "properties": {
            "engine": {"const": "mould"},
            "description": {"type": "string"},
            "alphabet": {"type": "array"},
            "eigenvalues": {"type": "array", "items": _SCALAR},
            "model": _MODEL,
            "max_len": {"type": "integer", "minimum": 0},
            "gauge": _GAUGE,
            "normalize_resonant": {"type": "boolean"},
            "deep_verify": {"type": "boolean"},
        },
        "required": ["engine", "alphabet", "max_len"],
        "additionalProperties": False,
        "oneOf": [{"required": ["eigenvalues"]}, {"required": ["model"]}],
    },
    "pd": _engine_schema("pd", {
        "N": {"type": "integer", "minimum": 1},
        "terms": _terms({"j": {"type": "integer", "minimum": 0}, "k": _NAT_VEC}, ["j", "k"]),
    }, ["N", "terms", "order"]),
    "birkhoff": _engine_schema("birkhoff", {
        "d": {"type": "integer", "minimum": 1},
        "coords": {"enum": ["xy", "zw"]},
        "grading": {"enum": ["degree", "eps"]},
        "real": {"type": "boolean"},
        "terms": _terms({"k": _NAT_VEC, "l": _NAT_VEC, "eps": {"type": "integer", "minimum": 0}},
                        ["k", "l"]),
    }, ["d", "terms", "order"]),
    "averaging": _engine_schema("averaging", {
        "d": {"type": "integer", "minimum": 1},
        "Nslow": {"type": "integer", "minimum": 0},
        "hamiltonian": {"type": "boolean"},
        "terms": _terms({"n": _INT_VEC, "p": _NAT_VEC, "eps": {"type": "integer", "minimum": 1},
                         "target": {"type": "integer", "minimum": 0}}, ["n", "p", "eps"]),
    }, ["d", "Nslow", "terms", "order"]),
    "quantum": _engine_schema("quantum", {
        "D": {"type": "integer", "minimum": 1},
        "energies": {"type": "array", "items": _SCALAR},
        "hbar": _SCALAR,
        "matrices": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "eps": {"type": "integer", "minimum": 1},
                    "matrix": {"type": "array", "items": {"type": "array", "items": _SCALAR}},
                },
                "required": ["eps", "matrix"],
                "additionalProperties": False,
            },
        },
    }, ["D", "energies", "hbar", "matrices", "order"], freq=False),
    "moyal": _engine_schema("moyal", {
        "d": {"type": "integer", "minimum": 1},
        "omega": {"type": "array", "items": _SCALAR},
        "classical_omega": {"type": "array", "items": _SCALAR},
        "hbar": {"const": "symbolic"},
        "terms": _terms({"k": _NAT_VEC, "l": _NAT_VEC, "eps": {"type": "integer", "minimum": 1},
                         "hbar": {"type": "integer", "minimum": 0}}, ["k", "l", "eps"]),
    }, ["d", "omega", "terms", "order"], freq=False),
}


# ---------------------------------------------------------------------------
# Loading and validation
# ---------------------------------------------------------------------------


def _reject_floats(text: str):
    def bad(_):
        raise SchemaError("floating-point numbers are not allowed; use rational strings")
    return json.loads(text, parse_float=bad)


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return _reject_floats(fh.read())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from None
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror}") from None


def validate_problem(data: Any) -> str:
    """Validate against the schema of the declared engine; return the engine tag."""
    if not isinstance(data, dict) or "engine" not in data:
        raise SchemaError("problem must be an object with an 'engine' field")
    engine = data["engine"]
    if engine not in SCHEMAS:
        raise SchemaError(f"unknown engine {engine!r}")
    try:
        jsonschema.validate(data, SCHEMAS[engine])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"schema violation at {where}: {exc.message}") from None
    return engine


def _scalar(x) -> Scalar:
    try:
        return as_scalar(x) if isinstance(x, int) else Scalar.parse(x)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def _model(data: Mapping, letters=None, max_len: int = 1) -> FrequencyModel:
    from .scalars import auto_frequency_model
    q = [list(r) for r in data["q"]]
    if "R" in data:
        return build_frequency_model(q, data["R"])
    return auto_frequency_model(q, letters or [], max_len)


def parse_gauge(data, alphabet, max_len: int):
    """``"zero"``/``None`` or a mould JSON object, re-expressed on the problem alphabet."""
    if data is None or data == "zero":
        return None
    M = Mould.from_json(data)
    if set(M.alphabet) - set(alphabet):
        raise SchemaError("gauge mould uses letters outside the problem alphabet")
    return Mould(alphabet, max_len, {w: v for w, v in M.entries.items() if len(w) <= max_len})


class ParsedProblem:
    """A validated problem turned into library objects."""

    def __init__(self, engine: str, data: dict, **kw):
        self.engine = engine
        self.data = data
        self.__dict__.update(kw)


def _omega_or_model(data):
    if "model" in data:
        return None, data["model"]
    return [_scalar(w) for w in data["omega"]], None


def parse_problem(data: dict, order: int | None = None, max_len: int | None = None) -> ParsedProblem:
    """Validate and convert a problem file into library inputs."""
    from .engines import averaging as av
    from .engines import hamiltonian as ham
    from .engines import moyal as moy
    from .engines import quantum as qu
    from .engines import vectorfields as pd

    engine = validate_problem(data)
    if engine == "mould":
        letters = [letter_from_json(a) for a in data["alphabet"]]
        L = data["max_len"] if max_len is None else max_len
        if "model" in data:
            lam = _model(data["model"], letters, max(L, 1))
        else:
            if len(data["eigenvalues"]) != len(letters):
                raise SchemaError("eigenvalues must list one value per letter")
            lam = {a: _scalar(v) for a, v in zip(letters, data["eigenvalues"])}
        if len(set(letters)) != len(letters):
            raise SchemaError("alphabet letters must be distinct")
        probe = Mould(letters, L)
        gauge = parse_gauge(data.get("gauge"), probe.alphabet, L)
        return ParsedProblem(engine, data, eigenvalues=lam, alphabet=probe.alphabet, max_len=L,
                             gauge=gauge, normalize_resonant=data.get("normalize_resonant", False))

    m = data["order"] if order is None else order
    extra: Dict[str, Any] = {}
    try:
        if engine == "pd":
            N = data["N"]
            terms = {}
            for t in data["terms"]:
                key = (t["j"], tuple(t["k"]))
                terms[key] = terms.get(key, Scalar(0)) + _scalar(t["c"])
            B = pd.PolyVectorField(terms, N)
            omega, model = _omega_or_model(data)
            builder = _freq_builder(pd.pd_decompose, omega, model, B)
        elif engine == "birkhoff":
            ctx = ham.HamContext(data["d"], grading=data.get("grading", "degree"),
                                 coords=data.get("coords", "xy"))
            terms = {}
            for t in data["terms"]:
                key = (t.get("eps", 0), 0, tuple(t["k"]), tuple(t["l"]))
                terms[key] = terms.get(key, Scalar(0)) + _scalar(t["c"])
            B = ham.PolyHamiltonian(terms, ctx)
            real = data.get("real", False)
            omega, model = _omega_or_model(data)
            extra["real"] = real
            builder = _freq_builder(ham.birkhoff_decompose, omega, model, B, real=real)
        elif engine == "averaging":
            ctx = av.TrigContext(data["d"], data["Nslow"])
            hamiltonian = data.get("hamiltonian", False)
            terms = {}
            for t in data["terms"]:
                if hamiltonian:
                    if "target" in t:
                        raise SchemaError("Hamiltonian terms take no 'target'")
                    key = (tuple(t["n"]), tuple(t["p"]), t["eps"])
                else:
                    if "target" not in t:
                        raise SchemaError("vector field terms need a 'target'")
                    key = (t["target"], tuple(t["n"]), tuple(t["p"]), t["eps"])
                terms[key] = terms.get(key, Scalar(0)) + _scalar(t["c"])
            B = (av.TrigPolyHamiltonian if hamiltonian else av.TrigPolyField)(terms, ctx)
            omega, model = _omega_or_model(data)
            builder = _freq_builder(av.averaging_decompose, omega, model, B)
        elif engine == "quantum":
            D = data["D"]
            ctx = qu.QuantumContext(D, _scalar(data["hbar"]))
            energies = [_scalar(E) for E in data["energies"]]
            if len(energies) != D:
                raise SchemaError("need one energy per basis vector")
            terms = {}
            for item in data["matrices"]:
                M = item["matrix"]
                if len(M) != D or any(len(row) != D for row in M):
                    raise SchemaError(f"matrix at eps^{item['eps']} is not {D}x{D}")
                for r, row in enumerate(M):
                    for c, v in enumerate(row):
                        key = (item["eps"], r, c)
                        terms[key] = terms.get(key, Scalar(0)) + _scalar(v)
            B = qu.MatrixOperator(terms, ctx)
            extra["energies"] = energies

            def builder(mm, B=B, energies=energies):
                return qu.quantum_decompose(energies, B, mm)
        elif engine == "moyal":
            omega = [_scalar(w) for w in data["omega"]]
            if len(omega) != data["d"]:
                raise SchemaError("omega must have d entries")
            ctx = ham.HamContext(data["d"], grading="eps", coords="xy", scales=tuple(omega))
            terms = {}
            for t in data["terms"]:
                key = (t["eps"], t.get("hbar", 0), tuple(t["k"]), tuple(t["l"]))
                terms[key] = terms.get(key, Scalar(0)) + _scalar(t["c"])
            B = moy.MoyalSymbol(terms, ctx)
            extra["omega"] = omega
            extra["classical_omega"] = ([_scalar(w) for w in data["classical_omega"]]
                                        if "classical_omega" in data else None)

            def builder(mm, B=B, omega=omega):
                return moy.moyal_decompose(omega, B, mm)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None
    return ParsedProblem(engine, data, perturbation=B, order=m, build=builder,
                         gauge_data=data.get("gauge"), **extra)


def _freq_builder(decompose, omega, model, B, **kw):
    if model is None:
        return lambda mm: decompose(omega, B, mm, **kw)
    q = [list(r) for r in model["q"]]
    if "R" in model:
        freq = build_frequency_model(q, model["R"])
        return lambda mm: decompose(freq, B, mm, **kw)
    return lambda mm: decompose(None, B, mm, q=q, **kw)


# ---------------------------------------------------------------------------
# Element serialization
# ---------------------------------------------------------------------------


def _to_listy(key):
    if isinstance(key, tuple):
        return [_to_listy(k) for k in key]
    return key


def _to_tuple(data):
    if isinstance(data, list):
        return tuple(_to_tuple(x) for x in data)
    return data


def _element_classes():
    from .engines.averaging import TrigContext, TrigPoly, TrigPolyField, TrigPolyHamiltonian
    from .engines.hamiltonian import CanonicalPoly, HamContext, PolyHamiltonian
    from .engines.moyal import MoyalSymbol
    from .engines.quantum import MatrixOperator, QuantumContext
    from .engines.vectorfields import Polynomial, PolyVectorField
    classes = {c.__name__: c for c in (TrigPoly, TrigPolyField, TrigPolyHamiltonian, CanonicalPoly,
                                       PolyHamiltonian, MoyalSymbol, MatrixOperator, Polynomial,
                                       PolyVectorField)}
    return classes, HamContext, TrigContext, QuantumContext


def _ctx_to_json(ctx):
    _, HamContext, TrigContext, QuantumContext = _element_classes()
    if isinstance(ctx, HamContext):
        return {"d": ctx.d, "grading": ctx.grading, "coords": ctx.coords,
                "scales": [str(s) for s in ctx.scales]}
    if isinstance(ctx, TrigContext):
        return {"d": ctx.d, "Nslow": ctx.Nslow}
    if isinstance(ctx, QuantumContext):
        return {"D": ctx.D, "hbar": str(ctx.hbar)}
    return {"N": ctx}


def _ctx_from_json(data):
    _, HamContext, TrigContext, QuantumContext = _element_classes()
    if "grading" in data:
        return HamContext(data["d"], data["grading"], data["coords"],
                          tuple(Scalar.parse(s) for s in data["scales"]))
    if "Nslow" in data:
        return TrigContext(data["d"], data["Nslow"])
    if "D" in data:
        return QuantumContext(data["D"], Scalar.parse(data["hbar"]))
    return data["N"]


def element_to_json(X: SparseElement) -> dict:
    return {
        "type": type(X).__name__,
        "context": _ctx_to_json(X.ctx),
        "terms": [{"key": _to_listy(k), "c": str(v)} for k, v in X.sorted_terms()],
    }


def element_from_json(data: Mapping) -> SparseElement:
    classes = _element_classes()[0]
    try:
        cls = classes[data["type"]]
        ctx = _ctx_from_json(data["context"])
        terms = {_to_tuple(t["key"]): Scalar.parse(str(t["c"])) for t in data["terms"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed element: {exc}") from None
    return cls(terms, ctx)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def dumps(obj: Any) -> str:
    """Deterministic JSON text (insertion order kept, two-space indent)."""
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_bundle(out_dir: str, files: Mapping[str, Any]) -> list:
    """Write every file or none: stage temporaries, then rename them into place."""
    os.makedirs(out_dir, exist_ok=True)
    staged = []
    try:
        for name in sorted(files):
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=out_dir)
            staged.append((tmp, os.path.join(out_dir, name)))
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                payload = files[name]
                fh.write(payload if isinstance(payload, str) else dumps(payload))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]
