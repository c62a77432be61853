"""Command line front-end: ``hyperconnect run`` and ``hyperconnect check``.

Exit codes: 0 success, 1 a verification failed, 2 invalid job, 3 a series or
solve did not converge.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass

import jsonschema
import numpy as np

from . import asymptotic, connection, frobenius, verify
from .errors import (AssumptionViolated, DivergentAtOne, HyperconnectError, IllConditioned,
                     NoConvergence, PoleError, ResonanceInconsistency, TheoremHypothesisViolated)
from .params import ParameterSet

EXIT_OK, EXIT_VERIFY, EXIT_INVALID, EXIT_CONVERGENCE = 0, 1, 2, 3
SCHEMA_VERSION = 1

_COMPLEX = {
    "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
    ]
}

JOB_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "hyperconnect job",
    "type": "object",
    "required": ["n", "alpha", "beta"],
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer", "minimum": 2},
        "alpha": {"type": "array", "items": _COMPLEX, "minItems": 2},
        "beta": {"type": "array", "items": _COMPLEX, "minItems": 1},
        "normalization": {
            "oneOf": [
                {"const": "canonical"},
                {"type": "array", "items": {"type": "array", "items": _COMPLEX, "minItems": 1}},
            ]
        },
        "methods": {
            "type": "array", "minItems": 1, "uniqueItems": True,
            "items": {"enum": list(connection.METHODS)},
        },
        "truncation": {"type": "integer", "minimum": 4},
        "tolerance": {"type": "number", "exclusiveMinimum": 0, "maximum": 1e-2},
        "asymptotic_m_max": {"type": "integer", "minimum": 64},
        "output": {"type": ["string", "null"]},
        "format": {"enum": ["json", "csv"]},
        "seed": {"type": ["integer", "null"]},
    },
}


class JobError(Exception):
    def __init__(self, kind, message, path=None):
        super().__init__(message)
        self.kind = kind
        self.path = list(path or [])

    def to_dict(self):
        return {"error": {"type": self.kind, "message": str(self), "path": self.path}}


def _to_complex(v):
    return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class JobSpec:
    n: int
    alpha: tuple
    beta: tuple
    normalization: object = "canonical"
    methods: tuple = ("theorem", "oracle")
    truncation: int = frobenius.DEFAULT_TRUNCATION
    tolerance: float = 1e-8
    asymptotic_m_max: int = 2**14
    output: str = None
    format: str = "json"
    seed: int = None

    @classmethod
    def from_dict(cls, data):
        errors = sorted(jsonschema.Draft202012Validator(JOB_SCHEMA).iter_errors(data),
                        key=lambda e: list(e.path))
        if errors:
            err = errors[0]
            raise JobError("schema", err.message, err.path)
        kw = dict(data)
        kw["alpha"] = tuple(_to_complex(v) for v in data["alpha"])
        kw["beta"] = tuple(_to_complex(v) for v in data["beta"])
        if "normalization" in data and data["normalization"] != "canonical":
            kw["normalization"] = tuple(tuple(_to_complex(v) for v in row) for row in data["normalization"])
        if "methods" in data:
            kw["methods"] = tuple(data["methods"])
        spec = cls(**kw)
        spec.validate()
        return spec

    def validate(self):
        n = self.n
        if len(self.alpha) != n:
            raise JobError("schema", f"alpha needs n = {n} entries, got {len(self.alpha)}", ["alpha"])
        if len(self.beta) != n - 1:
            raise JobError("schema", f"beta needs n-1 = {n - 1} entries, got {len(self.beta)}", ["beta"])
        if self.truncation < n + 2:
            raise JobError("schema", f"truncation must be at least n+2 = {n + 2}", ["truncation"])
        if not 0 < self.tolerance <= 1e-2:
            raise JobError("schema", "tolerance must lie in (0, 1e-2]", ["tolerance"])
        if self.normalization != "canonical":
            try:
                frobenius._check_table(self.normalization, n)
            except ValueError as exc:
                raise JobError("schema", str(exc), ["normalization"]) from exc

    def params(self):
        return ParameterSet(self.alpha, self.beta)

    def to_dict(self):
        d = asdict(self)
        d["alpha"] = [_pair(z) for z in self.alpha]
        d["beta"] = [_pair(z) for z in self.beta]
        if self.normalization != "canonical":
            d["normalization"] = [[_pair(z) for z in row] for row in self.normalization]
        d["methods"] = list(self.methods)
        return d


# ---------------------------------------------------------------------------
# deterministic serialisation
# ---------------------------------------------------------------------------

def _fmt_float(x):
    x = float(x)
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return "%.17g" % x


def dumps(obj, indent=0):
    """JSON with insertion-ordered keys and 17 significant digits for floats."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps(_pair(obj))
    return json.dumps(str(obj))


def _matrix(M):
    return [[_pair(z) for z in row] for row in np.asarray(M)]


def _real_matrix(M):
    return [[float(v) for v in row] for row in np.asarray(M)]


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hyperconnect-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# job execution
# ---------------------------------------------------------------------------

def _overlap_points(seed):
    if seed is None:
        return verify.chebyshev_points(20)
    rng = np.random.default_rng(seed)
    return np.sort(rng.uniform(*verify.OVERLAP, 20))


def _check_params(spec):
    params = spec.params()
    try:
        params.require_nonresonant()
    except AssumptionViolated as exc:
        raise JobError("assumption", str(exc), ["beta"]) from exc
    if {"theorem", "column_shift"} & set(spec.methods):
        try:
            connection.require_theorem_hypothesis(params)
        except TheoremHypothesisViolated as exc:
            raise JobError("theorem_hypothesis", str(exc), ["methods"]) from exc
    return params


def run_job(spec):
    """Execute a job; returns ``(exit_code, document)``."""
    params = _check_params(spec)
    M = spec.truncation
    basis0 = frobenius.local_basis_at_zero(params, M)
    basis1 = frobenius.local_basis_at_one(params, M, spec.normalization)
    D = connection.build_D(basis1)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "job": spec.to_dict(),
        "parameters": {
            "n": params.n,
            "alpha": [_pair(z) for z in params.alpha],
            "beta": [_pair(z) for z in params.beta],
            "beta_n": _pair(params.beta_n),
        },
        "exponents": {
            "x=0": [_pair(z) for z in params.exponents_at_zero()],
            "x=1": [_pair(z) for z in params.exponents_at_one()],
        },
        "order": connection.ORDER,
        "D": _matrix(D.entries),
    }
    if params.theorem_margin() > 0:
        P, PE = connection.build_P(params)
        doc["P"] = {"entries": _matrix(P), "error_estimate": _real_matrix(PE)}
    else:
        doc["P"] = None

    points = _overlap_points(spec.seed)
    orders = (16, 32, 64) if M >= 64 else None
    results, reports = {}, {}
    for method in spec.methods:
        C = connection.connection_matrix(params, basis1, method, M, m=spec.asymptotic_m_max)
        results[method] = {"entries": _matrix(C.entries), "error_estimate": _real_matrix(C.error_estimate)}
        if method == "oracle":
            results[method]["condition_number"] = C.diagnostics["condition_number"]
        slack = 10 * float(C.error_estimate.max())
        report = verify.verify(params, C, basis0, basis1, overlap_tol=spec.tolerance,
                               oracle_tol=spec.tolerance, slack=slack, orders=orders, points=points)
        reports[method] = report.to_dict()
    doc["connection"] = results
    doc["verification"] = reports
    if "asymptotic" in spec.methods:
        reference = connection.first_column(params, basis1)
        schedule = tuple(m for m in asymptotic.DEFAULT_SCHEDULE if m <= spec.asymptotic_m_max)
        table = asymptotic.convergence_table(params, basis1, schedule, reference)
        doc["asymptotic"] = {
            name: {"m": t["m"], "values": [_pair(v) for v in t["values"]],
                   "errors": [float(e) for e in t["errors"]], "fitted_rate": t["fitted_rate"],
                   "predicted_rate": t["predicted_rate"], **({"regime": t["regime"]} if "regime" in t else {})}
            for name, t in table.items()}
    ok = all(r["pass"] for r in reports.values())
    doc["pass"] = ok
    return (EXIT_OK if ok else EXIT_VERIFY), doc


def to_csv(doc):
    """Long format: name, i, j, re, im, err (1-based matrix indices)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "i", "j", "re", "im", "err"])

    def emit(name, entries, errors=None):
        for i, row in enumerate(entries, start=1):
            for j, (re, im) in enumerate(row, start=1):
                err = errors[i - 1][j - 1] if errors is not None else 0.0
                w.writerow([name, i, j, _fmt_float(re), _fmt_float(im), _fmt_float(err)])

    emit("D", doc["D"])
    if doc["P"] is not None:
        emit("P", doc["P"]["entries"], doc["P"]["error_estimate"])
    for method, res in doc["connection"].items():
        emit(f"C:{method}", res["entries"], res["error_estimate"])
    for name, t in (doc.get("asymptotic") or {}).items():
        for m, (re, im), e in zip(t["m"], t["values"], t["errors"]):
            w.writerow([f"asymptotic:{name}", m, 0, _fmt_float(re), _fmt_float(im), _fmt_float(e)])
    return buf.getvalue()


def _load_spec(path, overrides=None):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise JobError("input", f"cannot read job file: {exc}") from exc
    if not isinstance(data, dict):
        raise JobError("schema", "job must be a JSON object")
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return JobSpec.from_dict(data)


def _emit_error(err, stream):
    stream.write(dumps(err.to_dict()) + "\n")


def main(argv=None):
    parser = argparse.ArgumentParser(prog="hyperconnect",
                                     description="Connection matrices of the generalized hypergeometric equation.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="compute and verify a job")
    run.add_argument("spec")
    run.add_argument("--out", dest="output")
    run.add_argument("--format", choices=["json", "csv"])
    run.add_argument("--tol", dest="tolerance", type=float)
    run.add_argument("--truncation", type=int)
    run.add_argument("--seed", type=int)
    check = sub.add_parser("check", help="validate a job file")
    check.add_argument("spec")
    sub.add_parser("schema", help="print the job JSON schema")
    args = parser.parse_args(argv)

    if args.command == "schema":
        sys.stdout.write(json.dumps(JOB_SCHEMA, indent=2) + "\n")
        return EXIT_OK
    try:
        if args.command == "check":
            spec = _load_spec(args.spec)
            params = _check_params(spec)
            sys.stdout.write(dumps({"valid": True, "n": params.n, "beta_n": _pair(params.beta_n),
                                    "theorem_margin": params.theorem_margin()}) + "\n")
            return EXIT_OK
        overrides = {k: getattr(args, k) for k in ("output", "format", "tolerance", "truncation", "seed")}
        spec = _load_spec(args.spec, overrides)
        code, doc = run_job(spec)
    except JobError as err:
        _emit_error(err, sys.stdout)
        return EXIT_INVALID
    except (NoConvergence, DivergentAtOne, IllConditioned, ResonanceInconsistency) as exc:
        _emit_error(JobError("convergence", str(exc)), sys.stdout)
        return EXIT_CONVERGENCE
    except (PoleError, HyperconnectError) as exc:
        _emit_error(JobError("domain", str(exc)), sys.stdout)
        return EXIT_INVALID

    text = to_csv(doc) if spec.format == "csv" else dumps(doc) + "\n"
    if spec.output:
        write_atomic(spec.output, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
