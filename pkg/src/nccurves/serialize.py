"""JSON documents for algebras, bimodules, Z-algebra dumps, and run reports.

Loading always re-validates structural invariants, and save/load round-trips
are bit-exact: scalars serialize to canonical strings or ints, so equal
objects produce identical documents.
"""

from __future__ import annotations

import hashlib
import json

from . import __version__
from . import algebras as alg
from . import bimodules as bm
from . import ncsym
from .errors import ValidationError
from .fields import Field, field_from_json, field_to_json
from .linalg import Matrix

SCHEMA_VERSION = 1


def matrix_to_json(m: Matrix):
    f = m.field
    return [[f.scalar_to_json(x) for x in row] for row in m.entries]


def matrix_from_json(field: Field, obj, nrows=None, ncols=None) -> Matrix:
    if not isinstance(obj, list):
        raise ValidationError("matrix document must be a list of rows")
    rows = [tuple(field.scalar_from_json(x) for x in row) for row in obj]
    m = Matrix.from_rows(field, rows)
    if nrows is not None and (m.nrows, m.ncols) != (nrows, ncols):
        raise ValidationError(f"matrix has shape {(m.nrows, m.ncols)}, expected {(nrows, ncols)}")
    return m


def algebra_to_json(A: alg.Algebra):
    f = A.field
    doc = {
        "dim": A.dim,
        "structure": [[[f.scalar_to_json(x) for x in row] for row in ci] for ci in A.structure],
        "unit": [f.scalar_to_json(x) for x in A.unit],
    }
    if A.label:
        doc["label"] = A.label
    if A.quaternion_params is not None:
        doc["quaternion_params"] = [f.scalar_to_json(x) for x in A.quaternion_params]
    if A.matrix_size is not None:
        doc["matrix_size"] = A.matrix_size
    return doc


def algebra_from_json(field: Field, obj) -> alg.Algebra:
    if not isinstance(obj, dict):
        raise ValidationError("algebra document must be an object")
    if "constructor" in obj:
        kind = obj["constructor"]
        if kind == "quaternion":
            return alg.make_quaternion(field.scalar_from_json(obj["a"]), field.scalar_from_json(obj["b"]), field)
        if kind == "matrix":
            return alg.make_matrix_algebra(field, int(obj["n"]))
        if kind == "field":
            return alg.field_algebra(field)
        raise ValidationError(f"unknown algebra constructor {kind!r}")
    structure = tuple(
        tuple(tuple(field.scalar_from_json(x) for x in row) for row in ci) for ci in obj["structure"]
    )
    unit = tuple(field.scalar_from_json(x) for x in obj["unit"])
    params = obj.get("quaternion_params")
    if params is not None:
        params = tuple(field.scalar_from_json(x) for x in params)
    A = alg.Algebra(
        field, int(obj["dim"]), structure, unit,
        label=obj.get("label", ""),
        quaternion_params=params,
        matrix_size=obj.get("matrix_size"),
    )
    alg.validate_algebra(A)
    return A


def bimodule_to_json(N: bm.Bimodule) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "field": field_to_json(N.field),
        "left_algebra": algebra_to_json(N.left),
        "right_algebra": algebra_to_json(N.right),
        "dim": N.dim,
        "left_action": [matrix_to_json(M) for M in N.left_action],
        "right_action": [matrix_to_json(M) for M in N.right_action],
    }


def bimodule_from_json(obj) -> bm.Bimodule:
    if not isinstance(obj, dict):
        raise ValidationError("bimodule document must be an object")
    field = field_from_json(obj["field"])
    if "constructor" in obj:
        kind = obj["constructor"]
        if kind == "regular":
            return bm.regular_bimodule(algebra_from_json(field, obj["algebra"]))
        if kind == "free":
            return bm.free_bimodule(field, int(obj["n"]))
        if kind == "matrix_regular":
            return bm.matrix_regular_bimodule(field, int(obj["n"]))
        raise ValidationError(f"unknown bimodule constructor {kind!r}")
    left = algebra_from_json(field, obj["left_algebra"])
    right = algebra_from_json(field, obj["right_algebra"])
    dim = int(obj["dim"])
    left_action = tuple(matrix_from_json(field, M, dim, dim) for M in obj["left_action"])
    right_action = tuple(matrix_from_json(field, M, dim, dim) for M in obj["right_action"])
    N = bm.Bimodule(left, right, dim, left_action, right_action)
    bm.validate_bimodule(N)
    return N


def zalgebra_to_json(Z: ncsym.TruncatedZAlgebra) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "field": field_to_json(Z.field),
        "window": [Z.lo, Z.hi],
        "diagonals": {str(i): algebra_to_json(A) for i, A in sorted(Z.diagonals.items())},
        "components": {f"{i},{j}": d for (i, j), d in sorted(Z.dims.items())},
        "mult": {f"{i},{j},{k}": matrix_to_json(mu) for (i, j, k), mu in sorted(Z.mult.items())},
    }


def zalgebra_from_json(obj) -> ncsym.TruncatedZAlgebra:
    if not isinstance(obj, dict):
        raise ValidationError("Z-algebra document must be an object")
    field = field_from_json(obj["field"])
    lo, hi = (int(v) for v in obj["window"])
    diagonals = {int(i): algebra_from_json(field, A) for i, A in obj["diagonals"].items()}
    dims = {}
    for key, d in obj["components"].items():
        i, j = (int(v) for v in key.split(","))
        dims[(i, j)] = int(d)
    mult = {}
    for key, m in obj["mult"].items():
        i, j, k = (int(v) for v in key.split(","))
        mult[(i, j, k)] = matrix_from_json(field, m)
    Z = ncsym.TruncatedZAlgebra(field, lo, hi, diagonals, dims, mult)
    report = ncsym.check_axioms(Z)
    if not report["ok"]:
        raise ValidationError(f"loaded Z-algebra fails its axioms: {report['failures'][0]}")
    return Z


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_dumps(obj).encode()).hexdigest()


def run_report(command: str, inputs, outputs, timing: float) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs_digest": digest(inputs),
        "outputs": outputs,
        "versions": {"nccurves": __version__},
        "timing": {"seconds": round(timing, 6)},
    }
