"""JSON readers and writers for the on-disk formats.

Scalars: a bare number, a rational as a "p/q" string, or a complex number
as a two-element [re, im] list whose parts may themselves be rationals.
Quantum-group files may present their structure maps over any element
basis; loading converts to the canonical matrix-unit basis.
"""

from __future__ import annotations

import json
from typing import Optional, Tuple

import numpy as np

from .algebra import AlgElement, FinDimCStarAlgebra, StateFunctional
from .coaction import CoAction
from .errors import QisoError, ShapeMismatch
from .metric import FiniteMetricSpace, validate_metric
from .quantum_group import QuantumGroup, require_kac
from .scalars import FLOAT, RATIONAL, format_scalar, parse_scalar
from .transport import ProbVector, prob_vector


def parse_complex(value, mode: str = FLOAT) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise QisoError(f"complex scalar needs [re, im], got {value!r}")
        return complex(float(parse_scalar(value[0], FLOAT)),
                       float(parse_scalar(value[1], FLOAT)))
    return complex(float(parse_scalar(value, FLOAT)), 0.0)


def format_complex(z: complex):
    if abs(z.imag) == 0.0:
        return float(z.real)
    return [float(z.real), float(z.imag)]


# ---------------------------------------------------------------------------
# metric spaces and distributions


def space_to_dict(space: FiniteMetricSpace) -> dict:
    out = {"n": space.n,
           "dist": [[format_scalar(v) for v in row] for row in space.dist],
           "mode": space.mode}
    if space.labels:
        out["labels"] = list(space.labels)
    return out


def space_from_dict(doc: dict, tol: Optional[float] = None) -> FiniteMetricSpace:
    mode = doc.get("mode", RATIONAL)
    matrix = [[parse_scalar(v, mode) for v in row] for row in doc["dist"]]
    if "n" in doc and doc["n"] != len(matrix):
        raise ShapeMismatch("declared n differs from the matrix size")
    return validate_metric(matrix, tolerance=tol, labels=doc.get("labels"),
                           mode=mode)


def load_space(path: str, tol: Optional[float] = None) -> FiniteMetricSpace:
    with open(path) as fh:
        return space_from_dict(json.load(fh), tol=tol)


def save_space(path: str, space: FiniteMetricSpace) -> None:
    with open(path, "w") as fh:
        json.dump(space_to_dict(space), fh, indent=1)


def distribution_from_dict(doc: dict, mode: str = RATIONAL,
                           tol: float = 1e-9) -> ProbVector:
    return prob_vector([parse_scalar(v, mode) for v in doc["mass"]], tol=tol)


def load_distribution(path: str, mode: str = RATIONAL,
                      tol: float = 1e-9) -> ProbVector:
    with open(path) as fh:
        return distribution_from_dict(json.load(fh), mode=mode, tol=tol)


def distribution_to_dict(mu: ProbVector) -> dict:
    return {"mass": [format_scalar(m) for m in mu.mass]}


# ---------------------------------------------------------------------------
# quantum groups


def _element_to_json(elem: AlgElement) -> list:
    return [[[format_complex(v) for v in row] for row in mat]
            for mat in elem.data]


def _element_from_json(alg: FinDimCStarAlgebra, doc) -> AlgElement:
    data = []
    for mat, b in zip(doc, alg.blocks):
        arr = np.array([[parse_complex(v) for v in row] for row in mat])
        if arr.shape != (b, b):
            raise ShapeMismatch("basis element block shape mismatch")
        data.append(arr)
    return AlgElement(alg, tuple(data))


def quantum_group_to_dict(qg: QuantumGroup) -> dict:
    """Serialized over the canonical matrix-unit basis."""
    alg = qg.algebra
    dim = alg.dim
    basis = [_element_to_json(alg.basis_element(a)) for a in range(dim)]
    delta = [[format_complex(qg.delta[b, g, a]) for a in range(dim)]
             for b in range(dim) for g in range(dim)]
    return {"blocks": list(alg.blocks),
            "basis": basis,
            "delta": delta,
            "epsilon": [format_complex(v) for v in qg.epsilon],
            "kappa": [[format_complex(v) for v in row] for row in qg.kappa],
            "name": qg.name}


def quantum_group_from_dict(doc: dict, enforce_kac: bool = True) -> QuantumGroup:
    alg = FinDimCStarAlgebra(tuple(doc["blocks"]))
    dim = alg.dim
    basis = [_element_from_json(alg, b) for b in doc["basis"]]
    if len(basis) != dim:
        raise ShapeMismatch(f"need {dim} basis elements, got {len(basis)}")
    B = np.column_stack([b.vec() for b in basis])
    if abs(np.linalg.det(B)) < 1e-12:
        raise ShapeMismatch("basis elements are linearly dependent")
    Binv = np.linalg.inv(B)

    delta_rows = doc["delta"]
    if len(delta_rows) != dim * dim or any(len(r) != dim for r in delta_rows):
        raise ShapeMismatch("delta must be a (dim^2 x dim) matrix")
    D_file = np.array([[parse_complex(v) for v in row] for row in delta_rows])
    D3_file = D_file.reshape(dim, dim, dim)
    D3 = np.einsum("cb,dg,bga,ae->cde", B, B, D3_file, Binv)
    epsilon = np.array([parse_complex(v) for v in doc["epsilon"]]) @ Binv
    K_file = np.array([[parse_complex(v) for v in row] for row in doc["kappa"]])
    kappa = B @ K_file @ Binv
    qg = QuantumGroup(alg, D3, epsilon, kappa, name=doc.get("name", ""))
    if enforce_kac:
        require_kac(qg)
    return qg


def load_quantum_group(path: str, enforce_kac: bool = True) -> QuantumGroup:
    with open(path) as fh:
        return quantum_group_from_dict(json.load(fh), enforce_kac=enforce_kac)


def save_quantum_group(path: str, qg: QuantumGroup) -> None:
    with open(path, "w") as fh:
        json.dump(quantum_group_to_dict(qg), fh, indent=1)


# ---------------------------------------------------------------------------
# coactions and states


def coaction_to_dicts(action: CoAction) -> Tuple[dict, dict, dict]:
    """(group doc, space doc, coaction doc with inline references)."""
    u = [[[format_complex(v) for v in action.u[i][j].vec()]
          for j in range(action.n)] for i in range(action.n)]
    return (quantum_group_to_dict(action.group),
            space_to_dict(action.space),
            {"u": u, "name": action.name})


def save_coaction(path: str, action: CoAction, inline: bool = False) -> None:
    """Write the coaction file; group and space go to sibling files
    referenced by relative path (or inline when building dossiers)."""
    import os
    group_doc, space_doc, act_doc = coaction_to_dicts(action)
    if inline:
        act_doc["group"] = group_doc
        act_doc["space"] = space_doc
    else:
        stem = path[:-5] if path.endswith(".json") else path
        with open(stem + ".group.json", "w") as fh:
            json.dump(group_doc, fh, indent=1)
        with open(stem + ".space.json", "w") as fh:
            json.dump(space_doc, fh, indent=1)
        act_doc["group"] = os.path.basename(stem) + ".group.json"
        act_doc["space"] = os.path.basename(stem) + ".space.json"
    with open(path, "w") as fh:
        json.dump(act_doc, fh, indent=1)


def coaction_from_dict(doc: dict, base_dir: str = ".",
                       tol: Optional[float] = None) -> CoAction:
    import os
    group_doc = doc["group"]
    if isinstance(group_doc, str):
        with open(os.path.join(base_dir, group_doc)) as fh:
            group_doc = json.load(fh)
    space_doc = doc["space"]
    if isinstance(space_doc, str):
        with open(os.path.join(base_dir, space_doc)) as fh:
            space_doc = json.load(fh)
    qg = quantum_group_from_dict(group_doc)
    space = space_from_dict(space_doc, tol=tol)
    basis = [_element_from_json(qg.algebra, b) for b in group_doc["basis"]]
    B = np.column_stack([b.vec() for b in basis])
    n = space.n
    u_doc = doc["u"]
    if len(u_doc) != n or any(len(row) != n for row in u_doc):
        raise ShapeMismatch("magic unitary size differs from the space")
    u = tuple(tuple(qg.algebra.from_vec(
        B @ np.array([parse_complex(v) for v in u_doc[i][j]]))
        for j in range(n)) for i in range(n))
    return CoAction(qg, space, u, name=doc.get("name", ""))


def load_coaction(path: str, tol: Optional[float] = None) -> CoAction:
    import os
    with open(path) as fh:
        doc = json.load(fh)
    return coaction_from_dict(doc, base_dir=os.path.dirname(path) or ".",
                              tol=tol)


def state_from_dict(doc: dict, alg: FinDimCStarAlgebra) -> StateFunctional:
    densities = []
    for mat, b in zip(doc["densities"], alg.blocks):
        arr = np.array([[parse_complex(v) for v in row] for row in mat])
        if arr.shape != (b, b):
            raise ShapeMismatch("density block shape mismatch")
        densities.append(arr)
    return StateFunctional(alg, tuple(densities))


def load_state(path: str, alg: FinDimCStarAlgebra) -> StateFunctional:
    with open(path) as fh:
        return state_from_dict(json.load(fh), alg)


def state_to_dict(psi: StateFunctional) -> dict:
    return {"densities": [[[format_complex(v) for v in row] for row in mat]
                          for mat in psi.densities]}
