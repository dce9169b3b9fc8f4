"""CSV ingestion and JSON forms of graphs, priors and prior networks.

CSV dialect: comma separated, first line is the header, UTF-8, no quoting.
Discrete cells are category labels; the labels of each column are mapped to
state indices in lexicographic order unless the states are declared.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dag import Dag
from .discrete import DirichletJointPrior, DiscreteDataset
from .elicitation import DiscretePriorNetwork, GaussianPriorNetwork
from .errors import DataError, IncompleteDataError, SchemaError, UsageError
from .gaussian import GaussianDataset, NormalWishartPrior
from .transforms import DiscreteScheme, JointDiscreteParams


@dataclass(frozen=True)
class CsvTable:
    header: tuple
    rows: tuple


@dataclass(frozen=True)
class DeclaredScheme:
    """Expected columns of a discrete file; ``states`` optionally fixes the label order."""

    names: tuple
    cardinalities: tuple
    states: tuple | None = None


def read_csv(path) -> CsvTable:
    with open(path, newline="", encoding="utf-8") as fh:
        lines = list(csv.reader(fh, delimiter=",", quoting=csv.QUOTE_NONE))
    while lines and not lines[-1]:
        lines.pop()
    if not lines:
        raise DataError(f"{path}: file is empty, a header line is required")
    header = tuple(h.strip() for h in lines[0])
    if len(set(header)) != len(header) or any(not h for h in header):
        raise DataError(f"{path}: header names must be unique and non-empty: {list(header)}")
    rows = []
    for lineno, row in enumerate(lines[1:], start=2):
        if len(row) != len(header):
            raise DataError(f"{path}: line {lineno} has {len(row)} cells, header has {len(header)}")
        cells = tuple(c.strip() for c in row)
        for col, cell in enumerate(cells):
            if cell == "":
                raise IncompleteDataError(f"{path}: line {lineno}, column {header[col]!r} is missing")
        rows.append(cells)
    return CsvTable(header, tuple(rows))


def load_discrete_csv(path, declared: DeclaredScheme | None = None) -> DiscreteDataset:
    table = read_csv(path)
    n = len(table.header)
    if declared is not None and tuple(declared.names) != table.header:
        raise SchemaError(f"{path}: columns {list(table.header)} differ from declared {list(declared.names)}")
    columns = list(zip(*table.rows)) if table.rows else [()] * n
    codes = np.zeros((len(table.rows), n), dtype=np.int64)
    cards = []
    for col, values in enumerate(columns):
        if declared is not None and declared.states is not None:
            labels = list(declared.states[col])
        else:
            labels = sorted(set(values))
        index = {label: k for k, label in enumerate(labels)}
        for row, value in enumerate(values):
            if value not in index:
                raise SchemaError(f"{path}: line {row + 2}, column {table.header[col]!r}: unknown state {value!r}")
            codes[row, col] = index[value]
        if declared is not None:
            r = int(declared.cardinalities[col])
            if len(labels) > r:
                raise SchemaError(
                    f"{path}: column {table.header[col]!r} has {len(labels)} states, declared {r}"
                )
        else:
            # a column seen with a single value still needs two states
            r = max(2, len(labels))
        cards.append(r)
    return DiscreteDataset(DiscreteScheme(cards), codes, table.header)


def load_continuous_csv(path) -> GaussianDataset:
    table = read_csv(path)
    values = np.zeros((len(table.rows), len(table.header)))
    for row, cells in enumerate(table.rows):
        for col, cell in enumerate(cells):
            try:
                x = float(cell)
            except ValueError:
                raise DataError(f"{path}: line {row + 2}, column {table.header[col]!r}: {cell!r} is not a number") from None
            if not math.isfinite(x):
                raise DataError(f"{path}: line {row + 2}, column {table.header[col]!r}: {cell!r} is not finite")
            values[row, col] = x
    return GaussianDataset(values, table.header)


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None


def load_dag(path) -> Dag:
    return Dag.from_json(load_json(path))


def _require(obj, *keys, what="object"):
    if not isinstance(obj, dict):
        raise UsageError(f"{what} must be a JSON object")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise UsageError(f"{what} is missing {missing}")


# ---------------------------------------------------------------------------
# scoring priors


def prior_to_json(prior, states=None) -> dict:
    if isinstance(prior, DirichletJointPrior):
        out = {
            "kind": "dirichlet",
            "names": list(prior.names) if prior.names else [f"X{i}" for i in range(prior.n)],
            "cardinalities": list(prior.scheme.cardinalities),
            "alpha": prior.alpha,
            "joint": prior.joint.table.ravel().tolist(),
        }
        if states is not None:
            out["states"] = [list(s) for s in states]
        return out
    if isinstance(prior, NormalWishartPrior):
        return {
            "kind": "normal-wishart",
            "names": list(prior.names) if prior.names else [f"X{i}" for i in range(prior.n)],
            "mu0": prior.mu0.tolist(),
            "a_mu": prior.a_mu,
            "T0": prior.T0.tolist(),
            "a_w": prior.a_w,
        }
    raise UsageError(f"cannot serialize {type(prior).__name__}")


def prior_from_json(obj):
    _require(obj, "kind", what="prior")
    kind = obj["kind"]
    if kind == "dirichlet":
        _require(obj, "names", "cardinalities", "alpha", "joint", what="Dirichlet prior")
        cards = tuple(int(r) for r in obj["cardinalities"])
        table = np.asarray(obj["joint"], dtype=float)
        if table.size != math.prod(cards):
            raise UsageError(f"joint has {table.size} entries, cardinalities give {math.prod(cards)}")
        return DirichletJointPrior(obj["alpha"], JointDiscreteParams(table.reshape(cards)), obj["names"])
    if kind == "normal-wishart":
        _require(obj, "names", "mu0", "a_mu", "T0", "a_w", what="normal-Wishart prior")
        return NormalWishartPrior(obj["mu0"], obj["a_mu"], obj["T0"], obj["a_w"], obj["names"])
    raise UsageError(f"unknown prior kind {kind!r}")


def declared_scheme(obj) -> DeclaredScheme:
    """Column declaration carried by a serialized Dirichlet prior."""
    states = obj.get("states")
    return DeclaredScheme(
        tuple(obj["names"]),
        tuple(int(r) for r in obj["cardinalities"]),
        None if states is None else tuple(tuple(s) for s in states),
    )


# ---------------------------------------------------------------------------
# prior networks


def _per_node(value, names, what):
    if isinstance(value, dict):
        missing = [nm for nm in names if nm not in value]
        if missing:
            raise UsageError(f"{what} missing entries for {missing}")
        return [value[nm] for nm in names]
    if len(value) != len(names):
        raise UsageError(f"{what} has {len(value)} entries for {len(names)} variables")
    return list(value)


def network_from_json(obj):
    """Discrete network if the object has ``cpts``, Gaussian if it has ``variances``."""
    _require(obj, "names", what="prior network")
    dag = Dag.from_json(obj)
    names = dag.names
    if "cpts" in obj:
        _require(obj, "cardinalities", "cpts", what="discrete prior network")
        cards = _per_node(obj["cardinalities"], names, "cardinalities")
        cpts = _per_node(obj["cpts"], names, "cpts")
        return DiscretePriorNetwork(dag, DiscreteScheme(cards), tuple(cpts))
    if "variances" in obj:
        _require(obj, "intercepts", "variances", what="Gaussian prior network")
        n = dag.n
        B = np.zeros((n, n))
        index = {nm: i for i, nm in enumerate(names)}
        coefficients = obj.get("coefficients", {})
        if not isinstance(coefficients, dict):
            raise UsageError("coefficients must map child name -> {parent name: value}")
        for child, row in coefficients.items():
            if child not in index:
                raise UsageError(f"coefficients name unknown variable {child!r}")
            for parent, b in row.items():
                if parent not in index:
                    raise UsageError(f"coefficients name unknown variable {parent!r}")
                B[index[parent], index[child]] = float(b)
        return GaussianPriorNetwork(
            dag,
            _per_node(obj["intercepts"], names, "intercepts"),
            B,
            _per_node(obj["variances"], names, "variances"),
        )
    raise UsageError("prior network needs either 'cpts' (discrete) or 'variances' (Gaussian)")


def network_to_json(net) -> dict:
    out = net.dag.to_json()
    names = net.dag.names
    if isinstance(net, DiscretePriorNetwork):
        out["cardinalities"] = list(net.scheme.cardinalities)
        out["cpts"] = [cpt.tolist() for cpt in net.cpts]
        return out
    out["intercepts"] = net.intercepts.tolist()
    out["coefficients"] = {
        names[i]: {names[j]: float(net.B[j, i]) for j in net.dag.parents[i]}
        for i in range(net.dag.n) if net.dag.parents[i]
    }
    out["variances"] = net.variances.tolist()
    return out


def write_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
