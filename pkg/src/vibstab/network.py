"""Linear network systems ``x' = (D + A) x``.

Node ids are 0-based inside the package. Files and user-facing output use
1-based ids; :func:`load`, :func:`save` and :func:`from_dict` are the only
places that convert.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "NetworkSystem",
    "NetworkError",
    "NetworkParseError",
    "ValidationReport",
    "build_matrix",
    "validate",
    "from_matrix",
    "from_dict",
    "to_dict",
    "load",
    "save",
]


class NetworkError(ValueError):
    """Structurally invalid network (bad index, duplicate edge, self-loop)."""


class NetworkParseError(NetworkError):
    """Malformed network document."""


@dataclass(frozen=True)
class NetworkSystem:
    """Node intrinsic dynamics ``d`` plus weighted directed edges.

    ``edges`` holds ``(src, dst, weight)`` triples with 0-based ids. The
    weight of edge ``(j, i)`` lands at matrix entry ``(i, j)``.
    """

    d: tuple[float, ...]
    edges: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        object.__setattr__(
            self, "edges", tuple((int(j), int(i), float(w)) for j, i, w in self.edges)
        )
        n = len(self.d)
        if n < 1:
            raise NetworkError("network needs at least one node")
        seen = set()
        for j, i, w in self.edges:
            if not (0 <= j < n and 0 <= i < n):
                raise NetworkError(f"edge ({j + 1}->{i + 1}) has a node id outside 1..{n}")
            if i == j:
                raise NetworkError(f"self-loop on node {j + 1}; use d for the diagonal")
            if (j, i) in seen:
                raise NetworkError(f"duplicate edge ({j + 1}->{i + 1})")
            if w == 0.0:
                raise NetworkError(f"edge ({j + 1}->{i + 1}) has zero weight")
            seen.add((j, i))

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset((j, i) for j, i, _ in self.edges)

    def __eq__(self, other):
        if not isinstance(other, NetworkSystem):
            return NotImplemented
        return self.d == other.d and sorted(self.edges) == sorted(other.edges)

    def __hash__(self):
        return hash((self.d, tuple(sorted(self.edges))))


@dataclass(frozen=True)
class ValidationReport:
    assumption1_ok: bool
    sign_consistent: bool
    violations: list[tuple[tuple[int, int], str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.assumption1_ok and self.sign_consistent


def build_matrix(sys: NetworkSystem) -> np.ndarray:
    """Return ``M = D + A`` with ``M[i, j]`` the weight of edge ``j -> i``."""
    M = np.diag(np.asarray(sys.d, dtype=np.float64))
    for j, i, w in sys.edges:
        M[i, j] = w
    return M


def from_matrix(M) -> NetworkSystem:
    """Inverse of :func:`build_matrix`: off-diagonal nonzeros become edges."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NetworkError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    edges = [(j, i, M[i, j]) for i in range(n) for j in range(n) if i != j and M[i, j] != 0.0]
    return NetworkSystem(tuple(np.diag(M)), tuple(edges))


def validate(sys: NetworkSystem) -> ValidationReport:
    """Check stable intrinsic dynamics and reciprocal sign agreement.

    Findings are reported, not raised: robustness experiments perturb the
    diagonal on purpose. Violation keys are 1-based ``(row, col)`` entries.
    """
    violations = []
    a1 = True
    for i, di in enumerate(sys.d):
        if not di < 0:
            a1 = False
            violations.append(((i + 1, i + 1), f"d_{i + 1} = {di:g} is not negative"))
    weights = {(j, i): w for j, i, w in sys.edges}
    signs_ok = True
    for (j, i), w in sorted(weights.items()):
        if j < i and (i, j) in weights:
            back = weights[(i, j)]
            if math.copysign(1.0, w) != math.copysign(1.0, back):
                signs_ok = False
                violations.append(
                    ((i + 1, j + 1), f"sign(a_{i + 1}{j + 1}) != sign(a_{j + 1}{i + 1}): {w:g} vs {back:g}")
                )
    return ValidationReport(a1, signs_ok, violations)


# -- serialization ---------------------------------------------------------

_TOP_KEYS = {"nodes", "edges"}
_NODE_KEYS = {"id", "d"}
_EDGE_KEYS = {"from", "to", "weight"}


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise NetworkParseError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise NetworkParseError(f"{where}: non-finite value {value!r}")
    return float(value)


def _integer(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise NetworkParseError(f"{where}: expected an integer id, got {value!r}")
    return value


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise NetworkParseError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise NetworkParseError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = allowed - set(obj)
    if missing:
        raise NetworkParseError(f"{where}: missing key(s) {sorted(missing)}")


def from_dict(doc) -> NetworkSystem:
    """Build a system from the JSON document layout (1-based ids)."""
    if not isinstance(doc, dict):
        raise NetworkParseError("top level: expected an object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise NetworkParseError(f"top level: unknown key(s) {sorted(unknown)}")
    if "nodes" not in doc:
        raise NetworkParseError("top level: missing 'nodes'")
    nodes = doc["nodes"]
    edges = doc.get("edges", [])
    if not isinstance(nodes, list) or not nodes:
        raise NetworkParseError("nodes: expected a non-empty list")
    if not isinstance(edges, list):
        raise NetworkParseError("edges: expected a list")

    d = {}
    for k, node in enumerate(nodes):
        where = f"nodes[{k}]"
        _check_keys(node, _NODE_KEYS, where)
        nid = _integer(node["id"], f"{where}.id")
        if nid in d:
            raise NetworkParseError(f"{where}.id: duplicate node id {nid}")
        d[nid] = _number(node["d"], f"{where}.d")
    n = len(d)
    if sorted(d) != list(range(1, n + 1)):
        raise NetworkParseError(f"nodes: ids must be exactly 1..{n}, got {sorted(d)}")

    parsed = []
    seen = set()
    for k, edge in enumerate(edges):
        where = f"edges[{k}]"
        _check_keys(edge, _EDGE_KEYS, where)
        src = _integer(edge["from"], f"{where}.from")
        dst = _integer(edge["to"], f"{where}.to")
        w = _number(edge["weight"], f"{where}.weight")
        for name, v in (("from", src), ("to", dst)):
            if not 1 <= v <= n:
                raise NetworkParseError(f"{where}.{name}: node id {v} outside 1..{n}")
        if src == dst:
            raise NetworkParseError(f"{where}: self-loop on node {src}")
        if w == 0.0:
            raise NetworkParseError(f"{where}.weight: zero-weight edges are not allowed")
        if (src, dst) in seen:
            raise NetworkParseError(f"{where}: duplicate edge {src}->{dst}")
        seen.add((src, dst))
        parsed.append((src - 1, dst - 1, w))

    return NetworkSystem(tuple(d[i] for i in range(1, n + 1)), tuple(parsed))


def to_dict(sys: NetworkSystem) -> dict:
    return {
        "nodes": [{"id": i + 1, "d": di} for i, di in enumerate(sys.d)],
        "edges": [{"from": j + 1, "to": i + 1, "weight": w} for j, i, w in sys.edges],
    }


def load(path) -> NetworkSystem:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise NetworkParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return from_dict(doc)
    except NetworkParseError as exc:
        raise NetworkParseError(f"{path}: {exc}") from exc


def save(sys: NetworkSystem, path) -> None:
    # json writes floats with repr(), so finite doubles round-trip exactly
    Path(path).write_text(json.dumps(to_dict(sys), indent=2) + "\n")
