"""Qudit circuit intermediate representation and text format.

Gates come in four kinds: named single/two-qubit Cliffords (d = 2 only),
dense k-local unitaries, exponentials ``e^{i theta P}`` of Hermitian Pauli
operators (d = 2 only), and controlled wrappers.  Qudit indices are 1-based
in files and error messages, 0-based internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LocalityExceeded, NotCommuting, NotHermitian, ParseError
from .pauli import PauliOperator, format_pauli, parse_pauli

UNITARY_TOL = 1e-10
COMMUTE_TOL = 1e-10

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)

NAMED_MATRICES = {"h": _H, "s": _S, "x": _X, "z": _Z, "cnot": _CNOT, "cz": _CZ}
NAMED_ARITY = {"h": 1, "s": 1, "x": 1, "z": 1, "cnot": 2, "cz": 2}


@dataclass(frozen=True)
class NamedGate:
    """One of h/s/x/z/cnot/cz; ``qubits`` in semantic order (control first)."""

    name: str
    qubits: tuple[int, ...]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.qubits))


@dataclass(frozen=True)
class DenseGate:
    """Explicit unitary on ``qudits`` (sorted); axes follow that order."""

    qudits: tuple[int, ...]
    matrix: np.ndarray = field(hash=False)

    @property
    def support(self) -> tuple[int, ...]:
        return self.qudits


@dataclass(frozen=True)
class PauliExpGate:
    """``e^{i theta P}`` for a Hermitian Pauli operator over the register."""

    theta: float
    pauli: PauliOperator

    @property
    def support(self) -> tuple[int, ...]:
        bits = self.pauli.a | self.pauli.b
        return tuple(k for k in range(self.pauli.n) if (bits >> k) & 1)


@dataclass(frozen=True)
class ControlledGate:
    """Inner gate applied when the control qubit is |1>; d = 2 only."""

    control: int
    inner: "Gate"

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted({self.control, *self.inner.support}))


Gate = NamedGate | DenseGate | PauliExpGate | ControlledGate


@dataclass
class Circuit:
    """Ordered gate list on ``n`` qudits of local dimension ``d``.

    ``layer_sizes`` partitions the gate list into depth layers (from the
    ``---`` separators in the text format); a circuit without separators is a
    single layer.
    """

    n: int
    d: int = 2
    gates: list[Gate] = field(default_factory=list)
    layer_sizes: list[int] | None = None

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("local dimension must be >= 2")
        for g in self.gates:
            self._check_gate(g)
        if self.layer_sizes is not None and sum(self.layer_sizes) != len(self.gates):
            raise ValueError("layer sizes do not sum to the gate count")

    def _check_gate(self, g: Gate):
        sup = g.support
        if len(set(sup)) != len(sup):
            raise ValueError("gate support indices must be distinct")
        if sup and (min(sup) < 0 or max(sup) >= self.n):
            raise ValueError(f"gate support {sup} outside register of size {self.n}")
        if self.d != 2 and isinstance(g, (NamedGate, PauliExpGate, ControlledGate)):
            raise ValueError("named, Pauli-exponential and controlled gates need d = 2")
        if isinstance(g, DenseGate):
            dim = self.d ** len(g.qudits)
            if g.matrix.shape != (dim, dim):
                raise ValueError("dense matrix shape does not match support")
            err = np.linalg.norm(g.matrix.conj().T @ g.matrix - np.eye(dim))
            if err > UNITARY_TOL:
                raise ValueError(f"dense matrix is not unitary (deviation {err:.2e})")
        if isinstance(g, PauliExpGate):
            if g.pauli.n != self.n:
                raise ValueError("Pauli width must equal the register size")
            if not g.pauli.is_hermitian():
                raise NotHermitian("exponentiated Pauli must be Hermitian")

    @property
    def layers(self) -> list[list[Gate]]:
        sizes = self.layer_sizes if self.layer_sizes is not None else [len(self.gates)]
        out, pos = [], 0
        for s in sizes:
            out.append(self.gates[pos : pos + s])
            pos += s
        return out

    @property
    def depth(self) -> int:
        return sum(1 for layer in self.layers if layer)


# ---------------------------------------------------------------------------
# dense matrices of gates


def gate_matrix(g: Gate, d: int) -> np.ndarray:
    """Dense unitary of ``g`` with axes ordered by sorted support."""
    if isinstance(g, NamedGate):
        m = NAMED_MATRICES[g.name]
        if list(g.qubits) != sorted(g.qubits):
            m = _permute_axes(m, g.qubits, tuple(sorted(g.qubits)), d)
        return m
    if isinstance(g, DenseGate):
        return g.matrix
    if isinstance(g, PauliExpGate):
        sub = _restrict_pauli(g.pauli)
        p = sub.to_matrix()
        dim = p.shape[0]
        return math.cos(g.theta) * np.eye(dim) + 1j * math.sin(g.theta) * p
    if isinstance(g, ControlledGate):
        inner = gate_matrix(g.inner, d)
        inner_sup = tuple(sorted(g.inner.support))
        sup = g.support
        if g.control in g.inner.support:
            raise ValueError("control qubit overlaps the inner gate support")
        # embed inner on sup minus control, then order (control, rest)
        rest = tuple(q for q in sup if q != g.control)
        inner_full = embed_matrix(inner, inner_sup, rest, d)
        dim = inner_full.shape[0]
        block = np.zeros((2 * dim, 2 * dim), dtype=complex)
        block[:dim, :dim] = np.eye(dim)
        block[dim:, dim:] = inner_full
        return _permute_axes(block, (g.control, *rest), sup, d)
    raise TypeError(f"unknown gate {g!r}")


def _restrict_pauli(p: PauliOperator) -> PauliOperator:
    """Project a Pauli onto its own support, keeping the phase."""
    bits = p.a | p.b
    sup = [k for k in range(p.n) if (bits >> k) & 1]
    a = b = 0
    for i, k in enumerate(sup):
        a |= ((p.a >> k) & 1) << i
        b |= ((p.b >> k) & 1) << i
    return PauliOperator(max(len(sup), 1), p.t, a, b)


def _permute_axes(
    m: np.ndarray, order_from: tuple[int, ...], order_to: tuple[int, ...], d: int
) -> np.ndarray:
    """Reinterpret ``m`` (axes = qudits in ``order_from``) for ``order_to``."""
    k = len(order_from)
    perm = [order_from.index(q) for q in order_to]
    t = m.reshape((d,) * (2 * k))
    t = t.transpose(perm + [k + p for p in perm])
    return t.reshape(d**k, d**k)


def embed_matrix(
    m: np.ndarray, sup: tuple[int, ...], target: tuple[int, ...], d: int
) -> np.ndarray:
    """Embed ``m`` (on sorted ``sup``) into the larger sorted register ``target``."""
    extra = tuple(q for q in target if q not in sup)
    if not extra:
        if sup == target:
            return m
        return _permute_axes(m, sup, target, d)
    big = np.kron(m, np.eye(d ** len(extra), dtype=complex))
    return _permute_axes(big, sup + extra, target, d)


def union_matrices(g1: Gate, g2: Gate, d: int):
    """Dense matrices of both gates on their sorted union support."""
    union = tuple(sorted(set(g1.support) | set(g2.support)))
    m1 = embed_matrix(gate_matrix(g1, d), g1.support, union, d)
    m2 = embed_matrix(gate_matrix(g2, d), g2.support, union, d)
    return m1, m2, union


def is_commuting_pair(g1: Gate, g2: Gate, d: int = 2) -> bool:
    """Frobenius commutator test on the union support; disjoint is free."""
    if not set(g1.support) & set(g2.support):
        return True
    m1, m2, _ = union_matrices(g1, g2, d)
    return bool(np.linalg.norm(m1 @ m2 - m2 @ m1) < COMMUTE_TOL)


def check_pairwise_commuting(c: Circuit):
    """Raise :class:`NotCommuting` with the offending (0-based) pair indices."""
    for i in range(len(c.gates)):
        for j in range(i + 1, len(c.gates)):
            if not is_commuting_pair(c.gates[i], c.gates[j], c.d):
                raise NotCommuting(i, j)


# ---------------------------------------------------------------------------
# standard form and lightcones


def standard_form(c: Circuit, k: int) -> Circuit:
    """Merge commuting gates into at most one dense gate per size-k subset.

    Each gate is assigned the subset obtained by padding its support with the
    smallest unused qudit indices; merged products follow input order.
    """
    if k > c.n:
        raise ValueError("locality exceeds register size")
    for idx, g in enumerate(c.gates):
        if len(g.support) > k:
            raise LocalityExceeded(f"gate {idx} has support of size {len(g.support)} > {k}")
    check_pairwise_commuting(c)
    groups: dict[tuple[int, ...], np.ndarray] = {}
    order: list[tuple[int, ...]] = []
    for g in c.gates:
        sup = set(g.support)
        for q in range(c.n):
            if len(sup) == k:
                break
            sup.add(q)
        subset = tuple(sorted(sup))
        m = embed_matrix(gate_matrix(g, c.d), g.support, subset, c.d)
        if subset in groups:
            groups[subset] = m @ groups[subset]
        else:
            groups[subset] = m
            order.append(subset)
    gates: list[Gate] = [DenseGate(subset, groups[subset]) for subset in sorted(order)]
    return Circuit(c.n, c.d, gates)


def support_lightcone(c: Circuit, qudit: int) -> set[int]:
    """Backward lightcone of ``qudit`` (0-based) through the declared layers."""
    layers = c.layers
    for li, layer in enumerate(layers):
        seen: set[int] = set()
        for g in layer:
            if seen & set(g.support):
                raise ValueError(f"layer {li} has overlapping gate supports")
            seen |= set(g.support)
    cone = {qudit}
    for layer in reversed(layers):
        grow = set()
        for g in layer:
            if cone & set(g.support):
                grow |= set(g.support)
        cone |= grow
    return cone


# ---------------------------------------------------------------------------
# text format


def parse_circuit(text: str) -> Circuit:
    """Parse the line-oriented circuit format (see README for the grammar)."""
    lines = text.splitlines()
    header = None
    header_no = 0
    for no, raw in enumerate(lines, start=1):
        stripped = _strip_comment(raw)
        if stripped:
            header, header_no = stripped, no
            break
    if header is None:
        raise ParseError(1, "missing 'circuit' header")
    toks = header.split()
    if toks[0] != "circuit" or len(toks) not in (2, 4):
        raise ParseError(header_no, "header must be 'circuit <n> [dim <d>]'")
    try:
        n = int(toks[1])
    except ValueError:
        raise ParseError(header_no, f"bad qudit count {toks[1]!r}") from None
    d = 2
    if len(toks) == 4:
        if toks[2] != "dim":
            raise ParseError(header_no, "expected 'dim' keyword")
        try:
            d = int(toks[3])
        except ValueError:
            raise ParseError(header_no, f"bad dimension {toks[3]!r}") from None
    if n < 1 or d < 2:
        raise ParseError(header_no, "need n >= 1 and d >= 2")

    gates: list[Gate] = []
    layer_sizes: list[int] | None = None
    in_layer = 0
    for no, raw in enumerate(lines, start=1):
        if no <= header_no:
            continue
        line = _strip_comment(raw)
        if not line:
            continue
        if line == "---":
            if layer_sizes is None:
                layer_sizes = []
            layer_sizes.append(in_layer)
            in_layer = 0
            continue
        g = _parse_gate_line(line, no, n, d)
        try:
            Circuit(n, d, [g])
        except NotHermitian:
            raise ParseError(no, "exponentiated Pauli must be Hermitian") from None
        except ValueError as exc:
            raise ParseError(no, str(exc)) from None
        gates.append(g)
        in_layer += 1
    if layer_sizes is not None:
        layer_sizes.append(in_layer)
    return Circuit(n, d, gates, layer_sizes)


def _strip_comment(raw: str) -> str:
    pos = raw.find("#")
    if pos >= 0:
        raw = raw[:pos]
    return raw.strip()


def _parse_gate_line(line: str, no: int, n: int, d: int) -> Gate:
    toks = line.split()
    op = toks[0].lower()
    if op in NAMED_ARITY:
        if d != 2:
            raise ParseError(no, f"gate {op!r} undefined for d={d}")
        arity = NAMED_ARITY[op]
        if len(toks) != 1 + arity:
            raise ParseError(no, f"{op} expects {arity} qubit index(es)")
        qubits = tuple(_parse_index(t, no, n) for t in toks[1:])
        if len(set(qubits)) != len(qubits):
            raise ParseError(no, "repeated qubit index")
        return NamedGate(op, qubits)
    if op == "exppauli":
        if d != 2:
            raise ParseError(no, f"exppauli undefined for d={d}")
        if len(toks) != 3:
            raise ParseError(no, "exppauli expects '<theta> <pauli string>'")
        try:
            theta = float(toks[1])
        except ValueError:
            raise ParseError(no, f"bad angle {toks[1]!r}") from None
        p = parse_pauli(toks[2], n=n, line_no=no)
        if not p.is_hermitian():
            raise ParseError(no, f"Pauli string {toks[2]!r} is not Hermitian")
        return PauliExpGate(theta, p)
    if op == "dense":
        if len(toks) < 2:
            raise ParseError(no, "dense expects '<k> <q1..qk> <floats>'")
        try:
            k = int(toks[1])
        except ValueError:
            raise ParseError(no, f"bad locality {toks[1]!r}") from None
        if len(toks) < 2 + k:
            raise ParseError(no, "missing qudit indices for dense gate")
        qudits = tuple(_parse_index(t, no, n) for t in toks[2 : 2 + k])
        if len(set(qudits)) != k:
            raise ParseError(no, "repeated qudit index")
        dim = d**k
        vals = toks[2 + k :]
        if len(vals) != 2 * dim * dim:
            raise ParseError(no, f"dense gate needs {2 * dim * dim} floats, got {len(vals)}")
        try:
            flat = np.array([float(v) for v in vals], dtype=float)
        except ValueError:
            raise ParseError(no, "bad float literal in dense gate") from None
        m = (flat[0::2] + 1j * flat[1::2]).reshape(dim, dim)
        if list(qudits) != sorted(qudits):
            m = _permute_axes(m, qudits, tuple(sorted(qudits)), d)
            qudits = tuple(sorted(qudits))
        err = np.linalg.norm(m.conj().T @ m - np.eye(dim))
        if err > UNITARY_TOL:
            raise ParseError(no, f"dense matrix is not unitary (deviation {err:.2e})")
        return DenseGate(qudits, m)
    if op == "ctrl":
        if d != 2:
            raise ParseError(no, f"ctrl undefined for d={d}")
        if len(toks) < 3:
            raise ParseError(no, "ctrl expects '<q> <gate-line>'")
        control = _parse_index(toks[1], no, n)
        inner = _parse_gate_line(" ".join(toks[2:]), no, n, d)
        if control in inner.support:
            raise ParseError(no, "control qubit overlaps inner gate support")
        return ControlledGate(control, inner)
    raise ParseError(no, f"unknown gate {op!r}")


def _parse_index(tok: str, no: int, n: int) -> int:
    try:
        q = int(tok)
    except ValueError:
        raise ParseError(no, f"bad qudit index {tok!r}") from None
    if not 1 <= q <= n:
        raise ParseError(no, f"qudit index {q} out of range 1..{n}")
    return q - 1


def serialize_circuit(c: Circuit) -> str:
    """Emit circuit text that reparses to a structurally identical circuit."""
    head = f"circuit {c.n}" + (f" dim {c.d}" if c.d != 2 else "")
    lines = [head]
    layers = c.layers
    for li, layer in enumerate(layers):
        if li > 0:
            lines.append("---")
        for g in layer:
            lines.append(_format_gate(g))
    return "\n".join(lines) + "\n"


def _format_gate(g: Gate) -> str:
    if isinstance(g, NamedGate):
        return " ".join([g.name] + [str(q + 1) for q in g.qubits])
    if isinstance(g, PauliExpGate):
        return f"exppauli {g.theta!r} {format_pauli(g.pauli)}"
    if isinstance(g, DenseGate):
        parts = [f"dense {len(g.qudits)}"] + [str(q + 1) for q in g.qudits]
        for v in g.matrix.reshape(-1):
            parts.append(repr(float(v.real)))
            parts.append(repr(float(v.imag)))
        return " ".join(parts)
    if isinstance(g, ControlledGate):
        return f"ctrl {g.control + 1} {_format_gate(g.inner)}"
    raise TypeError(f"unknown gate {g!r}")
