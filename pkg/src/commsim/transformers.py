"""Circuit-to-circuit compilers around ancilla interference tests.

Every transformer emits an ordinary circuit whose Z statistics on the first
qubit encode a matrix element of the input circuit: controlled-gate folding
for commuting circuits, the halved "alternate" test for arbitrary circuits,
the two-layer merge for products of two commuting layers, and on top of
those, sampling estimators for |<0|U|0>|^2 of constant-depth circuits (with
and without an extra Clifford factor).  Estimators only ever talk to an
executor that returns measurement outcomes, never to state amplitudes.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .circuit import (
    Circuit,
    DenseGate,
    Gate,
    NamedGate,
    check_pairwise_commuting,
    embed_matrix,
    gate_matrix,
)
from .errors import LightconeTooLarge, NotCommuting, SizeMismatch
from .estimator import EstimateResult, EstimatorConfig
from .oracle import run_circuit
from .pauli import PauliOperator
from .stabilizer import CliffordCircuit, CliffordTableau

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_SDG = np.diag([1, -1j]).astype(complex)
_HSDG = _H @ _SDG  # final ancilla rotation for the imaginary part

DEFAULT_LIGHTCONE_BOUND = 8


# ---------------------------------------------------------------------------
# executors


class GammaKExecutor:
    """Measurement device: runs a circuit on |0...0> and measures Z on qubit 1."""

    def run(self, c: Circuit, shots: int, rng: np.random.Generator) -> np.ndarray:
        """Array of ``shots`` outcomes, each +1 or -1."""
        raise NotImplementedError

    def run_counts(self, c: Circuit, shots: int, rng: np.random.Generator) -> int:
        """Number of +1 outcomes among ``shots``; override for a fast path."""
        return int(np.sum(self.run(c, shots, rng) == 1))


class DenseOracleExecutor(GammaKExecutor):
    """Backs the executor interface with the statevector simulator."""

    def __init__(self, cap: int | None = None):
        self.cap = cap

    def _p_plus(self, c: Circuit) -> float:
        kwargs = {} if self.cap is None else {"cap": self.cap}
        s = run_circuit(c, [0] * c.n, **kwargs)
        t = s.tensor()
        # qubit 1 is the leading axis; outcome 0 of it means Z = +1
        p = float(np.sum(np.abs(np.take(t, 0, axis=0)) ** 2))
        return min(1.0, max(0.0, p))

    def run(self, c: Circuit, shots: int, rng: np.random.Generator) -> np.ndarray:
        p = self._p_plus(c)
        return np.where(rng.random(shots) < p, 1, -1)

    def run_counts(self, c: Circuit, shots: int, rng: np.random.Generator) -> int:
        return int(rng.binomial(shots, self._p_plus(c)))


# ---------------------------------------------------------------------------
# ancilla gadgets


def _shift_gate_matrix(g: Gate) -> tuple[tuple[int, ...], np.ndarray]:
    """Gate support shifted up by one (ancilla becomes qubit index 0)."""
    sup = tuple(q + 1 for q in g.support)
    return sup, gate_matrix(g, 2)


def _controlled_block(m: np.ndarray) -> np.ndarray:
    """diag(I, m); the control is the most significant (first) axis."""
    dim = m.shape[0]
    out = np.zeros((2 * dim, 2 * dim), dtype=complex)
    out[:dim, :dim] = np.eye(dim)
    out[dim:, dim:] = m
    return out


def _two_branch_block(m0: np.ndarray, m1: np.ndarray) -> np.ndarray:
    """diag(m0, m1) on (ancilla, rest); applies m0 when the ancilla is |0>."""
    dim = m0.shape[0]
    out = np.zeros((2 * dim, 2 * dim), dtype=complex)
    out[:dim, :dim] = m0
    out[dim:, dim:] = m1
    return out


def _ancilla_fold(m: np.ndarray, k_rest: int, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """(left (x) I) m (right (x) I) with the single-qubit factors on the ancilla.

    Contracting only the two ancilla axes keeps this quadratic in the gate
    dimension rather than cubic.
    """
    dim = 1 << k_rest
    t = m.reshape(2, dim, 2, dim)
    return np.einsum("ia,axby,bj->ixjy", left, t, right).reshape(2 * dim, 2 * dim)


def p0_to_value(p0: float) -> float:
    """Invert the interference relation p(0) = (1 + value) / 2."""
    return 2.0 * p0 - 1.0


def hadamard_test(c: Circuit, part: str = "real", check: bool = True) -> Circuit:
    """Fold a commuting circuit into an ancilla test for Re/Im <0|C|0>.

    Each gate becomes (A (x) I) . controlled-G . (H (x) I) on n+1 qubits with
    A = H, except that for part="imag" the last gate closes with H S^dag.
    The folded gates still pairwise commute.
    """
    if part not in ("real", "imag"):
        raise ValueError("part must be 'real' or 'imag'")
    if c.d != 2:
        raise ValueError("the ancilla test is defined for qubits")
    if check:
        check_pairwise_commuting(c)
    if not c.gates:
        # bare test on the ancilla alone: p(0) = 1 (real) encodes <0|I|0> = 1
        gates = [DenseGate((0,), _ancilla_fold(np.eye(2, dtype=complex), 0,
                                               _HSDG if part == "imag" else _H, _H))]
        return Circuit(c.n + 1, 2, gates)
    out = []
    last = len(c.gates) - 1
    for i, g in enumerate(c.gates):
        sup, m = _shift_gate_matrix(g)
        reg = (0, *sup)
        cg = _controlled_block(m)
        left = _HSDG if (part == "imag" and i == last) else _H
        out.append(DenseGate(reg, _ancilla_fold(cg, len(sup), left, _H)))
    return Circuit(c.n + 1, 2, out)


def alternate_hadamard_test(c: Circuit, part: str = "real") -> Circuit:
    """Halved ancilla test for Re/Im <0|U|0> of an arbitrary circuit.

    Gates are consumed in pairs from both ends: the ancilla-0 branch runs the
    adjoints of the second half in reverse, the ancilla-1 branch the first
    half, so the gate count is ceil(size/2) + 2 (odd sizes get an identity).
    """
    if part not in ("real", "imag"):
        raise ValueError("part must be 'real' or 'imag'")
    if c.d != 2:
        raise ValueError("the ancilla test is defined for qubits")
    gates = list(c.gates)
    if len(gates) % 2:
        gates.append(DenseGate((0,), np.eye(2, dtype=complex)))
    m = len(gates) // 2
    out: list[Gate] = [NamedGate("h", (0,))]
    for i in range(m):
        ga = gates[i]  # 1-branch, first half in order
        gb = gates[2 * m - 1 - i]  # 0-branch, second half reversed, adjointed
        sup_a, ma = _shift_gate_matrix(ga)
        sup_b, mb = _shift_gate_matrix(gb)
        rest = tuple(sorted(set(sup_a) | set(sup_b)))
        m0 = embed_matrix(mb, sup_b, rest, 2).conj().T
        m1 = embed_matrix(ma, sup_a, rest, 2)
        out.append(DenseGate((0, *rest), _two_branch_block(m0, m1)))
    out.append(
        NamedGate("h", (0,)) if part == "real" else DenseGate((0,), _HSDG)
    )
    return Circuit(c.n + 1, 2, out)


def two_layer_merge(
    c1: Circuit, c2: Circuit, part: str = "real", check: bool = True
) -> Circuit:
    """Ancilla test for Re/Im <0|C1 C2|0> of two commuting layers.

    Gates are paired by support subset (missing partners become identities);
    each pair yields one two-branch gate, so the output is (k+1)-local and
    pairwise commuting whenever each input layer is.
    """
    if part not in ("real", "imag"):
        raise ValueError("part must be 'real' or 'imag'")
    if c1.n != c2.n or c1.d != c2.d:
        raise SizeMismatch("layers disagree on register shape")
    if c1.d != 2:
        raise ValueError("the ancilla test is defined for qubits")
    if check:
        check_pairwise_commuting(c1)
        check_pairwise_commuting(c2)
    merged1 = _merge_by_support(c1)
    merged2 = _merge_by_support(c2)
    subsets = sorted(set(merged1) | set(merged2))
    if not subsets:
        left = _HSDG if part == "imag" else _H
        return Circuit(
            c1.n + 1,
            2,
            [DenseGate((0,), _ancilla_fold(np.eye(2, dtype=complex), 0, left, _H))],
        )
    out: list[Gate] = []
    for i, sup in enumerate(subsets):
        dim = 1 << len(sup)
        m1 = merged1.get(sup, np.eye(dim, dtype=complex))
        m2 = merged2.get(sup, np.eye(dim, dtype=complex))
        shifted = tuple(q + 1 for q in sup)
        # 0-branch carries the c1 adjoint, 1-branch the c2 gate; the ancilla
        # Hadamards fold into each gate so the output stays pairwise commuting
        w = _two_branch_block(m1.conj().T, m2)
        left = _HSDG if (part == "imag" and i == len(subsets) - 1) else _H
        out.append(DenseGate((0, *shifted), _ancilla_fold(w, len(sup), left, _H)))
    return Circuit(c1.n + 1, 2, out)


def _merge_by_support(c: Circuit) -> dict[tuple[int, ...], np.ndarray]:
    """Product of all gates sharing a support subset, in input order."""
    merged: dict[tuple[int, ...], np.ndarray] = {}
    for g in c.gates:
        sup = g.support
        m = gate_matrix(g, c.d)
        if sup in merged:
            merged[sup] = m @ merged[sup]
        else:
            merged[sup] = m
    return merged


# ---------------------------------------------------------------------------
# constant-depth overlap estimation


def _conjugate_through(u: Circuit, p: PauliOperator, bound: int):
    """Dense ``U^dag P U`` restricted to the backward lightcone.

    Returns (support tuple, matrix).  Gates outside the cone cancel between
    U and its adjoint, so only intersecting gates are applied.
    """
    sup = tuple(sorted(q for q in range(u.n) if ((p.a | p.b) >> q) & 1))
    from .circuit import _restrict_pauli

    m = _restrict_pauli(p).to_matrix() if sup else p.to_matrix()
    if not sup:
        raise ValueError("identity observable has no pivot")
    for layer in reversed(u.layers):
        for g in layer:
            if not set(g.support) & set(sup):
                continue
            reg = tuple(sorted(set(sup) | set(g.support)))
            gm = embed_matrix(gate_matrix(g, u.d), g.support, reg, u.d)
            om = embed_matrix(m, sup, reg, u.d)
            m = gm.conj().T @ om @ gm
            sup = reg
            if len(sup) > bound:
                raise LightconeTooLarge(
                    f"conjugated observable spread to {len(sup)} qubits (bound {bound})"
                )
    return sup, m


def _subset_plan(n: int, cfg: EstimatorConfig, rng: np.random.Generator):
    """Uniform subset draws, merged by distinct subset, plus the shot budget."""
    k_sub = math.ceil(16.0 * math.log(4.0 / cfg.delta) / cfg.epsilon**2)
    if cfg.k_override is not None:
        k_sub = cfg.k_override
    draws = rng.integers(0, 1 << n, size=k_sub, dtype=np.uint64)
    masks, counts = np.unique(draws, return_counts=True)
    delta_term = cfg.delta / (2.0 * k_sub)
    shots_per = math.ceil(16.0 * math.log(2.0 / delta_term) / cfg.epsilon**2)
    return masks, counts, k_sub, shots_per


def estimate_cd_overlap(
    u: Circuit,
    cfg: EstimatorConfig,
    executor: GammaKExecutor,
    rng: np.random.Generator,
    lightcone_bound: int = DEFAULT_LIGHTCONE_BOUND,
) -> EstimateResult:
    """Estimate ``|<0|U|0>|^2`` for a shallow circuit via subset sampling.

    Writes the squared overlap as the subset average of F(S) =
    <0| prod_{j in S} U^dag Z_j U |0> and estimates Re F(S) for sampled S
    with ancilla tests run on the executor; the budget is split half/half
    between subset sampling and the per-subset tests.
    """
    t0 = time.perf_counter()
    n = u.n
    conj = [
        _conjugate_through(u, PauliOperator(n, 0, 0, 1 << j), lightcone_bound)
        for j in range(n)
    ]
    # real-part folds are gate-local, so each qubit's test gate is built once
    folded = []
    for sup, m in conj:
        shifted = tuple(q + 1 for q in sup)
        cg = _controlled_block(m)
        folded.append(DenseGate((0, *shifted), _ancilla_fold(cg, len(sup), _H, _H)))
    masks, counts, k_sub, shots_per = _subset_plan(n, cfg, rng)
    total = 0.0
    for mask, count in zip(masks.tolist(), counts.tolist()):
        gates = [folded[j] for j in range(n) if (mask >> j) & 1]
        if not gates:  # empty subset: bare ancilla, F = 1
            gates = [
                DenseGate((0,), _ancilla_fold(np.eye(2, dtype=complex), 0, _H, _H))
            ]
        test = Circuit(n + 1, 2, gates)
        shots = shots_per * int(count)
        p0 = executor.run_counts(test, shots, rng) / shots
        total += p0_to_value(p0) * int(count)
    raw = total / k_sub
    return EstimateResult(
        value=min(1.0, max(0.0, raw)),
        raw_value=raw,
        epsilon=cfg.epsilon,
        delta=cfg.delta,
        k=k_sub,
        seed=cfg.seed,
        elapsed_ms=(time.perf_counter() - t0) * 1e3,
    )


def estimate_cd_clifford_overlap(
    u: Circuit,
    c: CliffordCircuit,
    cfg: EstimatorConfig,
    executor: GammaKExecutor,
    rng: np.random.Generator,
    lightcone_bound: int = DEFAULT_LIGHTCONE_BOUND,
) -> EstimateResult:
    """Estimate ``|<0|C U|0>|^2`` for shallow U times an arbitrary Clifford C.

    Each sampled subset S turns C^dag Z(S) C = i^t X^a Z^b into two
    internally-commuting layers of conjugated single-qubit Paulis, merged
    into one ancilla test; the exact phase i^t picks the Re or Im variant.
    """
    t0 = time.perf_counter()
    n = u.n
    if c.n != n:
        raise SizeMismatch("Clifford and circuit act on different registers")
    inv_tab = CliffordTableau.from_circuit(c.inverse())
    conj_x = [
        _conjugate_through(u, PauliOperator(n, 0, 1 << k, 0), lightcone_bound)
        for k in range(n)
    ]
    conj_z = [
        _conjugate_through(u, PauliOperator(n, 0, 0, 1 << k), lightcone_bound)
        for k in range(n)
    ]
    masks, counts, k_sub, shots_per = _subset_plan(n, cfg, rng)
    total = 0.0
    for mask, count in zip(masks.tolist(), counts.tolist()):
        zs = PauliOperator(n, 0, 0, int(mask))
        p = inv_tab.conjugate(zs)  # C^dag Z(S) C = i^t X^a Z^b
        layer1 = Circuit(
            n, 2, [DenseGate(*conj_x[k]) for k in range(n) if (p.a >> k) & 1]
        )
        layer2 = Circuit(
            n, 2, [DenseGate(*conj_z[k]) for k in range(n) if (p.b >> k) & 1]
        )
        # Re(i^t w) = +-Re w (t even) or -+Im w (t odd)
        part = "real" if p.t % 2 == 0 else "imag"
        sign = {0: 1.0, 1: -1.0, 2: -1.0, 3: 1.0}[p.t]
        test = two_layer_merge(layer1, layer2, part, check=False)
        shots = shots_per * int(count)
        p0 = executor.run_counts(test, shots, rng) / shots
        total += sign * p0_to_value(p0) * int(count)
    raw = total / k_sub
    return EstimateResult(
        value=min(1.0, max(0.0, raw)),
        raw_value=raw,
        epsilon=cfg.epsilon,
        delta=cfg.delta,
        k=k_sub,
        seed=cfg.seed,
        elapsed_ms=(time.perf_counter() - t0) * 1e3,
    )
