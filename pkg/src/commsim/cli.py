"""Command-line front end.

One JSON object per result line on stdout; human-readable notes on stderr.
All qubit indices on the command line and in files are 1-based.  Exit codes:
0 success, 1 failure with a diagnostic, 2 usage error.  Output on stdout is
deterministic given (argv, seed); timing goes to stderr only.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys

import numpy as np

from . import __version__
from .circuit import Circuit, NamedGate, PauliExpGate, parse_circuit, serialize_circuit
from .errors import CommsimError, ParseError
from .estimator import EstimatorConfig
from .local2 import ProductState, simulate_2local
from .oracle import DEFAULT_CAP, Observable, expectation, run_circuit
from .pauli import PauliOperator, format_pauli, parse_pauli
from .paulisim import (
    ExtraGate,
    MemberGate,
    simulate_commuting_pauli,
    simulate_noncommuting_pauli,
)
from .stabilizer import CLIFFORD_GATES, CliffordCircuit, diagonalize_commuting_set
from .transformers import (
    DenseOracleExecutor,
    alternate_hadamard_test,
    estimate_cd_clifford_overlap,
    estimate_cd_overlap,
    hadamard_test,
    two_layer_merge,
)

CAP_ENV = "COMMSIM_MAX_AMPLITUDES"

_PAULI_LETTERS = {"X", "Y", "Z"}


def _emit(obj: dict):
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _note(msg: str):
    sys.stderr.write(msg + "\n")


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_circuit(path: str) -> Circuit:
    return parse_circuit(_read(path))


def _load_paulis(path: str) -> list[PauliOperator]:
    """A ``.pauli`` file: optional ``paulis <n>`` header, one operator per line."""
    n = None
    ops: list[PauliOperator] = []
    for no, raw in enumerate(_read(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "paulis":
            if ops or n is not None:
                raise ParseError(no, "header must come first")
            if len(toks) != 2 or not toks[1].isdigit():
                raise ParseError(no, "header is 'paulis <n>'")
            n = int(toks[1])
            continue
        ops.append(parse_pauli(line, n, line_no=no))
    if not ops:
        raise ParseError(1, "no Pauli operators in file")
    if n is not None:
        ops = [PauliOperator(n, p.t, p.a, p.b) for p in ops]
    width = max(p.n for p in ops)
    return [PauliOperator(width, p.t, p.a, p.b) for p in ops]


def _parse_obs(spec: str, n: int, d: int) -> Observable:
    """``Z1``-style single-qubit Pauli, a full Pauli string, or ``file@q1,q2``."""
    if "@" in spec:
        path, _, qs = spec.partition("@")
        support = tuple(sorted(int(t) - 1 for t in qs.split(",")))
        rows = []
        for raw in _read(path).splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            vals = [float(t) for t in line.split()]
            rows.append([complex(r, i) for r, i in zip(vals[::2], vals[1::2])])
        return Observable(support, np.array(rows, dtype=complex))
    if d != 2:
        raise ValueError("named Pauli observables need d = 2; use a matrix file")
    if spec[:1].upper() in _PAULI_LETTERS and spec[1:].isdigit():
        q = int(spec[1:]) - 1
        if not 0 <= q < n:
            raise ValueError(f"observable qubit {q + 1} outside the register")
        p = PauliOperator.single(1, spec[0].upper(), 0)
        return Observable((q,), p.to_matrix())
    p = parse_pauli(spec, n)
    from .circuit import _restrict_pauli

    bits = p.a | p.b
    support = tuple(k for k in range(n) if (bits >> k) & 1)
    if not support:
        raise ValueError("identity observable is trivial; pick a Pauli with support")
    return Observable(support, _restrict_pauli(p).to_matrix())


def _resolve_seed(args) -> int:
    seed = args.seed if args.seed is not None else secrets.randbits(64)
    _note(f"seed: {seed}")
    return seed


def _cap(args) -> int:
    if args.max_amplitudes is not None:
        return args.max_amplitudes
    env = os.environ.get(CAP_ENV)
    return int(env) if env else DEFAULT_CAP


def _estimator_cfg(args, seed: int) -> EstimatorConfig:
    return EstimatorConfig(
        epsilon=args.epsilon,
        delta=args.delta,
        seed=seed,
        k_override=args.shots,
    )


def _gate_list(c: Circuit) -> list[tuple[float, PauliOperator]]:
    gates = []
    for i, g in enumerate(c.gates):
        if not isinstance(g, PauliExpGate):
            raise ValueError(f"gate {i + 1} is not a Pauli exponential")
        gates.append((g.theta, g.pauli))
    return gates


def _load_extras(path: str, n: int) -> list[tuple[int, ExtraGate]]:
    """Extras file: one ``<slot> <theta> <pauli>`` per line.

    ``slot`` counts how many member gates are applied before the extra.
    """
    out = []
    for no, raw in enumerate(_read(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) != 3:
            raise ParseError(no, "extras line is '<slot> <theta> <pauli>'")
        try:
            slot = int(toks[0])
            theta = float(toks[1])
        except ValueError as exc:
            raise ParseError(no, str(exc)) from None
        out.append((slot, ExtraGate(theta, parse_pauli(toks[2], n, line_no=no))))
    return out


def _load_clifford(path: str) -> CliffordCircuit:
    c = _load_circuit(path)
    gates = []
    for i, g in enumerate(c.gates):
        if not isinstance(g, NamedGate) or g.name not in CLIFFORD_GATES:
            raise ValueError(f"gate {i + 1} is not a named Clifford gate")
        gates.append((g.name, g.qubits))
    return CliffordCircuit(c.n, tuple(gates))


# ---------------------------------------------------------------------------
# subcommands


def _cmd_oracle(args) -> int:
    c = _load_circuit(args.circuit)
    x = args.input if args.input is not None else "0" * c.n
    s = run_circuit(c, x, cap=_cap(args))
    obs = _parse_obs(args.obs, c.n, c.d)
    _emit({"value": expectation(s, obs), "n": c.n, "d": c.d})
    return 0


def _cmd_sim2local(args) -> int:
    c = _load_circuit(args.circuit)
    x = args.input if args.input is not None else "0" * c.n
    inp = ProductState.from_basis(c.n, c.d, x)
    obs = _parse_obs(args.obs, c.n, c.d)
    _emit({"value": simulate_2local(c, inp, obs), "n": c.n, "d": c.d})
    return 0


def _cmd_paulisim(args) -> int:
    c = _load_circuit(args.circuit)
    gates = _gate_list(c)
    seed = _resolve_seed(args)
    cfg = _estimator_cfg(args, seed)
    rng = np.random.default_rng(seed)
    x = args.input if args.input is not None else "0" * c.n
    qubit = args.qubit - 1
    if not 0 <= qubit < c.n:
        raise ValueError(f"qubit {args.qubit} outside the register")
    if args.extras:
        extras = sorted(_load_extras(args.extras, c.n), key=lambda e: e[0])
        program: list[MemberGate | ExtraGate] = []
        pos = 0
        for j in range(len(gates) + 1):
            while pos < len(extras) and extras[pos][0] <= j:
                program.append(extras[pos][1])
                pos += 1
            if j < len(gates):
                program.append(MemberGate(*gates[j]))
        program.extend(e for _, e in extras[pos:])  # slots past the end go last
        res = simulate_noncommuting_pauli(program, x, qubit, cfg, rng, n=c.n)
    else:
        res = simulate_commuting_pauli(gates, x, qubit, cfg, rng, n=c.n)
    _note(f"elapsed_ms: {res.elapsed_ms:.1f}")
    _emit(
        {
            "value": res.value,
            "raw_value": res.raw_value,
            "epsilon": res.epsilon,
            "delta": res.delta,
            "K": res.k,
            "seed": seed,
        }
    )
    return 0


def _cmd_diagonalize(args) -> int:
    paulis = _load_paulis(args.paulis)
    c, qs = diagonalize_commuting_set(paulis)
    _emit(
        {
            "circuit": serialize_circuit(c.to_circuit()),
            "images": [format_pauli(q) for q in qs],
            "gates": len(c),
        }
    )
    return 0


def _part(args) -> str:
    return {"re": "real", "im": "imag"}[args.part]


def _cmd_hadamard_test(args) -> int:
    c = _load_circuit(args.circuit)
    out = hadamard_test(c, _part(args))
    _emit({"circuit": serialize_circuit(out), "gates": len(out.gates)})
    return 0


def _cmd_alt_hadamard_test(args) -> int:
    c = _load_circuit(args.circuit)
    out = alternate_hadamard_test(c, _part(args))
    _emit({"circuit": serialize_circuit(out), "gates": len(out.gates)})
    return 0


def _cmd_merge_layers(args) -> int:
    c1 = _load_circuit(args.layer1)
    c2 = _load_circuit(args.layer2)
    out = two_layer_merge(c1, c2, _part(args))
    _emit({"circuit": serialize_circuit(out), "gates": len(out.gates)})
    return 0


def _cmd_depth_overlap(args) -> int:
    u = _load_circuit(args.circuit)
    seed = _resolve_seed(args)
    cfg = _estimator_cfg(args, seed)
    rng = np.random.default_rng(seed)
    executor = DenseOracleExecutor(cap=_cap(args))
    if args.clifford:
        cliff = _load_clifford(args.clifford)
        res = estimate_cd_clifford_overlap(u, cliff, cfg, executor, rng)
    else:
        res = estimate_cd_overlap(u, cfg, executor, rng)
    _note(f"elapsed_ms: {res.elapsed_ms:.1f}")
    _emit(
        {
            "value": res.value,
            "raw_value": res.raw_value,
            "epsilon": res.epsilon,
            "delta": res.delta,
            "K": res.k,
            "seed": seed,
        }
    )
    return 0


# ---------------------------------------------------------------------------
# dispatch


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="commsim", description="Classical simulators for commuting quantum circuits"
    )
    top.add_argument("--version", action="version", version=f"commsim {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, estimator=False):
        p.add_argument("--seed", type=int, default=None, help="64-bit RNG seed")
        p.add_argument("--workers", type=int, default=1, help="parallelism hint")
        p.add_argument(
            "--max-amplitudes",
            type=int,
            default=None,
            help=f"statevector capacity cap (default from ${CAP_ENV})",
        )
        if estimator:
            p.add_argument("--epsilon", type=float, default=0.05)
            p.add_argument("--delta", type=float, default=0.01)
            p.add_argument(
                "--shots", type=int, default=None, help="override the derived sample count"
            )

    p = sub.add_parser("oracle", help="exact statevector expectation")
    p.add_argument("circuit")
    p.add_argument("--input", default=None, help="basis-state digit string")
    p.add_argument("--obs", required=True, help="Z1-style Pauli, Pauli string, or file@q1,q2")
    common(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("sim2local", help="strong simulation of 2-local commuting circuits")
    p.add_argument("circuit")
    p.add_argument("--input", default=None, help="basis-state digit string")
    p.add_argument("--obs", required=True)
    common(p)
    p.set_defaults(func=_cmd_sim2local)

    p = sub.add_parser("paulisim", help="weak simulation of Pauli-exponential circuits")
    p.add_argument("circuit")
    p.add_argument("--qubit", type=int, required=True, help="1-based Z observable qubit")
    p.add_argument("--input", default=None)
    p.add_argument("--extras", default=None, help="file of non-commuting extra gates")
    common(p, estimator=True)
    p.set_defaults(func=_cmd_paulisim)

    p = sub.add_parser("diagonalize", help="simultaneously diagonalize commuting Paulis")
    p.add_argument("paulis", help=".pauli file")
    common(p)
    p.set_defaults(func=_cmd_diagonalize)

    for name, fn in (
        ("hadamard-test", _cmd_hadamard_test),
        ("alt-hadamard-test", _cmd_alt_hadamard_test),
    ):
        p = sub.add_parser(name, help="emit an ancilla interference test circuit")
        p.add_argument("circuit")
        p.add_argument("--part", choices=("re", "im"), default="re")
        common(p)
        p.set_defaults(func=fn)

    p = sub.add_parser("merge-layers", help="merge two commuting layers into one test")
    p.add_argument("layer1")
    p.add_argument("layer2")
    p.add_argument("--part", choices=("re", "im"), default="re")
    common(p)
    p.set_defaults(func=_cmd_merge_layers)

    p = sub.add_parser("depth-overlap", help="estimate |<0|U|0>|^2 for shallow circuits")
    p.add_argument("circuit")
    p.add_argument("--clifford", default=None, help="extra Clifford factor (.qc file)")
    common(p, estimator=True)
    p.set_defaults(func=_cmd_depth_overlap)

    return top


def dispatch(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CommsimError, ValueError, OSError) as exc:
        _note(f"error: {exc}")
        return 1


def main():
    raise SystemExit(dispatch())


if __name__ == "__main__":
    main()
