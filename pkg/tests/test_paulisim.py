"""Weak simulation of Pauli-exponential circuits vs closed forms and the oracle."""

import math

import numpy as np
import pytest
from conftest import pauli_statevector_matrix, random_commuting_paulis

from commsim.circuit import Circuit, PauliExpGate
from commsim.errors import NotCommuting, NotHermitian, TooManyExtras
from commsim.estimator import EstimatorConfig
from commsim.oracle import Observable, circuit_unitary, expectation, run_circuit
from commsim.paulisim import (
    ExtraGate,
    MemberGate,
    compile_commuting_pauli,
    simulate_commuting_pauli,
    simulate_noncommuting_pauli,
)
from commsim.pauli import PauliOperator, parse_pauli

Z2 = np.array([[1, 0], [0, -1]], dtype=complex)


def _dense_value(gate_list, n, xv, qubit):
    c = Circuit(n, 2, [PauliExpGate(th, p) for th, p in gate_list])
    label = "".join(str((xv >> k) & 1) for k in range(n))
    s = run_circuit(c, label)
    return expectation(s, Observable((qubit,), Z2))


class TestCompile:
    def test_factorization_dense(self, rng):
        for _ in range(8):
            n = int(rng.integers(2, 5))
            ps = random_commuting_paulis(n, int(rng.integers(1, 2 * n)), rng)
            gate_list = [(float(rng.uniform(0, 2 * np.pi)), p) for p in ps]
            c, diag, obs_map = compile_commuting_pauli(gate_list)
            u = circuit_unitary(
                Circuit(n, 2, [PauliExpGate(th, p) for th, p in gate_list])
            )
            uc = circuit_unitary(c.to_circuit())
            d = np.eye(1 << n, dtype=complex)
            for dz in diag:
                # reindex the bit-packed diagonal into the statevector layout
                m = np.zeros_like(d)
                for y in range(1 << n):
                    idx = 0
                    for k in range(n):
                        idx = 2 * idx + ((y >> k) & 1)
                    m[idx, idx] = dz.eval_phase(y)
                d = d @ m
            assert np.allclose(u, uc @ d @ uc.conj().T, atol=1e-9)

    def test_obs_map_is_inverse_conjugation(self, rng):
        n = 3
        ps = random_commuting_paulis(n, 2, rng)
        c, _, obs_map = compile_commuting_pauli([(0.3, p) for p in ps])
        uc = circuit_unitary(c.to_circuit())
        a = parse_pauli("ZII")
        img = obs_map(a)
        assert np.allclose(
            pauli_statevector_matrix(img),
            uc.conj().T @ pauli_statevector_matrix(a) @ uc,
            atol=1e-10,
        )

    def test_validation(self):
        with pytest.raises(NotCommuting):
            compile_commuting_pauli([(0.1, parse_pauli("X")), (0.2, parse_pauli("Z"))])
        with pytest.raises(NotHermitian):
            compile_commuting_pauli([(0.1, parse_pauli("iZ", 1))])
        with pytest.raises(ValueError):
            compile_commuting_pauli([])


class TestCommutingSimulation:
    def test_diagonal_closed_form(self, rng):
        # e^{i theta Z} leaves <Z> = +-1 exact
        cfg = EstimatorConfig(k_override=50)
        res = simulate_commuting_pauli([(0.7, parse_pauli("Z"))], 0, 0, cfg, rng)
        assert res.value == pytest.approx(1.0, abs=1e-12)
        res = simulate_commuting_pauli([(0.7, parse_pauli("Z"))], 1, 0, cfg, rng)
        assert res.value == pytest.approx(-1.0, abs=1e-12)

    def test_x_rotation_closed_form(self, rng):
        theta = 0.6
        cfg = EstimatorConfig(epsilon=0.08, delta=0.02)
        res = simulate_commuting_pauli([(theta, parse_pauli("X"))], 0, 0, cfg, rng)
        assert abs(res.value - math.cos(2 * theta)) <= cfg.epsilon

    def test_empty_circuit(self, rng):
        cfg = EstimatorConfig(k_override=10)
        res = simulate_commuting_pauli([], "01", 1, cfg, rng, n=2)
        assert res.value == pytest.approx(-1.0, abs=1e-12)

    def test_matches_oracle(self, rng):
        misses = 0
        cfg = EstimatorConfig(epsilon=0.12, delta=0.02)
        for _ in range(12):
            n = int(rng.integers(2, 6))
            ps = random_commuting_paulis(n, int(rng.integers(1, n + 2)), rng)
            gate_list = [(float(rng.uniform(0, 2 * np.pi)), p) for p in ps]
            xv = int(rng.integers(1 << n))
            q = int(rng.integers(n))
            want = _dense_value(gate_list, n, xv, q)
            res = simulate_commuting_pauli(gate_list, xv, q, cfg, rng)
            if abs(res.value - want) > cfg.epsilon:
                misses += 1
            assert res.max_modulus_violation < 1e-12
            assert -1.0 <= res.value <= 1.0
        assert misses <= 1

    def test_sign_covariance(self, rng):
        # theta -> -theta together with P -> -P is the same circuit
        gl1 = [(0.9, parse_pauli("ZX"))]
        gl2 = [(-0.9, parse_pauli("-ZX"))]
        cfg = EstimatorConfig(epsilon=0.1, delta=0.02, seed=7)
        r1 = simulate_commuting_pauli(gl1, 2, 0, cfg, np.random.default_rng(7))
        r2 = simulate_commuting_pauli(gl2, 2, 0, cfg, np.random.default_rng(7))
        assert r1.value == pytest.approx(r2.value, abs=1e-12)


class TestNonCommutingSimulation:
    def test_matches_oracle_small_k(self, rng):
        misses = 0
        cfg = EstimatorConfig(epsilon=0.25, delta=0.05)
        for trial in range(8):
            n = int(rng.integers(2, 4))
            k = 1 + trial % 2
            members = [
                MemberGate(float(rng.uniform(0, 2 * np.pi)), p)
                for p in random_commuting_paulis(n, 2, rng)
            ]
            extras = []
            for _ in range(k):
                while True:
                    a = int(rng.integers(1 << n))
                    b = int(rng.integers(1 << n))
                    if a | b:
                        break
                t = (a & b).bit_count() & 1
                extras.append(
                    ExtraGate(float(rng.uniform(0, 2 * np.pi)), PauliOperator(n, t, a, b))
                )
            program = list(members)
            for g in extras:
                program.insert(int(rng.integers(len(program) + 1)), g)
            xv = int(rng.integers(1 << n))
            q = int(rng.integers(n))
            gate_list = [(g.theta, g.pauli) for g in program]
            want = _dense_value(gate_list, n, xv, q)
            res = simulate_noncommuting_pauli(program, xv, q, cfg, rng)
            if abs(res.value - want) > cfg.epsilon:
                misses += 1
        assert misses <= 1

    def test_k0_matches_commuting_path(self, rng):
        n = 3
        ps = random_commuting_paulis(n, 3, rng)
        gate_list = [(float(rng.uniform(0, 2 * np.pi)), p) for p in ps]
        cfg = EstimatorConfig(epsilon=0.1, delta=0.02, seed=11)
        r1 = simulate_commuting_pauli(gate_list, 5, 1, cfg, np.random.default_rng(11))
        r2 = simulate_noncommuting_pauli(
            [MemberGate(th, p) for th, p in gate_list], 5, 1, cfg, np.random.default_rng(11)
        )
        assert r1.value == pytest.approx(r2.value, abs=1e-9)

    def test_too_many_extras(self, rng):
        program = [MemberGate(0.1, parse_pauli("ZZ"))] + [
            ExtraGate(0.1, parse_pauli("XI")) for _ in range(3)
        ]
        with pytest.raises(TooManyExtras):
            simulate_noncommuting_pauli(
                program, 0, 0, EstimatorConfig(k_override=5), rng, k_max=2
            )

    def test_validation(self, rng):
        with pytest.raises(ValueError):
            simulate_noncommuting_pauli([], 0, 0, EstimatorConfig(), rng)
        with pytest.raises(NotHermitian):
            simulate_noncommuting_pauli(
                [MemberGate(0.1, parse_pauli("Z")), ExtraGate(0.1, parse_pauli("iX", 1))],
                0,
                0,
                EstimatorConfig(k_override=5),
                rng,
            )
