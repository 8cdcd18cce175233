import itertools

import numpy as np
import pytest
from conftest import ISO, XX, ZZ

from hamsim.errors import CapacityError, ContractViolation, DegenerateInputError
from hamsim.generic_sim import (
    CLIFFORDS,
    baseline_simulation,
    clifford_conjugator,
    decouple_ddim,
    decouple_qubits,
    diagonal_sector,
    noswap_fixture,
    schedule_residual,
    simulate_generic_ddim,
)
from hamsim.numerics import I2, SX, SY, SZ, dagger, kron, random_hermitian
from hamsim.pauli import decompose, nonlocal_part_bipartite, swap, traceless_basis
from hamsim.protocol import factor, verify_average

PAULI = {"X": SX, "Y": SY, "Z": SZ}


def traceless(h):
    return h - np.trace(h) / len(h) * np.eye(len(h))


class TestDecoupleQubits:
    def test_xx(self):
        sched = decouple_qubits(XX, 1)
        assert len(sched) == 16
        assert np.allclose(sched.average(XX), 0, atol=1e-15)

    def test_identity(self):
        assert np.allclose(decouple_qubits(np.eye(4), 1).average(np.eye(4)), np.eye(4))

    @pytest.mark.parametrize("n", [1, 2])
    def test_random(self, n):
        h = random_hermitian(4**n, n)
        sched = decouple_qubits(h, n)
        assert len(sched) == 2 ** (4 * n) and sched.is_valid()
        assert np.abs(sched.average(traceless(h))).max() <= 1e-12
        assert np.abs(sched.average(h) - np.trace(h) / 4**n * np.eye(4**n)).max() <= 1e-12

    def test_errors(self):
        with pytest.raises(ContractViolation):
            decouple_qubits(np.eye(4), 2)
        with pytest.raises(CapacityError):
            decouple_qubits(np.eye(64), 3)


class TestDecoupleDdim:
    def test_qubit_side_a(self):
        sched = decouple_ddim(XX, 2, "A")
        assert len(sched) == 4
        assert np.allclose(sched.average(XX), 0)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_both(self, d):
        h = random_hermitian(d * d, d)
        sched = decouple_ddim(h, d, "both")
        assert len(sched) == d**4
        assert np.abs(sched.average(h) - np.trace(h) / d**2 * np.eye(d * d)).max() <= 1e-10

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_side_a(self, d):
        h = random_hermitian(d * d, d + 10)
        avg = decouple_ddim(h, d, "A").average(h)
        kb = np.einsum("aiaj->ij", avg.reshape(d, d, d, d)) / d
        assert np.abs(avg - np.kron(np.eye(d), kb)).max() <= 1e-10

    def test_errors(self):
        with pytest.raises(CapacityError):
            decouple_ddim(np.eye(25), 5)
        with pytest.raises(ContractViolation):
            decouple_ddim(np.eye(9), 3, side="B")


class TestClifford:
    def test_hadamard(self):
        assert np.allclose(clifford_conjugator("X", "Z", 1), (SX + SZ) / np.sqrt(2))

    def test_anticommuting(self):
        assert np.allclose(clifford_conjugator("X", "X", -1), SZ)

    @pytest.mark.parametrize("src,dst,sign", list(itertools.product("XYZ", "XYZ", (1, -1))))
    def test_all(self, src, dst, sign):
        u = clifford_conjugator(src, dst, sign)
        assert np.allclose(u @ dagger(u), I2)
        assert np.allclose(u @ PAULI[src] @ dagger(u), sign * PAULI[dst], atol=1e-10)

    def test_table_is_the_group(self):
        # 24 elements, pairwise distinct up to phase
        assert len(CLIFFORDS) == 24
        for a, b in itertools.combinations(CLIFFORDS, 2):
            assert abs(np.trace(dagger(a) @ b)) < 2 - 1e-9

    def test_bad_input(self):
        with pytest.raises(ContractViolation):
            clifford_conjugator("W", "X")
        with pytest.raises(ContractViolation):
            clifford_conjugator("X", "Y", 2)


class TestBaseline:
    def test_xx_zz(self):
        prot = baseline_simulation(XX, ZZ)
        assert prot.s == pytest.approx(1) and verify_average(prot) <= 1e-12

    def test_xx_isotropic(self):
        prot = baseline_simulation(XX, ISO)
        assert prot.s == pytest.approx(1) and verify_average(prot) <= 1e-12

    def test_random(self):
        g = np.random.default_rng(0)
        for _ in range(200):
            h, hp = random_hermitian(4, g), random_hermitian(4, g)
            prot = baseline_simulation(h, hp)
            assert verify_average(prot) <= 1e-8
            assert prot.s <= factor(h, hp) + 1e-9
            assert prot.weights.sum() == pytest.approx(1)
            lower = np.abs(decompose(h).M).max() / np.abs(decompose(hp).M).sum() / 4
            assert prot.s >= lower

    def test_degenerate_target(self):
        with pytest.raises(DegenerateInputError):
            baseline_simulation(XX, kron(SZ, I2))


class TestGenericDdim:
    def test_qubits_match_baseline(self):
        h, hp = random_hermitian(4, 1), random_hermitian(4, 2)
        sched = simulate_generic_ddim(h, hp, 2)
        assert sched.factor == pytest.approx(baseline_simulation(h, hp).s, abs=1e-9)
        assert schedule_residual(sched, h, hp) <= 1e-8

    def test_eta1_product(self):
        e = traceless_basis(3).elements[0]
        h = np.kron(e, e)
        sched = simulate_generic_ddim(h, h, 3)
        assert sched.factor >= 1 / 4
        assert sched.factor == pytest.approx(9 / 16)
        assert schedule_residual(sched, h, h) <= 1e-8

    def test_negative_coefficient(self):
        b = traceless_basis(3)
        c = np.zeros((8, 8))
        c[0, 0], c[3, 4], c[5, 1] = 1.0, 0.5, -0.7
        hp = b.assemble(c)
        h = random_hermitian(9, 4)
        sched = simulate_generic_ddim(h, hp, 3)
        assert sched.factor > 0
        assert schedule_residual(sched, h, hp) <= 1e-8

    @pytest.mark.parametrize("d", [3, 4])
    def test_random(self, d):
        h, hp = random_hermitian(d * d, 5), random_hermitian(d * d, 6)
        sched = simulate_generic_ddim(h, hp, d)
        assert sched.is_valid()
        assert schedule_residual(sched, h, hp) <= 1e-8

    def test_retry_on_empty_diagonal_sector(self):
        b = traceless_basis(3)
        h = np.kron(b.elements[2], b.elements[2])  # purely off-diagonal
        assert np.allclose(diagonal_sector(h, 3), 0)
        hp = random_hermitian(9, 7)
        sched = simulate_generic_ddim(h, hp, 3, seed=0)
        assert sched.meta["attempts"] > 1
        assert schedule_residual(sched, h, hp) <= 1e-8

    def test_local_source_fails(self):
        h = np.kron(np.diag([1.0, 0, -1]), np.eye(3))
        with pytest.raises(DegenerateInputError):
            simulate_generic_ddim(h, random_hermitian(9, 1), 3)

    def test_deterministic(self):
        h, hp = random_hermitian(9, 8), random_hermitian(9, 9)
        a = simulate_generic_ddim(h, hp, 3, seed=3)
        b = simulate_generic_ddim(h, hp, 3, seed=3)
        assert a.factor == b.factor and all(np.array_equal(x[1], y[1]) for x, y in zip(a.steps, b.steps))

    def test_capacity(self):
        with pytest.raises(CapacityError):
            simulate_generic_ddim(np.eye(25), np.eye(25), 5)


class TestNoswap:
    def test_fixture(self):
        h, hs = noswap_fixture()
        assert abs(np.trace(h)) == 0 and np.allclose(h, dagger(h))
        assert not np.allclose(h, hs)
        assert np.allclose(hs, swap(h, (3, 3)))

    def test_decouples(self):
        h, _ = noswap_fixture()
        assert np.allclose(decouple_ddim(h, 3).average(h), 0, atol=1e-12)

    def test_nonlocal(self):
        h, _ = noswap_fixture()
        assert np.linalg.norm(nonlocal_part_bipartite(h, (3, 3))) > 1
