import numpy as np
import pytest
from scipy.linalg import expm

from frontsweep.ed_oracle import (
    MAX_SITES,
    ed_build,
    ed_evolve,
    ed_majoranas,
    ed_matrix_element,
    ed_overlap,
    ed_sector_eigh,
    ed_sector_spectrum,
    sz_operator,
)


def test_single_spin():
    sys = ed_build([], [3.0])
    assert np.allclose(sys.hamiltonian, np.diag([-3.0, 3.0]))


def test_two_spin_ising():
    sys = ed_build([1.0], [0.0, 0.0])
    assert np.allclose(np.linalg.eigvalsh(sys.hamiltonian), [-1, -1, 1, 1])
    assert np.allclose(sys.hamiltonian, sys.hamiltonian.T)


def test_size_limit():
    with pytest.raises(ValueError):
        ed_build(np.ones(MAX_SITES), np.ones(MAX_SITES + 1))


def test_block_diagonal_in_parity(rng):
    sys = ed_build(rng.uniform(0.5, 1.5, 5), rng.uniform(0, 3, 6))
    cross = sys.parity_labels[:, None] != sys.parity_labels[None, :]
    assert np.abs(sys.hamiltonian[cross]).max() < 1e-14


def test_sectors_partition_spectrum(rng):
    sys = ed_build(rng.uniform(0.5, 1.5, 4), rng.uniform(0, 3, 5))
    even = ed_sector_spectrum(sys, 1)
    odd = ed_sector_spectrum(sys, -1)
    assert even.size == odd.size == 2**4
    assert np.allclose(np.sort(np.concatenate([even, odd])), np.linalg.eigvalsh(sys.hamiltonian))


def test_matrix_elements():
    sys = ed_build([], [3.0])
    assert ed_matrix_element(sys, [1.0], 0, 0, 1) == pytest.approx(1.0)
    sys = ed_build([0.9, 1.2], [0.4, 1.1, 0.7])
    c = [0.3, -0.2, 0.5]
    assert ed_matrix_element(sys, c, 0, 1, 1) == pytest.approx(ed_matrix_element(sys, c, 1, 0, 1))
    # sigma^z keeps parity: even-sector ground state has no weight on odd states
    w, v = ed_sector_eigh(sys, 1)
    _, u = ed_sector_eigh(sys, -1)
    assert abs(u[:, 0] @ (sz_operator(3, c) * v[:, 0])) < 1e-14


def test_majoranas_anticommute():
    a = ed_majoranas(3)
    for i, x in enumerate(a):
        for j, y in enumerate(a):
            assert np.allclose(x @ y + y @ x, 2.0 * (i == j) * np.eye(8))


def test_majorana_bilinears_are_spins():
    a = ed_majoranas(3)
    sys_z = ed_build([0.0, 0.0], [-1.0, 0.0, 0.0])  # +Z_0 on the diagonal
    assert np.allclose(1j * a[0] @ a[1], sys_z.hamiltonian)
    sys_xx = ed_build([-1.0, 0.0], [0.0, 0.0, 0.0])  # +X_0 X_1
    assert np.allclose(1j * a[1] @ a[2], sys_xx.hamiltonian)


def test_constant_hamiltonian_matches_exponential(rng):
    sys = ed_build(rng.uniform(0.5, 1.5, 3), rng.uniform(0, 3, 4))
    psi0 = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi0 /= np.linalg.norm(psi0)
    exact = expm(-1j * 2.0 * sys.hamiltonian) @ psi0
    for kw in ({"method": "DOP853"}, {"method": "magnus4", "dt_ref": 0.01}):
        psi = ed_evolve(lambda t: sys.hamiltonian, psi0, 0.0, 2.0, **kw)
        assert np.abs(psi - exact).max() < 1e-9
        assert abs(np.linalg.norm(psi) - 1) < 1e-9
        e0 = np.vdot(psi0, sys.hamiltonian @ psi0).real
        assert abs(np.vdot(psi, sys.hamiltonian @ psi).real - e0) < 1e-9


def test_overlap_bounds(rng):
    v = rng.normal(size=8)
    assert ed_overlap(v, v) == pytest.approx(1.0)
    assert ed_overlap(np.eye(8)[0], np.eye(8)[3]) == 0.0
    w = rng.normal(size=8)
    assert 0.0 <= ed_overlap(v, w) <= 1.0
