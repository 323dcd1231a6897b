import numpy as np
import pytest

from cit_filter.errors import CapacityError, SetupError
from cit_filter.grid import Grid1D, gaussian_envelope
from cit_filter.lattice import (ModeGrid, SectorBasis, analytic_dimension, build_hamiltonian,
                                dark_eigenstate_check, evolve, fields_to_state,
                                measure_centroid_velocity, momentum_blocks, state_to_fields)
from cit_filter.params import SystemParams


@pytest.mark.parametrize("sector", [1, 2])
@pytest.mark.parametrize("n", [8, 12])
def test_dimension(sector, n):
    assert len(SectorBasis(sector, n)) == analytic_dimension(sector, n)


@pytest.mark.parametrize("sector", [1, 2])
def test_hermitian_without_decay(sector):
    H = build_hamiltonian(ModeGrid(8, 0.125), SystemParams(G=1.0, gn_sqrt=2.0), sector)
    assert abs(H - H.getH()).max() < 1e-12


def test_decay_is_antihermitian_part():
    p = SystemParams(G=1.0, gn_sqrt=2.0, gamma=0.3, kappa=0.2)
    H = build_hamiltonian(ModeGrid(8, 0.125), p, 1).toarray()
    A = (H - H.conj().T) / 2j
    assert np.all(np.linalg.eigvalsh(A) <= 1e-12)
    assert np.linalg.eigvalsh(A).min() == pytest.approx(-p.gamma)


def test_capacity_limit():
    with pytest.raises(CapacityError):
        SectorBasis(2, 400)


def test_mode_grid_rejects_bad_mask():
    with pytest.raises(SetupError):
        ModeGrid(8, 0.1, medium_mask=np.full(8, 1.5))


def test_field_map_round_trip():
    rng = np.random.default_rng(0)
    n, dz = 8, 0.25
    basis = SectorBasis(2, n)
    psi = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
    from cit_filter.lattice import LatticeState

    state = LatticeState(psi, basis)
    back = fields_to_state(state_to_fields(state, dz), basis, dz)
    np.testing.assert_allclose(back.amplitudes, psi, atol=1e-13)


def test_dark_null_vector_per_momentum():
    p = SystemParams(G=1.5, gn_sqrt=2.5)
    grid = ModeGrid(16, 1.0 / 16)
    H = build_hamiltonian(grid, p, 1)
    k, blocks, off = momentum_blocks(H, SectorBasis(1, 16), grid)
    assert off < 1e-10
    for kk, Hk in zip(k, blocks):
        chk = dark_eigenstate_check(Hk, photon_energy=p.c * kk, p=p)
        assert chk.ok
        v1 = p.G ** 2 / (p.G ** 2 + p.gn_sqrt ** 2)
        assert chk.first_order_energy == pytest.approx(v1 * p.c * kk, abs=1e-9)


def test_centroid_speed_matches_v1():
    p = SystemParams(G=20.0, gn_sqrt=20.0)
    g = Grid1D(0.0, 4.0, 48)
    mg = ModeGrid.from_grid(g)
    f = gaussian_envelope(g, 2.0, 0.5)
    # dark polariton (G f - g sqrt(n) s = 0 direction), no bright component
    s = -p.gn_sqrt / p.G * f
    st = fields_to_state({"f": f, "e": 0 * f, "s": s}, SectorBasis(1, 48), g.dz)
    st.amplitudes /= st.norm
    traj = evolve(st, build_hamiltonian(mg, p, 1), 0.1, 20, grid=mg)
    fit = measure_centroid_velocity(traj)
    assert fit.speed == pytest.approx(0.5, rel=1e-2)
