
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cit_filter.errors import ConfigError, DerivationError, DomainError
from cit_filter.grid import Grid1D, gaussian_envelope
from cit_filter.params import SystemParams
from cit_filter.solver2 import (FIELDS, SQRT2, Solver2, derive_eom,
                                kinematic_arrivals, kinematic_delay_model, product_state,
                                validate_eom)

P = SystemParams(G=1.0, gn_sqrt=1.0)


def test_derived_table_matches_lattice():
    report = validate_eom(derive_eom(validate=False))
    assert len(report) == len(FIELDS) ** 2
    assert max(report.values()) < 1e-10


def test_wrong_factor_is_reported():
    with pytest.raises(DerivationError) as exc:
        derive_eom({"es<-ss": SQRT2})
    assert "es<-ss" in str(exc.value)
    assert exc.value.diagnostics["es<-ss"] > 0.1


def test_unknown_coupling_label():
    with pytest.raises(ConfigError):
        derive_eom({"ff<-ss": 1.0})


def test_product_state_normalised_and_symmetric():
    grid = Grid1D(0.0, 4.0, 32)
    s = product_state(gaussian_envelope(grid, 1.0, 0.3), gaussian_envelope(grid, 3.0, 0.3), grid.dz)
    assert s.norm(grid.dz) == pytest.approx(1.0)
    assert s.asymmetry() == 0.0


def test_dark_pair_is_stationary_without_advection():
    # interaction part only: ratios (sqrt2 G^2, -2 G g, g^2) between ff, sf, ss
    G, g = 1.3, 2.1
    grid = Grid1D(0.0, 1.0, 16)
    solver = Solver2(grid, SystemParams(G=G, gn_sqrt=g))
    phi = np.ones((16, 16), dtype=complex)
    zero = np.zeros_like(phi)
    y = {k: zero for k in FIELDS}
    y["ff"] = phi
    y["sf"] = -SQRT2 * g / G * phi
    y["ss"] = g * g / (SQRT2 * G * G) * phi
    out = dict(zip(FIELDS, solver.rhs([y[k] for k in FIELDS])))
    for k in FIELDS:
        assert np.abs(out[k]).max() < 1e-12


@settings(max_examples=5, deadline=None)
@given(st.floats(1.0, 5.0), st.floats(1.0, 5.0))
def test_symmetry_and_norm_preserved(G, gn):
    grid = Grid1D(0.0, 4.0, 32, 1.5, 2.5, w_ramp=0.3)
    f = gaussian_envelope(grid, 0.8, 0.4)
    tr = Solver2(grid, SystemParams(G=G, gn_sqrt=gn)).run(product_state(f, dz=grid.dz), 1.0)
    assert tr.asymmetry == 0.0
    assert tr.norm_drift < 1e-5


def test_kinematic_model_examples():
    a = kinematic_delay_model(0.0, P)
    assert a.t1 == pytest.approx(1.75) and a.t2 == pytest.approx(1.75)
    b = kinematic_delay_model(0.3, P)
    assert (b.t1, b.t2) == pytest.approx((1.7875, 2.0875))
    c = kinematic_delay_model(2.2, P)
    assert c.separated and (c.t1, c.t2) == pytest.approx((2.0, 4.2))
    with pytest.raises(DomainError):
        kinematic_delay_model(-1.0, P)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 5.0), st.floats(0.05, 5.0))
def test_event_model_agrees_with_pair_model(d, r):
    p = SystemParams(G=r, gn_sqrt=1.0)
    t = kinematic_arrivals([0.0, d], p)
    m = kinematic_delay_model(d, p)
    assert t == pytest.approx([m.t1, m.t2], rel=1e-9, abs=1e-9)


def test_three_photons_together():
    from cit_filter.darkstate import group_velocity_exact

    t = kinematic_arrivals([0.0, 0.0, 0.0], P)
    assert t == pytest.approx([1.0 / group_velocity_exact(3, 1.0)] * 3)
