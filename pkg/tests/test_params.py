
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cit_filter.errors import DomainError
from cit_filter.params import (PulseSpec, SystemParams, check_conditions, derive_quantities,
                               dimensionalize, nondimensionalize, physical_from_mhz,
                               with_reduced_light_speed)

rates = st.floats(0.1, 1e3)


@pytest.fixture
def lab():
    """G = 2 pi 3 MHz, gamma = 2 pi 6 MHz, OD = 50, kappa = 2 pi 0.1 MHz."""
    return physical_from_mhz(3.0, 6.0, od=50.0, kappa_MHz=0.1)


def test_lab_numbers(lab):
    d = derive_quantities(lab)
    assert d.od == pytest.approx(50.0)
    assert d.cooperativity == pytest.approx(15.0)
    assert d.delta_tau_12 == pytest.approx(2.6526e-6, rel=1e-4)
    assert d.delta_tau_12_approx == pytest.approx(d.delta_tau_12, rel=1e-3)


def test_condition_report_flags_cavity(lab):
    rep = check_conditions(lab, PulseSpec(t_p=1e-6))
    assert rep.strong_coupling and rep.adiabatic and rep.separable
    assert not rep.cavity_ok
    assert rep.cooperativity < rep.od
    assert rep.adiabaticity == pytest.approx(1.3333, rel=1e-3)
    assert rep.separability_ratio == pytest.approx(2.6526, rel=1e-4)
    assert rep.separability_ratio < rep.separability_bound
    assert sum("[FAILED]" in m for m in rep.messages) == 1
    assert any(m.startswith("cavity lifetime") and "[FAILED]" in m for m in rep.messages)


def test_velocities_are_fractions():
    d = derive_quantities(SystemParams(G=1.0, gn_sqrt=1.0, gamma=1.0))
    assert d.v1 == pytest.approx(0.5)
    assert d.v2 == pytest.approx(4.0 / 7.0)
    assert d.delta_tau_12 == pytest.approx(2.0 - 7.0 / 4.0)


@pytest.mark.parametrize("kwargs", [dict(G=0.0, gn_sqrt=1.0), dict(G=1.0, gn_sqrt=-1.0),
                                    dict(G=1.0, gn_sqrt=1.0, gamma=-1.0),
                                    dict(G=1.0, gn_sqrt=1.0, c=0.0)])
def test_invalid_params(kwargs):
    with pytest.raises(DomainError):
        SystemParams(**kwargs)


def test_derived_needs_decay():
    with pytest.raises(DomainError):
        derive_quantities(SystemParams(G=1.0, gn_sqrt=1.0))


def test_pulse_validation():
    with pytest.raises(DomainError):
        PulseSpec(t_p=0.0)


def test_od_or_coupling_required():
    with pytest.raises(DomainError):
        physical_from_mhz(3.0, 6.0)
    with pytest.raises(DomainError):
        physical_from_mhz(3.0, 6.0, od=50.0, gn_MHz=10.0)


@settings(max_examples=50, deadline=None)
@given(rates, rates, rates, st.floats(1e-3, 1e3), st.floats(1e-3, 10.0))
def test_unit_round_trip(G, gn, gamma, c, L):
    p = SystemParams(G=G, gn_sqrt=gn, gamma=gamma, c=c, L=L, unit_system="physical")
    back = dimensionalize(nondimensionalize(p), c, L)
    for key in ("G", "gn_sqrt", "gamma", "kappa"):
        assert getattr(back, key) == pytest.approx(getattr(p, key), rel=1e-12)
    # dimensionless groups do not depend on the unit choice
    a, b = derive_quantities(p), derive_quantities(nondimensionalize(p))
    assert a.od == pytest.approx(b.od, rel=1e-12)
    assert a.delta_tau_12 * c / L == pytest.approx(b.delta_tau_12, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 1.0))
def test_reduced_light_speed_keeps_physics(target):
    lab = physical_from_mhz(3.0, 6.0, od=50.0, kappa_MHz=0.1)
    sim = with_reduced_light_speed(lab, target)
    assert sim.ratio ** 2 == pytest.approx(target, rel=1e-12)
    d = derive_quantities(sim)
    assert d.od == pytest.approx(50.0, rel=1e-12)
    # G, gamma, kappa in units of the reduced L/c keep their physical ratios
    assert sim.G / sim.gamma == pytest.approx(lab.G / lab.gamma, rel=1e-12)
    assert d.cooperativity == pytest.approx(15.0, rel=1e-12)
