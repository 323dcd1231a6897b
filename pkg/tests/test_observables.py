import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cit_filter.errors import ExtractionError, SetupError
from cit_filter.grid import Grid1D, gaussian_envelope
from cit_filter.observables import (ObservableSeries, centroid_time, compose_coherent,
                                    extract_delay, fwhm, peak_time)
from cit_filter.params import SystemParams
from cit_filter.solver1 import AmplitudeField1, Solver1
from cit_filter.solver2 import Solver2, product_state
from cit_filter.validation import composition_error


def test_composition_matches_fock_space():
    assert composition_error() < 1e-10


@settings(max_examples=30)
@given(st.floats(-3, 3), st.floats(0.2, 1.5))
def test_peak_and_width_of_gaussian(t0, w):
    t = np.linspace(-10, 10, 2001)
    a = np.exp(-((t - t0) / w) ** 2)
    assert peak_time(t, a) == pytest.approx(t0, abs=1e-4)
    assert centroid_time(t, a) == pytest.approx(t0, abs=1e-6)
    assert fwhm(t, a) == pytest.approx(2 * w * np.sqrt(np.log(2)), rel=1e-3)


def test_extraction_errors():
    t = np.linspace(0, 1, 11)
    with pytest.raises(ExtractionError):
        peak_time(t, np.ones(11))
    with pytest.raises(ExtractionError):
        peak_time(t, t)
    with pytest.raises(ExtractionError):
        fwhm(t, np.exp(-t))


def _runs(grid, p, alpha_env=None):
    f = gaussian_envelope(grid, 0.8, 0.3)
    s1 = AmplitudeField1(f, 0 * f, 0 * f)
    dt = Solver2(grid, p).stable_dt()
    tr1 = Solver1(grid, p).run(s1, 0.5, dt=dt, detectors=[2.0])
    tr2 = Solver2(grid, p).run(product_state(alpha_env if alpha_env is not None else f,
                                             dz=grid.dz), 0.5, dt=dt, detectors=[2.0])
    return tr1, tr2


def test_compose_checks_inputs():
    grid = Grid1D(0.0, 4.0, 32, 1.5, 2.5)
    p = SystemParams(G=1.0, gn_sqrt=1.0)
    tr1, tr2 = _runs(grid, p)
    s = compose_coherent(0.5, tr1, tr2, 2.0)
    assert s.intensity.shape == s.times.shape
    with pytest.raises(SetupError):
        compose_coherent(1.0, tr1, tr2, 2.0)
    _, other = _runs(grid, p, gaussian_envelope(grid, 0.9, 0.3))
    with pytest.raises(SetupError):
        compose_coherent(0.5, tr1, other, 2.0)


def test_delay_sign():
    t = np.linspace(0, 10, 501)
    early = np.exp(-(t - 4) ** 2)
    late = np.exp(-(t - 5) ** 2)
    s = ObservableSeries(t, late, early, t, t)
    d = extract_delay(s, s, "intensity", "g2_unnorm")
    assert d.peak_delay == pytest.approx(1.0, abs=1e-3)
    assert d.centroid_delay == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(SetupError):
        s.channel("phase")
