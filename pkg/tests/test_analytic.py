import math

import numpy as np
import pytest

from wqed import analytic, solve_batch
from wqed.analytic import (
    SATURATION_DB,
    dressed_energies,
    isolation_db,
    isolation_from_rates,
    quasidark_energy,
    spectral_features,
    t_colocated,
    t_left,
    t_right,
    t_right_image,
)
from wqed.errors import BothCouplingsZero, DegeneracyRequired, RequiresColocated


def test_dressed_zeros(loop):
    assert abs(t_left(loop, 1.1)) < 1e-14
    assert abs(t_left(loop, 0.9)) < 1e-14


def test_quasidark_peak(loop):
    E = quasidark_energy(loop)
    assert E == pytest.approx(0.9076923076923077, abs=1e-15)
    assert abs(t_left(loop, E) - 1.0) < 1e-14


def test_single_emitter_limit():
    # no emitter-cavity coupling, emitter detuned far away: a lone cavity
    p = analytic.SystemParams(lambda_mag=0.0, g=0.0)
    assert t_left(p, 1.1) == pytest.approx(0.1 / (0.1 + 0.09j), abs=1e-14)
    assert t_colocated(p, 1.1) == pytest.approx(0.1 / (0.1 + 0.09j), abs=1e-14)


def test_benchmark_value(separated):
    assert abs(t_left(separated, 0.85)) ** 2 == pytest.approx(0.007709472421102603, rel=1e-12)


def test_right_incidence_is_reciprocal_without_loss(separated):
    E = np.linspace(0.6, 1.4, 201)
    np.testing.assert_allclose(np.abs(t_right(separated, E)), np.abs(t_left(separated, E)), atol=1e-13)


def test_image_formula_value(separated):
    assert abs(t_right_image(separated, 0.85)) ** 2 == pytest.approx(0.846236190757066, rel=1e-10)
    iso = isolation_db(separated, 0.85, image=True)
    assert iso.db == pytest.approx(20.40, abs=0.01)


@pytest.mark.parametrize("gamma", [0.0, 0.05])
@pytest.mark.parametrize("x0", [0.0, 2.0, -1.3])
def test_closed_forms_match_solver(separated, gamma, x0):
    p = separated.replace(x0=x0, gamma_a=gamma, gamma_e=gamma, phi=0.7)
    E = np.linspace(0.6, 1.4, 101)
    np.testing.assert_allclose(t_left(p, E), solve_batch(p, E, "left").t, atol=1e-12)
    np.testing.assert_allclose(t_right(p, E), solve_batch(p, E, "right").t, atol=1e-12)


def test_colocated_form(loop):
    E = np.linspace(0.7, 1.3, 51)
    np.testing.assert_allclose(t_colocated(loop.replace(phi=1.0), E), t_left(loop.replace(phi=1.0), E), atol=1e-14)
    with pytest.raises(RequiresColocated):
        t_colocated(loop.replace(x0=1.0), 1.0)


def test_degeneracy_required(loop):
    with pytest.raises(DegeneracyRequired):
        t_left(loop.replace(omega_e=1.05), 1.0)
    with pytest.raises(DegeneracyRequired):
        t_right(loop.replace(gamma_a=0.01), 1.0)


def test_uncoupled_is_transparent(loop):
    assert t_left(loop.replace(f=0.0, g=0.0), 1.0) == 1.0
    with pytest.raises(BothCouplingsZero):
        quasidark_energy(loop.replace(f=0.0, g=0.0))


def test_feature_ordering(loop):
    for phi in np.linspace(0, math.pi, 7):
        sf = spectral_features(loop.replace(phi=phi))
        assert sf.dressed_minus <= sf.quasidark <= sf.dressed_plus
    assert dressed_energies(loop) == pytest.approx((1.1, 0.9))


def test_isolation_saturation():
    db, sat = isolation_from_rates(0.0, 0.5)
    assert db == SATURATION_DB and sat
    db, sat = isolation_from_rates(0.5, 0.0)
    assert db == -SATURATION_DB and sat
    db, sat = isolation_from_rates(0.0, 0.0)
    assert db == 0.0 and sat
    db, sat = isolation_from_rates(0.01, 1.0)
    assert db == pytest.approx(20.0) and not sat
    assert math.copysign(1.0, isolation_from_rates(0.3, 0.3)[0]) == 1.0


def test_array_in_array_out(loop):
    out = t_left(loop, np.array([[0.9, 1.0], [1.1, 1.2]]))
    assert out.shape == (2, 2)
    assert isinstance(t_left(loop, 1.0), complex)
