import math

import numpy as np
import pytest

from wqed import Direction, GeneralizedCouplings, SystemParams, denormalize, validate_params, wavevector
from wqed.errors import NegativeCoupling, NegativeDecay, NonPositiveEnergy, NonPositiveGroupVelocity, ParameterError


def test_defaults_are_degenerate(loop):
    assert loop.degenerate
    assert loop.omega == 1.0


def test_validate_rescales_to_unit_velocity():
    raw = SystemParams(omega_a=2.0, omega_e=2.0, lambda_mag=0.2, f=0.6, g=0.4, v_g=2.0, x0=1.0)
    p = validate_params(raw)
    assert p.v_g == 1.0
    assert p.omega_a == pytest.approx(1.0)
    assert p.lambda_mag == pytest.approx(0.1)
    assert p.unit_scale == pytest.approx(2.0)
    back = denormalize(p)
    for name in ("omega_a", "lambda_mag", "f", "g", "v_g"):
        assert getattr(back, name) == pytest.approx(getattr(raw, name))


def test_validate_is_idempotent():
    p = validate_params(SystemParams(v_g=3.0, x0=-1.5))
    assert validate_params(p) == p


def test_negative_x0_folds_and_marks_mirror():
    p = validate_params(SystemParams(x0=-2.0))
    assert p.x0 == 2.0 and p.mirrored


@pytest.mark.parametrize(
    "changes, error",
    [
        ({"v_g": 0.0}, NonPositiveGroupVelocity),
        ({"v_g": -1.0}, NonPositiveGroupVelocity),
        ({"lambda_mag": -0.1}, NegativeCoupling),
        ({"gamma_e": -1e-3}, NegativeDecay),
        ({"omega_a": math.nan}, ParameterError),
        ({"x0": math.inf}, ParameterError),
    ],
)
def test_invalid_parameters(changes, error):
    with pytest.raises(error):
        validate_params(SystemParams(**changes))


def test_wavevector():
    p = SystemParams(v_g=2.0)
    assert wavevector(1.0, p) == pytest.approx(0.5)
    np.testing.assert_allclose(wavevector(np.array([1.0, 3.0]), p), [0.5, 1.5])
    with pytest.raises(NonPositiveEnergy):
        wavevector(0.0, p)
    with pytest.raises(NonPositiveEnergy):
        wavevector(np.array([1.0, -1.0]), p)


def test_direction_parse_and_flip():
    assert Direction.parse("Left") is Direction.LEFT
    assert Direction.LEFT.flipped is Direction.RIGHT
    with pytest.raises(ValueError):
        Direction.parse("up")


def test_loop_phase():
    gp = GeneralizedCouplings(SystemParams(phi=0.3), theta_f=0.1, theta_g=0.2)
    assert gp.loop_phase == pytest.approx(0.3 - 0.1 + 0.2)
    assert gp.f_complex == pytest.approx(0.3 * complex(math.cos(0.1), math.sin(0.1)))
