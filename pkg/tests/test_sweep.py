import math

import numpy as np
import pytest

from wqed import GeneralizedCouplings, SystemParams, find_features, isolation_map, spectrum
from wqed.errors import EngineMismatch, NonPositiveEnergy
from wqed.sweep import Engine, default_delta_grid, default_phi_grid, numerator_roots, scan


def test_default_grids():
    d = default_delta_grid()
    assert d.size == 801 and d[0] == -0.4 and d[-1] == 0.4
    p = default_phi_grid()
    assert p.size == 601 and p[-1] == math.pi


@pytest.mark.parametrize("phi", [0.0, math.pi / 2, math.pi])
def test_fig2_features(loop, phi):
    p = loop.replace(phi=phi)
    fs = find_features(spectrum(p, engine="analytic"), p)
    zeros = sorted({round(z.E, 8) for z in fs.zeros})
    assert zeros == [0.9, 1.1]
    assert all(z.T < 1e-8 and z.label in ("dressed_plus", "dressed_minus") for z in fs.zeros)
    peak = 1 - 2 * 0.06 * 0.1 * math.cos(phi) / 0.13
    if phi == math.pi / 2:
        # the peak sits on the grid-independent dark energy E = omega
        assert any(abs(u.E - peak) < 1e-6 for u in fs.unit_peaks)
    else:
        matches = [u for u in fs.unit_peaks if abs(u.E - peak) < 1e-6]
        assert matches and all(u.label == "quasidark" for u in matches)
    assert not fs.isolation_extrema


def test_engines_agree(separated):
    a = spectrum(separated, engine="analytic")
    s = spectrum(separated, engine="solver")
    for name in ("T_LR", "T_RL", "R_LR", "R_RL"):
        np.testing.assert_allclose(getattr(a, name), getattr(s, name), atol=1e-11)


def test_lossy_analytic_has_no_reflection(separated):
    table = spectrum(separated.replace(gamma_a=0.05, gamma_e=0.05), engine="analytic")
    assert np.isnan(table.R_LR).all()


def test_rates_in_range(separated):
    table = spectrum(separated.replace(gamma_a=0.05, gamma_e=0.05, phi=1.0))
    for col in (table.T_LR, table.R_LR, table.T_RL, table.R_RL):
        assert ((col >= 0) & (col <= 1 + 1e-9)).all()


def test_decay_flattens_rabi_valleys(loop):
    table = spectrum(loop.replace(gamma_a=0.05, gamma_e=0.05))
    assert table.T_LR.min() > 0.01
    assert (table.loss_LR > 0).all()


def test_numerator_root_is_reciprocal_zero():
    p = SystemParams(x0=2.0)
    roots = numerator_roots(p, 0.6, 1.4)
    assert any(abs(r - (1 - 0.14796481274595)) < 1e-9 for r in roots)
    fs = find_features(spectrum(p), p)
    for direction in ("left", "right"):
        assert any(
            z.direction.value == direction and abs(z.E - 0.85203518725) < 1e-8 and z.label == "numerator_root"
            for z in fs.zeros
        )


def test_flat_table_has_no_features():
    p = SystemParams(f=0.0, g=0.0)
    fs = find_features(spectrum(p), p)
    assert not fs


def test_lossy_isolation_extrema(separated):
    p = separated.replace(phi=math.pi / 2, gamma_a=0.05, gamma_e=0.05)
    fs = find_features(spectrum(p), p)
    assert fs.isolation_extrema
    assert max(abs(x.I_db) for x in fs.isolation_extrema) > 3.0


def test_map_shape_and_determinism(separated):
    p = separated.replace(gamma_a=0.05, gamma_e=0.05)
    d = np.linspace(-0.3, 0.3, 41)
    phis = np.linspace(0, math.pi, 9)
    serial = isolation_map(p, d, phis, workers=1)
    parallel = isolation_map(p, d, phis, workers=4)
    assert serial.values_db.shape == (9, 41)
    assert serial.values_db.tobytes() == parallel.values_db.tobytes()
    assert np.isfinite(serial.values_db).all()


def test_lossless_map_is_flat(separated):
    imap = isolation_map(separated, np.linspace(-0.3, 0.3, 21), np.linspace(0, math.pi, 5))
    assert np.abs(imap.values_db).max() < 1e-9


def test_image_engine_map(separated):
    imap = isolation_map(separated, np.array([-0.15, 0.0]), np.array([0.05 * math.pi, 0.95 * math.pi]), "image")
    assert imap.at(-0.15, 0.05 * math.pi) == pytest.approx(20.40, abs=0.01)
    assert imap.at(-0.15, 0.95 * math.pi) == pytest.approx(-18.73, abs=0.01)


def test_engine_checks(separated):
    with pytest.raises(EngineMismatch):
        spectrum(separated.replace(omega_e=1.05), engine="analytic")
    with pytest.raises(EngineMismatch):
        spectrum(GeneralizedCouplings(separated, theta_f=0.1), engine=Engine.ANALYTIC)
    with pytest.raises(ValueError):
        spectrum(separated, [0.1, 0.0])
    with pytest.raises(NonPositiveEnergy):
        spectrum(separated, [-1.5, 0.0])


def test_scan(separated):
    tables = scan(separated.replace(phi=1.0, gamma_a=0.05, gamma_e=0.05), "x0", delta_grid=np.linspace(-0.2, 0.2, 11))
    assert list(tables) == [0.0, 0.5, 1.0, 2.0]
    np.testing.assert_allclose(tables[0.0].T_LR, tables[0.0].T_RL, atol=1e-12)
    detuned = scan(separated, "omega_e", [0.95, 1.05], np.linspace(-0.2, 0.2, 11))
    assert set(detuned) == {0.95, 1.05}
    with pytest.raises(ValueError):
        scan(separated, "gamma_a")
