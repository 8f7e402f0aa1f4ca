import numpy as np
import pytest
from hypothesis import given, strategies as st

from gnpvlc.gnp import (
    BOB_RANGES, EVE_RANGES, GnpPathResponse, GnpPropertyRanges, PlateGeometry, asymmetry,
    extract_properties, load_path_responses, plate_cost, plate_matrix, sample_path_response,
    sample_responses,
)


def test_plate_matrix_examples():
    np.testing.assert_allclose(plate_matrix(GnpPathResponse(1, 1, 0)), np.eye(2), atol=1e-15)
    m = plate_matrix(GnpPathResponse(0.9, 0.75, 0.7226))
    np.testing.assert_allclose(np.diag(m), [0.9487, 0.8660 * np.exp(0.7226j)], atol=5e-5)
    assert m[0, 1] == 0 and m[1, 0] == 0


def test_extract_examples():
    r = extract_properties(1, 1)
    assert (r.a_bar_l, r.a_bar_r, r.delta_phi) == (1, 1, 0)
    r = extract_properties(0.5, 0.5j)
    assert r.a_bar_l == pytest.approx(0.25) and r.a_bar_r == pytest.approx(0.25)
    assert r.delta_phi == pytest.approx(np.pi / 2)


def test_extract_rejects_unphysical():
    with pytest.raises(ValueError):
        extract_properties(0, 1)
    with pytest.raises(ValueError):
        extract_properties(1.5, 1)


@given(st.floats(1e-6, 1), st.floats(1e-6, 1), st.floats(-np.pi + 1e-9, np.pi))
def test_extract_round_trip(al, ar, dphi):
    r = GnpPathResponse(al, ar, dphi)
    e = plate_matrix(r) @ np.array([1.0, 1.0])
    back = extract_properties(*e)
    assert back.a_bar_l == pytest.approx(al, rel=1e-12)
    assert back.a_bar_r == pytest.approx(ar, rel=1e-12)
    d = (back.delta_phi - dphi + np.pi) % (2 * np.pi) - np.pi
    assert abs(d) < 1e-9


@given(st.floats(0, 1), st.floats(0, 1), st.floats(-10, 10))
def test_plate_matrix_diagonal_and_passive(al, ar, dphi):
    m = plate_matrix(GnpPathResponse(al, ar, dphi))
    assert m[0, 1] == 0 and m[1, 0] == 0
    assert np.all(np.abs(np.diag(m)) <= 1 + 1e-15)


def test_sampling_ranges_and_determinism():
    r = sample_responses(BOB_RANGES, np.random.default_rng(0), (500,))
    assert np.all((r.a_bar_l >= 0.89) & (r.a_bar_l <= 0.90))
    assert np.all((r.a_bar_r >= 0.74) & (r.a_bar_r <= 0.75))
    assert np.all((r.delta_phi >= 0.6144) & (r.delta_phi <= 0.8308))
    e = sample_responses(EVE_RANGES, np.random.default_rng(0), (500,))
    assert np.all((e.a_bar_l >= 0.6) & (e.a_bar_l <= 0.9))
    assert np.all((e.a_bar_r >= 0.25) & (e.a_bar_r <= 0.75))
    a = sample_path_response(EVE_RANGES, np.random.default_rng(7))
    b = sample_path_response(EVE_RANGES, np.random.default_rng(7))
    assert a == b


def test_samples_are_strictly_chiral():
    for ranges in (BOB_RANGES, EVE_RANGES):
        r = sample_responses(ranges, np.random.default_rng(3), (20000,))
        assert np.all(np.abs(r.a_bar_l - r.a_bar_r) >= 1e-6)
        assert np.all(asymmetry(r.a_bar_l, r.a_bar_r) > 2)


def test_overlapping_ranges_are_redrawn():
    # identical intervals would give many near-achiral draws without the margin
    ranges = GnpPropertyRanges((0.3, 0.3 + 2e-6), (0.3, 0.3 + 2e-6))
    r = sample_responses(ranges, np.random.default_rng(1), (200,))
    assert np.all(np.abs(r.a_bar_l - r.a_bar_r) >= 1e-6)
    with pytest.raises(ValueError):
        sample_responses(GnpPropertyRanges((0.3, 0.3), (0.3, 0.3)), np.random.default_rng(1))


def test_invalid_ranges():
    with pytest.raises(ValueError):
        GnpPropertyRanges((0.5, 0.4), (0.1, 0.2))
    with pytest.raises(ValueError):
        GnpPropertyRanges((0.1, 1.2), (0.1, 0.2))
    with pytest.raises(ValueError):
        GnpPathResponse(1.1, 0.5, 0.0)


def test_plate_cost():
    cents = plate_cost(PlateGeometry()) * 100
    assert cents == pytest.approx(1.17, rel=0.05)
    assert plate_cost(PlateGeometry(gnps_per_hexagon=0)) == 0
    assert plate_cost(PlateGeometry(plate_area=2e-4)) == pytest.approx(2 * plate_cost(PlateGeometry()))
    with pytest.raises(ValueError):
        PlateGeometry(gold_price=0)


def test_plate_cost_independent_arithmetic():
    # 1 cm^2 / (12 sqrt3 1e-14 m^2) hexagons, 3 particles of (200 nm)^3 each
    n_hex = 1e-4 / (12 * np.sqrt(3) * 1e-14)
    grams = n_hex * 3 * 8e-21 * 19.3e6
    assert plate_cost(PlateGeometry()) == pytest.approx(grams * 52.5, rel=1e-12)


def test_load_path_responses(tmp_path):
    p = tmp_path / "plates.csv"
    p.write_text("# measured\ntransmitter,path,a_bar_l,a_bar_r,delta_phi\n0,0,0.9,0.75,0.7\n1,3,0.8,0.6,0.65\n")
    t = load_path_responses(p, n_tx=4)
    assert t[(1, 3)] == GnpPathResponse(0.8, 0.6, 0.65)
    p.write_text("transmitter,path,a_bar_l\n0,0,0.9\n")
    with pytest.raises(ValueError, match="missing"):
        load_path_responses(p)
    p.write_text("transmitter,path,a_bar_l,a_bar_r,delta_phi\n7,0,0.9,0.75,0.7\n")
    with pytest.raises(ValueError, match="out of range"):
        load_path_responses(p, n_tx=4)
