"""Tests for the two-qubit gate scaling experiment."""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from tbill_qae.errors import DomainError, FitError, UnknownDeviceError
from tbill_qae.scaling import (
    CSV_COLUMNS,
    BackendSpec,
    ScalingRecord,
    derive_seed,
    emit_csv,
    emit_plot,
    fit_quadratic,
    fit_records,
    get_backend,
    parse_csv,
    run_scaling,
)
from tbill_qae.topology import builtin_coupling_map
from tbill_qae.transpiler import IONTRAP


def test_fit_recovers_exact_quadratic():
    """Test fitting noise-free quadratic data."""
    points = [(n, 2 * n * n - 3 * n + 5) for n in range(1, 8)]
    fit = fit_quadratic(points)
    assert (fit.a2, fit.a1, fit.a0) == pytest.approx((2, -3, 5), abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.points == 7
    assert fit(4) == pytest.approx(25)


def test_fit_of_census_curves():
    """Test fitting the ideal and ion-trap censuses."""
    ideal = fit_quadratic([(n, n * n + n) for n in range(1, 20)])
    ion = fit_quadratic([(n, n * n) for n in range(1, 20)])
    assert (ideal.a2, ideal.a1, ideal.a0) == pytest.approx((1, 1, 0), abs=1e-8)
    assert (ion.a2, ion.a1, ion.a0) == pytest.approx((1, 0, 0), abs=1e-8)


def test_fit_constant_series():
    """Test fitting a flat series."""
    fit = fit_quadratic([(1, 4.0), (2, 4.0), (3, 4.0)])
    assert fit.a0 == pytest.approx(4.0)
    assert fit.r_squared == 1.0


def test_weighted_fit_prefers_heavy_points():
    """Test that weights pull the fit."""
    points = [(1, 2.0), (2, 6.0), (3, 12.0), (4, 30.0)]
    light_last = fit_quadratic(points, weights=[1e6, 1e6, 1e6, 1e-6])
    assert light_last(3) == pytest.approx(12.0, abs=1e-3)
    assert (light_last.a2, light_last.a1, light_last.a0) == pytest.approx((1, 1, 0), abs=1e-3)


@pytest.mark.parametrize(
    "points, weights",
    [
        ([(1, 1.0), (2, 2.0)], None),
        ([(1, 1.0), (1, 2.0), (2, 3.0)], None),
        ([(1, 1.0), (2, 2.0), (3, 3.0)], [1.0, 0.0, 1.0]),
        ([(1, 1.0), (2, 2.0), (3, 3.0)], [1.0, 1.0]),
    ],
)
def test_fit_errors(points, weights):
    """Test fits with too few points or bad weights."""
    with pytest.raises(FitError):
        fit_quadratic(points, weights)


def test_backends():
    """Test backend lookup and capacity."""
    assert get_backend("iontrap").is_deterministic
    assert get_backend("ideal").is_deterministic
    assert not get_backend("tokyo").is_deterministic
    assert get_backend("yorktown").fits(4)
    assert not get_backend("yorktown").fits(5)
    with pytest.raises(UnknownDeviceError):
        get_backend("sycamore")
    with pytest.raises(ValidationError):
        BackendSpec(name="bad", native=IONTRAP, coupling=builtin_coupling_map("yorktown"))


def test_derive_seed_is_stable():
    """Test per-cell seed derivation."""
    assert derive_seed(1, "tokyo", 3, 0) == derive_seed(1, "tokyo", 3, 0)
    seeds = {derive_seed(1, b, n, t) for b in ("tokyo", "cairo") for n in (1, 2) for t in (0, 1)}
    assert len(seeds) == 8


def test_deterministic_backends_match_census():
    """Test the ideal and ion-trap series."""
    run = run_scaling(["iontrap", "ideal"], n_min=1, n_max=6, trials=5, seed=1)
    for r in run.series("iontrap"):
        assert r.mean == r.minimum == r.maximum == r.n**2
        assert r.std == 0.0 and r.sem == 0.0
        assert r.trials == 5
    for r in run.series("ideal"):
        assert r.mean == r.n**2 + r.n
    fits = fit_records(run.records)
    assert fits["ideal"].a2 == pytest.approx(1.0, abs=1e-8)
    assert fits["iontrap"].a1 == pytest.approx(0.0, abs=1e-8)


def test_yorktown_cells_are_skipped():
    """Test skipping cells wider than Yorktown."""
    run = run_scaling(["yorktown"], n_min=3, n_max=6, trials=2, seed=1)
    assert [r.n for r in run.records] == [3, 4]
    assert [(s.backend, s.n) for s in run.skipped] == [("yorktown", 5), ("yorktown", 6)]
    assert run.series("yorktown")[0].minimum >= 15


def test_run_is_reproducible():
    """Test that a seed fixes the whole run."""
    first = run_scaling(["tokyo"], n_min=2, n_max=4, trials=3, seed=11)
    second = run_scaling(["tokyo"], n_min=2, n_max=4, trials=3, seed=11)
    assert first == second
    assert first.metadata()["seed"] == 11


def test_run_validation():
    """Test run argument validation."""
    with pytest.raises(DomainError):
        run_scaling(["ideal"], n_min=0, n_max=3)
    with pytest.raises(DomainError):
        run_scaling(["ideal"], n_min=4, n_max=3)
    with pytest.raises(DomainError):
        run_scaling(["ideal"], trials=0)
    with pytest.raises(DomainError):
        run_scaling(["ideal"], p=1.2)


def test_workers_use_process_pool(mocker):
    """Test fanning cells out to worker processes."""
    pool = mocker.patch("tbill_qae.scaling.ProcessPoolExecutor")
    pool.return_value.__enter__.return_value.map.side_effect = map
    run = run_scaling(["ideal", "iontrap"], n_min=1, n_max=3, trials=2, seed=1, workers=2)
    pool.assert_called_once_with(max_workers=2)
    assert [(r.backend, r.n) for r in run.records] == [
        ("ideal", 1), ("ideal", 2), ("ideal", 3), ("iontrap", 1), ("iontrap", 2), ("iontrap", 3),
    ]


def test_record_from_counts():
    """Test summary statistics for a cell."""
    r = ScalingRecord.from_counts("tokyo", 3, [12, 15, 18])
    assert r.mean == 15
    assert r.std == pytest.approx(3.0)
    assert r.sem == pytest.approx(3.0 / math.sqrt(3))
    assert (r.minimum, r.maximum) == (12, 18)

    single = ScalingRecord.from_counts("tokyo", 3, [12])
    assert single.std == 0.0 and single.sem == 0.0


def test_weighted_fit_falls_back_on_zero_sem():
    """Test weighted fitting of zero-spread series."""
    records = [ScalingRecord.from_counts("ideal", n, [n * n + n] * 3) for n in range(1, 5)]
    fits = fit_records(records, weighted=True)
    assert fits["ideal"].a2 == pytest.approx(1.0, abs=1e-8)


def test_fit_records_skips_short_series():
    """Test skipping series with fewer than three points."""
    records = [ScalingRecord.from_counts("yorktown", n, [10 * n]) for n in (1, 2)]
    assert fit_records(records) == {}


def test_csv_layout():
    """Test the scaling CSV columns."""
    record = ScalingRecord.from_counts("ideal", 3, [12, 12])
    text = emit_csv([record])
    assert text.splitlines() == [",".join(CSV_COLUMNS), "ideal,3,2,12,0,0,12,12"]


def test_csv_round_trip():
    """Test reading back a scaling CSV."""
    records = [ScalingRecord.from_counts("tokyo", n, [10 + n, 13 + n, 11 + n]) for n in (1, 2)]
    text = emit_csv(records, meta={"seed": 5, "trials": 3})
    assert text.startswith("# seed=5 trials=3\n")
    parsed = parse_csv(text)
    assert [p.model_dump(exclude={"counts"}) for p in parsed] == [
        r.model_dump(exclude={"counts"}) for r in records
    ]


def test_parse_csv_requires_columns():
    """Test rejecting a CSV with missing columns."""
    with pytest.raises(DomainError):
        parse_csv("backend,n\nideal,1\n")


def test_plot_is_stable_and_labelled():
    """Test that the SVG is reproducible and labelled."""
    records = [ScalingRecord.from_counts(b, n, [n * n + 1, n * n + 3]) for b in ("tokyo", "cairo") for n in (1, 2, 3)]
    fits = fit_records(records)
    svg = emit_plot(records, fits, meta={"seed": 1})
    assert svg == emit_plot(records, fits, meta={"seed": 1})
    for backend in ("tokyo", "cairo"):
        assert f'id="series-{backend}"' in svg
        assert f'id="fit-{backend}"' in svg
        assert backend in svg
    assert "<dc:date>" not in svg


@pytest.mark.slow
def test_full_scaling_run():
    """Leading coefficients order ion-trap <= ideal <= tokyo <= cairo."""
    run = run_scaling(["iontrap", "ideal", "tokyo", "cairo"], n_min=1, n_max=19, trials=16, seed=1234)
    fits = fit_records(run.records)
    a2 = {b: fits[b].a2 for b in fits}
    assert a2["iontrap"] <= a2["ideal"] <= a2["tokyo"] <= a2["cairo"]
    assert 1.3 <= a2["tokyo"] <= 3.2
    assert 2.0 <= a2["cairo"] <= 5.0
    assert fits["tokyo"].r_squared >= 0.99
    assert fits["cairo"].r_squared >= 0.99
    assert np.isclose(a2["ideal"], 1.0)
