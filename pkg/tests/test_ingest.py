"""CSV ingestion: layouts, Fourier smoothing, rescaling, and export."""

import numpy as np
import pytest

from fdchange.errors import ConfigurationError, ParseError
from fdchange.ingest import IngestionConfig, fourier_design, ingest, write_sample_csv
from fdchange.simulation import generate_bm_sample


def in_span_curve(t, coefs):
    """Evaluate a function lying exactly in the Fourier span."""
    return fourier_design(np.asarray(t, dtype=float), len(coefs)) @ np.asarray(coefs)


def write_rows(path, t, values):
    lines = [",".join(f"{x:.17g}" for x in t)]
    lines += [",".join(f"{x:.17g}" for x in row) for row in np.atleast_2d(values)]
    path.write_text("\n".join(lines) + "\n")


def write_long(path, t, values, poison_rows=()):
    lines = ["curve_id,t,value"]
    for i, row in enumerate(np.atleast_2d(values)):
        for tj, vj in zip(t, row):
            lines.append(f"c{i},{tj:.17g},{vj:.17g}")
    lines.extend(poison_rows)
    path.write_text("\n".join(lines) + "\n")


class TestFourierDesign:
    def test_structure(self):
        t = np.linspace(0.0, 1.0, 7)
        design = fourier_design(t, 5)
        assert design.shape == (7, 5)
        assert np.all(design[:, 0] == 1.0)
        assert np.allclose(design[:, 1], np.sqrt(2) * np.sin(2 * np.pi * t))
        assert np.allclose(design[:, 4], np.sqrt(2) * np.cos(4 * np.pi * t))

    def test_continuous_orthonormality(self):
        t = np.linspace(0.0, 1.0, 4001)
        w = np.full(4001, 1 / 4000.0)
        w[[0, -1]] /= 2
        design = fourier_design(t, 9)
        gram = (design * w[:, None]).T @ design
        assert np.allclose(gram, np.eye(9), atol=1e-6)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            fourier_design(np.linspace(0, 1, 5), 4)
        with pytest.raises(ConfigurationError):
            fourier_design(np.linspace(0, 1, 5), 1)


class TestSmoothingReconstruction:
    def test_in_span_curves_recovered(self, tmp_path):
        rng = np.random.default_rng(42)
        t = np.sort(rng.uniform(0.0, 1.0, 60))
        t[0], t[-1] = 0.0, 1.0
        coefs = rng.standard_normal((3, 7))
        values = np.array([in_span_curve(t, c) for c in coefs])
        path = tmp_path / "span.csv"
        write_rows(path, t, values)
        sample = ingest(str(path), IngestionConfig(basis_size=7, grid_size=120))
        truth = np.array([in_span_curve(sample.grid.points, c) for c in coefs])
        assert np.max(np.abs(sample.values - truth)) < 1e-8

    def test_constant_curve_exact(self, tmp_path):
        t = np.linspace(0.0, 1.0, 40)
        path = tmp_path / "const.csv"
        write_rows(path, t, np.full((2, 40), 3.25))
        sample = ingest(str(path), IngestionConfig(basis_size=5, grid_size=80))
        assert np.max(np.abs(sample.values - 3.25)) < 1e-10

    def test_white_noise_energy_matches_basis_fraction(self, tmp_path):
        # Fitting pure noise keeps about basis_size/T of the unit variance:
        # the integrated square of the fit estimates trace((D'D)^{-1}) ~ 49/365.
        rng = np.random.default_rng(7)
        days = np.arange(1, 366)
        noise = rng.standard_normal((200, 365))
        path = tmp_path / "noise.csv"
        write_rows(path, days, noise)
        sample = ingest(str(path), IngestionConfig(basis_size=49, grid_size=365))
        energy = float(np.mean(np.sum(sample.grid.weights * sample.values**2, axis=1)))
        assert energy == pytest.approx(49.0 / 365.0, rel=0.10)

    def test_rows_and_long_layouts_agree(self, tmp_path):
        rng = np.random.default_rng(3)
        t = np.linspace(0.0, 1.0, 30)
        values = rng.standard_normal((4, 30))
        rows_path, long_path = tmp_path / "r.csv", tmp_path / "l.csv"
        write_rows(rows_path, t, values)
        write_long(long_path, t, values)
        a = ingest(str(rows_path), IngestionConfig(basis_size=5, grid_size=50))
        b = ingest(str(long_path), IngestionConfig(layout="long", basis_size=5, grid_size=50))
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.grid.points, b.grid.points)


class TestRescaling:
    def test_day_of_year_mapping_and_leap_day_drop(self, tmp_path):
        # Observations indexed by day 1..365 live on (day-1)/364; a day-366
        # record carrying a poison value must be discarded before fitting.
        coefs = np.array([0.5, -1.0, 2.0, 0.25, -0.75])
        days = np.arange(1, 366)
        values = in_span_curve((days - 1) / 364.0, coefs)
        path = tmp_path / "days.csv"
        write_long(path, days, np.vstack([values, -2.0 * values]), poison_rows=["c0,366,1e6"])
        sample = ingest(str(path), IngestionConfig(layout="long", basis_size=5, grid_size=100))
        truth = in_span_curve(sample.grid.points, coefs)
        assert np.max(np.abs(sample.values[0] - truth)) < 1e-8
        assert np.max(np.abs(sample.values[1] + 2.0 * truth)) < 1e-8

    def test_generic_interval_rescaled_to_unit(self, tmp_path):
        coefs = np.array([1.0, 0.5, -0.5])
        raw_t = np.linspace(5.0, 25.0, 50)  # non-integer span, not day-like
        values = in_span_curve((raw_t - 5.0) / 20.0, coefs)
        path = tmp_path / "interval.csv"
        write_long(path, raw_t, np.vstack([values, values + 1.0]))
        sample = ingest(str(path), IngestionConfig(layout="long", basis_size=3, grid_size=60))
        truth = in_span_curve(sample.grid.points, coefs)
        assert np.max(np.abs(sample.values[0] - truth)) < 1e-8
        assert np.max(np.abs(sample.values[1] - truth - 1.0)) < 1e-8

    def test_unit_interval_left_alone(self, tmp_path):
        # Points already inside [0, 1] are used as-is (no stretch to the ends).
        t = np.linspace(0.2, 0.8, 40)
        coefs = np.array([0.0, 1.0, 1.0])
        path = tmp_path / "unit.csv"
        write_rows(path, t, np.tile(in_span_curve(t, coefs), (2, 1)))
        sample = ingest(str(path), IngestionConfig(basis_size=3, grid_size=50))
        truth = in_span_curve(sample.grid.points, coefs)
        assert np.max(np.abs(sample.values[0] - truth)) < 1e-8


class TestMissingValues:
    def test_drop_policy_fits_remaining_points(self, tmp_path):
        t = np.linspace(0.0, 1.0, 30)
        coefs = np.array([1.0, -0.5, 0.75, 0.2, -0.3])
        clean = [f"{v:.17g}" for v in in_span_curve(t, coefs)]
        row = list(clean)
        row[7] = "na"
        row[19] = "NaN"
        path = tmp_path / "holes.csv"
        path.write_text(
            ",".join(f"{x:.17g}" for x in t)
            + "\n" + ",".join(row) + "\n" + ",".join(clean) + "\n"
        )
        sample = ingest(str(path), IngestionConfig(basis_size=5, grid_size=50))
        truth = in_span_curve(sample.grid.points, coefs)
        assert np.max(np.abs(sample.values - truth)) < 1e-8

    def test_fail_policy_raises(self, tmp_path):
        t = np.linspace(0.0, 1.0, 30)
        clean = [f"{v:.17g}" for v in np.sin(t)]
        row = list(clean)
        row[3] = ""
        path = tmp_path / "holes.csv"
        path.write_text(
            ",".join(f"{x:.17g}" for x in t)
            + "\n" + ",".join(row) + "\n" + ",".join(clean) + "\n"
        )
        with pytest.raises(ParseError, match="missing"):
            ingest(str(path), IngestionConfig(basis_size=5, grid_size=50, missing="fail"))

    def test_too_few_points_after_dropping(self, tmp_path):
        t = np.linspace(0.0, 1.0, 6)
        row = ["1.0", "2.0", "na", "na", "na", "1.5"]
        full = ["1.0"] * 6
        path = tmp_path / "thin.csv"
        path.write_text(
            ",".join(f"{x:.17g}" for x in t)
            + "\n" + ",".join(row) + "\n" + ",".join(full) + "\n"
        )
        with pytest.raises(ParseError, match="only 3 usable"):
            ingest(str(path), IngestionConfig(basis_size=5, grid_size=50))


class TestRawIngestion:
    def test_round_trip_is_bitwise(self, tmp_path):
        sample = generate_bm_sample(8, 64, seed=11)
        path = tmp_path / "dump.csv"
        write_sample_csv(sample, str(path))
        back = ingest(str(path), IngestionConfig(basis_size=None))
        assert np.array_equal(back.values, sample.values)
        assert np.array_equal(back.grid.points, sample.grid.points)
        write_sample_csv(back, str(tmp_path / "dump2.csv"))
        assert (tmp_path / "dump2.csv").read_bytes() == path.read_bytes()

    def test_non_uniform_header_preserved(self, tmp_path):
        t = np.array([0.0, 0.1, 0.15, 0.4, 1.0])
        values = np.arange(10.0).reshape(2, 5)
        path = tmp_path / "raw.csv"
        write_rows(path, t, values)
        back = ingest(str(path), IngestionConfig(basis_size=None))
        assert np.array_equal(back.grid.points, t)
        assert np.array_equal(back.values, values)

    def test_raw_long_layout_needs_common_grid(self, tmp_path):
        path = tmp_path / "long.csv"
        path.write_text(
            "curve_id,t,value\nA,0.0,1.0\nA,0.5,2.0\nA,1.0,3.0\n"
            "B,0.0,1.0\nB,0.6,2.0\nB,1.0,3.0\n"
        )
        with pytest.raises(ParseError, match="identical t"):
            ingest(str(path), IngestionConfig(layout="long", basis_size=None))

    def test_raw_rejects_missing_and_unordered(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.0,0.5,1.0\n1.0,na,2.0\n")
        with pytest.raises(ParseError, match="missing"):
            ingest(str(path), IngestionConfig(basis_size=None))
        path.write_text("0.0,1.0,0.5\n1.0,2.0,3.0\n")
        with pytest.raises(ParseError, match="strictly increasing"):
            ingest(str(path), IngestionConfig(basis_size=None))


class TestParseErrors:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ParseError, match="empty"):
            ingest(str(path))

    def test_ragged_row_reports_line(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("0.0,0.5,1.0\n1.0,2.0,3.0\n4.0,5.0\n")
        with pytest.raises(ParseError, match="line 3"):
            ingest(str(path), IngestionConfig(basis_size=None))

    def test_bad_number_reports_line(self, tmp_path):
        path = tmp_path / "alpha.csv"
        path.write_text("0.0,0.5,1.0\n1.0,two,3.0\n")
        with pytest.raises(ParseError, match="line 2"):
            ingest(str(path), IngestionConfig(basis_size=None))

    def test_long_layout_column_count(self, tmp_path):
        path = tmp_path / "wide.csv"
        path.write_text("curve_id,t,value,extra\nA,0.0,1.0,9\n")
        with pytest.raises(ParseError, match="3 columns"):
            ingest(str(path), IngestionConfig(layout="long"))
        path.write_text("curve_id,t,value\nA,0.0\n")
        with pytest.raises(ParseError, match="line 2"):
            ingest(str(path), IngestionConfig(layout="long"))

    def test_long_layout_missing_t_and_blank_id(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("curve_id,t,value\nA,,1.0\n")
        with pytest.raises(ParseError, match="line 2"):
            ingest(str(path), IngestionConfig(layout="long"))
        path.write_text("curve_id,t,value\n,0.5,1.0\n")
        with pytest.raises(ParseError, match="empty curve id"):
            ingest(str(path), IngestionConfig(layout="long"))

    def test_no_curves(self, tmp_path):
        path = tmp_path / "header_only.csv"
        path.write_text("0.0,0.5,1.0\n")
        with pytest.raises(ParseError, match="no curves"):
            ingest(str(path), IngestionConfig(basis_size=None))


class TestConfigValidation:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"layout": "cols"},
            {"basis_size": 4},
            {"basis_size": 1},
            {"basis_size": 49, "grid_size": 20},
            {"missing": "impute"},
        ],
    )
    def test_rejects_bad_config(self, kwargs):
        with pytest.raises(ConfigurationError):
            IngestionConfig(**kwargs)
