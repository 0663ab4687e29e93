"""Tests for dataset loading, normalization and deterministic serialization."""

import json

import numpy as np
import pytest

from sqnn.dataio import (
    REQUIRED,
    SectionSchema,
    Split,
    config_echo,
    format_float,
    henon_series,
    load_series,
    normalize_minmax01,
    read_config,
    write_csv,
    write_manifest,
)
from sqnn.errors import ConfigError


class TestLoadSeries:
    def test_plain_file(self, tmp_path):
        p = tmp_path / "data.txt"
        p.write_text("1\n2\n3\n")
        series = load_series(p)
        np.testing.assert_array_equal(series.values, [1.0, 2.0, 3.0])
        assert len(series.sha256) == 64

    def test_csv_column(self, tmp_path):
        p = tmp_path / "data.csv"
        p.write_text("k,value\n0,1.5\n1,2.5\n")
        series = load_series(p, fmt="csv", column=1)
        np.testing.assert_array_equal(series.values, [1.5, 2.5])

    def test_malformed_line_names_line(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("\n".join(["1.0"] * 16 + ["oops"] + ["2.0"]))
        with pytest.raises(ConfigError, match=":17"):
            load_series(p)

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.txt"
        p.write_text("")
        with pytest.raises(ConfigError, match="empty"):
            load_series(p)

    def test_long_series(self):
        assert len(henon_series(4100, seed=1)) == 4100


class TestNormalize:
    def test_full_fit(self):
        from sqnn.dataio import TimeSeries
        s = TimeSeries(values=np.array([0.0, 5.0, 10.0]), source="x", sha256="0" * 64)
        out = normalize_minmax01(s, slice(None))
        np.testing.assert_allclose(out.values, [0.0, 0.5, 1.0])

    def test_out_of_range_clipped(self, caplog):
        from sqnn.dataio import TimeSeries
        s = TimeSeries(values=np.array([0.0, 1.0, 2.0, 5.0]), source="x", sha256="0" * 64)
        with caplog.at_level("WARNING"):
            out = normalize_minmax01(s, slice(0, 3))
        assert out.values.max() == 1.0
        assert "clipped" in caplog.text

    def test_roundtrip_denormalization(self):
        s = henon_series(300, seed=2)
        out = normalize_minmax01(s, slice(0, 200))
        # unclipped portion round-trips exactly
        back = out.denormalize(out.values[:200])
        np.testing.assert_allclose(back, s.values[:200], atol=1e-12)

    def test_fit_excludes_test_block(self):
        # mutating values outside the fit range leaves the fit unchanged
        s1 = henon_series(300, seed=3)
        s2_vals = s1.values.copy()
        s2_vals[250:] = 0.123
        from sqnn.dataio import TimeSeries
        s2 = TimeSeries(values=s2_vals, source="x", sha256="0" * 64)
        a = normalize_minmax01(s1, slice(0, 200))
        b = normalize_minmax01(s2, slice(0, 200))
        assert (a.raw_min, a.raw_max) == (b.raw_min, b.raw_max)

    def test_constant_fit_range_rejected(self):
        from sqnn.dataio import TimeSeries
        s = TimeSeries(values=np.ones(10), source="x", sha256="0" * 64)
        with pytest.raises(ConfigError):
            normalize_minmax01(s, slice(None))


class TestSplit:
    def test_negative_rejected(self):
        with pytest.raises(ConfigError):
            Split(washout=-1, train=10, test=5)

    def test_total(self):
        assert Split(300, 3000, 700).total == 4000


class TestWriters:
    def test_empty_records_header_only(self, tmp_path):
        p = tmp_path / "out.csv"
        write_csv(p, ["a", "b"], [])
        assert p.read_text() == "a,b\n"

    def test_byte_identical_reruns(self, tmp_path):
        rows = [[1, 2.5, "x"], [3, 0.1 + 0.2, "y"]]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(p1, ["i", "v", "tag"], rows)
        write_csv(p2, ["i", "v", "tag"], rows)
        assert p1.read_bytes() == p2.read_bytes()

    def test_float_formatting_roundtrip(self):
        for x in (0.1, 1 / 3, 1e-17, 123456.789):
            assert float(format_float(x)) == x

    def test_manifest_roundtrip(self, tmp_path):
        p = tmp_path / "manifest.json"
        cfg = tmp_path / "c.ini"
        cfg.write_text("[reservoir]\nmodes = 12\nnetwork_seed = 42\n")
        parser = read_config(cfg)
        write_manifest(p, config_echo=config_echo(parser), seeds={"network": 42},
                       dataset_sha256="ab" * 32)
        payload = json.loads(p.read_text())
        assert payload["config"]["reservoir"]["modes"] == "12"
        assert payload["dataset_sha256"] == "ab" * 32
        # identical rerun is byte-identical
        p2 = tmp_path / "manifest2.json"
        write_manifest(p2, config_echo=config_echo(parser), seeds={"network": 42},
                       dataset_sha256="ab" * 32)
        assert p.read_bytes() == p2.read_bytes()


class TestSectionSchema:
    def test_defaults_and_required(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[reservoir]\nmodes = 8\n")
        schema = SectionSchema("reservoir", {
            "modes": ("int", REQUIRED),
            "input_squeezing": ("float", 0.75),
        })
        parsed = schema.parse(read_config(cfg))
        assert parsed == {"modes": 8, "input_squeezing": 0.75}

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[reservoir]\nmoeds = 8\n")
        schema = SectionSchema("reservoir", {"modes": ("int", 4)})
        with pytest.raises(ConfigError, match="moeds"):
            schema.parse(read_config(cfg))

    def test_missing_required(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[other]\nx = 1\n")
        schema = SectionSchema("reservoir", {"modes": ("int", REQUIRED)})
        with pytest.raises(ConfigError, match="modes"):
            schema.parse(read_config(cfg))

    def test_lists_and_auto(self, tmp_path):
        cfg = tmp_path / "c.ini"
        cfg.write_text("[sweep]\nlevels = 0.0, 0.5, 1.5\ncutoff = auto\n")
        schema = SectionSchema("sweep", {
            "levels": ("float_list", []),
            "cutoff": ("int_or_auto", 32),
        })
        parsed = schema.parse(read_config(cfg))
        assert parsed["levels"] == [0.0, 0.5, 1.5]
        assert parsed["cutoff"] is None
