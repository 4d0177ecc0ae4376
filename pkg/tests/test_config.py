import os

import numpy as np
import pytest
import yaml

from spectrafrac.exceptions import ConfigError
from spectrafrac.utils.config import Config
from spectrafrac.utils.helpers import available_cores, resolve_jobs, resolve_output_dir
from spectrafrac.utils.io import dumps_json, read_csv, write_csv


class TestConfig:
    def test_defaults(self, isolated_home):
        config = Config.load()
        assert config.seed == 0
        assert config.quantile == 0.95
        assert config.eps_min == pytest.approx(3.0 ** -12)
        assert config.history_file.parent == isolated_home

    def test_yaml_file(self, isolated_home):
        Config.get_config_file().write_text("seed: 7\nn_sample: 50\n")
        config = Config.load()
        assert config.seed == 7 and config.n_sample == 50

    def test_environment_beats_yaml_and_dotenv(self, isolated_home, monkeypatch):
        Config.get_config_file().write_text("seed: 7\n")
        (isolated_home.parent / "work" / ".env").write_text("SPECTRAFRAC_JOBS=3\n")
        monkeypatch.setenv("SPECTRAFRAC_SEED", "11")
        try:
            config = Config.load()
        finally:
            os.environ.pop("SPECTRAFRAC_JOBS", None)
        assert config.seed == 11
        assert config.jobs == 3

    def test_malformed_yaml_reports_line(self, isolated_home):
        Config.get_config_file().write_text("seed: 1\nquantile: [0.9\n")
        with pytest.raises(ConfigError) as info:
            Config.load()
        assert info.value.line is not None

    def test_invalid_value(self, isolated_home):
        Config.get_config_file().write_text("quantile: 0.3\n")
        with pytest.raises(ConfigError) as info:
            Config.load()
        assert "quantile" in str(info.value)

    def test_save_round_trip(self, isolated_home):
        Config(seed=5, use_colors=False).save()
        assert yaml.safe_load(Config.get_config_file().read_text())["seed"] == 5
        assert Config.load().use_colors is False


class TestIO:
    def test_csv_header_and_body(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", ["x", "y"], [[1.0, 0.1], [2.0, 1.0 / 3.0]], {"N": 3, "label": "free"})
        lines = path.read_text().splitlines()
        assert lines[:4] == ["# format=1", "# N=3", "# label=free", "# x,y"]
        meta, columns, rows = read_csv(path)
        assert meta == {"format": "1", "N": "3", "label": "free"}
        assert columns == ["x", "y"]
        assert rows[1, 1] == 1.0 / 3.0

    def test_plain_csv_with_column_row(self, tmp_path):
        path = tmp_path / "plain.csv"
        path.write_text("x,weight\n0.0,0.5\n1.0,0.5\n")
        _, columns, rows = read_csv(path)
        assert columns == ["x", "weight"]
        assert rows.shape == (2, 2)

    def test_json_is_canonical(self):
        text = dumps_json({"b": np.float64(1.5), "a": np.arange(2), "c": float("inf")})
        assert text.index('"a"') < text.index('"b"')
        assert '"c": "inf"' in text
        assert '"format": 1' in text


class TestHelpers:
    def test_jobs(self):
        assert resolve_jobs(4) == 4
        assert resolve_jobs(None) == available_cores() >= 1

    def test_output_dir(self, tmp_path):
        assert resolve_output_dir(None, str(tmp_path), "spectral") == tmp_path / "spectral"
        assert (tmp_path / "spectral").is_dir()
        explicit = resolve_output_dir(tmp_path / "mine", "ignored", "spectral")
        assert explicit == tmp_path / "mine" and explicit.is_dir()
