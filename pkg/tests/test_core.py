import json
import time

import pytest

from spectrafrac.core import (
    ConfigValidator,
    RunHistory,
    TaskExecutor,
    TaskFailedError,
    task_seed,
    write_manifest,
)
from spectrafrac.core.experiments import parse_experiment
from spectrafrac.exceptions import ConfigError, DomainError
from spectrafrac.operators.potentials import parse_potential
from spectrafrac.utils.config import Config


class TestTaskExecutor:
    def test_keeps_submission_order(self):
        def slow_square(x):
            time.sleep(0.01 * (5 - x))
            return x * x

        assert TaskExecutor(4).map_values(slow_square, list(range(5))) == [0, 1, 4, 9, 16]

    def test_failure_is_captured(self):
        def fail_on_two(x):
            if x == 2:
                raise DomainError("bad point")
            return x

        results = TaskExecutor(2).map(fail_on_two, [0, 1, 2, 3])
        assert [r.success for r in results] == [True, True, False, True]
        assert "bad point" in results[2].error
        with pytest.raises(TaskFailedError) as info:
            TaskExecutor(1).map_values(fail_on_two, [0, 1, 2, 3])
        assert info.value.index == 2

    def test_programming_errors_propagate(self):
        def broken(x):
            raise KeyError(x)

        with pytest.raises(KeyError):
            TaskExecutor(1).map(broken, [0])

    def test_jobs_floor(self):
        assert TaskExecutor(None).jobs == 1
        assert TaskExecutor(0).jobs == 1
        assert TaskExecutor(3).jobs == 3


def test_task_seed_depends_on_seed_and_index():
    assert task_seed(0, 1) == task_seed(0, 1)
    assert len({task_seed(0, i) for i in range(20)}) == 20
    assert task_seed(0, 1) != task_seed(1, 1)
    assert 0 <= task_seed(5, 3) < 2 ** 64


class TestConfigValidator:
    def write(self, tmp_path, text):
        path = tmp_path / "config.json"
        path.write_text(text)
        return path

    def test_loads_valid_spec(self, tmp_path):
        path = self.write(tmp_path, '{"variant": "random", "seed": 1, "bound": 2.0}')
        spec = ConfigValidator().load(path, parse_potential)
        assert spec.bound == 2.0

    def test_malformed_json_reports_line(self, tmp_path):
        path = self.write(tmp_path, '{\n  "variant": "random",\n  "seed": 1\n  "bound": 2.0\n}')
        with pytest.raises(ConfigError) as info:
            ConfigValidator().load(path, parse_potential)
        assert info.value.line == 4

    def test_bad_field_reports_its_line(self, tmp_path):
        path = self.write(tmp_path, '{\n  "variant": "random",\n  "seed": 1,\n  "bound": -2.0\n}')
        with pytest.raises(ConfigError) as info:
            ConfigValidator().load(path, parse_potential)
        assert info.value.line == 4
        assert "bound" in str(info.value)

    def test_nested_experiment_field(self, tmp_path):
        path = self.write(tmp_path, '{\n  "kind": "wonderland",\n  "N": 2001,\n  "estimator": {\n    "eps_min": -1\n  }\n}')
        result = ConfigValidator().validate(path, parse_experiment)
        assert not result.is_valid
        assert result.line == 5

    def test_missing_file_and_non_object(self, tmp_path):
        with pytest.raises(ConfigError):
            ConfigValidator().read(tmp_path / "absent.json")
        with pytest.raises(ConfigError):
            ConfigValidator().read(self.write(tmp_path, "[1, 2]"))

    def test_valid_result(self, tmp_path):
        path = self.write(tmp_path, '{"kind": "alpha_sweep", "alphas": [0.5]}')
        assert ConfigValidator().validate(path, parse_experiment).is_valid


class TestRunHistory:
    def test_add_and_stats(self, isolated_home):
        history = RunHistory(Config())
        history.add_entry("measure-dim", "cantor.csv", True, 1.0, "out", 0)
        history.add_entry("spectral", "spec.json", False, 3.0)
        entries = history.get_recent_entries()
        assert [e.command for e in entries] == ["measure-dim", "spectral"]
        stats = history.get_stats()
        assert stats["total_runs"] == 2
        assert stats["success_rate"] == 0.5
        assert stats["average_execution_time"] == 2.0

    def test_capped_and_cleared(self, isolated_home):
        history = RunHistory(Config(max_history=3))
        for i in range(5):
            history.add_entry("profile", str(i), True)
        assert [e.arguments for e in history.get_recent_entries()] == ["2", "3", "4"]
        history.clear_history()
        assert history.get_stats() == {"total_runs": 0}

    def test_disabled(self, isolated_home):
        history = RunHistory(Config(history_enabled=False))
        history.add_entry("profile", "", True)
        assert history.get_recent_entries() == []

    def test_corrupt_file_reads_as_empty(self, isolated_home):
        config = Config()
        config.history_file.write_text("not json")
        assert RunHistory(config).get_recent_entries() == []


def test_manifest_contents(tmp_path):
    path = write_manifest(tmp_path, "spectral", {"N": 11}, {"total": 0.5}, ["spectral.csv"], labels=["finite"])
    data = json.loads(path.read_text())
    assert path.name == "manifest.json"
    assert data["format"] == 1
    assert data["parameters"] == {"N": 11}
    assert data["outputs"] == ["spectral.csv"]
    assert data["success"] is True
    assert "numpy" in data["platform"]
