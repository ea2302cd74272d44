import pytest

from wittdisp.config import CACHE_ENV, GroupConfig, JobConfig, WittConfig
from wittdisp.exceptions import ConfigError


def test_defaults_validate():
    cfg = JobConfig().validate()
    assert cfg.witt.p == 2
    assert cfg.group.weight_vector() == [0, 1]
    assert cfg.search.orbit_cap == 200_000


def test_weight_vector_from_d_and_override():
    assert GroupConfig(h=3, d=1).weight_vector() == [0, 1, 1]
    assert GroupConfig(h=3, d=1, weights=[1, 0, 1]).weight_vector() == [1, 0, 1]


def test_rejects_composite_p():
    with pytest.raises(ConfigError):
        JobConfig(witt=WittConfig(p=4)).validate()


def test_rejects_bad_group():
    with pytest.raises(ConfigError):
        JobConfig(group=GroupConfig(h=2, d=2)).validate()
    with pytest.raises(ConfigError):
        JobConfig(group=GroupConfig(h=2, weights=[0, 2])).validate()


def test_rejects_negative_window():
    cfg = JobConfig()
    cfg.search.window = -1
    with pytest.raises(ConfigError):
        cfg.validate()


def test_cache_dir_from_env(monkeypatch, tmp_path):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    assert JobConfig().resolved_cache_dir() == str(tmp_path)
    assert JobConfig(cache_dir="elsewhere").resolved_cache_dir() == "elsewhere"
