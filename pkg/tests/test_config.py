import pytest

from respicam.config import (
    DEFAULT_SETTINGS,
    apply_overrides,
    apply_values,
    load_config,
    parse_overrides,
    resolve_settings,
)
from respicam.errors import ConfigError
from respicam.roi import DEFAULT_GEOMETRY, SizeClass

CONFIG_TOML = """
[flow]
window = 15
levels = 2

[signal]
high_hz = 0.5

[roi.large]
h_mul = 1.4
"""


def test_defaults():
    s = DEFAULT_SETTINGS
    assert s.flow.window == 21 and s.flow.pyramid_levels == 3
    assert s.flow.margin_mul == 2.0
    assert s.signal.low_hz == 0.1 and s.signal.high_hz == 0.45 and s.signal.order == 4
    assert s.features.max_count == 100 and s.features.min_dist == 7.0
    assert dict(s.geometry) == DEFAULT_GEOMETRY


def test_load_config_file(tmp_path):
    path = tmp_path / "respicam.toml"
    path.write_text(CONFIG_TOML)
    s = load_config(path)
    assert s.flow.window == 15 and s.flow.pyramid_levels == 2
    assert s.flow.max_iters == DEFAULT_SETTINGS.flow.max_iters
    assert s.signal.high_hz == 0.5
    assert s.geometry[SizeClass.LARGE].h_mul == 1.4
    assert s.geometry[SizeClass.MEDIUM] == DEFAULT_GEOMETRY[SizeClass.MEDIUM]
    # the built-in table is not mutated
    assert DEFAULT_GEOMETRY[SizeClass.LARGE].h_mul == 1.2


def test_overrides_win_over_file(tmp_path):
    path = tmp_path / "respicam.toml"
    path.write_text(CONFIG_TOML)
    s = resolve_settings(path, ["flow.window=9", "features.max_count=40"])
    assert s.flow.window == 9
    assert s.flow.pyramid_levels == 2
    assert s.features.max_count == 40
    assert isinstance(s.features.max_count, int)


def test_no_sources_gives_defaults():
    assert resolve_settings(None) == DEFAULT_SETTINGS


def test_parse_overrides():
    assert parse_overrides([" flow.eps = 0.02 ", "signal.order=2"]) == {
        "flow.eps": "0.02",
        "signal.order": "2",
    }
    with pytest.raises(ConfigError):
        parse_overrides(["flow.eps"])
    with pytest.raises(ConfigError):
        parse_overrides(["=3"])


@pytest.mark.parametrize(
    "item",
    [
        "flow.speed=3",
        "tracking.window=3",
        "roi.huge.w_mul=1.0",
        "roi.medium.depth=1.0",
        "window=3",
    ],
)
def test_unknown_keys(item):
    with pytest.raises(ConfigError):
        apply_overrides(DEFAULT_SETTINGS, [item])


@pytest.mark.parametrize(
    "values",
    [
        {"flow.window": "20"},
        {"flow.window": "abc"},
        {"flow.window": 3.5},
        {"signal.low_hz": 0.6},
        {"signal.trim_fraction": 0.5},
        {"features.harris_k": 0.5},
        {"roi.small.w_mul": 0.0},
        {"flow.iters": True},
    ],
)
def test_invalid_values(values):
    with pytest.raises(ConfigError):
        apply_values(DEFAULT_SETTINGS, values)


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("[flow\nwindow = ")
    with pytest.raises(ConfigError):
        load_config(bad)
