from oslo_config import cfg
import pytest

import platslide


def setup_function():
    platslide.reset()


def test_get():
    platslide.set("scan_workers", 3)
    assert platslide.get("scan_workers") == 3


def test_get_dashed_key():
    platslide.set("output-format", "json")
    assert platslide.get("output_format") == "json"


def test_get_invalid_key():
    with pytest.raises(cfg.NoSuchOptError):
        platslide.get("some_invalid_key")


def test_set():
    values = [2, 5]
    [platslide.set("max_traversal_factor", v) for v in values]
    assert platslide.get("max_traversal_factor") == values[-1]


def test_set_invalid_key():
    with pytest.raises(cfg.NoSuchOptError):
        platslide.set("some_invalid_key", "foo")


def test_reset():
    platslide.set("scan_workers", 8)
    platslide.reset()
    assert platslide.get("scan_workers") == 1


def test_params():
    assert set(platslide.params()) >= {
        "scan_workers",
        "output_format",
        "log_level",
        "max_traversal_factor",
    }


def test_default_from_env(monkeypatch):
    monkeypatch.setenv("PLATSLIDE_SCAN_WORKERS", "4")
    monkeypatch.setenv("PLATSLIDE_OUTPUT_FORMAT", "json")
    platslide.reset()
    assert platslide.get("scan_workers") == 4
    assert platslide.get("output_format") == "json"
    monkeypatch.delenv("PLATSLIDE_SCAN_WORKERS")
    monkeypatch.delenv("PLATSLIDE_OUTPUT_FORMAT")
    platslide.reset()
    assert platslide.get("scan_workers") == 1
