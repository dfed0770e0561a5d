import pytest

from config.settings import Settings


def test_settings_read_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("SPINTHERMO_OUT", str(tmp_path / "out"))
    monkeypatch.setenv("SPINTHERMO_THREADS", "3")
    monkeypatch.setenv("LOG_LEVEL", "warning")
    settings = Settings()
    assert settings.OUTPUT_DIR == tmp_path / "out"
    assert settings.THREADS == 3
    assert settings.LOG_LEVEL == "WARNING"


def test_debug_forces_debug_level(monkeypatch):
    monkeypatch.setenv("DEBUG", "true")
    assert Settings().LOG_LEVEL == "DEBUG"


@pytest.mark.parametrize("name, value", [("SPINTHERMO_THREADS", "0"), ("LOG_LEVEL", "LOUD")])
def test_invalid_settings(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ValueError):
        Settings()
