from termalg.config import algebras_dir, load_settings, theories_dir
from termalg.events import append_event, jsonl_event_writer, read_events
from termalg.theory.types import Budget


def test_settings_defaults():
    settings = load_settings()
    assert settings.n_jobs == 1
    assert settings.default_budget == Budget(12, 5000, 3)
    assert settings.log_level == "WARNING"
    assert settings.sigma_r_side_conditions == "base"


def test_settings_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("TERMALG_N_JOBS", "4")
    monkeypatch.setenv("TERMALG_MODEL_SIZE", "2")
    monkeypatch.setenv("TERMALG_PROBE_SAMPLES", "25")
    monkeypatch.setenv("TERMALG_LOG_LEVEL", "debug")
    monkeypatch.setenv("TERMALG_SIGMA_R_CLOSURE", "Closure")
    monkeypatch.setenv("TERMALG_DATA_DIR", str(tmp_path))
    settings = load_settings()
    assert settings.n_jobs == 4
    assert settings.default_budget.max_model_size == 2
    assert settings.probe_samples == 25
    assert settings.log_level == "DEBUG"
    assert settings.sigma_r_side_conditions == "closure"
    assert theories_dir() == tmp_path / "theories"
    assert algebras_dir() == tmp_path / "algebras"


def test_events_append_and_tail(tmp_path):
    path = tmp_path / "logs" / "events.jsonl"
    assert read_events(path) == []
    append_event(path, "CLOSURE_STARTED", "12 terms")
    writer = jsonl_event_writer(path)
    for index in range(3):
        writer("CLOSURE_ROUND", f"round {index + 1}")
    events = read_events(path, tail=2)
    assert [event["message"] for event in events] == ["round 2", "round 3"]
    assert read_events(path)[0]["stage"] == "CLOSURE_STARTED"
