"""Smoke tests for the Python bindings."""
import os
from pathlib import Path

import pytest

import specfsm

ROOT = Path(os.environ.get("SPECFSM_SOURCE_DIR", Path(__file__).resolve().parents[2]))
FIXTURES = ROOT / "data" / "fixtures"


@pytest.fixture(scope="module")
def excerpt():
    return specfsm.extract_file(FIXTURES / "table5" / "corpus.txt",
                                FIXTURES / "table5" / "config.cfg")


def test_extract_transitions(excerpt):
    conditions = [t["condition"] for t in excerpt["transitions"]]
    assert "chan_ue_amf = deregistration_accept" in conditions
    assert ("timer_t3460_started & timer_t3460_expired & "
            "timer_t3460_expire_counter = 1") in conditions
    assert len(excerpt["transitions"]) == 4
    assert any(d["kind"] == "recovered-action" for d in excerpt["diagnostics"])
    assert set(excerpt["graphs"]) == {"AMF", "UE"}
    assert excerpt["graphs"]["UE"].startswith("digraph")


def test_extract_text_matches_file(excerpt):
    text = (FIXTURES / "table5" / "corpus.txt").read_text()
    assert specfsm.extract_text(text, FIXTURES / "table5" / "config.cfg") == excerpt


def test_check_replay_violation():
    import json
    model = json.loads((FIXTURES / "checker" / "nas_count_replay.json").read_text())
    props = (FIXTURES / "checker" / "nas_count_replay.props").read_text()
    honest = specfsm.check(model, props)
    assert honest[0]["verdict"] == "proven"
    attacked = specfsm.check(model, props, capabilities=["replay"])
    assert attacked[0]["verdict"] == "violated"
    assert "replay" in attacked[0]["trace"]


def test_score_self_is_perfect(excerpt):
    report = specfsm.score(excerpt["model"], excerpt["model"])
    assert report["condition_accuracy"] == pytest.approx(1.0)
    assert report["action_accuracy"] == pytest.approx(1.0)


def test_diff_self_is_empty(excerpt):
    report = specfsm.diff(excerpt["model"], excerpt["model"])
    assert all(entry["deviations"] == [] for entry in report)


def test_transpile(excerpt):
    text = specfsm.transpile(excerpt["model"])
    assert "MODULE main" in text
    assert "next(" in text


def test_errors_surface_as_exceptions():
    with pytest.raises(Exception):
        specfsm.extract_text("no tags here", FIXTURES / "table5" / "config.cfg")
