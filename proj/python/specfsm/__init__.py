"""FSM extraction, checking, and scoring for protocol specifications.

Thin dict-based wrappers over the native module, which exchanges JSON text.
"""
import json

from . import _core

__all__ = ["extract_file", "extract_text", "check", "score", "diff", "transpile"]


def extract_file(corpus_path, config_path):
    """Extract a model from an annotated corpus file."""
    return json.loads(_core.extract_file(str(corpus_path), str(config_path)))


def extract_text(corpus_text, config_path):
    """Extract a model from annotated corpus text."""
    return json.loads(_core.extract_text(corpus_text, str(config_path)))


def check(model, properties_text, capabilities=(), injectable=(), replay_buffer=1,
          bound=40, memory_cap=500000):
    """Check LTL properties of a model dict under an adversary."""
    return json.loads(_core.check(json.dumps(model), properties_text,
                                  list(capabilities), list(injectable),
                                  replay_buffer, bound, memory_cap))


def score(gold, subject):
    """Score a model dict against a gold model dict (condition/action accuracy)."""
    return json.loads(_core.score(json.dumps(gold), json.dumps(subject)))


def diff(reference, subject):
    """Behavioral diff between two model dicts, per shared participant."""
    return json.loads(_core.diff(json.dumps(reference), json.dumps(subject)))


def transpile(model):
    """Render a model dict as SMV-like text."""
    return _core.transpile(json.dumps(model))
