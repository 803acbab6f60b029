# Copyright 2026 The aadocre Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Anaphor-assisted document-level relation extraction."""

import json

from ._core import __version__  # noqa: F401
from ._core import (
    ConfigError,
    Corpus,
    Error,
    Model,
    NumericError,
    ParseError,
    ShapeError,
    TrainConfig,
    ValidationError,
    extract_anaphors,
    generate,
    gradcheck,
    load_corpus,
    load_model,
    parse_corpus,
    parse_predictions,
    predictions_jsonl,
)
from ._core import evaluate as _evaluate
from ._core import graph_json as _graph_json
from ._core import train as _train

__all__ = [
    "ConfigError",
    "Corpus",
    "Error",
    "Model",
    "NumericError",
    "ParseError",
    "ShapeError",
    "TrainConfig",
    "ValidationError",
    "build_graph",
    "config",
    "evaluate",
    "extract_anaphors",
    "generate",
    "gradcheck",
    "load_corpus",
    "load_model",
    "parse_corpus",
    "parse_predictions",
    "predictions_jsonl",
    "train",
]


def config(**overrides):
    """TrainConfig with keyword overrides, e.g. config(epochs=3, use_graph=False)."""
    cfg = TrainConfig()
    for key, value in overrides.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        cfg.set(key, str(value))
    cfg.validate()
    return cfg


def build_graph(doc, variant="full", seed=1, exclude_overlap=True):
    """Graph dump as a dict with node and edge tables."""
    return json.loads(_graph_json(doc, variant, seed, exclude_overlap))


def train(corpus, cfg=None, dev=None, on_epoch=None):
    callback = None if on_epoch is None else (lambda line: on_epoch(json.loads(line)))
    return _train(corpus, cfg if cfg is not None else TrainConfig(), dev, callback)


def evaluate(predictions, gold, train=None):
    """Metrics dict (F1, Ign_F1, Intra_F1, Inter_F1, P, R, ...)."""
    return json.loads(_evaluate(predictions, gold, train))
