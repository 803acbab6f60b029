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

import json

import pytest

import aadocre


def test_walmart_anaphors_and_graph():
    corpus = aadocre.generate("walmart")
    doc = corpus.docs[0]
    assert doc.has_parse
    assert [a.surface for a in aadocre.extract_anaphors(doc)] == ["He", "the market"]
    graph = aadocre.build_graph(doc)
    assert len(graph["nodes"]) == 4
    assert sum(1 for e in graph["edges"] if e[2] == "mention-anaphor") == 4
    assert len(aadocre.build_graph(doc, "no-anaphor")["nodes"]) == 2


def test_corpus_round_trip_and_stats():
    corpus = aadocre.generate("relation", docs=4, relations=3, seed=7)
    again = aadocre.parse_corpus(corpus.to_json(), corpus.parses_jsonl())
    assert len(again) == 4
    assert again.relations == corpus.relations
    assert [d.doc_id for d in again.docs] == [d.doc_id for d in corpus.docs]
    stats = again.stats()
    assert stats["docs"] == 4
    assert stats["anaphors"] > 0


def test_config_overrides_and_errors():
    cfg = aadocre.config(epochs=3, use_graph=False, beta=0.5)
    data = json.loads(cfg.to_json())
    assert data["epochs"] == 3 and data["use_graph"] is False and data["beta"] == 0.5
    assert set(aadocre.TrainConfig.keys()) == set(data)
    with pytest.raises(aadocre.ConfigError):
        aadocre.config(no_such_key=1)
    with pytest.raises(aadocre.Error):
        aadocre.parse_corpus("{ broken")


def test_train_predict_evaluate(tmp_path):
    corpus = aadocre.generate("relation", docs=4, relations=2, seed=3)
    cfg = aadocre.config(epochs=2, hidden=8, layers=1, ff=8, k_att=1, gcn_layers=1, iterations=1)
    logs = []
    model = aadocre.train(corpus, cfg, on_epoch=logs.append)
    assert [log["epoch"] for log in logs] == [1, 2]
    preds = model.predict(corpus)
    metrics = aadocre.evaluate(preds, corpus)
    assert 0.0 <= metrics["F1"] <= 1.0
    path = str(tmp_path / "model.ckpt")
    model.save(path)
    reloaded = aadocre.load_model(path)
    again = reloaded.predict(corpus, threads=2)
    assert aadocre.predictions_jsonl(again, corpus) == aadocre.predictions_jsonl(preds, corpus)


def test_gold_predictions_score_perfectly():
    corpus = aadocre.generate("relation", docs=3, seed=2)
    lines = []
    for doc in corpus.docs:
        for f in doc.facts:
            lines.append(json.dumps({"title": doc.doc_id, "h_idx": f.head, "t_idx": f.tail,
                                     "r": corpus.relations[f.relation]}))
    preds = aadocre.parse_predictions("\n".join(lines) + "\n", corpus)
    assert len(preds) == len(lines)
    metrics = aadocre.evaluate(preds, corpus)
    assert metrics["F1"] == 1.0


def test_gradcheck_smoke():
    report = aadocre.gradcheck(seeds=1)
    assert report["passed"] and report["failures"] == 0
