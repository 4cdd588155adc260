import math
from fractions import Fraction
import random

import pytest

import altc

SCHEMA = ["neg", "pos", "mix", "none"]


def keyword_corpus(n, seed=0):
    rng = random.Random(seed)
    # Letters only, so preprocessing leaves every word intact.
    words = [[f"key{c}{x}" for x in "abcdefgh"] for c in "pqrs"]
    shared = [f"shared{a}{b}" for a in "abcdef" for b in "xyz"]
    texts, labels = [], []
    for i in range(n):
        c = i % 4
        toks = rng.sample(words[c], 3) + rng.sample(shared, 5)
        rng.shuffle(toks)
        texts.append(" ".join(toks))
        labels.append(c)
    return texts, labels


def test_normalize_and_preprocess():
    assert altc.normalize("Check @user https://t.co/x THIS 123!") == "check this"
    assert altc.normalize("Hi @Bob", strip_mentions=False, lowercase=False) == "Hi Bob"
    assert altc.preprocess("امید ہے") == ["امید", "ہے"]


def test_uncertainty_and_weights():
    assert altc.uncertainty([0.25] * 4) == pytest.approx(math.log(4), abs=1e-12)
    assert altc.uncertainty([0.7, 0.1, 0.1, 0.1]) == pytest.approx(0.940448, abs=1e-6)
    w = altc.class_weights([2245, 1284, 540, 472])
    counts = [2245, 1284, 540, 472]
    exact = [Fraction(sum(counts), 4 * n) for n in counts]
    assert w == pytest.approx([float(x) for x in exact], abs=1e-15)
    assert [round(x, 4) for x in w] == [0.5057, 0.8842, 2.1023, 2.4052]
    assert altc.weighted_bce_loss([0.5, 0.5], [1.0, 0.0], [1.0, 1.0]) == pytest.approx(
        2 * math.log(2))


def test_errors_map_to_altc_error():
    with pytest.raises(altc.AltcError, match="ZeroClassCount"):
        altc.class_weights([3, 0])
    assert issubclass(altc.AltcError, ValueError)


def test_evaluate_matches_hand_arithmetic():
    gold = [0] * 60 + [1] * 40
    pred = [0] * 50 + [1] * 10 + [0] * 5 + [1] * 35
    r = altc.evaluate(gold, pred, 2)
    assert r["accuracy"] == pytest.approx(0.85)
    assert r["macro"]["f1"] == pytest.approx(0.8465, abs=5e-5)
    assert r["micro"]["f1"] == r["accuracy"]


def test_train_save_load_roundtrip(tmp_path):
    texts, labels = keyword_corpus(200)
    clf = altc.TextClassifier.train(texts, labels, schema=SCHEMA, lr=1.0, epochs=30,
                                    batch_size=16)
    assert clf.schema == SCHEMA
    assert clf.num_features > 0
    assert clf.evaluate(texts, labels)["accuracy"] >= 0.99
    clf.save(str(tmp_path))
    again = altc.TextClassifier.load(str(tmp_path / "model.json"))
    for t in texts[:10]:
        assert again.predict_proba(t) == clf.predict_proba(t)
        assert again.predict(t) == clf.predict(t)


def test_simulate_history():
    texts, labels = keyword_corpus(240, seed=1)
    h = altc.simulate(texts, labels, schema=SCHEMA, seed_size=8, batch_size=5, iterations=2,
                      epochs=10)
    assert [r["t"] for r in h] == [0, 1, 2]
    assert [r["labeled"] for r in h] == [8, 13, 18]
    assert all(0.0 <= r["macro_f1"] <= 1.0 for r in h)
    assert h == altc.simulate(texts, labels, schema=SCHEMA, seed_size=8, batch_size=5,
                              iterations=2, epochs=10)
