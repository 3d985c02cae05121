import numpy as np
import pytest

from stpipe.errors import DegenerateLabels, Infeasible
from stpipe.segmenter import (BoundaryExample, BoundaryModel, best_cuts, extract_training_examples,
                              objective, segment, train_boundary_model)

from oracles import segmentation_bruteforce


def labels(paragraph, w=1):
    return [(ex.left[-1], ex.label) for ex in extract_training_examples([paragraph], w)]


def test_examples_basic():
    assert labels("Hi. Go now.") == [("hi", True), ("go", False)]
    assert labels("no marks at all") == [("no", False), ("marks", False), ("at", False)]
    assert labels("Really?! Yes.") == [("really", True)]
    assert labels("") == []


def test_examples_numbers_and_bare_marks():
    # the boundary lands after the last spoken token of "2." and on the token before a bare "."
    assert labels("I have 2. Ok . Then") == [("i", False), ("have", False), ("two", True),
                                             ("ok", True)]
    ex = extract_training_examples(["Stop. Now!"], 2)[0]
    assert ex.left == ("<s>", "stop") and ex.right == ("now", "</s>")


def planted_corpus(rng, n_paragraphs):
    words = ["alpha", "beta", "gamma", "delta", "omega", "kappa"]
    paras = []
    for _ in range(n_paragraphs):
        toks = []
        for _ in range(rng.integers(5, 15)):
            if rng.random() < 0.25:
                toks.append("stop.")
            else:
                toks.append(words[rng.integers(len(words))])
        paras.append(" ".join(toks))
    return paras


def test_planted_rule_learned():
    rng = np.random.default_rng(0)
    train = extract_training_examples(planted_corpus(rng, 200), 2)
    test = extract_training_examples(planted_corpus(rng, 50), 2)
    model = train_boundary_model(train, epochs=8, learning_rate=0.5, seed=1)
    correct = [(model.predict(ex.left, ex.right) > 0.5) == ex.label for ex in test]
    assert all(correct)
    hist = model.loss_history
    assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))


def test_training_deterministic_and_degenerate():
    rng = np.random.default_rng(3)
    ex = extract_training_examples(planted_corpus(rng, 30), 1)
    a = train_boundary_model(ex, 3, 0.3, seed=7)
    b = train_boundary_model(ex, 3, 0.3, seed=7)
    assert a.weights == b.weights and a.bias == b.bias
    single = [BoundaryExample(("a",), ("b",), False)] * 3
    with pytest.raises(DegenerateLabels):
        train_boundary_model(single)


def test_model_file_roundtrip():
    rng = np.random.default_rng(3)
    m = train_boundary_model(extract_training_examples(planted_corpus(rng, 30), 2), 2, 0.3, 0)
    back = BoundaryModel.from_lines(m.to_lines().splitlines())
    assert back.weights == m.weights and back.bias == m.bias and back.window == m.window


def test_predict_open_interval():
    m = BoundaryModel({"-1=x": 1e6}, 0.0, 1)
    p = m.predict(("x",), ("y",))
    assert 0.0 < p < 1.0
    m = BoundaryModel({"-1=x": -1e6}, 0.0, 1)
    assert 0.0 < m.predict(("x",), ("y",)) < 1.0


def _planted_logprobs(n, cuts):
    log_b = np.full(n, np.log(1e-12))
    log_nb = np.zeros(n)
    for c in cuts:
        log_b[c], log_nb[c] = 0.0, np.log(1e-12)
    return log_b, log_nb


def test_oracle_probabilities_recovered():
    log_b, log_nb = _planted_logprobs(10, [3, 7])
    assert best_cuts(log_b, log_nb, 1, 10) == [3, 7]


def test_single_segment_when_no_boundaries():
    m = BoundaryModel({}, -30.0, 1)
    toks = list("abcdefgh")
    assert segment(toks, m, 1, len(toks)) == [toks]


def test_length_limits_force_cuts():
    m = BoundaryModel({}, -30.0, 1)
    segs = segment(list("abcdefghij"), m, 1, 4)
    # equal gains everywhere: fewest segments (3), then leftmost cuts
    assert [len(s) for s in segs] == [2, 4, 4]


def test_last_segment_exemption():
    log_b, log_nb = np.zeros(7), np.zeros(7)
    # 7 tokens cannot split into segments of length 3..3; last one may be short
    assert best_cuts(log_b, log_nb, 3, 3) == [3, 6]


def test_ties_fewer_then_leftmost():
    half = np.log(0.5)
    log_b, log_nb = np.full(6, half), np.full(6, half)
    assert best_cuts(log_b, log_nb, 2, 4) == [2]


def test_infeasible_params():
    with pytest.raises(Infeasible):
        best_cuts(np.zeros(3), np.zeros(3), 3, 2)
    with pytest.raises(Infeasible):
        segment(["a"], BoundaryModel({}, 0.0, 1), 0, 2)


def test_dp_matches_bruteforce():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n = int(rng.integers(1, 13))
        p = rng.uniform(0.01, 0.99, n)
        log_b, log_nb = np.log(p), np.log1p(-p)
        lo = int(rng.integers(1, 4))
        hi = int(rng.integers(lo, 8))
        cuts = best_cuts(log_b, log_nb, lo, hi)
        best, expect = segmentation_bruteforce(log_b, log_nb, lo, hi)
        assert objective(log_b, log_nb, cuts) == pytest.approx(best, abs=1e-9)
        assert tuple(cuts) == expect


def test_concatenation_invariant():
    rng = np.random.default_rng(5)
    ex = extract_training_examples(planted_corpus(rng, 40), 2)
    m = train_boundary_model(ex, 3, 0.5, 0)
    for _ in range(20):
        toks = [["alpha", "stop", "beta", "gamma"][i] for i in rng.integers(0, 4, int(rng.integers(1, 40)))]
        segs = segment(toks, m, 2, 8)
        assert [t for s in segs for t in s] == toks
        assert all(len(s) <= 8 for s in segs)
        assert all(len(s) >= 2 for s in segs[:-1])
