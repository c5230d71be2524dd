"""Smoke test for the emotrans extension module.

Build and install first, e.g. `pip install --no-build-isolation ./crates/python`
or `maturin develop -m crates/python/Cargo.toml`, then run this file.
"""

import os
import tempfile

import emotrans


def main():
    assert emotrans.segment("family 👨‍👩‍👧 at home 🏠") == ["👨‍👩‍👧", "🏠"]
    assert emotrans.decompose("🧑‍🍳") == ["🧑", "🍳"]
    assert emotrans.string_match("A snake lies hidden in the grass") == ["🐍"]

    with tempfile.TemporaryDirectory() as d:
        corpus = os.path.join(d, "corpus.jsonl")
        emotrans.write_oracle_corpus(corpus, 300, 0)
        stats = emotrans.corpus_stats(corpus)
        print("corpus", stats["instance_count"], "instances,", stats["emoji_vocab_size"], "emojis")

        t2e = emotrans.TranslationModel.train(corpus, "t2e", 10)
        e2t = emotrans.TranslationModel.train(corpus, "e2t", 10)
        out, tokens, _ = t2e.translate("the snake in the grass")
        print("t2e", out, tokens)
        assert tokens == ["🐍", "🌾"]
        back, _, _ = e2t.translate(out)
        print("e2t", back)
        assert back == "snake grass"

        path = os.path.join(d, "t2e.bin")
        t2e.save(path)
        assert emotrans.TranslationModel.load(path).model_id == t2e.model_id

    b = emotrans.bleu([["🐱", "🐶"]], [["🐱", "🐶", "🐟"]], 1)
    assert abs(b[0] - 0.6065) < 1e-4
    assert emotrans.macro_f1(["a", "b"], ["a", "a"], ["a", "b"]) == 1 / 3
    print("ok")


if __name__ == "__main__":
    main()
