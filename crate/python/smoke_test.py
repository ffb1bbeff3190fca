"""Smoke test for the group_emotion extension module.

Build the module first, either with `maturin develop -m crates/py/Cargo.toml`
or with cargo (see README), then run `python python/smoke_test.py`.
"""

import math
import pathlib
import sys
import tempfile

import group_emotion as ge

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "crates" / "core" / "tests" / "fixtures"


def close(a, b, tol=1e-9):
    return a is not None and b is not None and abs(a - b) <= tol


def main():
    ds, summary = ge.Dataset.load(FIXTURES / "weibo_chatgpt.jsonl")
    assert (ds.platform, ds.topic) == ("Weibo", "ChatGPT"), ds
    assert ds.num_posts == 4 and ds.num_comments == 7, ds
    assert summary["malformed_lines"] == 0, summary
    assert ds.no_comment_share() == 0.5

    try:
        ge.compute_topic_emotion(ds)
    except ge.GroupEmotionError:
        pass
    else:
        raise AssertionError("unresolved sentiments should be rejected")

    lex = ge.Lexicon.from_json(FIXTURES / "lexicon.json")
    assert lex.score("good use") > 0 > lex.score("lazy")
    assert lex.score("nothing known") == 0.0

    ds, _ = ds.preprocess(["chatgpt"])
    ds = ds.resolve_sentiments(lex)
    cfg = ge.ChainConfig()
    topic = ge.compute_topic_emotion(ds, cfg)
    oracle = ge.oracle_recompute(ds, cfg)
    assert [p["post_id"] for p in topic["posts"]] == ["p1", "p2"]
    assert close(topic["value"], oracle["value"]), (topic["value"], oracle["value"])

    synth, truth = ge.generate({"num_posts": 5, "seed": 7})
    assert synth.num_posts == 5 == truth["posts"]
    again, _ = ge.generate({"num_posts": 5, "seed": 7})
    assert synth.to_jsonl() == again.to_jsonl()

    assert close(ge.skewness([0.0, 0.0, 1.0]), math.sqrt(3))
    assert close(ge.skewness([0.0, 0.0, 1.0], adjusted=False), 1 / math.sqrt(2))
    assert close(ge.pearson([1, 2, 3], [2, 4, 6]), 1.0)
    assert ge.tally_polarity([0.2, 0.0, -0.1])["positive_count"] == 1

    with tempfile.TemporaryDirectory() as out:
        manifest = ge.run_pipeline(
            [FIXTURES / "weibo_chatgpt.jsonl", FIXTURES / "douyin_chatgpt.jsonl"],
            FIXTURES / "config.toml",
            out,
            lex,
        )
        assert len(manifest["inputs"]) == 2
        report = ge.analyze_bundle(out)
        assert [p["platform"] for p in report["platforms"]] == ["Weibo", "Douyin"]

    print(f"group_emotion {ge.__version__}: smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
