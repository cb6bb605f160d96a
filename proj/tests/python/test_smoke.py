import os

import pytest

try:
    import provlab as pl
except ImportError:
    import _provlab as pl

FIXTURES = os.environ.get("PROVLAB_FIXTURE_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "fixtures"))


def read(name):
    with open(os.path.join(FIXTURES, name)) as f:
        return f.read()


def test_parse_and_analyze_running_example():
    g = pl.Grammar.parse(read("fig2.json"))
    assert g.validate() == []
    assert g.recursion_class == "strictly_linear"
    assert g.safe
    assert g.start == "S"


def test_generated_roundtrip_and_query():
    text = pl.generate_grammar(workflow_size=8, module_degree=2, nesting_depth=2, recursion_length=2, seed=3)
    g = pl.Grammar.parse(text)
    assert g.validate() == []
    assert g.serialize() == pl.Grammar.parse(g.serialize()).serialize()

    log = pl.generate_run(g, target_items=300, seed=5)
    run = pl.Run.replay(g, log)
    assert 270 <= run.item_count <= 330

    vl = pl.ViewLabel.build(g, variant="query")
    labels = run.labels()
    ids = sorted(labels)
    hits = 0
    for a in ids[:20]:
        for b in ids[:20]:
            verdict = vl.query(labels[a], labels[b])
            if verdict["reachable"]:
                hits += 1
    assert hits >= 20  # at least the reflexive pairs


def test_view_label_roundtrip_matches():
    g = pl.Grammar.parse(read("fig2.json"))
    vl = pl.ViewLabel.build(g, read("fig2_view_u2.json"), variant="default")
    back = pl.ViewLabel.parse(vl.serialize())
    assert back.serialize() == vl.serialize()
    assert back.variant == "default"


def test_hidden_item_raises():
    g = pl.Grammar.parse(read("fig2.json"))
    log = "\n".join(
        '{"target": "%s", "production": %d}' % step
        for step in [("S:1", 1), ("A:1", 2), ("B:1", 4), ("A:2", 2),
                     ("B:2", 4), ("A:3", 3), ("C:4", 5)]
    )
    run = pl.Run.replay(g, log)
    vl = pl.ViewLabel.build(g, read("fig2_view_u2.json"))
    labels = run.labels()
    with pytest.raises(pl.NotVisibleError):
        # Items created by expanding C (production 5) are hidden under U2;
        # the last created items come from that step.
        last = max(labels)
        vl.query(labels[last], labels[last])


def test_unsafe_grammar_reported():
    g = pl.Grammar.parse(read("fig6.json"))
    assert not g.safe
