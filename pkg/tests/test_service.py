import json
import threading

import pytest
from fastapi.testclient import TestClient

from moralmeter import CHOICE_ORDER, SessionStore, create_app, load_sample_items
from moralmeter.annotation import LabelMatrix, majority_vote


def make_store(tmp_path, n_items=4, raters=("r1", "r2")):
    items = [
        {"item_id": f"i{k}", "title": f"Item {k}", "thumbnail_url": f"https://x.test/{k}.jpg"}
        for k in range(n_items)
    ]
    return SessionStore(
        items=items,
        raters=list(raters),
        guideline="Pick the dominant emotion.",
        log_path=tmp_path / "labels.jsonl",
    )


@pytest.fixture()
def client(tmp_path):
    store = make_store(tmp_path)
    return TestClient(create_app(store)), store


def test_session_payload(client):
    api, _ = client
    resp = api.get("/api/session", params={"rater": "r1"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["rater_id"] == "r1"
    assert body["guideline"].startswith("Pick")
    tokens = [c["token"] for c in body["categories"]]
    assert tokens == list(CHOICE_ORDER)
    for c in body["categories"]:
        assert c["name_en"] and c["name_ko"] and c["desc_en"] and c["desc_ko"]


def test_unknown_rater_is_401(client):
    api, _ = client
    for call in (
        lambda: api.get("/api/session", params={"rater": "ghost"}),
        lambda: api.get("/api/items/next", params={"rater": "ghost"}),
        lambda: api.post(
            "/api/labels", json={"item_id": "i0", "rater": "ghost", "choice": "neutral"}
        ),
    ):
        assert call().status_code == 401


def test_next_item_advances_and_ends_with_204(client):
    api, _ = client
    seen = []
    for _ in range(4):
        resp = api.get("/api/items/next", params={"rater": "r1"})
        assert resp.status_code == 200
        item = resp.json()
        seen.append(item["item_id"])
        post = api.post(
            "/api/labels",
            json={"item_id": item["item_id"], "rater": "r1", "choice": "neutral"},
        )
        assert post.status_code == 201
    assert seen == ["i0", "i1", "i2", "i3"]
    done = api.get("/api/items/next", params={"rater": "r1"})
    assert done.status_code == 204
    # the other rater still has the full queue
    assert api.get("/api/items/next", params={"rater": "r2"}).json()["item_id"] == "i0"


def test_submit_validation(client):
    api, _ = client
    bad_choice = api.post(
        "/api/labels", json={"item_id": "i0", "rater": "r1", "choice": "angry"}
    )
    assert bad_choice.status_code == 422
    assert "invalid choice" in bad_choice.json()["detail"]
    bad_item = api.post(
        "/api/labels", json={"item_id": "zz", "rater": "r1", "choice": "neutral"}
    )
    assert bad_item.status_code == 422
    assert "not part of this session" in bad_item.json()["detail"]


def test_last_write_wins_but_log_keeps_both(tmp_path):
    store = make_store(tmp_path)
    api = TestClient(create_app(store))
    first = api.post(
        "/api/labels", json={"item_id": "i1", "rater": "r1", "choice": "neutral"}
    ).json()["seq"]
    second = api.post(
        "/api/labels", json={"item_id": "i1", "rater": "r1", "choice": "non_moral"}
    ).json()["seq"]
    assert second == first + 1
    export = api.get("/api/export").json()
    row = export["cells"][export["item_ids"].index("i1")]
    assert row[export["raters"].index("r1")] == "non_moral"
    log_lines = [json.loads(l) for l in store.log_path.read_text().splitlines()]
    assert [e["choice"] for e in log_lines] == ["neutral", "non_moral"]


def test_progress_counts(client):
    api, _ = client
    api.post("/api/labels", json={"item_id": "i0", "rater": "r1", "choice": "neutral"})
    api.post("/api/labels", json={"item_id": "i1", "rater": "r1", "choice": "non_moral"})
    api.post("/api/labels", json={"item_id": "i0", "rater": "r2", "choice": "neutral"})
    body = api.get("/api/progress").json()
    assert body["total_items"] == 4
    assert body["raters"]["r1"] == {"done": 2, "total": 4}
    assert body["raters"]["r2"] == {"done": 1, "total": 4}


def test_export_has_none_for_unlabeled_cells(client):
    api, _ = client
    api.post("/api/labels", json={"item_id": "i2", "rater": "r2", "choice": "other_praising"})
    export = api.get("/api/export").json()
    assert export["item_ids"] == ["i0", "i1", "i2", "i3"]
    assert export["raters"] == ["r1", "r2"]
    assert export["cells"][2] == [None, "other_praising"]
    assert export["cells"][0] == [None, None]


def test_log_replay_reconstructs_state(tmp_path):
    store = make_store(tmp_path)
    store.submit("i0", "r1", "neutral")
    store.submit("i0", "r1", "non_moral")
    store.submit("i3", "r2", "other_suffering")
    reborn = make_store(tmp_path)  # same log_path -> replays
    assert reborn.labels[("i0", "r1")] == "non_moral"
    assert reborn.labels[("i3", "r2")] == "other_suffering"
    assert reborn.seq == 3
    # sequence numbers continue after the replayed maximum
    assert reborn.submit("i1", "r1", "neutral") == 4


def test_concurrent_submits_get_unique_sequence_numbers(tmp_path):
    store = make_store(tmp_path, n_items=64)
    seqs = []
    lock = threading.Lock()

    def worker(k):
        s = store.submit(f"i{k}", "r1", "neutral")
        with lock:
            seqs.append(s)

    threads = [threading.Thread(target=worker, args=(k,)) for k in range(64)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(seqs) == list(range(1, 65))
    log_lines = store.log_path.read_text().splitlines()
    assert len(log_lines) == 64


def test_store_rejects_duplicate_items(tmp_path):
    items = [{"item_id": "dup", "title": "a"}, {"item_id": "dup", "title": "b"}]
    with pytest.raises(ValueError, match="duplicate item_id"):
        SessionStore(items=items, raters=["r1", "r2"], guideline="g", log_path=tmp_path / "l.jsonl")


def test_store_submit_unknown_rater_raises(tmp_path):
    store = make_store(tmp_path)
    with pytest.raises(KeyError):
        store.submit("i0", "ghost", "neutral")


def test_static_ui_mount(tmp_path):
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<html><body>annotate</body></html>")
    store = make_store(tmp_path)
    api = TestClient(create_app(store, ui_dir=ui))
    resp = api.get("/")
    assert resp.status_code == 200
    assert "annotate" in resp.text
    # API routes still take precedence over the static mount
    assert api.get("/api/progress").status_code == 200


def test_export_feeds_majority_vote(tmp_path):
    store = make_store(tmp_path, n_items=2, raters=("a", "b", "c"))
    votes = {
        ("i0", "a"): "neutral",
        ("i0", "b"): "neutral",
        ("i0", "c"): "non_moral",
        ("i1", "a"): "other_condemning",
        ("i1", "b"): "other_praising",
        ("i1", "c"): "hard_to_tell",
    }
    for (item, rater), choice in votes.items():
        store.submit(item, rater, choice)
    export = store.export()
    matrix = LabelMatrix(
        item_ids=tuple(export["item_ids"]),
        raters=tuple(export["raters"]),
        cells=tuple(tuple(row) for row in export["cells"]),
    )
    gold, excluded = majority_vote(matrix)
    assert [g.item_id for g in gold] == ["i0"]
    assert gold[0].label.value == "neutral"
    assert excluded == ["i1"]


def test_load_sample_items_roundtrip(tmp_path):
    path = tmp_path / "sample.jsonl"
    rows = [
        {"item_id": "a", "title": "T", "thumbnail_url": "u", "channel_id": "c", "cluster": "t1"},
        {"item_id": "b", "title": "U", "thumbnail_url": "v", "channel_id": "c", "cluster": "t2"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    items = load_sample_items(path)
    assert [it["item_id"] for it in items] == ["a", "b"]
