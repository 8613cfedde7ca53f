# Copyright 2026 The SalesAssist Authors
# SPDX-License-Identifier: Apache-2.0

import json
import time

import pytest

import salesassist as sa


def test_kb_counts(seeded_db):
    stats = sa.kb_stats(seeded_db)
    assert stats["products"] == 50
    assert stats["coverage_details"] == 290
    assert stats["policy_terms"] == 50
    assert stats["faqs"] == 2490
    assert stats["pricing_tiers"] == 162
    assert set(stats["products_per_category"].values()) == {5}


def test_kb_errors(seeded_db, tmp_path):
    with pytest.raises(sa.AlreadySeededError):
        sa.kb_seed(seeded_db)
    with pytest.raises(sa.StorageError):
        sa.kb_stats(str(tmp_path / "missing.sqlite"))
    assert sa.kb_init(str(tmp_path / "empty.sqlite"))["faqs"] == 0


def test_sql_guard():
    assert sa.validate_sql("SELECT name FROM products") == (True, "")
    ok, reason = sa.validate_sql("DROP TABLE products")
    assert not ok and reason
    assert not sa.validate_sql("SELECT 1; DELETE FROM faqs")[0]
    assert sa.validate_sql("SELECT 'DROP TABLE x' AS s")[0]


def test_protocol_round_trip():
    msg = {"type": "text_input", "text": "Is flood damage covered?"}
    frame = sa.serialize_message(msg)
    assert json.loads(frame) == {"type": "text_input", "speaker": "customer", "text": "Is flood damage covered?"}
    assert sa.parse_message(frame)["speaker"] == "customer"
    with pytest.raises(ValueError, match="type"):
        sa.parse_message('{"type": "nope"}')
    with pytest.raises(sa.ValidationError):
        sa.parse_message("not json")


def test_pipeline_card(seeded_db):
    p = sa.Pipeline(seeded_db)
    out = p.process("What is the deductible for SafeDrive Elite?", start=0.0, end=2.0)
    assert out["detected"]
    card = out["card"]
    assert card["type"] == "suggestion_card"
    assert card["category"] == "coverage"
    assert card["card_id"] == "card-1"
    assert set(card["timings"]) == {"detection", "retrieval", "generation", "total"}
    again = p.process("what is the deductible for safedrive elite", start=5.0, end=7.0)
    assert again["duplicate"] and again["card"] is None
    assert "Customer:" in p.context()


def test_benchmark_and_report(seeded_db, tmp_path):
    samples = sa.run_benchmark(seeded_db)
    assert len(samples) == 20
    assert all(s["detected"] for s in samples)
    report = sa.build_report(samples, out_dir=str(tmp_path / "out"))
    assert report["detection_rate"] == 1.0
    assert abs(sum(v["share"] for v in report["stage_breakdown"].values()) - 1.0) < 0.01
    written = sorted(p.name for p in (tmp_path / "out").iterdir())
    assert written == ["cumulative.csv", "per_category.csv", "report.json", "stage_breakdown.csv", "summary.md"]
    header = (tmp_path / "out" / "per_category.csv").read_text().splitlines()[0]
    assert header == "category,manual_mean,copilot_mean,copilot_std,speedup"


def test_server_session(seeded_db):
    server = sa.Server(seeded_db)
    server.start()
    try:
        client = sa.Client()
        client.connect("127.0.0.1", server.port)
        status = client.next_message(5.0)
        assert status["type"] == "status" and status["state"] == "connected"
        started = time.monotonic()
        client.send({"type": "text_input", "text": "How much does the HomeShield Standard tier cost?"})
        transcript = client.next_message(5.0)
        card = client.next_message(5.0)
        assert transcript["type"] == "transcript_update" and transcript["is_final"]
        assert card["type"] == "suggestion_card"
        assert time.monotonic() - started < 5.0
        client.close()
        assert not client.is_open
    finally:
        server.stop()


def test_server_without_kb(tmp_path):
    server = sa.Server(str(tmp_path / "absent.sqlite"))
    server.start()
    try:
        client = sa.Client()
        client.connect("127.0.0.1", server.port)
        err = client.next_message(5.0)
        assert err["type"] == "error" and err["code"] == "kb_unavailable"
    finally:
        server.stop()
