// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <future>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "salesassist/assets.hpp"
#include "salesassist/demo/demo.hpp"
#include "salesassist/errors.hpp"
#include "salesassist/providers/llm.hpp"
#include "test_support.hpp"

using namespace salesassist;
using namespace salesassist::demo;
using namespace std::chrono_literals;
using gateway::WsMessage;

namespace {

std::shared_ptr<const kb::KnowledgeBase> kb_ptr() {
    return std::make_shared<const kb::KnowledgeBase>(testsupport::canonical_kb());
}

nlohmann::json script_json() { return nlohmann::json::parse(assets::kDemoScript); }

class CountingTts : public providers::TtsClient {
public:
    std::string synthesize(const std::string& text, const std::string& voice) override {
        ++calls;
        if (fail) throw ConnectivityError("tts down");
        return "mp3:" + voice + ":" + text;
    }
    std::atomic<int> calls{0};
    bool fail = false;
};

/// Records emitted messages; optionally acknowledges each audio_play.
struct Recorder {
    std::mutex mu;
    std::condition_variable cv;
    std::vector<WsMessage> msgs;
    DemoEngine* engine = nullptr;
    bool auto_ack = true;

    DemoEngine::Emit emit() {
        return [this](const WsMessage& m) {
            {
                std::lock_guard lock(mu);
                msgs.push_back(m);
            }
            cv.notify_all();
            if (const auto* a = std::get_if<gateway::AudioPlay>(&m); a && auto_ack && engine) {
                engine->acknowledge(a->turn_id);
            }
        };
    }

    template <class T>
    std::vector<T> all() {
        std::lock_guard lock(mu);
        std::vector<T> out;
        for (const auto& m : msgs)
            if (const auto* x = std::get_if<T>(&m)) out.push_back(*x);
        return out;
    }

    bool wait_count(std::string_view type, std::size_t n, std::chrono::milliseconds t = 5s) {
        std::unique_lock lock(mu);
        return cv.wait_for(lock, t, [&] {
            std::size_t k = 0;
            for (const auto& m : msgs) k += gateway::type_name(m) == type;
            return k >= n;
        });
    }
};

std::vector<std::string> trace_of(const std::vector<WsMessage>& msgs) {
    std::vector<std::string> out;
    for (auto m : msgs) {
        if (auto* c = std::get_if<gateway::SuggestionCard>(&m)) c->timings = {};
        out.push_back(gateway::serialize(m));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Script

TEST_CASE("canonical script shape") {
    const auto& s = canonical_script();
    REQUIRE(s.size() == 25);
    std::vector<int> dynamic_ids, trigger_ids;
    for (const auto& t : s) {
        if (t.dynamic) dynamic_ids.push_back(t.turn_id);
        if (t.triggers_pipeline) trigger_ids.push_back(t.turn_id);
        CHECK_FALSE(t.voice_id.empty());
    }
    CHECK(dynamic_ids == std::vector<int>{5, 7, 9, 13, 15, 17, 20, 22, 24});
    CHECK(trigger_ids == std::vector<int>{4, 6, 8, 12, 14, 16, 19, 21, 23});
    CHECK(load_script(std::string(SALESASSIST_ASSETS_DIR) + "/demo_script.json") == s);
}

TEST_CASE("script validation") {
    auto doc = script_json();
    SUBCASE("too few turns") {
        doc.erase(doc.end() - 1);
        CHECK_THROWS_AS(parse_script(doc.dump()), ValidationError);
    }
    SUBCASE("dynamic first turn") {
        doc[0]["text"] = "DYNAMIC";
        CHECK_THROWS_WITH_AS(parse_script(doc.dump()), doctest::Contains("customer question"), ValidationError);
    }
    SUBCASE("dynamic after a rep turn") {
        doc[1]["text"] = "DYNAMIC";
        CHECK_THROWS_AS(parse_script(doc.dump()), ValidationError);
    }
    SUBCASE("dynamic customer turn") {
        doc[4]["speaker"] = "customer";
        CHECK_THROWS_AS(parse_script(doc.dump()), ValidationError);
    }
    SUBCASE("wrong dynamic count") {
        doc[4]["text"] = "Sure, let me look.";
        CHECK_THROWS_WITH_AS(parse_script(doc.dump()), doctest::Contains("dynamic"), ValidationError);
    }
    SUBCASE("ids must increase") {
        doc[2]["turn_id"] = 1;
        CHECK_THROWS_AS(parse_script(doc.dump()), ValidationError);
    }
    SUBCASE("unknown speaker") {
        doc[0]["speaker"] = "narrator";
        CHECK_THROWS_AS(parse_script(doc.dump()), ValidationError);
    }
    SUBCASE("missing voice") {
        doc[0].erase("voice_id");
        CHECK_THROWS_AS(parse_script(doc.dump()), ValidationError);
    }
    SUBCASE("not json") { CHECK_THROWS_AS(parse_script("[{"), ValidationError); }
}

TEST_CASE("base64 and spoken duration") {
    CHECK(base64_encode("") == "");
    CHECK(base64_encode("f") == "Zg==");
    CHECK(base64_encode("fo") == "Zm8=");
    CHECK(base64_encode("foobar") == "Zm9vYmFy");
    CHECK(base64_encode(providers::silent_mp3()).size() == 4 * ((providers::silent_mp3().size() + 2) / 3));
    CHECK(spoken_duration("") == 1.0);
    CHECK(spoken_duration("one two") == 1.0);
    CHECK(spoken_duration("a b c d e f g h i j") == doctest::Approx(3.5));
}

TEST_CASE("tts cache") {
    TtsCache disabled(nullptr);
    CHECK(disabled.audio_b64("hello", "v") == "");
    CHECK(disabled.synth_calls() == 0);

    auto tts = std::make_shared<CountingTts>();
    TtsCache cache(tts);
    const auto a = cache.audio_b64("hello", "v1");
    CHECK(a == base64_encode("mp3:v1:hello"));
    CHECK(cache.audio_b64("hello", "v1") == a);
    CHECK(cache.audio_b64("hello", "v2") != a);
    CHECK(tts->calls == 2);
    CHECK(cache.size() == 2);
    tts->fail = true;
    CHECK(cache.audio_b64("hello", "v1") == a);
    CHECK_THROWS_AS(cache.audio_b64("new line", "v1"), ConnectivityError);
}

// ---------------------------------------------------------------------------
// Engine

TEST_CASE("full demo run") {
    pipeline::Pipeline p(std::make_shared<providers::MockLlm>(), kb_ptr());
    TtsCache tts(std::make_shared<providers::MockTts>());
    Recorder rec;
    DemoEngine engine(canonical_script(), p, tts, rec.emit());
    rec.engine = &engine;
    CHECK(engine.run() == DemoResult::completed);
    CHECK(engine.emitted() == 25);
    CHECK(engine.acked() == 25);

    const auto audio = rec.all<gateway::AudioPlay>();
    const auto cards = rec.all<gateway::SuggestionCard>();
    const auto transcripts = rec.all<gateway::TranscriptUpdate>();
    const auto statuses = rec.all<gateway::Status>();
    CHECK(audio.size() == 25);
    CHECK(transcripts.size() == 25);
    CHECK(cards.size() == 9);
    CHECK(rec.all<gateway::ErrorMessage>().empty());
    REQUIRE(statuses.size() == 2);
    CHECK(statuses.front().state == "demo_started");
    CHECK(statuses.back() == gateway::Status{"demo_ended", ""});
    for (std::size_t i = 0; i < audio.size(); ++i) {
        CHECK(audio[i].turn_id == canonical_script()[i].turn_id);
        CHECK(audio[i].audio_b64 == base64_encode(providers::silent_mp3()));
        CHECK(audio[i].speaker == pipeline::to_string(canonical_script()[i].speaker));
        CHECK(transcripts[i].is_final);
    }
    // each generated rep line voices the card that preceded it
    std::size_t card_idx = 0;
    for (std::size_t i = 0; i < transcripts.size(); ++i) {
        if (!canonical_script()[i].dynamic) {
            CHECK(transcripts[i].text == canonical_script()[i].text);
            continue;
        }
        REQUIRE(card_idx < cards.size());
        CHECK(transcripts[i].text.find(cards[card_idx].answer) != std::string::npos);
        ++card_idx;
    }
    // transcript times are monotone
    for (std::size_t i = 1; i < transcripts.size(); ++i) CHECK(transcripts[i].start_time > transcripts[i - 1].end_time);
}

TEST_CASE("per-turn message order") {
    pipeline::Pipeline p(std::make_shared<providers::MockLlm>(), kb_ptr());
    TtsCache tts(nullptr);
    Recorder rec;
    DemoEngine engine(canonical_script(), p, tts, rec.emit());
    rec.engine = &engine;
    engine.run();
    std::vector<std::string> types;
    for (const auto& m : rec.msgs) types.emplace_back(gateway::type_name(m));
    std::size_t k = 1;  // after demo_started
    for (const auto& turn : canonical_script()) {
        REQUIRE(k + 1 < types.size());
        CHECK(types[k++] == "transcript_update");
        CHECK(types[k++] == "audio_play");
        if (turn.triggers_pipeline) CHECK(types[k++] == "suggestion_card");
    }
    CHECK(types[k] == "status");
    CHECK(rec.all<gateway::AudioPlay>().front().audio_b64.empty());
}

TEST_CASE("lock-step: the next turn waits for demo_next") {
    pipeline::Pipeline p(std::make_shared<providers::MockLlm>(), kb_ptr());
    TtsCache tts(nullptr);
    Recorder rec;
    rec.auto_ack = false;
    DemoEngine engine(canonical_script(), p, tts, rec.emit(), 5s);
    auto done = std::async(std::launch::async, [&] { return engine.run(); });

    REQUIRE(rec.wait_count("audio_play", 1));
    std::this_thread::sleep_for(150ms);
    CHECK(rec.all<gateway::AudioPlay>().size() == 1);

    engine.acknowledge(7);  // wrong turn: error, no advance
    std::this_thread::sleep_for(50ms);
    CHECK(rec.all<gateway::AudioPlay>().size() == 1);
    REQUIRE(rec.all<gateway::ErrorMessage>().size() == 1);
    CHECK(rec.all<gateway::ErrorMessage>()[0].code == "demo_turn_mismatch");

    engine.acknowledge(1);
    REQUIRE(rec.wait_count("audio_play", 2));
    CHECK(rec.all<gateway::AudioPlay>()[1].turn_id == 2);
    engine.acknowledge(1);  // stale
    CHECK(rec.all<gateway::ErrorMessage>().back().code == "demo_turn_mismatch");
    CHECK(engine.acked() == 1);

    engine.abort();
    CHECK(done.get() == DemoResult::disconnected);
    CHECK(engine.emitted() == 2);
    engine.acknowledge(2);
    CHECK(rec.all<gateway::ErrorMessage>().back().code == "no_demo");
}

TEST_CASE("missing acknowledgement times out") {
    pipeline::Pipeline p(std::make_shared<providers::MockLlm>(), kb_ptr());
    TtsCache tts(nullptr);
    Recorder rec;
    rec.auto_ack = false;
    DemoEngine engine(canonical_script(), p, tts, rec.emit(), 100ms);
    const auto t0 = std::chrono::steady_clock::now();
    CHECK(engine.run() == DemoResult::timed_out);
    CHECK(std::chrono::steady_clock::now() - t0 < 2s);
    CHECK(engine.emitted() == 1);
    const auto errors = rec.all<gateway::ErrorMessage>();
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].code == "demo_timeout");
    CHECK(rec.all<gateway::Status>().back() == gateway::Status{"demo_ended", "aborted"});
}

TEST_CASE("a TTS failure is reported and the demo continues") {
    pipeline::Pipeline p(std::make_shared<providers::MockLlm>(), kb_ptr());
    auto client = std::make_shared<CountingTts>();
    client->fail = true;
    TtsCache tts(client);
    Recorder rec;
    DemoEngine engine(canonical_script(), p, tts, rec.emit());
    rec.engine = &engine;
    CHECK(engine.run() == DemoResult::completed);
    CHECK(rec.all<gateway::ErrorMessage>().size() == 25);
    CHECK(rec.all<gateway::ErrorMessage>()[0].code == "tts_error");
    CHECK(rec.all<gateway::AudioPlay>().size() == 25);
}

TEST_CASE("demo trace is deterministic apart from timings") {
    auto run_once = [] {
        pipeline::Pipeline p(std::make_shared<providers::MockLlm>(), kb_ptr());
        TtsCache tts(std::make_shared<providers::MockTts>());
        Recorder rec;
        DemoEngine engine(canonical_script(), p, tts, rec.emit());
        rec.engine = &engine;
        engine.run();
        return trace_of(rec.msgs);
    };
    const auto a = run_once();
    const auto b = run_once();
    CHECK(a.size() == 25 * 2 + 9 + 2);
    CHECK(a == b);
}
