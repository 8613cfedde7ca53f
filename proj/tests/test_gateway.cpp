// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <condition_variable>
#include <mutex>
#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "salesassist/errors.hpp"
#include "salesassist/gateway/client.hpp"
#include "salesassist/gateway/protocol.hpp"
#include "salesassist/gateway/server.hpp"
#include "salesassist/gateway/session.hpp"
#include "salesassist/providers/llm.hpp"
#include "test_support.hpp"

using namespace salesassist;
using namespace salesassist::gateway;
using namespace std::chrono_literals;

namespace {

std::shared_ptr<const kb::KnowledgeBase> kb_ptr() {
    return std::make_shared<const kb::KnowledgeBase>(testsupport::canonical_kb());
}

std::shared_ptr<const GatewayConfig> mock_gateway(providers::ProviderConfig p = providers::mock_config()) {
    return std::make_shared<const GatewayConfig>(make_gateway_config(std::move(p), kb_ptr()));
}

template <class T>
const T* as(const WsMessage& m) {
    return std::get_if<T>(&m);
}

/// Thread-safe sink for a SessionHandler's outbound frames.
class Collector {
public:
    std::function<void(const WsMessage&)> on_message;

    SessionHandler::Emit emit() {
        return [this](std::string frame) {
            auto r = parse(frame);
            if (!ok(r)) {
                bad_frames_++;
                return;
            }
            const auto m = std::get<WsMessage>(r);
            if (on_message) on_message(m);
            {
                std::lock_guard lock(mu_);
                msgs_.push_back(m);
            }
            cv_.notify_all();
        };
    }

    bool wait_for(const std::function<bool(const std::vector<WsMessage>&)>& pred, std::chrono::milliseconds t = 5s) {
        std::unique_lock lock(mu_);
        return cv_.wait_for(lock, t, [&] { return pred(msgs_); });
    }

    bool wait_count(std::string_view type, std::size_t n, std::chrono::milliseconds t = 5s) {
        return wait_for([&](const auto& v) { return count_in(v, type) >= n; }, t);
    }

    std::vector<WsMessage> snapshot() const {
        std::lock_guard lock(mu_);
        return msgs_;
    }

    std::size_t count(std::string_view type) const {
        std::lock_guard lock(mu_);
        return count_in(msgs_, type);
    }

    int bad_frames() const { return bad_frames_; }

private:
    static std::size_t count_in(const std::vector<WsMessage>& v, std::string_view type) {
        std::size_t n = 0;
        for (const auto& m : v) n += type_name(m) == type;
        return n;
    }

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::vector<WsMessage> msgs_;
    std::atomic<int> bad_frames_{0};
};

template <class T>
std::vector<T> all_of(const std::vector<WsMessage>& v) {
    std::vector<T> out;
    for (const auto& m : v)
        if (const auto* x = as<T>(m)) out.push_back(*x);
    return out;
}

std::string random_text(std::mt19937& rng) {
    static const std::vector<std::string> pieces = {"a", "Z", "7", " ", "?", "\"", "\\", "\n", "\t", "/", "{", "}",
                                                    "é", "→", "日本", "'", "%", ",", "deductible", "SafeDrive"};
    std::uniform_int_distribution<int> len(0, 12);
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    std::string s;
    for (int i = len(rng); i > 0; --i) s += pieces[pick(rng)];
    return s;
}

WsMessage random_message(std::mt19937& rng, int kind) {
    std::uniform_real_distribution<double> t(0.0, 5000.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> id(-5, 100000);
    std::bernoulli_distribution coin;
    const std::string speaker = coin(rng) ? "rep" : "customer";
    switch (kind) {
        case 0: return TranscriptUpdate{speaker, random_text(rng), coin(rng), t(rng), t(rng)};
        case 1:
            return SuggestionCard{random_text(rng), random_text(rng), random_text(rng), random_text(rng), unit(rng),
                                  random_text(rng), pipeline::StageTimings{unit(rng), unit(rng), unit(rng), t(rng)}};
        case 2: return AudioPlay{id(rng), random_text(rng), speaker};
        case 3: return Status{random_text(rng), random_text(rng)};
        case 4: return ErrorMessage{random_text(rng), random_text(rng)};
        case 5: return TextInput{speaker, random_text(rng)};
        default: return DemoNext{id(rng)};
    }
}

ProtocolError error_of(std::string_view frame) {
    auto r = parse(frame);
    REQUIRE_FALSE(ok(r));
    return std::get<ProtocolError>(r);
}

}  // namespace

// ---------------------------------------------------------------------------
// Codec

TEST_CASE("every message type survives serialize then parse") {
    std::mt19937 rng(20260);
    for (int kind = 0; kind < 7; ++kind) {
        for (int i = 0; i < 1000; ++i) {
            const auto m = random_message(rng, kind);
            const auto frame = serialize(m);
            const auto j = nlohmann::ordered_json::parse(frame);
            REQUIRE(j.begin().key() == "type");
            REQUIRE(j["type"] == std::string(type_name(m)));
            auto back = parse(frame);
            REQUIRE(ok(back));
            REQUIRE(std::get<WsMessage>(back) == m);
        }
    }
}

TEST_CASE("wire field names") {
    CHECK(serialize(TranscriptUpdate{"customer", "Hi?", true, 1.5, 2.0}) ==
          R"({"type":"transcript_update","speaker":"customer","text":"Hi?","is_final":true,"start_time":1.5,"end_time":2.0})");
    CHECK(serialize(AudioPlay{3, "AAA=", "rep"}) == R"({"type":"audio_play","turn_id":3,"audio_b64":"AAA=","speaker":"rep"})");
    CHECK(serialize(DemoNext{4}) == R"({"type":"demo_next","turn_id":4})");
    const auto card = nlohmann::json::parse(serialize(SuggestionCard{"c-1", "q", "a", "pricing", 0.9, "faqs (faq_match)", {}}));
    for (const char* k : {"card_id", "question", "answer", "category", "confidence", "source", "timings"}) {
        CHECK(card.contains(k));
    }
    for (const char* k : {"detection", "retrieval", "generation", "total"}) CHECK(card["timings"].contains(k));
}

TEST_CASE("malformed frames name the offending field") {
    CHECK(error_of("not json").field == "frame");
    CHECK(error_of("[1,2]").field == "frame");
    CHECK(error_of(R"({"text":"hi"})").field == "type");
    CHECK(error_of(R"({"type":"shout"})").field == "type");
    CHECK(error_of(R"({"type":"text_input"})").field == "text");
    CHECK(error_of(R"({"type":"text_input","text":5})").field == "text");
    CHECK(error_of(R"({"type":"text_input","text":"x","speaker":"caller"})").field == "speaker");
    CHECK(error_of(R"({"type":"demo_next","turn_id":"4"})").field == "turn_id");
    CHECK(error_of(R"({"type":"transcript_update","speaker":"rep","text":"x","is_final":true,"start_time":0})").field ==
          "end_time");

    auto r = parse(R"({"type":"text_input","text":"hello","extra":[1]})");
    REQUIRE(ok(r));
    const auto* t = as<TextInput>(std::get<WsMessage>(r));
    REQUIRE(t);
    CHECK(t->speaker == "customer");
    auto s = parse(R"({"type":"status","state":"demo_start"})");
    REQUIRE(ok(s));
    CHECK(*as<Status>(std::get<WsMessage>(s)) == Status{"demo_start", ""});
}

// ---------------------------------------------------------------------------
// SessionHandler

TEST_CASE("text session answers a typed question") {
    Collector out;
    auto h = SessionHandler::create("s1", mock_gateway(), out.emit());
    CHECK(h->mode() == SessionMode::text_only);
    REQUIRE(h->start());
    h->on_text(R"({"type":"text_input","text":"What is the deductible for SafeDrive Elite?"})");
    REQUIRE(out.wait_count("suggestion_card", 1));
    const auto msgs = out.snapshot();
    REQUIRE(msgs.size() == 3);
    CHECK(*as<Status>(msgs[0]) == Status{"connected", "s1"});
    const auto* tr = as<TranscriptUpdate>(msgs[1]);
    REQUIRE(tr);
    CHECK(tr->is_final);
    CHECK(tr->speaker == "customer");
    const auto* card = as<SuggestionCard>(msgs[2]);
    REQUIRE(card);
    CHECK(card->card_id == "s1-1");
    CHECK(card->category == "coverage");
    CHECK(card->source.find("faqs") != std::string::npos);

    // same question again inside the dedup window: transcript only
    h->on_text(R"({"type":"text_input","text":"what is the deductible for safedrive elite"})");
    REQUIRE(out.wait_count("transcript_update", 2));
    h->on_text(R"({"type":"text_input","text":"How much does the HomeShield Standard tier cost?"})");
    REQUIRE(out.wait_count("suggestion_card", 2));
    CHECK(all_of<SuggestionCard>(out.snapshot()).back().card_id == "s1-2");
    CHECK(out.bad_frames() == 0);
    h->close();
    h->join();
    CHECK(h->finished());
}

TEST_CASE("session rejects frames it cannot handle") {
    Collector out;
    auto h = SessionHandler::create("s2", mock_gateway(), out.emit());
    REQUIRE(h->start());
    h->on_text("{oops");
    h->on_text(R"({"type":"text_input","text":"   "})");
    h->on_text(R"({"type":"suggestion_card","card_id":"x","question":"q","answer":"a","category":"general",)"
               R"("confidence":1,"source":"s","timings":{"detection":0,"retrieval":0,"generation":0,"total":0}})");
    h->on_text(R"({"type":"demo_next","turn_id":1})");
    h->on_text(R"({"type":"status","state":"paused"})");
    const std::vector<std::uint8_t> audio(640, 0);
    h->on_binary(audio);
    const auto errors = all_of<ErrorMessage>(out.snapshot());
    std::vector<std::string> codes;
    for (const auto& e : errors) codes.push_back(e.code);
    CHECK(codes == std::vector<std::string>{"protocol_error", "empty_text", "unsupported_message", "no_demo",
                                            "unsupported_message", "stt_unavailable"});
    CHECK(errors[0].message.find("frame") == 0);
}

TEST_CASE("session without a knowledge base refuses to start") {
    Collector out;
    auto cfg = make_gateway_config(providers::mock_config(), nullptr);
    cfg.kb_error = "no such file: kb.sqlite";
    auto h = SessionHandler::create("s3", std::make_shared<const GatewayConfig>(cfg), out.emit());
    CHECK_FALSE(h->start());
    const auto msgs = out.snapshot();
    REQUIRE(msgs.size() == 1);
    const auto* e = as<ErrorMessage>(msgs[0]);
    REQUIRE(e);
    CHECK(e->code == "kb_unavailable");
    CHECK(e->message.find("kb.sqlite") != std::string::npos);
    h->on_text(R"({"type":"text_input","text":"hello?"})");
    CHECK(all_of<ErrorMessage>(out.snapshot()).back().code == "not_ready");
}

TEST_CASE("live session streams mock STT and answers finals") {
    auto p = providers::mock_config();
    p.mock_stt_speed = 0.0;
    p.stt_script = {{"rep", "Thanks for calling, how can I help?", 0.0, 2.0, {}},
                    {"customer", "What is the deductible for SafeDrive Elite?", 2.5, 5.0, {"What is", "What is the deductible"}}};
    Collector out;
    auto h = SessionHandler::create("live", mock_gateway(p), out.emit());
    CHECK(h->mode() == SessionMode::live);
    REQUIRE(h->start());
    const std::vector<std::uint8_t> chunk(3200, 0);
    h->on_binary(chunk);
    REQUIRE(out.wait_count("suggestion_card", 1));
    const auto tr = all_of<TranscriptUpdate>(out.snapshot());
    REQUIRE(tr.size() == 4);
    CHECK_FALSE(tr[1].is_final);
    CHECK(tr[1].text == "What is");
    CHECK(tr[3].is_final);
    CHECK(tr[3].speaker == "customer");
    CHECK(tr[0].speaker == "rep");
    // finals are processed in order; only one card for the one question
    h->on_binary(chunk);
    std::this_thread::sleep_for(100ms);
    CHECK(out.count("suggestion_card") == 1);
}

TEST_CASE("demo over a session handler") {
    auto cfg = make_gateway_config(providers::mock_config(), kb_ptr());
    auto shared = std::make_shared<const GatewayConfig>(cfg);
    Collector out;
    std::shared_ptr<SessionHandler> h;
    out.on_message = [&](const WsMessage& m) {
        if (const auto* a = as<AudioPlay>(m)) h->on_text(serialize(DemoNext{a->turn_id}));
    };
    h = SessionHandler::create("demo", shared, out.emit());
    REQUIRE(h->start());
    h->on_text(R"({"type":"status","state":"demo_start"})");
    CHECK(h->mode() == SessionMode::demo);
    h->on_text(R"({"type":"text_input","text":"hello?"})");
    REQUIRE(out.wait_for([](const auto& v) {
        for (const auto& m : v)
            if (const auto* s = as<Status>(m); s && s->state == "demo_ended") return true;
        return false;
    }, 20s));
    const auto msgs = out.snapshot();
    CHECK(all_of<AudioPlay>(msgs).size() == 25);
    CHECK(all_of<SuggestionCard>(msgs).size() == 9);
    CHECK(all_of<ErrorMessage>(msgs).front().code == "wrong_mode");
    CHECK(all_of<Status>(msgs).back() == Status{"demo_ended", ""});
    REQUIRE(out.wait_for([&](const auto&) { return h->mode() == SessionMode::text_only; }, 2s));
}

// ---------------------------------------------------------------------------
// Server

TEST_CASE("server round trip with a headless client") {
    Server server(mock_gateway(), ServerOptions{"127.0.0.1", 0, 1});
    server.start();
    REQUIRE(server.port() != 0);

    WsClient client;
    client.connect("127.0.0.1", server.port());
    auto first = client.next_message(5s);
    REQUIRE(first);
    const auto* st = as<Status>(*first);
    REQUIRE(st);
    CHECK(st->state == "connected");
    CHECK(st->detail.rfind("session-", 0) == 0);

    const auto t0 = std::chrono::steady_clock::now();
    client.send(TextInput{"customer", "What is the deductible for SafeDrive Elite?"});
    auto tr = client.next_message(5s);
    REQUIRE(tr);
    CHECK(as<TranscriptUpdate>(*tr));
    auto card = client.next_message(5s);
    REQUIRE(card);
    REQUIRE(as<SuggestionCard>(*card));
    CHECK(std::chrono::steady_clock::now() - t0 < 5s);
    CHECK(as<SuggestionCard>(*card)->card_id == st->detail + "-1");

    client.send_text("garbage");
    auto err = client.next_message(5s);
    REQUIRE(err);
    CHECK(as<ErrorMessage>(*err)->code == "protocol_error");
    CHECK(server.active_sessions() == 1);
    client.close();
    CHECK_FALSE(client.is_open());
    for (int i = 0; i < 100 && server.active_sessions() > 0; ++i) std::this_thread::sleep_for(10ms);
    CHECK(server.active_sessions() == 0);
    server.stop();
}

TEST_CASE("two sessions are isolated") {
    Server server(mock_gateway(), ServerOptions{"127.0.0.1", 0, 2});
    server.start();
    WsClient a, b;
    a.connect("127.0.0.1", server.port());
    b.connect("127.0.0.1", server.port());
    const auto ida = as<Status>(*a.next_message(5s))->detail;
    const auto idb = as<Status>(*b.next_message(5s))->detail;
    CHECK(ida != idb);

    const std::string q = "How much does the HomeShield Standard tier cost?";
    a.send(TextInput{"customer", q});
    b.send(TextInput{"customer", q});
    auto card_of = [](WsClient& c) -> std::optional<SuggestionCard> {
        for (int i = 0; i < 4; ++i) {
            auto m = c.next_message(5s);
            if (!m) return std::nullopt;
            if (const auto* card = as<SuggestionCard>(*m)) return *card;
        }
        return std::nullopt;
    };
    auto ca = card_of(a);
    auto cb = card_of(b);
    REQUIRE(ca);
    REQUIRE(cb);
    // dedup state is per session: both see the card
    CHECK(ca->card_id == ida + "-1");
    CHECK(cb->card_id == idb + "-1");
    CHECK(ca->answer == cb->answer);
    // nothing leaks across
    CHECK_FALSE(a.next_frame(200ms));
    CHECK_FALSE(b.next_frame(50ms));
    server.stop();
    CHECK_FALSE(a.next_frame(2s));
    CHECK_FALSE(a.is_open());
}

TEST_CASE("REST endpoints") {
    Server server(mock_gateway(), ServerOptions{"127.0.0.1", 0, 1});
    server.start();
    httplib::Client http("127.0.0.1", server.port());

    auto health = http.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    const auto hj = nlohmann::json::parse(health->body);
    CHECK(hj["status"] == "ok");
    CHECK(hj["kb"]["products"].get<int>() == static_cast<int>(testsupport::canonical_kb().stats().products));
    CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

    auto config = http.Get("/config");
    REQUIRE(config);
    CHECK(config->status == 200);
    const auto cj = nlohmann::json::parse(config->body);
    CHECK(cj["llm_provider"] == "mock");
    CHECK(cj["ws_path"] == "/ws");
    CHECK(cj["demo"]["turns"] == 25);
    CHECK(cj["demo"]["dynamic_turns"] == 9);
    CHECK(cj["default_mode"] == "text_only");
    CHECK(cj.dump().find("sk-") == std::string::npos);

    auto missing = http.Get("/nope");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    auto ws_plain = http.Get("/ws");
    REQUIRE(ws_plain);
    CHECK(ws_plain->status == 426);
    server.stop();
}

TEST_CASE("health reports 503 and sessions close without a knowledge base") {
    auto cfg = make_gateway_config(providers::mock_config(), nullptr);
    cfg.kb_error = "cannot open kb";
    Server server(std::make_shared<const GatewayConfig>(cfg), ServerOptions{"127.0.0.1", 0, 1});
    server.start();
    httplib::Client http("127.0.0.1", server.port());
    auto health = http.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 503);
    CHECK(nlohmann::json::parse(health->body)["status"] == "unavailable");

    WsClient c;
    c.connect("127.0.0.1", server.port());
    auto m = c.next_message(5s);
    REQUIRE(m);
    CHECK(as<ErrorMessage>(*m)->code == "kb_unavailable");
    CHECK_FALSE(c.next_frame(5s));
    CHECK_FALSE(c.is_open());
    server.stop();
}

TEST_CASE("disconnect mid-demo releases the session") {
    auto cfg = make_gateway_config(providers::mock_config(), kb_ptr());
    Server server(std::make_shared<const GatewayConfig>(cfg), ServerOptions{"127.0.0.1", 0, 1});
    server.start();
    {
        WsClient c;
        c.connect("127.0.0.1", server.port());
        REQUIRE(c.next_message(5s));
        c.send_text(R"({"type":"status","state":"demo_start"})");
        bool saw_audio = false;
        for (int i = 0; i < 5 && !saw_audio; ++i) {
            auto m = c.next_message(5s);
            saw_audio = m && as<AudioPlay>(*m);
        }
        CHECK(saw_audio);
    }
    for (int i = 0; i < 200 && server.active_sessions() > 0; ++i) std::this_thread::sleep_for(10ms);
    CHECK(server.active_sessions() == 0);
    const auto t0 = std::chrono::steady_clock::now();
    server.stop();
    CHECK(std::chrono::steady_clock::now() - t0 < 2s);
}

TEST_CASE("port conflicts are reported") {
    Server first(mock_gateway(), ServerOptions{"127.0.0.1", 0, 1});
    first.start();
    Server second(mock_gateway(), ServerOptions{"127.0.0.1", first.port(), 1});
    CHECK_THROWS_AS(second.start(), StorageError);
    WsClient c;
    CHECK_THROWS_AS(c.connect("127.0.0.1", 1), ConnectivityError);
}
