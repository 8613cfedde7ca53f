// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "salesassist/gateway/protocol.hpp"
#include "salesassist/pipeline/pipeline.hpp"
#include "salesassist/providers/tts.hpp"

namespace salesassist::demo {

inline constexpr std::size_t kScriptTurns = 25;
inline constexpr std::size_t kDynamicTurns = 9;
inline constexpr std::string_view kDynamicMarker = "DYNAMIC";
inline constexpr std::chrono::seconds kDefaultAckTimeout{120};

struct DemoTurn {
    int turn_id = 0;
    pipeline::Speaker speaker = pipeline::Speaker::rep;
    std::string text;  // kDynamicMarker for generated rep turns
    bool dynamic = false;
    bool triggers_pipeline = false;  // the customer question right before a dynamic turn
    std::string voice_id;

    bool operator==(const DemoTurn&) const = default;
};

/// Validates structure: 25 turns with increasing ids, exactly 9 dynamic rep
/// turns each directly after a customer question. Throws ValidationError.
std::vector<DemoTurn> parse_script(std::string_view json_text);
std::vector<DemoTurn> load_script(const std::string& path);

/// The embedded copy of assets/demo_script.json.
const std::vector<DemoTurn>& canonical_script();

std::string base64_encode(std::string_view bytes);

/// Synthesized audio keyed by (text, voice). Thread-safe. A null client
/// means TTS is disabled and every lookup yields an empty payload.
class TtsCache {
public:
    explicit TtsCache(std::shared_ptr<providers::TtsClient> client);

    /// Base64 MP3 for the pair; synthesizes on first use.
    std::string audio_b64(const std::string& text, const std::string& voice_id);

    std::size_t size() const;
    std::size_t synth_calls() const { return synth_calls_; }

private:
    std::shared_ptr<providers::TtsClient> client_;
    mutable std::mutex mu_;
    struct Entry {
        std::string text, voice_id, b64;
    };
    std::map<std::size_t, Entry> cache_;  // keyed by hash(text, voice)
    std::atomic<std::size_t> synth_calls_{0};
};

enum class DemoResult { completed, disconnected, timed_out };

/// Drives one scripted call over a session's pipeline. run() blocks on the
/// calling thread; acknowledge() and abort() may be called from any other.
class DemoEngine {
public:
    using Emit = std::function<void(const gateway::WsMessage&)>;

    DemoEngine(std::vector<DemoTurn> script, pipeline::Pipeline& pipeline, TtsCache& tts, Emit emit,
               std::chrono::milliseconds ack_timeout = kDefaultAckTimeout);

    DemoResult run();

    /// demo_next from the client. A mismatched id emits an error and does
    /// not advance.
    void acknowledge(int turn_id);
    void abort();

    int emitted() const { return emitted_; }
    int acked() const { return acked_; }

private:
    bool wait_for_ack(int turn_id);
    void emit_turn(const DemoTurn& turn, const std::string& spoken, double& clock);

    std::vector<DemoTurn> script_;
    pipeline::Pipeline& pipeline_;
    TtsCache& tts_;
    Emit emit_;
    std::chrono::milliseconds ack_timeout_;

    std::mutex mu_;
    std::condition_variable cv_;
    int current_turn_ = 0;
    bool current_acked_ = false;
    bool aborted_ = false;
    std::atomic<int> emitted_{0};
    std::atomic<int> acked_{0};
    std::string last_question_;
    std::string last_answer_;
};

/// Speaking time the demo assigns to a line (0.35 s per word, at least 1 s).
double spoken_duration(std::string_view text);

}  // namespace salesassist::demo
