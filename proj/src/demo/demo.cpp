// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/demo/demo.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "salesassist/assets.hpp"
#include "salesassist/errors.hpp"
#include "salesassist/text.hpp"

namespace salesassist::demo {

using pipeline::Speaker;
namespace roles = providers::roles;

std::vector<DemoTurn> parse_script(std::string_view json_text) {
    std::vector<DemoTurn> turns;
    try {
        const auto doc = nlohmann::json::parse(json_text);
        if (!doc.is_array()) throw ValidationError("demo script must be a JSON array");
        for (const auto& item : doc) {
            DemoTurn t;
            t.turn_id = item.at("turn_id").get<int>();
            t.speaker = pipeline::parse_speaker(item.at("speaker").get<std::string>());
            t.text = item.at("text").get<std::string>();
            t.voice_id = item.at("voice_id").get<std::string>();
            t.dynamic = t.text == kDynamicMarker;
            if (text::trim(t.text).empty()) throw ValidationError("turn " + std::to_string(t.turn_id) + " has no text");
            if (t.voice_id.empty()) throw ValidationError("turn " + std::to_string(t.turn_id) + " has no voice_id");
            turns.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid demo script: ") + e.what());
    }

    if (turns.size() != kScriptTurns) {
        throw ValidationError("demo script needs " + std::to_string(kScriptTurns) + " turns, found " +
                              std::to_string(turns.size()));
    }
    std::size_t dynamic = 0;
    for (std::size_t i = 0; i < turns.size(); ++i) {
        if (i > 0 && turns[i].turn_id <= turns[i - 1].turn_id) throw ValidationError("turn ids must increase");
        if (!turns[i].dynamic) continue;
        ++dynamic;
        const auto id = std::to_string(turns[i].turn_id);
        if (turns[i].speaker != Speaker::rep) throw ValidationError("dynamic turn " + id + " must be a rep turn");
        if (i == 0 || turns[i - 1].speaker != Speaker::customer || turns[i - 1].dynamic ||
            turns[i - 1].text.find('?') == std::string::npos) {
            throw ValidationError("dynamic turn " + id + " must follow a customer question");
        }
        turns[i - 1].triggers_pipeline = true;
    }
    if (dynamic != kDynamicTurns) {
        throw ValidationError("demo script needs " + std::to_string(kDynamicTurns) + " dynamic turns, found " +
                              std::to_string(dynamic));
    }
    return turns;
}

std::vector<DemoTurn> load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot read demo script " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_script(ss.str());
}

const std::vector<DemoTurn>& canonical_script() {
    static const auto script = parse_script(assets::kDemoScript);
    return script;
}

std::string base64_encode(std::string_view bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                  reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

double spoken_duration(std::string_view line) {
    std::istringstream in{std::string(line)};
    std::string w;
    int words = 0;
    while (in >> w) ++words;
    return std::max(1.0, 0.35 * words);
}

// ---------------------------------------------------------------------------

TtsCache::TtsCache(std::shared_ptr<providers::TtsClient> client) : client_(std::move(client)) {}

std::string TtsCache::audio_b64(const std::string& line, const std::string& voice_id) {
    if (!client_) return {};
    const std::size_t key = std::hash<std::string>{}(line) ^ (std::hash<std::string>{}(voice_id) * 0x9E3779B97F4A7C15ULL);
    {
        std::lock_guard lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end() && it->second.text == line && it->second.voice_id == voice_id) return it->second.b64;
    }
    ++synth_calls_;
    std::string b64 = base64_encode(client_->synthesize(line, voice_id));
    std::lock_guard lock(mu_);
    cache_.try_emplace(key, Entry{line, voice_id, b64});
    return b64;
}

std::size_t TtsCache::size() const {
    std::lock_guard lock(mu_);
    return cache_.size();
}

// ---------------------------------------------------------------------------

DemoEngine::DemoEngine(std::vector<DemoTurn> script, pipeline::Pipeline& pipeline, TtsCache& tts, Emit emit,
                       std::chrono::milliseconds ack_timeout)
    : script_(std::move(script)), pipeline_(pipeline), tts_(tts), emit_(std::move(emit)), ack_timeout_(ack_timeout) {}

void DemoEngine::acknowledge(int turn_id) {
    std::unique_lock lock(mu_);
    if (current_turn_ == 0 || aborted_) {
        lock.unlock();
        emit_(gateway::ErrorMessage{"no_demo", "no demo turn is awaiting acknowledgement"});
        return;
    }
    if (turn_id != current_turn_ || current_acked_) {
        const int expected = current_turn_;
        lock.unlock();
        emit_(gateway::ErrorMessage{"demo_turn_mismatch", "demo_next for turn " + std::to_string(turn_id) +
                                                              " but the current turn is " + std::to_string(expected)});
        return;
    }
    current_acked_ = true;
    ++acked_;
    cv_.notify_all();
}

void DemoEngine::abort() {
    std::lock_guard lock(mu_);
    aborted_ = true;
    cv_.notify_all();
}

bool DemoEngine::wait_for_ack(int) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, ack_timeout_, [this] { return current_acked_ || aborted_; });
    return current_acked_ && !aborted_;
}

void DemoEngine::emit_turn(const DemoTurn& turn, const std::string& spoken, double& clock) {
    pipeline::TranscriptSegment seg{turn.speaker, spoken, true, clock, clock + spoken_duration(spoken)};
    clock = seg.end_time + 0.5;
    {
        std::lock_guard lock(mu_);
        current_turn_ = turn.turn_id;
        current_acked_ = false;
    }
    ++emitted_;
    emit_(gateway::to_message(seg));

    std::string audio;
    try {
        audio = tts_.audio_b64(spoken, turn.voice_id);
    } catch (const Error& e) {
        emit_(gateway::ErrorMessage{"tts_error", e.what()});
    }
    emit_(gateway::AudioPlay{turn.turn_id, std::move(audio), std::string(pipeline::to_string(turn.speaker))});

    if (!turn.triggers_pipeline) {
        pipeline_.observe(seg);
        return;
    }
    auto outcome = pipeline_.process_final_segment(seg);
    if (outcome.card) emit_(*outcome.card);
    if (outcome.error) emit_(gateway::ErrorMessage{outcome.error->code, outcome.error->message});
    last_answer_ = outcome.card ? outcome.card->answer : std::string();
    last_question_ = outcome.card ? outcome.card->question : spoken;
}

DemoResult DemoEngine::run() {
    emit_(gateway::Status{"demo_started", ""});
    double clock = 0.0;
    for (const auto& turn : script_) {
        {
            std::lock_guard lock(mu_);
            if (aborted_) return DemoResult::disconnected;
        }
        std::string spoken = turn.text;
        if (turn.dynamic) {
            const std::string user = "Customer question: " + last_question_ + "\nSuggested answer: " + last_answer_ +
                                     "\nSay this naturally to the customer in two or three sentences.";
            try {
                spoken = text::trim(pipeline_.llm()
                                        .complete({std::string(roles::kRepVoice) +
                                                       "\nYou are the sales representative speaking on a live call.",
                                                   user, false, 200})
                                        .text);
            } catch (const Error& e) {
                emit_(gateway::ErrorMessage{"provider_error", e.what()});
                spoken.clear();
            }
            if (spoken.empty()) spoken = "Let me check that for you and follow up right after this call.";
        }
        emit_turn(turn, spoken, clock);
        if (!wait_for_ack(turn.turn_id)) {
            {
                std::lock_guard lock(mu_);
                if (aborted_) return DemoResult::disconnected;
                current_turn_ = 0;
            }
            emit_(gateway::ErrorMessage{"demo_timeout", "no demo_next for turn " + std::to_string(turn.turn_id)});
            emit_(gateway::Status{"demo_ended", "aborted"});
            return DemoResult::timed_out;
        }
    }
    {
        std::lock_guard lock(mu_);
        current_turn_ = 0;
    }
    emit_(gateway::Status{"demo_ended", ""});
    return DemoResult::completed;
}

}  // namespace salesassist::demo
