// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "salesassist/providers/config.hpp"

namespace salesassist::providers {

struct SttEvent {
    std::string text;
    bool is_final = false;
    double start_time = 0.0;  // seconds since stream open
    double end_time = 0.0;
    std::optional<std::string> channel_speaker;

    bool operator==(const SttEvent&) const = default;
};

/// 16 kHz, 16-bit signed little-endian mono PCM is the only accepted format.
struct AudioFormat {
    int sample_rate = 16000;
    int bits_per_sample = 16;
    int channels = 1;
    bool little_endian = true;
};

using SttCallback = std::function<void(const SttEvent&)>;

inline constexpr int kUtteranceEndMs = 1500;

class SttSession {
public:
    virtual ~SttSession() = default;
    /// Throws ClosedSessionError after close().
    virtual void push_audio(std::span<const std::uint8_t> chunk) = 0;
    virtual void close() = 0;
    virtual bool is_open() const = 0;
};

/// Mock session: ignores audio content. Each push advances the script clock
/// by the chunk's playback duration times `speed` (speed 0 releases
/// everything on the first chunk) and delivers every due event through the
/// callback, interims before their final.
class MockSttSession final : public SttSession {
public:
    MockSttSession(std::vector<ScriptedUtterance> script, double speed, SttCallback cb);
    void push_audio(std::span<const std::uint8_t> chunk) override;
    void close() override { open_ = false; }
    bool is_open() const override { return open_; }

    /// The full event sequence the script produces, in emission order.
    static std::vector<SttEvent> expand(const std::vector<ScriptedUtterance>& script);

private:
    std::vector<SttEvent> events_;
    std::size_t next_ = 0;
    double speed_;
    SttCallback cb_;
    double clock_ = 0.0;
    bool open_ = true;
};

/// Query string used for the live streaming endpoint.
std::string deepgram_listen_target(const AudioFormat& fmt);

/// Converts one streaming JSON message to an event; nullopt for messages
/// that carry no transcript (metadata, UtteranceEnd, empty results).
std::optional<SttEvent> parse_deepgram_message(const nlohmann::json& msg);

/// Opens a session for `cfg.stt_provider`. Throws ContractViolation for an
/// unsupported format, ProviderAuthError for a missing or refused key and
/// ConnectivityError when the service cannot be reached.
std::unique_ptr<SttSession> stt_open_stream(const ProviderConfig& cfg, const AudioFormat& fmt, SttCallback cb);

}  // namespace salesassist::providers
