// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "salesassist/providers/config.hpp"
#include "salesassist/providers/http.hpp"

namespace salesassist::providers {

/// One second of silent MPEG-2 Layer III audio (16 kHz mono, 8 kbps).
const std::string& silent_mp3();

class TtsClient {
public:
    virtual ~TtsClient() = default;
    /// Returns MP3 bytes.
    virtual std::string synthesize(const std::string& text, const std::string& voice_id) = 0;
};

class MockTts final : public TtsClient {
public:
    std::string synthesize(const std::string& text, const std::string& voice_id) override;
};

class ElevenLabsTts final : public TtsClient {
public:
    ElevenLabsTts(std::string api_key, std::shared_ptr<HttpTransport> transport);
    std::string synthesize(const std::string& text, const std::string& voice_id) override;

private:
    std::string api_key_;
    std::shared_ptr<HttpTransport> transport_;
};

/// Throws NotConfiguredError when the provider is disabled.
std::unique_ptr<TtsClient> make_tts_client(const ProviderConfig& cfg, std::shared_ptr<HttpTransport> transport = {});

std::string tts_synthesize(const ProviderConfig& cfg, const std::string& text, const std::string& voice_id);

}  // namespace salesassist::providers
