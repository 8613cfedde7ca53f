// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/providers/tts.hpp"

#include <nlohmann/json.hpp>

#include "salesassist/errors.hpp"

namespace salesassist::providers {

const std::string& silent_mp3() {
    // MPEG-2 Layer III, 8 kbps, 16 kHz, mono: 36-byte frames of 576 samples.
    static const std::string data = [] {
        constexpr int kFrames = 28;
        constexpr int kFrameBytes = 36;
        std::string out;
        out.reserve(kFrames * kFrameBytes);
        for (int i = 0; i < kFrames; ++i) {
            out += std::string("\xFF\xF3\x18\xC0", 4);
            out.append(kFrameBytes - 4, '\0');
        }
        return out;
    }();
    return data;
}

std::string MockTts::synthesize(const std::string& text, const std::string&) {
    if (text.empty()) throw ContractViolation("nothing to synthesize");
    return silent_mp3();
}

ElevenLabsTts::ElevenLabsTts(std::string api_key, std::shared_ptr<HttpTransport> transport)
    : api_key_(std::move(api_key)), transport_(std::move(transport)) {
    if (!transport_) transport_ = make_https_transport();
}

std::string ElevenLabsTts::synthesize(const std::string& text, const std::string& voice_id) {
    if (text.empty()) throw ContractViolation("nothing to synthesize");
    HttpRequest req;
    req.url = "https://api.elevenlabs.io/v1/text-to-speech/" + voice_id + "?output_format=mp3_44100_128";
    req.headers = {{"xi-api-key", api_key_}, {"Accept", "audio/mpeg"}};
    req.body = nlohmann::json{{"text", text}, {"model_id", "eleven_turbo_v2"}}.dump();

    HttpResponse resp;
    for (int attempt = 0;; ++attempt) {
        try {
            resp = transport_->post(req);
        } catch (const ConnectivityError&) {
            if (attempt == 0) continue;
            throw;
        }
        if (resp.status >= 500 && attempt == 0) continue;
        break;
    }
    if (resp.status == 401 || resp.status == 403) throw ProviderAuthError("elevenlabs rejected the credentials");
    if (resp.status != 200) throw ProviderProtocolError("elevenlabs returned HTTP " + std::to_string(resp.status));
    if (resp.body.empty()) throw ProviderProtocolError("elevenlabs returned no audio");
    return resp.body;
}

std::unique_ptr<TtsClient> make_tts_client(const ProviderConfig& cfg, std::shared_ptr<HttpTransport> transport) {
    switch (cfg.tts_provider) {
        case TtsProvider::mock: return std::make_unique<MockTts>();
        case TtsProvider::elevenlabs:
            return std::make_unique<ElevenLabsTts>(require_credential(cfg, credential_key(cfg.tts_provider)),
                                                   std::move(transport));
        case TtsProvider::disabled: break;
    }
    throw NotConfiguredError("text-to-speech is disabled");
}

std::string tts_synthesize(const ProviderConfig& cfg, const std::string& text, const std::string& voice_id) {
    return make_tts_client(cfg)->synthesize(text, voice_id);
}

}  // namespace salesassist::providers
