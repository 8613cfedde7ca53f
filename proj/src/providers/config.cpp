// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/providers/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "salesassist/errors.hpp"
#include "salesassist/text.hpp"

namespace salesassist::providers {

std::string_view to_string(LlmProvider p) {
    switch (p) {
        case LlmProvider::openai: return "openai";
        case LlmProvider::anthropic: return "anthropic";
        case LlmProvider::gemini: return "gemini";
        case LlmProvider::mock: return "mock";
    }
    return "mock";
}

std::string_view to_string(SttProvider p) {
    return p == SttProvider::deepgram ? "deepgram" : "mock";
}

std::string_view to_string(TtsProvider p) {
    switch (p) {
        case TtsProvider::elevenlabs: return "elevenlabs";
        case TtsProvider::mock: return "mock";
        case TtsProvider::disabled: return "disabled";
    }
    return "disabled";
}

LlmProvider parse_llm_provider(std::string_view s) {
    const auto v = text::to_lower(s);
    if (v == "openai") return LlmProvider::openai;
    if (v == "anthropic") return LlmProvider::anthropic;
    if (v == "gemini" || v == "google") return LlmProvider::gemini;
    if (v == "mock") return LlmProvider::mock;
    throw ValidationError("unknown LLM provider '" + std::string(s) + "'");
}

SttProvider parse_stt_provider(std::string_view s) {
    const auto v = text::to_lower(s);
    if (v == "deepgram") return SttProvider::deepgram;
    if (v == "mock") return SttProvider::mock;
    throw ValidationError("unknown STT provider '" + std::string(s) + "'");
}

TtsProvider parse_tts_provider(std::string_view s) {
    const auto v = text::to_lower(s);
    if (v == "elevenlabs") return TtsProvider::elevenlabs;
    if (v == "mock") return TtsProvider::mock;
    if (v == "disabled" || v == "none" || v == "off") return TtsProvider::disabled;
    throw ValidationError("unknown TTS provider '" + std::string(s) + "'");
}

std::vector<ScriptedUtterance> parse_stt_script(std::string_view json_text) {
    std::vector<ScriptedUtterance> out;
    try {
        auto doc = nlohmann::json::parse(json_text);
        if (!doc.is_array()) throw ValidationError("STT script must be a JSON array");
        for (const auto& item : doc) {
            ScriptedUtterance u;
            u.speaker = item.value("speaker", std::string("customer"));
            u.text = item.at("text").get<std::string>();
            u.start_time = item.at("start_time").get<double>();
            u.end_time = item.at("end_time").get<double>();
            if (item.contains("interim_prefixes")) {
                u.interim_prefixes = item.at("interim_prefixes").get<std::vector<std::string>>();
            }
            if (u.end_time < u.start_time) throw ValidationError("STT script utterance ends before it starts");
            out.push_back(std::move(u));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid STT script: ") + e.what());
    }
    return out;
}

std::vector<ScriptedUtterance> load_stt_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StorageError("cannot read STT script " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_stt_script(ss.str());
}

ProviderConfig mock_config(MockDelays delays) {
    ProviderConfig cfg;
    cfg.mock_delays = delays;
    return cfg;
}

std::string credential_key(LlmProvider p) {
    switch (p) {
        case LlmProvider::openai: return "OPENAI_API_KEY";
        case LlmProvider::anthropic: return "ANTHROPIC_API_KEY";
        case LlmProvider::gemini: return "GEMINI_API_KEY";
        case LlmProvider::mock: return {};
    }
    return {};
}

std::string credential_key(SttProvider p) {
    return p == SttProvider::deepgram ? "DEEPGRAM_API_KEY" : std::string();
}

std::string credential_key(TtsProvider p) {
    return p == TtsProvider::elevenlabs ? "ELEVENLABS_API_KEY" : std::string();
}

const std::string& require_credential(const ProviderConfig& cfg, const std::string& key) {
    auto it = cfg.credentials.find(key);
    if (it == cfg.credentials.end() || it->second.empty()) {
        throw ProviderAuthError("missing credential " + key);
    }
    return it->second;
}

std::string default_model(LlmProvider p) {
    switch (p) {
        case LlmProvider::openai: return "gpt-4o";
        case LlmProvider::anthropic: return "claude-3-5-sonnet-latest";
        case LlmProvider::gemini: return "gemini-1.5-flash";
        case LlmProvider::mock: return "mock-rules-v1";
    }
    return {};
}

std::string effective_model(const ProviderConfig& cfg) {
    return cfg.llm_model.empty() ? default_model(cfg.llm_provider) : cfg.llm_model;
}

ProviderConfig config_from_env(const std::function<const char*(const char*)>& getenv_fn) {
    auto get = [&](const char* k) -> std::string {
        const char* v = getenv_fn(k);
        return v ? std::string(v) : std::string();
    };
    ProviderConfig cfg;
    if (auto v = get("LLM_PROVIDER"); !v.empty()) cfg.llm_provider = parse_llm_provider(v);
    cfg.llm_model = get("LLM_MODEL");
    if (auto v = get("STT_PROVIDER"); !v.empty()) cfg.stt_provider = parse_stt_provider(v);
    if (auto v = get("TTS_PROVIDER"); !v.empty()) cfg.tts_provider = parse_tts_provider(v);
    for (const char* key :
         {"DEEPGRAM_API_KEY", "OPENAI_API_KEY", "ANTHROPIC_API_KEY", "GEMINI_API_KEY", "ELEVENLABS_API_KEY"}) {
        if (auto v = get(key); !v.empty()) cfg.credentials[key] = v;
    }
    return cfg;
}

ProviderConfig config_from_env() {
    return config_from_env([](const char* k) { return std::getenv(k); });
}

ProviderConfig resolve_providers(std::string_view mode, MockDelays delays,
                                 const std::function<const char*(const char*)>& getenv_fn) {
    if (mode == "mock") return mock_config(delays);
    if (mode != "live") throw ValidationError("providers must be 'mock' or 'live', got '" + std::string(mode) + "'");
    auto cfg = config_from_env(getenv_fn);
    auto unset = [&](const char* k) {
        const char* v = getenv_fn(k);
        return !v || !*v;
    };
    if (unset("LLM_PROVIDER")) cfg.llm_provider = LlmProvider::openai;
    if (unset("STT_PROVIDER")) cfg.stt_provider = SttProvider::deepgram;
    if (unset("TTS_PROVIDER")) cfg.tts_provider = TtsProvider::elevenlabs;
    return cfg;
}

ProviderConfig resolve_providers(std::string_view mode, MockDelays delays) {
    return resolve_providers(mode, delays, [](const char* k) { return std::getenv(k); });
}

MockDelays parse_delays(std::string_view text) {
    MockDelays d;
    double* slots[] = {&d.detection, &d.retrieval, &d.generation};
    std::size_t i = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto piece = std::string(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (i >= 3) throw ValidationError("delays take three values: detection,retrieval,generation");
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(piece, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != piece.size() || !(v >= 0)) throw ValidationError("invalid delay '" + piece + "'");
        *slots[i++] = v;
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (i != 3) throw ValidationError("delays take three values: detection,retrieval,generation");
    return d;
}

nlohmann::json public_view(const ProviderConfig& cfg) {
    nlohmann::json creds = nlohmann::json::object();
    for (const auto& [k, v] : cfg.credentials) creds[k] = !v.empty();
    nlohmann::json j{{"llm_provider", to_string(cfg.llm_provider)},
                     {"llm_model", effective_model(cfg)},
                     {"stt_provider", to_string(cfg.stt_provider)},
                     {"tts_provider", to_string(cfg.tts_provider)},
                     {"credentials_present", creds}};
    if (cfg.mock_delays) {
        j["mock_delays"] = {{"detection", cfg.mock_delays->detection},
                            {"retrieval", cfg.mock_delays->retrieval},
                            {"generation", cfg.mock_delays->generation}};
    }
    return j;
}

}  // namespace salesassist::providers
