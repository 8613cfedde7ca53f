// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace salesassist::providers {

enum class LlmProvider { openai, anthropic, gemini, mock };
enum class SttProvider { deepgram, mock };
enum class TtsProvider { elevenlabs, mock, disabled };

std::string_view to_string(LlmProvider p);
std::string_view to_string(SttProvider p);
std::string_view to_string(TtsProvider p);
LlmProvider parse_llm_provider(std::string_view s);
SttProvider parse_stt_provider(std::string_view s);
TtsProvider parse_tts_provider(std::string_view s);

/// Artificial per-stage latency for the mock LLM, in seconds.
struct MockDelays {
    double detection = 0.0;
    double retrieval = 0.0;
    double generation = 0.0;
};

/// One line of a mock STT script.
struct ScriptedUtterance {
    std::string speaker;
    std::string text;
    double start_time = 0.0;
    double end_time = 0.0;
    std::vector<std::string> interim_prefixes;
};

std::vector<ScriptedUtterance> parse_stt_script(std::string_view json_text);
std::vector<ScriptedUtterance> load_stt_script(const std::string& path);

struct ProviderConfig {
    LlmProvider llm_provider = LlmProvider::mock;
    std::string llm_model;  // empty -> provider default
    SttProvider stt_provider = SttProvider::mock;
    TtsProvider tts_provider = TtsProvider::mock;
    std::map<std::string, std::string> credentials;  // env-style key name -> secret
    std::optional<MockDelays> mock_delays;

    // mock STT: script and playback speed (0 = emit everything on first chunk)
    std::vector<ScriptedUtterance> stt_script;
    double mock_stt_speed = 1.0;

    /// Live HTTP timeout.
    double llm_timeout_s = 15.0;
};

/// All-mock configuration, optionally with stage delays.
ProviderConfig mock_config(MockDelays delays = {});

/// Reads LLM_PROVIDER, LLM_MODEL, TTS_PROVIDER, STT_PROVIDER and the
/// *_API_KEY variables through `getenv` (injectable for tests).
ProviderConfig config_from_env(const std::function<const char*(const char*)>& getenv_fn);
ProviderConfig config_from_env();

/// "mock" -> mock_config(delays). "live" -> config_from_env with unset
/// providers defaulting to openai / deepgram / elevenlabs.
ProviderConfig resolve_providers(std::string_view mode, MockDelays delays,
                                 const std::function<const char*(const char*)>& getenv_fn);
ProviderConfig resolve_providers(std::string_view mode, MockDelays delays = {});

/// "d,r,g" in seconds. Throws ValidationError.
MockDelays parse_delays(std::string_view text);

/// Env-style credential key that `provider` needs, e.g. "OPENAI_API_KEY".
std::string credential_key(LlmProvider p);
std::string credential_key(SttProvider p);
std::string credential_key(TtsProvider p);

/// Returns the credential or throws ProviderAuthError when missing/empty.
const std::string& require_credential(const ProviderConfig& cfg, const std::string& key);

std::string default_model(LlmProvider p);
std::string effective_model(const ProviderConfig& cfg);

/// Non-secret echo of a config (credential values replaced by presence flags).
nlohmann::json public_view(const ProviderConfig& cfg);

}  // namespace salesassist::providers
