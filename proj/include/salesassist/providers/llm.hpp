// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "salesassist/providers/config.hpp"
#include "salesassist/providers/http.hpp"

namespace salesassist::providers {

struct LlmRequest {
    std::string system_prompt;
    std::string user_prompt;
    bool expects_json = false;
    int max_output_tokens = 512;
};

struct LlmResponse {
    std::string text;
    double latency = 0.0;  // seconds
    std::string provider_id;
    std::string model_id;
};

/// Every system prompt starts with one of these role lines; the mock uses
/// them to pick its rule set and its delay.
namespace roles {
inline constexpr std::string_view kDetector = "ROLE: insurance question detector";
inline constexpr std::string_view kSqlWriter = "ROLE: insurance SQL writer";
inline constexpr std::string_view kAnswerer = "ROLE: insurance answer writer";
inline constexpr std::string_view kRepVoice = "ROLE: sales representative voice";
}  // namespace roles

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual LlmResponse complete(const LlmRequest& request) = 0;
    virtual std::string provider_id() const = 0;
    virtual std::string model_id() const = 0;
};

/// Deterministic reply of the offline rule set; a pure function of the two
/// prompts. Exposed so wire-level fakes can reuse it.
std::string mock_reply(std::string_view system_prompt, std::string_view user_prompt);

/// Rule-based offline model. Sleeps for the configured stage delay.
class MockLlm final : public LlmClient {
public:
    explicit MockLlm(MockDelays delays = {}) : delays_(delays) {}
    LlmResponse complete(const LlmRequest& request) override;
    std::string provider_id() const override { return "mock"; }
    std::string model_id() const override { return "mock-rules-v1"; }

private:
    MockDelays delays_;
};

/// Chat-completion adapter for OpenAI, Anthropic and Gemini over HTTPS.
class HttpLlm final : public LlmClient {
public:
    HttpLlm(LlmProvider provider, std::string model, std::string api_key, std::shared_ptr<HttpTransport> transport,
            double timeout_s = 15.0);
    LlmResponse complete(const LlmRequest& request) override;
    std::string provider_id() const override { return std::string(to_string(provider_)); }
    std::string model_id() const override { return model_; }

    /// Provider wire format, exposed for tests.
    HttpRequest build_request(const LlmRequest& request) const;
    std::string parse_response(const std::string& body) const;

private:
    LlmProvider provider_;
    std::string model_;
    std::string api_key_;
    std::shared_ptr<HttpTransport> transport_;
    double timeout_s_;
};

/// Picks the adapter named by `cfg.llm_provider`. A null transport means the
/// real HTTPS client.
std::unique_ptr<LlmClient> make_llm_client(const ProviderConfig& cfg, std::shared_ptr<HttpTransport> transport = {});

LlmResponse llm_complete(const ProviderConfig& cfg, const LlmRequest& request);

}  // namespace salesassist::providers
