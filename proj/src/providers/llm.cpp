// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/providers/llm.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "salesassist/errors.hpp"
#include "salesassist/text.hpp"

namespace salesassist::providers {

using nlohmann::json;

namespace {

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

std::vector<std::string> lines_of(std::string_view s) {
    std::vector<std::string> out;
    std::string line;
    std::istringstream in{std::string(s)};
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

// Value after "<key>" on the first line starting with it.
std::string field(std::string_view prompt, std::string_view key) {
    for (const auto& line : lines_of(prompt)) {
        if (starts_with(line, key)) return text::trim(std::string_view(line).substr(key.size()));
    }
    return {};
}

std::vector<std::string> sentences(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < s.size(); ++i) {
        cur.push_back(s[i]);
        const bool end = s[i] == '?' || s[i] == '!' || s[i] == '.';
        if (end && (i + 1 == s.size() || s[i + 1] == ' ')) {
            if (auto t = text::trim(cur); !t.empty()) out.push_back(t);
            cur.clear();
        }
    }
    if (auto t = text::trim(cur); !t.empty()) out.push_back(t);
    return out;
}

bool begins_interrogative(std::string_view s) {
    static const std::array<std::string_view, 9> kWords = {"what", "how", "is",    "does", "can",
                                                           "when", "who", "which", "why"};
    std::string first;
    for (char c : s) {
        if (!std::isalpha(static_cast<unsigned char>(c))) break;
        first.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    for (auto w : kWords) {
        if (first == w) return true;
    }
    return false;
}

std::string mock_category(std::string_view question) {
    const auto q = text::to_lower(question);
    auto any = [&q](std::initializer_list<std::string_view> words) {
        for (auto w : words) {
            if (q.find(w) != std::string::npos) return true;
        }
        return false;
    };
    if (any({"deductible", "coverage", "limit", "out-of-pocket"})) return "coverage";
    if (any({"premium", "cost", "price", "tier"})) return "pricing";
    if (any({"renew", "cancel", "term"})) return "policy_terms";
    if (any({"claim"})) return "claims";
    return "general";
}

std::string mock_detect(std::string_view user_prompt) {
    std::string turn;
    for (const auto& line : lines_of(user_prompt)) {
        if (starts_with(line, "Customer:")) turn = text::trim(std::string_view(line).substr(9));
    }
    json out{{"detected", false}, {"question", ""}, {"category", "general"}, {"confidence", 0.90}};
    if (turn.empty()) return out.dump();

    std::string question;
    const auto parts = sentences(turn);
    for (const auto& s : parts) {
        if (s.find('?') != std::string::npos) question = s;
    }
    if (question.empty() && begins_interrogative(turn) && !parts.empty()) question = parts.front();
    if (question.empty()) return out.dump();

    out["detected"] = true;
    out["question"] = question;
    out["category"] = mock_category(question);
    return out.dump();
}

std::string sql_quote(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        out.push_back(c);
        if (c == '\'') out.push_back('\'');
    }
    out.push_back('\'');
    return out;
}

std::string mock_sql(std::string_view user_prompt) {
    const std::string question = field(user_prompt, "Question:");
    const std::string q_lower = text::to_lower(question);

    std::vector<std::string> products;
    bool in_products = false;
    for (const auto& line : lines_of(user_prompt)) {
        if (starts_with(line, "Known products:")) {
            in_products = true;
            continue;
        }
        if (in_products) {
            if (!starts_with(line, "- ")) {
                in_products = false;
                continue;
            }
            std::string name = text::trim(std::string_view(line).substr(2));
            if (!name.empty() && q_lower.find(text::to_lower(name)) != std::string::npos) products.push_back(name);
        }
    }

    std::vector<std::string> name_words;
    for (const auto& p : products) {
        for (auto& w : text::keywords(p)) name_words.push_back(std::move(w));
    }
    std::vector<std::string> topic;
    for (auto& w : text::keywords(question)) {
        if (std::find(name_words.begin(), name_words.end(), w) == name_words.end()) topic.push_back(std::move(w));
    }

    std::string sql =
        "SELECT f.id, p.name AS product, f.question, f.answer FROM faqs f JOIN products p ON p.id = f.product_id WHERE ";
    if (!products.empty()) {
        sql += "p.name IN (";
        for (std::size_t i = 0; i < products.size(); ++i) sql += (i ? ", " : "") + sql_quote(products[i]);
        sql += ")";
        if (!topic.empty()) {
            sql += " AND (";
            for (std::size_t i = 0; i < topic.size(); ++i) {
                sql += (i ? " OR " : "") + std::string("f.question LIKE ") + sql_quote("%" + topic[i] + "%");
            }
            sql += ")";
        }
    } else if (!topic.empty()) {
        sql += "(";
        for (std::size_t i = 0; i < topic.size(); ++i) {
            sql += (i ? " OR " : "") + std::string("p.name LIKE ") + sql_quote("%" + topic[i] + "%");
        }
        sql += ")";
    } else {
        sql += "1 = 0";
    }
    sql += " ORDER BY f.id LIMIT 5";
    return sql;
}

std::string row_summary(const nlohmann::ordered_json& payload) {
    if (payload.contains("answer") && payload["answer"].is_string()) return payload["answer"].get<std::string>();
    std::string out;
    for (const auto& [k, v] : payload.items()) {
        if (k == "id" || k == "product_id") continue;
        if (!out.empty()) out += ", ";
        out += k + ": " + (v.is_string() ? v.get<std::string>() : v.dump());
    }
    return out;
}

std::string mock_answer(std::string_view user_prompt) {
    static constexpr std::string_view kMarker = "Retrieved data (JSON):";
    auto rows = nlohmann::ordered_json::array();
    const auto lines = lines_of(user_prompt);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (starts_with(lines[i], kMarker) && i + 1 < lines.size()) {
            rows = nlohmann::ordered_json::parse(lines[i + 1], nullptr, false);
            break;
        }
    }
    if (!rows.is_array() || rows.empty()) {
        return "That information was not found in the product database. I can follow up with the details after "
               "checking with the underwriting team.";
    }
    const auto& first = rows.front();
    std::string summary = text::trim(row_summary(first.value("payload", nlohmann::ordered_json::object())));
    while (!summary.empty() && summary.back() == '.') summary.pop_back();
    return "Based on " + first.value("table", std::string("the product database")) + ": " + summary + ".";
}

std::string mock_rep(std::string_view user_prompt) {
    std::string answer = field(user_prompt, "Suggested answer:");
    if (answer.empty()) return "Let me check that for you and follow up right after this call.";
    return "Great question. " + answer;
}

double delay_for(std::string_view system_prompt, const MockDelays& d) {
    if (starts_with(system_prompt, roles::kDetector)) return d.detection;
    if (starts_with(system_prompt, roles::kSqlWriter)) return d.retrieval;
    if (starts_with(system_prompt, roles::kAnswerer)) return d.generation;
    return 0.0;
}

}  // namespace

std::string mock_reply(std::string_view system_prompt, std::string_view user_prompt) {
    if (starts_with(system_prompt, roles::kDetector)) return mock_detect(user_prompt);
    if (starts_with(system_prompt, roles::kSqlWriter)) return mock_sql(user_prompt);
    if (starts_with(system_prompt, roles::kAnswerer)) return mock_answer(user_prompt);
    if (starts_with(system_prompt, roles::kRepVoice)) return mock_rep(user_prompt);
    return "OK.";
}

LlmResponse MockLlm::complete(const LlmRequest& request) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string reply = mock_reply(request.system_prompt, request.user_prompt);
    const double delay = delay_for(request.system_prompt, delays_);
    if (delay > 0) {
        const auto until = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    std::chrono::duration<double>(delay));
        std::this_thread::sleep_until(until);
    }
    const double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return LlmResponse{std::move(reply), latency, provider_id(), model_id()};
}

// ---------------------------------------------------------------------------

HttpLlm::HttpLlm(LlmProvider provider, std::string model, std::string api_key,
                 std::shared_ptr<HttpTransport> transport, double timeout_s)
    : provider_(provider),
      model_(std::move(model)),
      api_key_(std::move(api_key)),
      transport_(std::move(transport)),
      timeout_s_(timeout_s) {
    if (provider_ == LlmProvider::mock) throw ContractViolation("HttpLlm needs a live provider");
    if (!transport_) transport_ = make_https_transport();
}

HttpRequest HttpLlm::build_request(const LlmRequest& r) const {
    HttpRequest req;
    req.timeout = std::chrono::milliseconds(static_cast<long>(timeout_s_ * 1000));
    json body;
    switch (provider_) {
        case LlmProvider::openai:
            req.url = "https://api.openai.com/v1/chat/completions";
            req.headers = {{"Authorization", "Bearer " + api_key_}};
            body = {{"model", model_},
                    {"max_tokens", r.max_output_tokens},
                    {"temperature", 0.2},
                    {"messages",
                     json::array({{{"role", "system"}, {"content", r.system_prompt}},
                                  {{"role", "user"}, {"content", r.user_prompt}}})}};
            if (r.expects_json) body["response_format"] = {{"type", "json_object"}};
            break;
        case LlmProvider::anthropic:
            req.url = "https://api.anthropic.com/v1/messages";
            req.headers = {{"x-api-key", api_key_}, {"anthropic-version", "2023-06-01"}};
            body = {{"model", model_},
                    {"max_tokens", r.max_output_tokens},
                    {"temperature", 0.2},
                    {"system", r.system_prompt},
                    {"messages", json::array({{{"role", "user"}, {"content", r.user_prompt}}})}};
            break;
        case LlmProvider::gemini:
            req.url = "https://generativelanguage.googleapis.com/v1beta/models/" + model_ + ":generateContent";
            req.headers = {{"x-goog-api-key", api_key_}};
            body = {{"systemInstruction", {{"parts", json::array({{{"text", r.system_prompt}}})}}},
                    {"contents", json::array({{{"role", "user"}, {"parts", json::array({{{"text", r.user_prompt}}})}}})},
                    {"generationConfig", {{"maxOutputTokens", r.max_output_tokens}, {"temperature", 0.2}}}};
            if (r.expects_json) body["generationConfig"]["responseMimeType"] = "application/json";
            break;
        case LlmProvider::mock:
            break;
    }
    req.body = body.dump();
    return req;
}

std::string HttpLlm::parse_response(const std::string& body) const {
    try {
        const auto j = json::parse(body);
        switch (provider_) {
            case LlmProvider::openai:
                return j.at("choices").at(0).at("message").at("content").get<std::string>();
            case LlmProvider::anthropic:
                for (const auto& block : j.at("content")) {
                    if (block.value("type", "") == "text") return block.at("text").get<std::string>();
                }
                throw ProviderProtocolError("anthropic reply has no text block");
            case LlmProvider::gemini:
                return j.at("candidates").at(0).at("content").at("parts").at(0).at("text").get<std::string>();
            case LlmProvider::mock:
                break;
        }
    } catch (const json::exception& e) {
        throw ProviderProtocolError(std::string(to_string(provider_)) + " reply is malformed: " + e.what());
    }
    throw ProviderProtocolError("unsupported provider");
}

LlmResponse HttpLlm::complete(const LlmRequest& request) {
    const auto req = build_request(request);
    const auto t0 = std::chrono::steady_clock::now();
    HttpResponse resp;
    for (int attempt = 0;; ++attempt) {
        try {
            resp = transport_->post(req);
        } catch (const ConnectivityError&) {
            if (attempt == 0) continue;
            throw;
        }
        const bool transient = resp.status >= 500 || resp.status == 429;
        if (transient && attempt == 0) continue;
        break;
    }
    if (resp.status == 401 || resp.status == 403) {
        throw ProviderAuthError(std::string(to_string(provider_)) + " rejected the credentials (HTTP " +
                                std::to_string(resp.status) + ")");
    }
    if (resp.status < 200 || resp.status >= 300) {
        throw ProviderProtocolError(std::string(to_string(provider_)) + " returned HTTP " +
                                    std::to_string(resp.status));
    }
    std::string text = parse_response(resp.body);
    const double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return LlmResponse{std::move(text), latency, provider_id(), model_};
}

std::unique_ptr<LlmClient> make_llm_client(const ProviderConfig& cfg, std::shared_ptr<HttpTransport> transport) {
    if (cfg.llm_provider == LlmProvider::mock) return std::make_unique<MockLlm>(cfg.mock_delays.value_or(MockDelays{}));
    const auto& key = require_credential(cfg, credential_key(cfg.llm_provider));
    return std::make_unique<HttpLlm>(cfg.llm_provider, effective_model(cfg), key, std::move(transport),
                                     cfg.llm_timeout_s);
}

LlmResponse llm_complete(const ProviderConfig& cfg, const LlmRequest& request) {
    return make_llm_client(cfg)->complete(request);
}

}  // namespace salesassist::providers
