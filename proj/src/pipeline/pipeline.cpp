// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include <fmt/format.h>

#include "salesassist/errors.hpp"
#include "salesassist/pipeline/sql_guard.hpp"
#include "salesassist/text.hpp"

namespace salesassist::pipeline {

using nlohmann::json;
using providers::LlmRequest;
namespace roles = providers::roles;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr std::string_view kNotFound = "not found in the product database";

std::string detector_system() {
    return std::string(roles::kDetector) +
           "\nYou monitor a live insurance sales call. Decide whether the customer's latest turn asks a question "
           "about an insurance product. Reply with only a JSON object with keys: detected (boolean), question "
           "(the question text, or an empty string), category (one of coverage, pricing, policy_terms, claims, "
           "general) and confidence (number between 0 and 1).";
}

std::string sql_system() {
    return std::string(roles::kSqlWriter) +
           "\nWrite exactly one read-only SQLite SELECT statement that retrieves the data needed to answer the "
           "question. Never modify data. Reply with the SQL only, no explanation.";
}

std::string answer_system() {
    return std::string(roles::kAnswerer) +
           "\nYou help an insurance sales representative during a live call. Using only the retrieved data, write "
           "a concise, salesperson-friendly answer of 2 to 4 sentences. Include specific numbers, use natural "
           "language, and note any gaps. If the data does not contain the answer, say the information was " +
           std::string(kNotFound) + ".";
}

std::string strip_fences(std::string_view reply) {
    std::string s = text::trim(reply);
    if (s.rfind("```", 0) == 0) {
        const auto nl = s.find('\n');
        s = nl == std::string::npos ? std::string() : s.substr(nl + 1);
        if (const auto end = s.rfind("```"); end != std::string::npos) s.resize(end);
    }
    return text::trim(s);
}

std::string row_key(const RetrievedRow& r) {
    if (r.payload.is_object() && r.payload.contains("id")) return r.table + "#" + r.payload["id"].dump();
    return r.table + "#" + r.payload.dump();
}

}  // namespace

std::string_view to_string(QuestionCategory c) {
    switch (c) {
        case QuestionCategory::coverage: return "coverage";
        case QuestionCategory::pricing: return "pricing";
        case QuestionCategory::policy_terms: return "policy_terms";
        case QuestionCategory::claims: return "claims";
        case QuestionCategory::general: return "general";
    }
    return "general";
}

QuestionCategory parse_category(std::string_view s) {
    std::string v = text::to_lower(text::trim(s));
    std::replace(v.begin(), v.end(), ' ', '_');
    std::replace(v.begin(), v.end(), '-', '_');
    if (v == "coverage") return QuestionCategory::coverage;
    if (v == "pricing") return QuestionCategory::pricing;
    if (v == "policy_terms") return QuestionCategory::policy_terms;
    if (v == "claims") return QuestionCategory::claims;
    return QuestionCategory::general;
}

std::string_view to_string(RowSource s) {
    return s == RowSource::faq_match ? "faq_match" : "generated_sql";
}

std::optional<DetectedQuestion> parse_detection(std::string_view reply) {
    const std::string s = strip_fences(reply);
    const auto open = s.find('{');
    const auto close = s.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
    const auto j = json::parse(s.substr(open, close - open + 1), nullptr, false);
    if (!j.is_object() || !j.contains("detected") || !j["detected"].is_boolean()) return std::nullopt;

    DetectedQuestion d;
    d.detected = j["detected"].get<bool>();
    if (j.contains("question") && j["question"].is_string()) d.question = text::trim(j["question"].get<std::string>());
    if (j.contains("category") && j["category"].is_string()) d.category = parse_category(j["category"].get<std::string>());
    if (j.contains("confidence") && j["confidence"].is_number()) {
        d.confidence = std::clamp(j["confidence"].get<double>(), 0.0, 1.0);
    }
    if (!d.detected || d.question.empty()) {
        d.detected = false;
        d.question.clear();
    }
    return d;
}

DetectedQuestion detect_question(providers::LlmClient& llm, const std::string& context) {
    if (text::trim(context).empty()) throw ContractViolation("detection needs a non-empty context");
    const std::string user = "Recent conversation (oldest first):\n" + context +
                             "\n\nDoes the customer's latest turn ask an insurance product question?";
    auto reply = llm.complete(LlmRequest{detector_system(), user, true, 200});
    if (auto d = parse_detection(reply.text)) return *d;

    const std::string repair = user + "\n\nYour previous reply was not a valid JSON object:\n" + reply.text +
                               "\nReply again with only the JSON object.";
    reply = llm.complete(LlmRequest{detector_system(), repair, true, 200});
    if (auto d = parse_detection(reply.text)) return *d;

    DetectedQuestion fallback;
    fallback.warning = "detector reply was not valid JSON after one repair attempt";
    return fallback;
}

std::string extract_sql(std::string_view reply) {
    return strip_fences(reply);
}

std::string primary_table(std::string_view sql) {
    const auto words = sql_words(sql);
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
        if (words[i] == "FROM" && words[i + 1] != "SELECT") return text::to_lower(words[i + 1]);
    }
    return "query";
}

RetrievalResult retrieve(providers::LlmClient& llm, const kb::KnowledgeBase& kb, const DetectedQuestion& question) {
    if (!question.detected) throw ContractViolation("retrieve needs a detected question");
    RetrievalResult result;
    std::vector<RetrievedRow> faq_rows, sql_rows;

    std::optional<std::string> faq_failure;
    auto t0 = Clock::now();
    try {
        for (const auto& hit : kb.faq_keyword_search(question.question, kFaqTopK)) {
            kb::Row payload;
            payload["id"] = hit.faq.id;
            payload["product_id"] = hit.faq.product_id;
            payload["question"] = hit.faq.question;
            payload["answer"] = hit.faq.answer;
            faq_rows.push_back(RetrievedRow{RowSource::faq_match, "faqs", std::move(payload)});
        }
    } catch (const Error& e) {
        faq_failure = e.what();
    }
    result.strategy_timings["faq_match"] = seconds_since(t0);

    bool sql_hard_failure = false;
    t0 = Clock::now();
    try {
        std::string user = "Database schema:\n" + kb::schema_description() + "\nKnown products:\n";
        for (const auto& name : kb.product_names()) user += "- " + name + "\n";
        user += "\nQuestion: " + question.question + "\nCategory: " + std::string(to_string(question.category)) +
                "\nReturn at most 10 rows.";
        const auto reply = llm.complete(LlmRequest{sql_system(), user, false, 300});
        const std::string sql = extract_sql(reply.text);
        result.generated_sql = sql;
        if (auto verdict = validate_readonly_sql(sql); !verdict) {
            result.sql_rejection = verdict.reason;
        } else {
            const std::string table = primary_table(sql);
            for (auto& row : kb.execute_readonly_sql(sql)) {
                sql_rows.push_back(RetrievedRow{RowSource::generated_sql, table, std::move(row)});
            }
        }
    } catch (const StorageError& e) {
        sql_hard_failure = true;
        result.sql_rejection = e.what();
    } catch (const Error& e) {
        result.sql_rejection = e.what();
    }
    result.strategy_timings["text_to_sql"] = seconds_since(t0);

    if (faq_failure && sql_hard_failure) throw StorageError(*faq_failure);

    std::set<std::string> seen;
    for (auto* group : {&faq_rows, &sql_rows}) {
        for (auto& row : *group) {
            if (result.rows.size() >= kMergedRowCap) break;
            if (seen.insert(row_key(row)).second) result.rows.push_back(std::move(row));
        }
    }
    return result;
}

std::string rows_json(const std::vector<RetrievedRow>& rows) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        arr.push_back({{"source", to_string(r.source)}, {"table", r.table}, {"payload", r.payload}});
    }
    return arr.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string generate_answer(providers::LlmClient& llm, const DetectedQuestion& question,
                            const RetrievalResult& retrieval) {
    if (!question.detected) throw ContractViolation("generate_answer needs a detected question");
    const std::string user = "Question: " + question.question + "\nRetrieved data (JSON):\n" +
                             rows_json(retrieval.rows) + "\nWrite the answer for the sales representative.";
    auto reply = llm.complete(LlmRequest{answer_system(), user, false, 300});
    std::string answer = text::trim(reply.text);
    if (retrieval.rows.empty() && !text::contains_icase(answer, kNotFound)) {
        answer = "That information was " + std::string(kNotFound) + "." + (answer.empty() ? "" : " " + answer);
    }
    if (answer.empty()) throw ProviderProtocolError("answer model returned an empty reply");
    return answer;
}

// ---------------------------------------------------------------------------

Pipeline::Pipeline(std::shared_ptr<providers::LlmClient> llm, std::shared_ptr<const kb::KnowledgeBase> kb,
                   PipelineOptions options)
    : llm_(std::move(llm)), kb_(std::move(kb)), options_(std::move(options)) {
    if (!llm_ || !kb_) throw ContractViolation("pipeline needs an LLM client and a knowledge base");
}

void Pipeline::observe(const TranscriptSegment& segment) {
    buffer_.append(segment);
}

ProcessOutcome Pipeline::process_final_segment(const TranscriptSegment& segment) {
    return process_final_segments({segment});
}

ProcessOutcome Pipeline::process_final_segments(const std::vector<TranscriptSegment>& segments) {
    ProcessOutcome out;
    bool trigger = false;
    for (const auto& s : segments) {
        buffer_.append(s);
        trigger = trigger || s.speaker == Speaker::customer;
    }
    if (!trigger) return out;

    const auto start = Clock::now();
    try {
        auto t = Clock::now();
        auto detection = detect_question(*llm_, buffer_.context());
        const double d = seconds_since(t);
        out.detection = detection;
        if (!detection.detected) return out;
        if (options_.dedup && buffer_.is_duplicate(detection.question, buffer_.now())) {
            out.duplicate = true;
            return out;
        }

        t = Clock::now();
        auto retrieval = retrieve(*llm_, *kb_, detection);
        const double r = seconds_since(t);

        t = Clock::now();
        auto answer = generate_answer(*llm_, detection, retrieval);
        const double g = seconds_since(t);

        SuggestionCard card;
        card.card_id = fmt::format("{}-{}", options_.card_prefix, next_card_++);
        card.question = detection.question;
        card.answer = std::move(answer);
        card.category = std::string(to_string(detection.category));
        card.confidence = detection.confidence;
        std::vector<std::string> sources;
        for (const auto& row : retrieval.rows) {
            auto label = fmt::format("{} ({})", row.table, to_string(row.source));
            if (std::find(sources.begin(), sources.end(), label) == sources.end()) sources.push_back(label);
        }
        card.source = sources.empty() ? "no matching data" : fmt::format("{}", fmt::join(sources, ", "));
        card.timings = StageTimings{d, r, g, seconds_since(start)};
        out.card = std::move(card);
        out.retrieval = std::move(retrieval);
    } catch (const std::exception& e) {
        out.error = classify_error(e);
    }
    return out;
}

PipelineError classify_error(const std::exception& e) {
    if (dynamic_cast<const ProviderAuthError*>(&e)) return {"provider_auth", e.what()};
    if (dynamic_cast<const TimeoutError*>(&e)) return {"provider_timeout", e.what()};
    if (dynamic_cast<const ConnectivityError*>(&e) || dynamic_cast<const ProviderProtocolError*>(&e)) {
        return {"provider_error", e.what()};
    }
    if (dynamic_cast<const StorageError*>(&e) || dynamic_cast<const QueryError*>(&e)) return {"kb_error", e.what()};
    return {"pipeline_error", e.what()};
}

}  // namespace salesassist::pipeline
