// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "salesassist/kb/knowledge_base.hpp"
#include "salesassist/pipeline/buffer.hpp"
#include "salesassist/providers/llm.hpp"

namespace salesassist::pipeline {

enum class QuestionCategory { coverage, pricing, policy_terms, claims, general };

std::string_view to_string(QuestionCategory c);
/// Lenient: accepts "policy terms" and "policy-terms"; anything unknown maps to general.
QuestionCategory parse_category(std::string_view s);

struct DetectedQuestion {
    bool detected = false;
    std::string question;
    QuestionCategory category = QuestionCategory::general;
    double confidence = 0.0;
    std::string warning;  // set when the model reply could not be parsed

    bool operator==(const DetectedQuestion&) const = default;
};

enum class RowSource { faq_match, generated_sql };
std::string_view to_string(RowSource s);

struct RetrievedRow {
    RowSource source = RowSource::faq_match;
    std::string table;
    kb::Row payload;

    bool operator==(const RetrievedRow&) const = default;
};

inline constexpr std::size_t kFaqTopK = 5;
inline constexpr std::size_t kMergedRowCap = 10;

struct RetrievalResult {
    std::vector<RetrievedRow> rows;
    std::optional<std::string> generated_sql;
    std::optional<std::string> sql_rejection;  // validator reason or execution error
    std::map<std::string, double> strategy_timings;
};

struct StageTimings {
    double detection = 0.0;
    double retrieval = 0.0;
    double generation = 0.0;
    double total = 0.0;

    bool operator==(const StageTimings&) const = default;
};

struct SuggestionCard {
    std::string card_id;
    std::string question;
    std::string answer;
    std::string category;
    double confidence = 0.0;
    std::string source;
    StageTimings timings;

    bool operator==(const SuggestionCard&) const = default;
};

/// Parses a detector reply (a JSON object, optionally fenced). nullopt when
/// the reply is not usable.
std::optional<DetectedQuestion> parse_detection(std::string_view reply);

/// Throws ContractViolation for an empty context. Provider errors propagate.
DetectedQuestion detect_question(providers::LlmClient& llm, const std::string& context);

/// Extracts the statement from a model reply (strips code fences).
std::string extract_sql(std::string_view reply);

/// Lowercased name of the first table after FROM, or "query".
std::string primary_table(std::string_view sql);

RetrievalResult retrieve(providers::LlmClient& llm, const kb::KnowledgeBase& kb, const DetectedQuestion& question);

/// Retrieved rows as the one-line JSON array embedded in the answer prompt.
std::string rows_json(const std::vector<RetrievedRow>& rows);

std::string generate_answer(providers::LlmClient& llm, const DetectedQuestion& question,
                            const RetrievalResult& retrieval);

struct PipelineOptions {
    bool dedup = true;
    std::string card_prefix = "card";
};

struct PipelineError {
    std::string code;
    std::string message;
};

struct ProcessOutcome {
    std::optional<SuggestionCard> card;
    std::optional<PipelineError> error;
    std::optional<DetectedQuestion> detection;  // set when detection ran
    std::optional<RetrievalResult> retrieval;
    bool duplicate = false;
};

/// Per-session state: conversation buffer, dedup memory and card counter.
/// Not thread-safe; one session drives it from a single thread.
class Pipeline {
public:
    Pipeline(std::shared_ptr<providers::LlmClient> llm, std::shared_ptr<const kb::KnowledgeBase> kb,
             PipelineOptions options = {});

    /// Appends one final segment and, for customer speech, runs
    /// detect -> retrieve -> generate. Errors come back in the outcome.
    ProcessOutcome process_final_segment(const TranscriptSegment& segment);

    /// Coalesces several queued segments into one detection pass.
    ProcessOutcome process_final_segments(const std::vector<TranscriptSegment>& segments);

    /// Appends without triggering detection.
    void observe(const TranscriptSegment& segment);

    ConversationBuffer& buffer() { return buffer_; }
    const ConversationBuffer& buffer() const { return buffer_; }
    providers::LlmClient& llm() { return *llm_; }
    const kb::KnowledgeBase& kb() const { return *kb_; }

private:
    std::shared_ptr<providers::LlmClient> llm_;
    std::shared_ptr<const kb::KnowledgeBase> kb_;
    PipelineOptions options_;
    ConversationBuffer buffer_;
    int next_card_ = 1;
};

/// Maps an exception from any stage to the code reported to clients.
PipelineError classify_error(const std::exception& e);

}  // namespace salesassist::pipeline
