// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "salesassist/kb/knowledge_base.hpp"
#include "salesassist/pipeline/pipeline.hpp"
#include "salesassist/providers/config.hpp"
#include "salesassist/providers/llm.hpp"

namespace salesassist::bench {

// Benchmark labels. Independent of the detector's category enum.
enum class BenchCategory { coverage, pricing, policy_terms, claims, eligibility, cross_product };

inline constexpr std::array<BenchCategory, 6> kCategories = {
    BenchCategory::coverage, BenchCategory::pricing,     BenchCategory::policy_terms,
    BenchCategory::claims,   BenchCategory::eligibility, BenchCategory::cross_product};
inline constexpr std::array<int, 6> kCategoryCounts = {4, 4, 3, 3, 3, 3};
inline constexpr std::size_t kQuestionCount = 20;

std::string_view to_string(BenchCategory c);
/// Throws ValidationError for an unknown label.
BenchCategory parse_bench_category(std::string_view s);

struct BenchmarkQuestion {
    int id = 0;
    std::string text;
    BenchCategory category = BenchCategory::coverage;

    bool operator==(const BenchmarkQuestion&) const = default;
};

/// Exactly 20 questions, ids 1..20 unique, category counts (4,4,3,3,3,3).
std::vector<BenchmarkQuestion> parse_questions(std::string_view json_text);
std::vector<BenchmarkQuestion> load_questions(const std::filesystem::path& path);
const std::vector<BenchmarkQuestion>& canonical_questions();

struct BenchmarkSample {
    int question_id = 0;
    BenchCategory category = BenchCategory::coverage;
    bool detected = false;
    pipeline::StageTimings timings;
    std::string error;  // set when a stage failed

    bool operator==(const BenchmarkSample&) const = default;
};

struct RunOptions {
    int warmup = 1;
    /// Called after each measured question.
    std::function<void(const BenchmarkSample&, std::size_t index)> on_sample;
};

/// Sequential run: `warmup` unmeasured passes of the first question, then
/// one measured pass per question with dedup off. Stage failures become
/// undetected samples; the run continues.
std::vector<BenchmarkSample> run_benchmark(std::shared_ptr<providers::LlmClient> llm,
                                           std::shared_ptr<const kb::KnowledgeBase> kb,
                                           const std::vector<BenchmarkQuestion>& questions, const RunOptions& opts = {});
std::vector<BenchmarkSample> run_benchmark(const providers::ProviderConfig& cfg,
                                           std::shared_ptr<const kb::KnowledgeBase> kb,
                                           const std::vector<BenchmarkQuestion>& questions, const RunOptions& opts = {});

struct Stats {
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;  // population

    bool operator==(const Stats&) const = default;
};

/// Throws ValidationError on an empty input.
Stats describe(std::vector<double> values);

struct StageShare {
    double mean = 0.0;
    double share = 0.0;  // stage mean / total mean
};

struct Aggregate {
    std::map<BenchCategory, Stats> per_category;  // detected samples only
    Stats overall;
    StageShare detection, retrieval, generation;
    std::size_t samples = 0;
    std::size_t detected = 0;
    double detection_rate = 0.0;  // detected / samples
};

/// Throws ValidationError for no samples or no detected samples.
Aggregate aggregate(const std::vector<BenchmarkSample>& samples);

struct Baseline {
    double overall_mean_s = 0.0;
    double range_lo_s = 0.0;
    double range_hi_s = 0.0;
    std::map<BenchCategory, double> per_category_mean_s;
};

/// Every category present and inside the range. Throws ValidationError.
Baseline parse_baseline(std::string_view json_text);
Baseline load_baseline(const std::filesystem::path& path);
const Baseline& canonical_baseline();

struct Comparison {
    double speedup = 0.0;
    double savings_per_10q_min = 0.0;
    double savings_per_20_calls_h = 0.0;
    std::map<BenchCategory, double> per_category_speedup;  // categories with samples
};

/// Throws ValidationError when the measured mean is not positive.
Comparison compare_baseline(const Aggregate& agg, const Baseline& baseline);

struct BenchReport {
    Aggregate agg;
    Baseline baseline;
    Comparison comparison;
};

BenchReport make_report(const std::vector<BenchmarkSample>& samples, const Baseline& baseline);

nlohmann::ordered_json report_json(const BenchReport& r);

/// (n, manual, copilot) for n = 1..20 using the overall means.
std::vector<std::array<double, 3>> cumulative_rows(const BenchReport& r);

inline constexpr std::string_view kPerCategoryHeader = "category,manual_mean,copilot_mean,copilot_std,speedup";
inline constexpr std::string_view kStageHeader = "stage,mean_s,share";
inline constexpr std::string_view kCumulativeHeader = "questions,manual_cumulative_s,copilot_cumulative_s,savings_s";

/// Writes report.json, per_category.csv, stage_breakdown.csv,
/// cumulative.csv and summary.md. Throws StorageError.
std::vector<std::filesystem::path> emit_report(const BenchReport& r, const std::filesystem::path& out_dir);

std::string summary_markdown(const BenchReport& r);

nlohmann::ordered_json samples_json(const std::vector<BenchmarkSample>& samples, const nlohmann::ordered_json& meta = {});
std::vector<BenchmarkSample> parse_samples(std::string_view json_text);
std::vector<BenchmarkSample> load_samples(const std::filesystem::path& path);

}  // namespace salesassist::bench
