// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/bench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "salesassist/assets.hpp"
#include "salesassist/demo/demo.hpp"
#include "salesassist/errors.hpp"

namespace salesassist::bench {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string_view to_string(BenchCategory c) {
    switch (c) {
        case BenchCategory::coverage: return "coverage";
        case BenchCategory::pricing: return "pricing";
        case BenchCategory::policy_terms: return "policy_terms";
        case BenchCategory::claims: return "claims";
        case BenchCategory::eligibility: return "eligibility";
        case BenchCategory::cross_product: return "cross_product";
    }
    return "coverage";
}

BenchCategory parse_bench_category(std::string_view s) {
    for (auto c : kCategories)
        if (to_string(c) == s) return c;
    throw ValidationError("unknown benchmark category '" + std::string(s) + "'");
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + path.string());
    out << body;
    out.flush();
    if (!out) throw StorageError("write failed for " + path.string());
}

ojson stats_json(const Stats& s) {
    return ojson{{"n", s.n}, {"mean", s.mean}, {"median", s.median}, {"std", s.stddev}};
}

ojson timings_json(const pipeline::StageTimings& t) {
    return ojson{{"detection", t.detection}, {"retrieval", t.retrieval}, {"generation", t.generation}, {"total", t.total}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Questions

std::vector<BenchmarkQuestion> parse_questions(std::string_view json_text) {
    std::vector<BenchmarkQuestion> out;
    try {
        const auto doc = nlohmann::json::parse(json_text);
        if (!doc.is_array()) throw ValidationError("question file must be a JSON array");
        for (const auto& q : doc) {
            out.push_back({q.at("id").get<int>(), q.at("text").get<std::string>(),
                           parse_bench_category(q.at("category").get<std::string>())});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid question file: ") + e.what());
    }
    if (out.size() != kQuestionCount) {
        throw ValidationError(fmt::format("expected {} questions, found {}", kQuestionCount, out.size()));
    }
    std::set<int> ids;
    std::map<BenchCategory, int> counts;
    for (const auto& q : out) {
        if (q.id < 1 || q.id > static_cast<int>(kQuestionCount)) throw ValidationError(fmt::format("question id {} out of range", q.id));
        if (!ids.insert(q.id).second) throw ValidationError(fmt::format("duplicate question id {}", q.id));
        if (q.text.find_first_not_of(" \t\n") == std::string::npos) throw ValidationError(fmt::format("question {} is empty", q.id));
        ++counts[q.category];
    }
    for (std::size_t i = 0; i < kCategories.size(); ++i) {
        if (counts[kCategories[i]] != kCategoryCounts[i]) {
            throw ValidationError(fmt::format("category {} needs {} questions, found {}", to_string(kCategories[i]),
                                              kCategoryCounts[i], counts[kCategories[i]]));
        }
    }
    return out;
}

std::vector<BenchmarkQuestion> load_questions(const fs::path& path) { return parse_questions(read_file(path)); }

const std::vector<BenchmarkQuestion>& canonical_questions() {
    static const auto q = parse_questions(assets::kBenchmarkQuestions);
    return q;
}

// ---------------------------------------------------------------------------
// Run

std::vector<BenchmarkSample> run_benchmark(std::shared_ptr<providers::LlmClient> llm,
                                           std::shared_ptr<const kb::KnowledgeBase> kb,
                                           const std::vector<BenchmarkQuestion>& questions, const RunOptions& opts) {
    if (!llm || !kb) throw ContractViolation("run_benchmark needs an LLM client and a knowledge base");
    pipeline::Pipeline pipe(std::move(llm), std::move(kb), pipeline::PipelineOptions{false, "bench"});

    auto run_one = [&pipe](const BenchmarkQuestion& q) {
        pipe.buffer().clear();
        const pipeline::TranscriptSegment seg{pipeline::Speaker::customer, q.text, true, 0.0,
                                              demo::spoken_duration(q.text)};
        return pipe.process_final_segment(seg);
    };

    if (!questions.empty())
        for (int i = 0; i < opts.warmup; ++i) run_one(questions.front());

    std::vector<BenchmarkSample> samples;
    samples.reserve(questions.size());
    for (const auto& q : questions) {
        const auto outcome = run_one(q);
        BenchmarkSample s;
        s.question_id = q.id;
        s.category = q.category;
        if (outcome.card) {
            s.detected = true;
            s.timings = outcome.card->timings;
        } else if (outcome.error) {
            s.error = outcome.error->code + ": " + outcome.error->message;
        } else {
            s.error = "no question detected";
        }
        samples.push_back(s);
        if (opts.on_sample) opts.on_sample(s, samples.size() - 1);
    }
    return samples;
}

std::vector<BenchmarkSample> run_benchmark(const providers::ProviderConfig& cfg,
                                           std::shared_ptr<const kb::KnowledgeBase> kb,
                                           const std::vector<BenchmarkQuestion>& questions, const RunOptions& opts) {
    return run_benchmark(std::shared_ptr<providers::LlmClient>(providers::make_llm_client(cfg)), std::move(kb),
                         questions, opts);
}

// ---------------------------------------------------------------------------
// Aggregation

Stats describe(std::vector<double> values) {
    if (values.empty()) throw ValidationError("cannot describe an empty sample");
    Stats s;
    s.n = values.size();
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
    std::sort(values.begin(), values.end());
    const std::size_t mid = s.n / 2;
    s.median = s.n % 2 ? values[mid] : (values[mid - 1] + values[mid]) / 2.0;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n));
    return s;
}

Aggregate aggregate(const std::vector<BenchmarkSample>& samples) {
    if (samples.empty()) throw ValidationError("no benchmark samples");
    Aggregate a;
    a.samples = samples.size();
    std::vector<double> totals, det, ret, gen;
    std::map<BenchCategory, std::vector<double>> by_cat;
    for (const auto& s : samples) {
        if (!s.detected) continue;
        ++a.detected;
        totals.push_back(s.timings.total);
        det.push_back(s.timings.detection);
        ret.push_back(s.timings.retrieval);
        gen.push_back(s.timings.generation);
        by_cat[s.category].push_back(s.timings.total);
    }
    a.detection_rate = static_cast<double>(a.detected) / static_cast<double>(a.samples);
    if (totals.empty()) throw ValidationError("no detected samples to aggregate");
    a.overall = describe(totals);
    for (auto& [c, v] : by_cat) a.per_category[c] = describe(std::move(v));
    const double stage_sum = describe(det).mean + describe(ret).mean + describe(gen).mean;
    auto share = [&](const std::vector<double>& v) {
        const double m = describe(v).mean;
        return StageShare{m, stage_sum > 0 ? m / stage_sum : 0.0};
    };
    a.detection = share(det);
    a.retrieval = share(ret);
    a.generation = share(gen);
    return a;
}

// ---------------------------------------------------------------------------
// Baseline

Baseline parse_baseline(std::string_view json_text) {
    Baseline b;
    try {
        const auto doc = nlohmann::json::parse(json_text);
        b.overall_mean_s = doc.at("overall_mean_s").get<double>();
        const auto& range = doc.at("range_s");
        if (!range.is_array() || range.size() != 2) throw ValidationError("range_s must be [lo, hi]");
        b.range_lo_s = range[0].get<double>();
        b.range_hi_s = range[1].get<double>();
        for (const auto& [k, v] : doc.at("per_category_mean_s").items()) {
            b.per_category_mean_s[parse_bench_category(k)] = v.get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid baseline: ") + e.what());
    }
    if (!(b.range_lo_s > 0 && b.range_lo_s <= b.range_hi_s)) throw ValidationError("baseline range must be 0 < lo <= hi");
    if (b.overall_mean_s < b.range_lo_s || b.overall_mean_s > b.range_hi_s) {
        throw ValidationError("baseline overall mean lies outside its range");
    }
    for (auto c : kCategories) {
        auto it = b.per_category_mean_s.find(c);
        if (it == b.per_category_mean_s.end()) throw ValidationError(fmt::format("baseline lacks category {}", to_string(c)));
        if (it->second < b.range_lo_s || it->second > b.range_hi_s) {
            throw ValidationError(fmt::format("baseline mean for {} lies outside its range", to_string(c)));
        }
    }
    return b;
}

Baseline load_baseline(const fs::path& path) { return parse_baseline(read_file(path)); }

const Baseline& canonical_baseline() {
    static const auto b = parse_baseline(assets::kBaseline);
    return b;
}

Comparison compare_baseline(const Aggregate& agg, const Baseline& baseline) {
    const double m = agg.overall.mean;
    if (!(m > 0)) throw ValidationError("measured mean must be positive to compare against the baseline");
    Comparison c;
    c.speedup = baseline.overall_mean_s / m;
    const double per_q = baseline.overall_mean_s - m;
    c.savings_per_10q_min = 10.0 * per_q / 60.0;
    c.savings_per_20_calls_h = 20.0 * 10.0 * per_q / 3600.0;
    for (const auto& [cat, st] : agg.per_category) {
        auto it = baseline.per_category_mean_s.find(cat);
        if (it != baseline.per_category_mean_s.end() && st.mean > 0) c.per_category_speedup[cat] = it->second / st.mean;
    }
    return c;
}

BenchReport make_report(const std::vector<BenchmarkSample>& samples, const Baseline& baseline) {
    BenchReport r;
    r.agg = aggregate(samples);
    r.baseline = baseline;
    r.comparison = compare_baseline(r.agg, baseline);
    return r;
}

// ---------------------------------------------------------------------------
// Output

ojson report_json(const BenchReport& r) {
    ojson per_cat = ojson::object();
    for (auto c : kCategories) {
        auto it = r.agg.per_category.find(c);
        if (it == r.agg.per_category.end()) continue;
        ojson entry = stats_json(it->second);
        entry["manual_mean"] = r.baseline.per_category_mean_s.at(c);
        auto sp = r.comparison.per_category_speedup.find(c);
        entry["speedup"] = sp == r.comparison.per_category_speedup.end() ? ojson(nullptr) : ojson(sp->second);
        per_cat[std::string(to_string(c))] = std::move(entry);
    }
    auto stage = [](const StageShare& s) { return ojson{{"mean", s.mean}, {"share", s.share}}; };
    return ojson{
        {"metadata", {{"std", "population"}, {"time_unit", "seconds"}, {"samples", r.agg.samples}}},
        {"overall", stats_json(r.agg.overall)},
        {"per_category", std::move(per_cat)},
        {"stage_breakdown",
         {{"detection", stage(r.agg.detection)},
          {"retrieval", stage(r.agg.retrieval)},
          {"generation", stage(r.agg.generation)}}},
        {"detection_rate", r.agg.detection_rate},
        {"detected", r.agg.detected},
        {"baseline",
         {{"overall_mean_s", r.baseline.overall_mean_s}, {"range_s", {r.baseline.range_lo_s, r.baseline.range_hi_s}}}},
        {"speedup", r.comparison.speedup},
        {"savings",
         {{"per_10q_call_min", r.comparison.savings_per_10q_min},
          {"per_20_calls_h", r.comparison.savings_per_20_calls_h}}},
    };
}

std::vector<std::array<double, 3>> cumulative_rows(const BenchReport& r) {
    std::vector<std::array<double, 3>> rows;
    for (std::size_t n = 1; n <= kQuestionCount; ++n) {
        const double k = static_cast<double>(n);
        rows.push_back({k, k * r.baseline.overall_mean_s, k * r.agg.overall.mean});
    }
    return rows;
}

std::string summary_markdown(const BenchReport& r) {
    const auto& a = r.agg;
    std::string md;
    md += "# Benchmark summary\n\n";
    md += "| Metric | Manual search | Assisted |\n|---|---|---|\n";
    md += fmt::format("| Mean response time | {:.1f} s | {:.2f} s |\n", r.baseline.overall_mean_s, a.overall.mean);
    md += fmt::format("| Manual range | {:.0f}-{:.0f} s | n/a |\n", r.baseline.range_lo_s, r.baseline.range_hi_s);
    md += fmt::format("| Median / std | n/a | {:.2f} s / {:.2f} s |\n", a.overall.median, a.overall.stddev);
    md += fmt::format("| Time per 10-question call | {:.1f} min | {:.1f} min |\n", 10 * r.baseline.overall_mean_s / 60,
                      10 * a.overall.mean / 60);
    md += fmt::format("| Detection rate | n/a | {:.0f}% ({}/{}) |\n\n", 100 * a.detection_rate, a.detected, a.samples);
    md += fmt::format("Speedup: {:.1f}x\n\n", r.comparison.speedup);
    md += fmt::format("Savings per 10-question call: {:.2f} min\n\n", r.comparison.savings_per_10q_min);
    md += fmt::format("Savings over 20 calls: {:.2f} h\n\n", r.comparison.savings_per_20_calls_h);
    md += "| Stage | Mean (s) | Share |\n|---|---|---|\n";
    md += fmt::format("| Detection | {:.3f} | {:.1f}% |\n", a.detection.mean, 100 * a.detection.share);
    md += fmt::format("| Retrieval | {:.3f} | {:.1f}% |\n", a.retrieval.mean, 100 * a.retrieval.share);
    md += fmt::format("| Generation | {:.3f} | {:.1f}% |\n", a.generation.mean, 100 * a.generation.share);
    return md;
}

std::vector<fs::path> emit_report(const BenchReport& r, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw StorageError("cannot create output directory " + out_dir.string());

    std::vector<fs::path> written;
    auto put = [&](const std::string& name, const std::string& body) {
        write_file(out_dir / name, body);
        written.push_back(out_dir / name);
    };

    put("report.json", report_json(r).dump(2) + "\n");

    std::string cat_csv = std::string(kPerCategoryHeader) + "\n";
    for (auto c : kCategories) {
        auto it = r.agg.per_category.find(c);
        if (it == r.agg.per_category.end()) continue;
        cat_csv += fmt::format("{},{:.3f},{:.4f},{:.4f},{:.2f}\n", to_string(c), r.baseline.per_category_mean_s.at(c),
                               it->second.mean, it->second.stddev, r.comparison.per_category_speedup.at(c));
    }
    put("per_category.csv", cat_csv);

    std::string stage_csv = std::string(kStageHeader) + "\n";
    stage_csv += fmt::format("detection,{:.4f},{:.4f}\n", r.agg.detection.mean, r.agg.detection.share);
    stage_csv += fmt::format("retrieval,{:.4f},{:.4f}\n", r.agg.retrieval.mean, r.agg.retrieval.share);
    stage_csv += fmt::format("generation,{:.4f},{:.4f}\n", r.agg.generation.mean, r.agg.generation.share);
    put("stage_breakdown.csv", stage_csv);

    std::string cum_csv = std::string(kCumulativeHeader) + "\n";
    for (const auto& [n, manual, copilot] : cumulative_rows(r)) {
        cum_csv += fmt::format("{:.0f},{:.3f},{:.3f},{:.3f}\n", n, manual, copilot, manual - copilot);
    }
    put("cumulative.csv", cum_csv);

    put("summary.md", summary_markdown(r));
    return written;
}

// ---------------------------------------------------------------------------
// Samples file

ojson samples_json(const std::vector<BenchmarkSample>& samples, const ojson& meta) {
    ojson arr = ojson::array();
    for (const auto& s : samples) {
        ojson e{{"question_id", s.question_id},
                {"category", to_string(s.category)},
                {"detected", s.detected},
                {"timings", timings_json(s.timings)}};
        if (!s.error.empty()) e["error"] = s.error;
        arr.push_back(std::move(e));
    }
    ojson doc{{"version", 1}};
    if (!meta.is_null()) doc["meta"] = meta;
    doc["samples"] = std::move(arr);
    return doc;
}

std::vector<BenchmarkSample> parse_samples(std::string_view json_text) {
    std::vector<BenchmarkSample> out;
    try {
        const auto doc = nlohmann::json::parse(json_text);
        const auto& arr = doc.is_array() ? doc : doc.at("samples");
        for (const auto& e : arr) {
            BenchmarkSample s;
            s.question_id = e.at("question_id").get<int>();
            s.category = parse_bench_category(e.at("category").get<std::string>());
            s.detected = e.at("detected").get<bool>();
            const auto& t = e.at("timings");
            s.timings = {t.at("detection").get<double>(), t.at("retrieval").get<double>(),
                         t.at("generation").get<double>(), t.at("total").get<double>()};
            if (s.timings.detection < 0 || s.timings.retrieval < 0 || s.timings.generation < 0 || s.timings.total < 0) {
                throw ValidationError(fmt::format("negative timing in sample {}", s.question_id));
            }
            if (s.detected && !(s.timings.total > 0)) {
                throw ValidationError(fmt::format("detected sample {} has no total time", s.question_id));
            }
            s.error = e.value("error", "");
            out.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid samples file: ") + e.what());
    }
    return out;
}

std::vector<BenchmarkSample> load_samples(const fs::path& path) { return parse_samples(read_file(path)); }

}  // namespace salesassist::bench
