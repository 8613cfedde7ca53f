// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fake_llm.hpp"
#include "salesassist/bench/bench.hpp"
#include "salesassist/errors.hpp"
#include "test_support.hpp"

using namespace salesassist;
using namespace salesassist::bench;
using testsupport::FakeLlm;
namespace roles = providers::roles;

namespace {

std::shared_ptr<const kb::KnowledgeBase> kb_ptr() {
    return std::make_shared<const kb::KnowledgeBase>(testsupport::canonical_kb());
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

BenchmarkSample sample(int id, BenchCategory c, double d, double r, double g) {
    return BenchmarkSample{id, c, true, {d, r, g, d + r + g}, ""};
}

/// Twenty samples whose totals all equal `total`, split 25/28.6/46.4.
std::vector<BenchmarkSample> flat_samples(double total) {
    std::vector<BenchmarkSample> out;
    const auto& qs = canonical_questions();
    for (const auto& q : qs) out.push_back(sample(q.id, q.category, total * 0.7 / 2.8, total * 0.8 / 2.8, total * 1.3 / 2.8));
    return out;
}

// Second implementation for the cross-check: plain loops, no sorting helpers
// shared with the library.
struct OracleStats {
    double mean, median, std;
};

OracleStats oracle_stats(const std::vector<double>& xs) {
    double sum = 0;
    for (double x : xs) sum += x;
    const double mean = sum / xs.size();
    std::vector<double> v = xs;
    for (std::size_t i = 1; i < v.size(); ++i)
        for (std::size_t j = i; j > 0 && v[j - 1] > v[j]; --j) std::swap(v[j - 1], v[j]);
    const double median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return {mean, median, std::sqrt(var / xs.size())};
}

}  // namespace

// ---------------------------------------------------------------------------
// Questions and baseline

TEST_CASE("canonical question set") {
    const auto& qs = canonical_questions();
    REQUIRE(qs.size() == 20);
    std::map<BenchCategory, int> counts;
    for (const auto& q : qs) ++counts[q.category];
    for (std::size_t i = 0; i < kCategories.size(); ++i) CHECK(counts[kCategories[i]] == kCategoryCounts[i]);
    CHECK(load_questions(std::string(SALESASSIST_ASSETS_DIR) + "/benchmark_questions.json") == qs);
}

TEST_CASE("question file validation") {
    auto doc = nlohmann::json::parse(slurp(std::string(SALESASSIST_ASSETS_DIR) + "/benchmark_questions.json"));
    SUBCASE("19 questions") {
        doc.erase(doc.begin());
        CHECK_THROWS_AS(parse_questions(doc.dump()), ValidationError);
    }
    SUBCASE("duplicate ids") {
        doc[1]["id"] = 1;
        CHECK_THROWS_WITH_AS(parse_questions(doc.dump()), doctest::Contains("duplicate"), ValidationError);
    }
    SUBCASE("wrong distribution") {
        doc[0]["category"] = "claims";
        CHECK_THROWS_AS(parse_questions(doc.dump()), ValidationError);
    }
    SUBCASE("unknown category") {
        doc[0]["category"] = "weather";
        CHECK_THROWS_AS(parse_questions(doc.dump()), ValidationError);
    }
}

TEST_CASE("baseline file") {
    const auto& b = canonical_baseline();
    CHECK(b.overall_mean_s == 39.7);
    CHECK(b.range_lo_s == 25);
    CHECK(b.range_hi_s == 65);
    // question-weighted category means reproduce the overall mean
    double weighted = 0;
    for (std::size_t i = 0; i < kCategories.size(); ++i) weighted += kCategoryCounts[i] * b.per_category_mean_s.at(kCategories[i]);
    CHECK(weighted / 20 == doctest::Approx(39.7).epsilon(1e-9));
    for (const auto& [c, m] : b.per_category_mean_s) {
        CHECK(m >= 25);
        CHECK(m <= 65);
    }
    CHECK_THROWS_AS(parse_baseline(R"({"overall_mean_s":39.7,"range_s":[25,65],"per_category_mean_s":{"coverage":70}})"),
                    ValidationError);
    CHECK_THROWS_AS(parse_baseline(R"({"overall_mean_s":39.7,"range_s":[25]})"), ValidationError);
}

// ---------------------------------------------------------------------------
// Aggregation

TEST_CASE("describe examples") {
    const auto s = describe({2, 3, 4});
    CHECK(s.mean == doctest::Approx(3));
    CHECK(s.median == doctest::Approx(3));
    CHECK(s.stddev == doctest::Approx(0.8165).epsilon(1e-4));
    CHECK(describe({1, 2, 3, 10}).median == doctest::Approx(2.5));
    CHECK(describe({5}).stddev == 0);
    CHECK_THROWS_AS(describe({}), ValidationError);
    CHECK_THROWS_AS(aggregate({}), ValidationError);
}

TEST_CASE("stage shares from stage means") {
    const auto a = aggregate(flat_samples(2.8));
    CHECK(a.detection.share == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(a.retrieval.share == doctest::Approx(0.8 / 2.8).epsilon(1e-9));
    CHECK(a.generation.share == doctest::Approx(1.3 / 2.8).epsilon(1e-9));
    CHECK(a.detection_rate == 1.0);
    CHECK(a.detected == 20);
    CHECK(a.per_category.size() == 6);
}

TEST_CASE("aggregate matches an independent recomputation") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> stage(0.0, 2.0);
    std::bernoulli_distribution miss(0.15);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<BenchmarkSample> samples;
        for (const auto& q : canonical_questions()) {
            auto s = sample(q.id, q.category, stage(rng), stage(rng), stage(rng));
            s.timings.total += 0.01;  // overhead outside the three stages
            if (miss(rng)) s = BenchmarkSample{q.id, q.category, false, {}, "no question detected"};
            samples.push_back(s);
        }
        std::vector<double> totals, d, r, g;
        std::map<BenchCategory, std::vector<double>> by_cat;
        for (const auto& s : samples) {
            if (!s.detected) continue;
            totals.push_back(s.timings.total);
            d.push_back(s.timings.detection);
            r.push_back(s.timings.retrieval);
            g.push_back(s.timings.generation);
            by_cat[s.category].push_back(s.timings.total);
        }
        if (totals.empty()) continue;
        const auto a = aggregate(samples);
        const auto o = oracle_stats(totals);
        CHECK(a.overall.mean == doctest::Approx(o.mean).epsilon(1e-9));
        CHECK(a.overall.median == doctest::Approx(o.median).epsilon(1e-9));
        CHECK(std::abs(a.overall.stddev - o.std) < 1e-9);
        CHECK(a.detection_rate == doctest::Approx(totals.size() / 20.0));
        for (const auto& [c, v] : by_cat) {
            const auto oc = oracle_stats(v);
            CHECK(std::abs(a.per_category.at(c).mean - oc.mean) < 1e-9);
            CHECK(std::abs(a.per_category.at(c).stddev - oc.std) < 1e-9);
        }
        const double md = oracle_stats(d).mean, mr = oracle_stats(r).mean, mg = oracle_stats(g).mean;
        CHECK(std::abs(a.detection.share - md / (md + mr + mg)) < 1e-9);
        CHECK(std::abs(a.detection.share + a.retrieval.share + a.generation.share - 1.0) < 0.01);
        CHECK(a.detection_rate >= 0);
        CHECK(a.detection_rate <= 1);
    }
}

TEST_CASE("baseline comparison arithmetic") {
    const auto r = make_report(flat_samples(2.8), canonical_baseline());
    CHECK(r.comparison.speedup == doctest::Approx(14.1786).epsilon(1e-4));
    CHECK(r.comparison.savings_per_10q_min == doctest::Approx(6.15).epsilon(1e-9));
    CHECK(r.comparison.savings_per_20_calls_h == doctest::Approx(2.05).epsilon(1e-9));
    CHECK(r.comparison.per_category_speedup.at(BenchCategory::coverage) == doctest::Approx(30.5 / 2.8));

    const auto same = make_report(flat_samples(39.7), canonical_baseline());
    CHECK(same.comparison.speedup == doctest::Approx(1.0));
    CHECK(std::abs(same.comparison.savings_per_10q_min) < 1e-12);

    Aggregate zero;
    CHECK_THROWS_AS(compare_baseline(zero, canonical_baseline()), ValidationError);
}

TEST_CASE("cumulative savings grow monotonically") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> mean(0.5, 39.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto rows = cumulative_rows(make_report(flat_samples(mean(rng)), canonical_baseline()));
        REQUIRE(rows.size() == 20);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(rows[i][1] - rows[i][2] >= rows[i - 1][1] - rows[i - 1][2]);
        }
    }
}

// ---------------------------------------------------------------------------
// Files

TEST_CASE("report files") {
    testsupport::TempDir dir;
    const auto r = make_report(flat_samples(2.8), canonical_baseline());
    const auto files = emit_report(r, dir / "out");
    REQUIRE(files.size() == 5);
    for (const auto& f : files) CHECK(std::filesystem::exists(f));

    const auto cat = lines_of(slurp(dir / "out" / "per_category.csv"));
    CHECK(cat[0] == kPerCategoryHeader);
    CHECK(cat.size() == 7);
    CHECK(cat[1].rfind("coverage,30.500,2.8000,", 0) == 0);
    CHECK(lines_of(slurp(dir / "out" / "stage_breakdown.csv"))[0] == kStageHeader);
    const auto cum = lines_of(slurp(dir / "out" / "cumulative.csv"));
    CHECK(cum[0] == kCumulativeHeader);
    REQUIRE(cum.size() == 21);
    CHECK(cum[10] == "10,397.000,28.000,369.000");

    const auto summary = slurp(dir / "out" / "summary.md");
    CHECK(summary.find("Speedup: 14.2x") != std::string::npos);
    CHECK(summary.find("6.15 min") != std::string::npos);
    CHECK(summary.find("2.05 h") != std::string::npos);

    const auto j = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
    CHECK(j["metadata"]["std"] == "population");
    CHECK(j["detection_rate"] == 1.0);
    CHECK(j["per_category"].size() == 6);

    // byte-identical on re-emission
    emit_report(r, dir / "again");
    CHECK(slurp(dir / "out" / "report.json") == slurp(dir / "again" / "report.json"));

    std::ofstream(dir / "blocker") << "x";
    CHECK_THROWS_AS(emit_report(r, dir / "blocker" / "sub"), StorageError);
}

TEST_CASE("samples file round trip") {
    auto samples = flat_samples(2.8);
    samples[3] = BenchmarkSample{4, samples[3].category, false, {}, "provider_timeout: slow"};
    const auto text = samples_json(samples, {{"providers", "mock"}}).dump(2);
    CHECK(parse_samples(text) == samples);
    CHECK_THROWS_AS(parse_samples(R"({"samples":[{"question_id":1}]})"), ValidationError);
    CHECK_THROWS_AS(
        parse_samples(
            R"([{"question_id":1,"category":"coverage","detected":true,"timings":{"detection":-1,"retrieval":0,"generation":0,"total":1}}])"),
        ValidationError);
}

// ---------------------------------------------------------------------------
// Runs

TEST_CASE("run with instant mocks") {
    const auto samples = run_benchmark(providers::mock_config(), kb_ptr(), canonical_questions());
    REQUIRE(samples.size() == 20);
    for (const auto& s : samples) {
        CHECK(s.detected);
        CHECK(s.error.empty());
        CHECK(s.timings.total > 0);
        CHECK(s.timings.total < 0.2);
    }
    CHECK(aggregate(samples).detection_rate == 1.0);
}

TEST_CASE("warm-up runs are executed but not sampled") {
    auto llm = std::make_shared<FakeLlm>();
    std::size_t seen = 0;
    RunOptions opts;
    opts.on_sample = [&](const BenchmarkSample&, std::size_t i) { CHECK(i == seen++); };
    const auto samples = run_benchmark(llm, kb_ptr(), canonical_questions(), opts);
    CHECK(samples.size() == 20);
    CHECK(seen == 20);
    CHECK(llm->count(roles::kDetector) == 21);

    auto llm3 = std::make_shared<FakeLlm>();
    opts.warmup = 3;
    opts.on_sample = nullptr;
    run_benchmark(llm3, kb_ptr(), canonical_questions(), opts);
    CHECK(llm3->count(roles::kDetector) == 23);
}

TEST_CASE("provider failures mark samples undetected and the run continues") {
    int calls = 0;
    auto llm = std::make_shared<FakeLlm>([&](const std::string& system, const std::string& user) -> std::string {
        if (system.rfind(roles::kDetector, 0) == 0 && ++calls % 4 == 0) throw TimeoutError("llm timed out");
        return providers::mock_reply(system, user);
    });
    RunOptions opts;
    opts.warmup = 0;
    const auto samples = run_benchmark(llm, kb_ptr(), canonical_questions(), opts);
    REQUIRE(samples.size() == 20);
    int failed = 0;
    for (const auto& s : samples) {
        if (s.detected) continue;
        ++failed;
        CHECK(s.error.rfind("provider_timeout", 0) == 0);
    }
    CHECK(failed == 5);
    CHECK(aggregate(samples).detection_rate == doctest::Approx(0.75));
}
