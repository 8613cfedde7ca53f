// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

// bench: latency benchmark over the question set and report generation.

#include <fstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli_common.hpp"
#include "salesassist/bench/bench.hpp"
#include "salesassist/providers/config.hpp"

using namespace salesassist;
namespace fs = std::filesystem;

namespace {

void print_summary(const bench::BenchReport& r, const std::vector<fs::path>& files) {
    nlohmann::ordered_json out{{"detection_rate", r.agg.detection_rate},
                               {"mean_s", r.agg.overall.mean},
                               {"median_s", r.agg.overall.median},
                               {"std_s", r.agg.overall.stddev},
                               {"speedup", r.comparison.speedup},
                               {"savings_per_10q_min", r.comparison.savings_per_10q_min},
                               {"savings_per_20_calls_h", r.comparison.savings_per_20_calls_h}};
    nlohmann::ordered_json written = nlohmann::ordered_json::array();
    for (const auto& f : files) written.push_back(f.string());
    out["files"] = written;
    std::cout << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Latency benchmark"};
    app.require_subcommand(1);

    std::string db, questions, providers_mode = "mock", delays = "0,0,0", out, samples, baseline;
    int warmup = 1;
    auto* run = app.add_subcommand("run", "Run the question set and write samples plus a report");
    run->add_option("--db", db, "SQLite store path")->required()->check(CLI::ExistingFile);
    run->add_option("--questions", questions, "Question set JSON (defaults to the built-in set)")
        ->check(CLI::ExistingFile);
    run->add_option("--providers", providers_mode, "mock or live")
        ->default_val("mock")
        ->check(CLI::IsMember({"mock", "live"}));
    run->add_option("--delays", delays, "Mock stage delays d,r,g in seconds")->default_val("0,0,0");
    run->add_option("--warmup", warmup, "Unmeasured warm-up passes")->default_val(1)->check(CLI::NonNegativeNumber);
    run->add_option("--baseline", baseline, "Baseline JSON (defaults to the built-in one)")->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory")->required();

    auto* report = app.add_subcommand("report", "Build the report from a samples file");
    report->add_option("--samples", samples, "samples.json from bench run")->required()->check(CLI::ExistingFile);
    report->add_option("--baseline", baseline, "Baseline JSON (defaults to the built-in one)")->check(CLI::ExistingFile);
    report->add_option("--out", out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    return cli::guarded([&] {
        const auto base = baseline.empty() ? bench::canonical_baseline() : bench::load_baseline(baseline);
        if (*run) {
            const auto qs = questions.empty() ? bench::canonical_questions() : bench::load_questions(questions);
            const auto pcfg = providers::resolve_providers(providers_mode, providers::parse_delays(delays));
            auto store = std::make_shared<const kb::KnowledgeBase>(kb::KnowledgeBase::open_existing(db));
            store->stats();

            bench::RunOptions opts;
            opts.warmup = warmup;
            opts.on_sample = [&](const bench::BenchmarkSample& s, std::size_t i) {
                std::cerr << fmt::format("[{:2}/{}] q{:<2} {:<13} {}\n", i + 1, qs.size(), s.question_id,
                                         bench::to_string(s.category),
                                         s.detected ? fmt::format("{:.3f} s", s.timings.total) : "not detected: " + s.error);
            };
            const auto result = bench::run_benchmark(pcfg, store, qs, opts);

            fs::create_directories(out);
            nlohmann::ordered_json meta{{"providers", providers_mode},
                                        {"delays", delays},
                                        {"warmup", warmup},
                                        {"config", nlohmann::ordered_json::parse(providers::public_view(pcfg).dump())}};
            std::ofstream(fs::path(out) / "samples.json") << bench::samples_json(result, meta).dump(2) << "\n";
            auto files = bench::emit_report(bench::make_report(result, base), out);
            files.insert(files.begin(), fs::path(out) / "samples.json");
            print_summary(bench::make_report(result, base), files);
        } else {
            const auto loaded = bench::load_samples(samples);
            const auto r = bench::make_report(loaded, base);
            print_summary(r, bench::emit_report(r, out));
        }
        return cli::kOk;
    });
}
