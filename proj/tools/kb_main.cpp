// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

// kb: create, seed and inspect the knowledge base store.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli_common.hpp"
#include "salesassist/kb/dataset.hpp"
#include "salesassist/kb/knowledge_base.hpp"

using namespace salesassist;

namespace {

nlohmann::ordered_json stats_json(const kb::KnowledgeBase& store) {
    const auto s = store.stats();
    nlohmann::ordered_json per_cat = nlohmann::ordered_json::object();
    for (const auto& [c, n] : store.products_per_category()) per_cat[c] = n;
    return {{"db", store.path().string()},
            {"products", s.products},
            {"coverage_details", s.coverage_details},
            {"policy_terms", s.policy_terms},
            {"faqs", s.faqs},
            {"pricing_tiers", s.pricing_tiers},
            {"approx_tokens", s.approx_tokens},
            {"products_per_category", per_cat}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge base maintenance"};
    app.require_subcommand(1);

    std::string db;
    auto* init = app.add_subcommand("init", "Create the schema (idempotent)");
    init->add_option("--db", db, "SQLite store path")->required();

    auto* seed = app.add_subcommand("seed", "Load the synthetic dataset or a JSON dataset file");
    seed->add_option("--db", db, "SQLite store path")->required();
    std::uint64_t seed_value = 0;
    std::string from;
    bool overwrite = false;
    auto* seed_opt = seed->add_option("--seed", seed_value, "Generator seed")->default_val(0);
    seed->add_option("--from", from, "Dataset JSON file")->check(CLI::ExistingFile)->excludes(seed_opt);
    seed->add_flag("--overwrite", overwrite, "Replace existing rows");

    auto* stats = app.add_subcommand("stats", "Print row counts as JSON");
    stats->add_option("--db", db, "SQLite store path")->required();

    CLI11_PARSE(app, argc, argv);

    return cli::guarded([&] {
        if (*init) {
            auto store = kb::KnowledgeBase::init_schema(db);
            std::cout << stats_json(store).dump(2) << "\n";
        } else if (*seed) {
            auto store = kb::KnowledgeBase::init_schema(db);
            const auto data = from.empty() ? kb::generate_synthetic_dataset(seed_value) : kb::load_dataset_file(from);
            store.seed(data, overwrite);
            std::cout << stats_json(store).dump(2) << "\n";
        } else {
            auto store = kb::KnowledgeBase::open_existing(db);
            std::cout << stats_json(store).dump(2) << "\n";
        }
        return cli::kOk;
    });
}
