// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "salesassist/kb/dataset.hpp"

namespace salesassist::kb {

struct KbStats {
    std::int64_t products = 0;
    std::int64_t coverage_details = 0;
    std::int64_t policy_terms = 0;
    std::int64_t faqs = 0;
    std::int64_t pricing_tiers = 0;
    std::int64_t approx_tokens = 0;  // total text characters / 4

    bool operator==(const KbStats&) const = default;
};

void to_json(nlohmann::json& j, const KbStats& s);

struct ScoredFaq {
    Faq faq;
    int score = 0;  // number of distinct keywords found in question or answer

    bool operator==(const ScoredFaq&) const = default;
};

/// A result row: column name -> value, in select-list order.
using Row = nlohmann::ordered_json;

inline constexpr std::size_t kRowCap = 50;
inline constexpr std::chrono::milliseconds kDefaultQueryTimeout{2000};

/// Fixed schema description handed to the text-to-SQL prompt.
std::string schema_description();

/// SQLite-backed insurance knowledge base. Read operations open their own
/// read-only connection and may be called concurrently; seeding serializes
/// on a write transaction.
class KnowledgeBase {
public:
    /// Creates the five tables if absent. Throws StorageError when the path
    /// cannot be opened for writing and SchemaMismatchError when an existing
    /// table has a different column layout.
    static KnowledgeBase init_schema(const std::filesystem::path& store_path);

    /// Opens an existing store without creating anything.
    static KnowledgeBase open_existing(const std::filesystem::path& store_path);

    const std::filesystem::path& path() const { return path_; }

    KbStats seed(const Dataset& dataset, bool overwrite = false);
    KbStats stats() const;

    std::vector<ScoredFaq> faq_keyword_search(const std::string& question, std::size_t limit) const;

    std::vector<Row> execute_readonly_sql(const std::string& sql,
                                          std::chrono::milliseconds timeout = kDefaultQueryTimeout) const;

    /// Names of all products, in id order.
    std::vector<std::string> product_names() const;

    /// Product count keyed by category.
    std::map<std::string, std::int64_t> products_per_category() const;

private:
    explicit KnowledgeBase(std::filesystem::path p) : path_(std::move(p)) {}

    std::filesystem::path path_;
};

}  // namespace salesassist::kb
