// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace salesassist::kb {

inline constexpr std::array<std::string_view, 10> kCategories = {
    "Life", "Health", "Auto", "Home", "Travel", "Disability", "Dental", "Vision", "Pet", "Business"};

struct Product {
    std::int64_t id = 0;
    std::string name;
    std::string category;
    std::string description;

    bool operator==(const Product&) const = default;
};

struct CoverageDetail {
    std::int64_t id = 0;
    std::int64_t product_id = 0;
    std::string coverage_type;
    double amount = 0;
    double deductible = 0;
    std::string conditions;

    bool operator==(const CoverageDetail&) const = default;
};

struct PolicyTerm {
    std::int64_t id = 0;
    std::int64_t product_id = 0;
    std::string term_length;
    std::string renewal_policy;
    std::string cancellation_policy;

    bool operator==(const PolicyTerm&) const = default;
};

struct Faq {
    std::int64_t id = 0;
    std::int64_t product_id = 0;
    std::string question;
    std::string answer;

    bool operator==(const Faq&) const = default;
};

struct PricingTier {
    std::int64_t id = 0;
    std::int64_t product_id = 0;
    std::string tier_name;
    double monthly_premium = 0;
    double annual_premium = 0;
    int age_min = 0;
    int age_max = 0;

    bool operator==(const PricingTier&) const = default;
};

/// The seed document: one array per table.
struct Dataset {
    std::vector<Product> products;
    std::vector<CoverageDetail> coverage_details;
    std::vector<PolicyTerm> policy_terms;
    std::vector<Faq> faqs;
    std::vector<PricingTier> pricing_tiers;
};

void to_json(nlohmann::json& j, const Product& v);
void from_json(const nlohmann::json& j, Product& v);
void to_json(nlohmann::json& j, const CoverageDetail& v);
void from_json(const nlohmann::json& j, CoverageDetail& v);
void to_json(nlohmann::json& j, const PolicyTerm& v);
void from_json(const nlohmann::json& j, PolicyTerm& v);
void to_json(nlohmann::json& j, const Faq& v);
void from_json(const nlohmann::json& j, Faq& v);
void to_json(nlohmann::json& j, const PricingTier& v);
void from_json(const nlohmann::json& j, PricingTier& v);
void to_json(nlohmann::json& j, const Dataset& v);
void from_json(const nlohmann::json& j, Dataset& v);

/// Deterministic templated generator. Any seed yields 50 products (5 per
/// category), 290 coverage details, 50 policy terms, 2,490 FAQs and 162
/// pricing tiers. Seed 0 is the canonical catalog.
Dataset generate_synthetic_dataset(std::uint64_t seed);

std::string serialize_dataset(const Dataset& d);
Dataset parse_dataset(std::string_view json_text);
Dataset load_dataset_file(const std::string& path);

}  // namespace salesassist::kb
