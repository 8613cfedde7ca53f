// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace salesassist::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// The fixed 50-word stopword list shipped in assets/stopwords.txt.
const std::unordered_set<std::string>& stopwords();

/// Lowercased tokens of `s` (alphanumerics with inner hyphens), in order of
/// first appearance, duplicates and stopwords removed, tokens shorter than
/// two characters dropped.
std::vector<std::string> keywords(std::string_view s);

/// Lowercase, punctuation stripped, whitespace collapsed and trimmed.
std::string normalize_question(std::string_view s);

bool contains_icase(std::string_view haystack, std::string_view needle);

}  // namespace salesassist::text
