// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/text.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace salesassist::text {

extern const char* const kStopwordsData;  // generated from assets/stopwords.txt

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = [] {
        std::unordered_set<std::string> out;
        std::istringstream in(kStopwordsData);
        std::string line;
        while (std::getline(in, line)) {
            auto w = to_lower(trim(line));
            if (!w.empty() && w[0] != '#') out.insert(std::move(w));
        }
        return out;
    }();
    return words;
}

std::vector<std::string> keywords(std::string_view s) {
    const auto& stop = stopwords();
    std::vector<std::string> out;
    std::string lower = to_lower(s);
    std::size_t i = 0;
    while (i < lower.size()) {
        if (!is_word_char(lower[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        // hyphens are kept only between word characters ("out-of-pocket")
        while (j < lower.size() &&
               (is_word_char(lower[j]) ||
                (lower[j] == '-' && j + 1 < lower.size() && is_word_char(lower[j + 1])))) {
            ++j;
        }
        std::string tok = lower.substr(i, j - i);
        i = j;
        if (tok.size() < 2 || stop.count(tok) != 0) continue;
        if (std::find(out.begin(), out.end(), tok) == out.end()) out.push_back(std::move(tok));
    }
    return out;
}

std::string normalize_question(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        auto uc = static_cast<unsigned char>(c);
        if (std::isspace(uc)) {
            pending_space = !out.empty();
        } else if (std::isalnum(uc) || uc >= 0x80) {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(uc)));
        }
    }
    return out;
}

bool contains_icase(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                          [](char a, char b) {
                              return std::tolower(static_cast<unsigned char>(a)) ==
                                     std::tolower(static_cast<unsigned char>(b));
                          });
    return it != haystack.end();
}

}  // namespace salesassist::text
