// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/pipeline/sql_guard.hpp"

#include <array>
#include <cctype>
#include <optional>

namespace salesassist::pipeline {
namespace {

constexpr std::array<std::string_view, 12> kForbidden = {
    "INSERT", "UPDATE", "DELETE", "DROP",   "ALTER",  "CREATE",
    "REPLACE", "ATTACH", "DETACH", "PRAGMA", "VACUUM", "TRUNCATE"};

enum class TokKind { Word, Literal, Semicolon, Comment, Other };

struct Token {
    TokKind kind;
    std::string text;  // uppercased for words
    std::size_t begin;
    std::size_t end;
};

struct ScanError {
    std::string reason;
};

bool word_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// Tokenizes the whole input. Returns nullopt and fills `err` on an
// unterminated literal or block comment.
std::optional<std::vector<Token>> scan(std::string_view s, ScanError& err) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = s.size();
    while (i < n) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '-' && i + 1 < n && s[i + 1] == '-') {
            std::size_t j = s.find('\n', i);
            j = (j == std::string_view::npos) ? n : j + 1;
            out.push_back({TokKind::Comment, {}, i, j});
            i = j;
        } else if (c == '/' && i + 1 < n && s[i + 1] == '*') {
            std::size_t j = s.find("*/", i + 2);
            if (j == std::string_view::npos) {
                err.reason = "unterminated block comment";
                return std::nullopt;
            }
            out.push_back({TokKind::Comment, {}, i, j + 2});
            i = j + 2;
        } else if (c == '\'' || c == '"' || c == '`' || c == '[') {
            const char close = (c == '[') ? ']' : c;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < n) {
                if (s[j] == close) {
                    // doubled quote is an escaped quote, except for [ident]
                    if (close != ']' && j + 1 < n && s[j + 1] == close) {
                        j += 2;
                        continue;
                    }
                    closed = true;
                    ++j;
                    break;
                }
                ++j;
            }
            if (!closed) {
                err.reason = "unterminated quoted literal";
                return std::nullopt;
            }
            out.push_back({TokKind::Literal, {}, i, j});
            i = j;
        } else if (c == ';') {
            out.push_back({TokKind::Semicolon, ";", i, i + 1});
            ++i;
        } else if (word_start(c)) {
            std::size_t j = i;
            while (j < n && word_char(s[j])) ++j;
            std::string w(s.substr(i, j - i));
            for (auto& ch : w) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
            out.push_back({TokKind::Word, std::move(w), i, j});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < n && (word_char(s[j]) || s[j] == '.')) ++j;
            out.push_back({TokKind::Other, std::string(s.substr(i, j - i)), i, j});
            i = j;
        } else {
            out.push_back({TokKind::Other, std::string(1, c), i, i + 1});
            ++i;
        }
    }
    return out;
}

SqlVerdict reject(std::string reason) {
    return SqlVerdict{false, std::move(reason)};
}

}  // namespace

SqlVerdict validate_readonly_sql(std::string_view sql) {
    ScanError err;
    auto tokens = scan(sql, err);
    if (!tokens) return reject(err.reason);

    std::size_t first = 0;
    while (first < tokens->size() && (*tokens)[first].kind == TokKind::Comment) ++first;
    if (first == tokens->size()) return reject("empty statement");

    bool saw_select = false;
    bool terminated = false;
    for (std::size_t k = first; k < tokens->size(); ++k) {
        const Token& t = (*tokens)[k];
        if (terminated) {
            if (t.kind == TokKind::Comment) return reject("comment after statement end");
            return reject("multiple statements");
        }
        switch (t.kind) {
            case TokKind::Comment:
                return reject("embedded comment");
            case TokKind::Semicolon:
                if (k == first) return reject("empty statement");
                terminated = true;
                break;
            case TokKind::Word:
                for (auto kw : kForbidden) {
                    if (t.text == kw) return reject("forbidden keyword " + t.text);
                }
                if (t.text == "SELECT") saw_select = true;
                break;
            default:
                break;
        }
    }

    const Token& lead = (*tokens)[first];
    if (lead.kind != TokKind::Word || (lead.text != "SELECT" && lead.text != "WITH")) {
        return reject("statement must start with SELECT or WITH");
    }
    if (lead.text == "WITH" && !saw_select) return reject("WITH clause without SELECT");
    return SqlVerdict{true, {}};
}

std::vector<std::string> sql_words(std::string_view sql) {
    ScanError err;
    std::vector<std::string> out;
    auto tokens = scan(sql, err);
    if (!tokens) return out;
    for (auto& t : *tokens) {
        if (t.kind == TokKind::Word) out.push_back(std::move(t.text));
    }
    return out;
}

std::string strip_statement(std::string_view sql) {
    ScanError err;
    auto tokens = scan(sql, err);
    if (!tokens || tokens->empty()) return std::string(sql);
    std::size_t begin = sql.size();
    std::size_t end = 0;
    for (const auto& t : *tokens) {
        if (t.kind == TokKind::Comment || t.kind == TokKind::Semicolon) continue;
        begin = std::min(begin, t.begin);
        end = std::max(end, t.end);
    }
    if (begin >= end) return {};
    return std::string(sql.substr(begin, end - begin));
}

}  // namespace salesassist::pipeline
