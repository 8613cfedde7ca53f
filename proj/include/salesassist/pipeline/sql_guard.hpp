// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace salesassist::pipeline {

struct SqlVerdict {
    bool accepted = false;
    std::string reason;  // empty when accepted

    explicit operator bool() const { return accepted; }
};

/// Read-only gate for LLM-generated SQL. Accepts exactly one SELECT (or
/// WITH ... SELECT) statement with at most one trailing semicolon, no
/// comments after the leading position, and none of the write/DDL/pragma
/// keywords outside string literals and quoted identifiers.
SqlVerdict validate_readonly_sql(std::string_view sql);

/// Uppercased bare keywords/identifiers of `sql`, skipping literals, quoted
/// identifiers and comments. Used for LIMIT detection and table labelling.
std::vector<std::string> sql_words(std::string_view sql);

/// `sql` without leading whitespace/comments and without a trailing
/// semicolon. Assumes the statement already passed validation.
std::string strip_statement(std::string_view sql);

}  // namespace salesassist::pipeline
