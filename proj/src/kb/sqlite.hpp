// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

// Thin RAII layer over the sqlite3 C API.

#pragma once

#include <sqlite3.h>

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "salesassist/errors.hpp"

namespace salesassist::kb::sqlite {

struct DbCloser {
    void operator()(sqlite3* db) const { sqlite3_close_v2(db); }
};
struct StmtFinalizer {
    void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
};

class Statement;

class Connection {
public:
    static Connection open(const std::string& path, int flags) {
        sqlite3* raw = nullptr;
        int rc = sqlite3_open_v2(path.c_str(), &raw, flags, nullptr);
        Connection c(raw);
        if (rc != SQLITE_OK) {
            std::string msg = raw ? sqlite3_errmsg(raw) : sqlite3_errstr(rc);
            throw StorageError("cannot open knowledge base at " + path + ": " + msg);
        }
        sqlite3_busy_timeout(raw, 5000);
        sqlite3_extended_result_codes(raw, 1);
        return c;
    }

    sqlite3* get() const { return db_.get(); }

    void exec(const std::string& sql) const {
        char* err = nullptr;
        int rc = sqlite3_exec(db_.get(), sql.c_str(), nullptr, nullptr, &err);
        if (rc != SQLITE_OK) {
            std::string msg = err ? err : sqlite3_errstr(rc);
            sqlite3_free(err);
            throw StorageError(msg);
        }
    }

    std::string errmsg() const { return sqlite3_errmsg(db_.get()); }

    Statement prepare(std::string_view sql) const;

private:
    explicit Connection(sqlite3* raw) : db_(raw) {}
    std::unique_ptr<sqlite3, DbCloser> db_;
};

class Statement {
public:
    Statement(sqlite3* db, sqlite3_stmt* s) : db_(db), stmt_(s) {}

    sqlite3_stmt* get() const { return stmt_.get(); }

    Statement& bind(int idx, std::int64_t v) {
        check(sqlite3_bind_int64(stmt_.get(), idx, v));
        return *this;
    }
    Statement& bind(int idx, double v) {
        check(sqlite3_bind_double(stmt_.get(), idx, v));
        return *this;
    }
    Statement& bind(int idx, std::string_view v) {
        check(sqlite3_bind_text(stmt_.get(), idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
        return *this;
    }

    /// Returns true when a row is available. Throws StorageError otherwise
    /// unless the statement is done.
    bool step() {
        last_rc_ = sqlite3_step(stmt_.get());
        if (last_rc_ == SQLITE_ROW) return true;
        if (last_rc_ == SQLITE_DONE) return false;
        throw StorageError(sqlite3_errmsg(db_));
    }

    /// Raw step result for callers that classify errors themselves.
    int step_raw() { return last_rc_ = sqlite3_step(stmt_.get()); }

    void reset() {
        sqlite3_reset(stmt_.get());
        sqlite3_clear_bindings(stmt_.get());
    }

    std::int64_t column_int(int i) const { return sqlite3_column_int64(stmt_.get(), i); }
    double column_double(int i) const { return sqlite3_column_double(stmt_.get(), i); }
    std::string column_text(int i) const {
        auto p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_.get(), i));
        return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_.get(), i))) : std::string();
    }

private:
    void check(int rc) const {
        if (rc != SQLITE_OK) throw StorageError(sqlite3_errmsg(db_));
    }

    sqlite3* db_;
    std::unique_ptr<sqlite3_stmt, StmtFinalizer> stmt_;
    int last_rc_ = SQLITE_OK;
};

inline Statement Connection::prepare(std::string_view sql) const {
    sqlite3_stmt* raw = nullptr;
    int rc = sqlite3_prepare_v2(db_.get(), sql.data(), static_cast<int>(sql.size()), &raw, nullptr);
    if (rc != SQLITE_OK) throw QueryError(sqlite3_errmsg(db_.get()));
    return Statement(db_.get(), raw);
}

}  // namespace salesassist::kb::sqlite
