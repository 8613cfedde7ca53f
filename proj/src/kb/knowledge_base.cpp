// Copyright 2026 The SalesAssist Authors
// SPDX-License-Identifier: Apache-2.0

#include "salesassist/kb/knowledge_base.hpp"

#include <array>
#include <set>
#include <unordered_set>

#include "salesassist/errors.hpp"
#include "salesassist/pipeline/sql_guard.hpp"
#include "salesassist/text.hpp"
#include "sqlite.hpp"

namespace salesassist::kb {
namespace {

struct TableDef {
    const char* name;
    std::array<const char*, 7> columns;
    std::size_t column_count;
    const char* ddl;
};

const std::array<TableDef, 5> kTables = {{
    {"products",
     {"id", "name", "category", "description"},
     4,
     "CREATE TABLE products ("
     " id INTEGER PRIMARY KEY,"
     " name TEXT NOT NULL UNIQUE,"
     " category TEXT NOT NULL,"
     " description TEXT NOT NULL)"},
    {"coverage_details",
     {"id", "product_id", "coverage_type", "amount", "deductible", "conditions"},
     6,
     "CREATE TABLE coverage_details ("
     " id INTEGER PRIMARY KEY,"
     " product_id INTEGER NOT NULL REFERENCES products(id),"
     " coverage_type TEXT NOT NULL,"
     " amount REAL NOT NULL CHECK (amount >= 0),"
     " deductible REAL NOT NULL CHECK (deductible >= 0),"
     " conditions TEXT NOT NULL)"},
    {"policy_terms",
     {"id", "product_id", "term_length", "renewal_policy", "cancellation_policy"},
     5,
     "CREATE TABLE policy_terms ("
     " id INTEGER PRIMARY KEY,"
     " product_id INTEGER NOT NULL UNIQUE REFERENCES products(id),"
     " term_length TEXT NOT NULL,"
     " renewal_policy TEXT NOT NULL,"
     " cancellation_policy TEXT NOT NULL)"},
    {"faqs",
     {"id", "product_id", "question", "answer"},
     4,
     "CREATE TABLE faqs ("
     " id INTEGER PRIMARY KEY,"
     " product_id INTEGER NOT NULL REFERENCES products(id),"
     " question TEXT NOT NULL CHECK (length(question) > 0),"
     " answer TEXT NOT NULL CHECK (length(answer) > 0))"},
    {"pricing_tiers",
     {"id", "product_id", "tier_name", "monthly_premium", "annual_premium", "age_min", "age_max"},
     7,
     "CREATE TABLE pricing_tiers ("
     " id INTEGER PRIMARY KEY,"
     " product_id INTEGER NOT NULL REFERENCES products(id),"
     " tier_name TEXT NOT NULL,"
     " monthly_premium REAL NOT NULL CHECK (monthly_premium > 0),"
     " annual_premium REAL NOT NULL CHECK (annual_premium > 0),"
     " age_min INTEGER NOT NULL,"
     " age_max INTEGER NOT NULL,"
     " CHECK (age_min <= age_max))"},
}};

std::vector<std::string> table_columns(const sqlite::Connection& db, const char* table) {
    std::vector<std::string> cols;
    auto st = db.prepare(std::string("PRAGMA table_info(") + table + ")");
    while (st.step()) cols.push_back(st.column_text(1));
    return cols;
}

sqlite::Connection open_readonly(const std::filesystem::path& p) {
    return sqlite::Connection::open(p.string(), SQLITE_OPEN_READONLY | SQLITE_OPEN_NOMUTEX);
}

class Transaction {
public:
    explicit Transaction(const sqlite::Connection& db) : db_(db) { db_.exec("BEGIN IMMEDIATE"); }
    ~Transaction() {
        if (!done_) sqlite3_exec(db_.get(), "ROLLBACK", nullptr, nullptr, nullptr);
    }
    void commit() {
        db_.exec("COMMIT");
        done_ = true;
    }

private:
    const sqlite::Connection& db_;
    bool done_ = false;
};

void validate_dataset(const Dataset& d) {
    std::unordered_set<std::int64_t> ids;
    std::unordered_set<std::string> names;
    for (const auto& p : d.products) {
        if (!ids.insert(p.id).second) throw UniquenessError("duplicate product id " + std::to_string(p.id));
        if (!names.insert(p.name).second) throw UniquenessError("duplicate product name '" + p.name + "'");
    }
    auto check_ref = [&ids](const char* table, std::int64_t row_id, std::int64_t product_id) {
        if (ids.count(product_id) == 0) {
            throw ReferentialIntegrityError(std::string(table) + " row " + std::to_string(row_id) +
                                            " references missing product_id " + std::to_string(product_id));
        }
    };
    for (const auto& c : d.coverage_details) {
        check_ref("coverage_details", c.id, c.product_id);
        if (c.amount < 0 || c.deductible < 0) throw ValidationError("negative coverage amount or deductible");
    }
    std::unordered_set<std::int64_t> term_products;
    for (const auto& t : d.policy_terms) {
        check_ref("policy_terms", t.id, t.product_id);
        if (!term_products.insert(t.product_id).second) {
            throw UniquenessError("more than one policy term for product " + std::to_string(t.product_id));
        }
    }
    for (const auto& f : d.faqs) {
        check_ref("faqs", f.id, f.product_id);
        if (f.question.empty() || f.answer.empty()) throw ValidationError("empty FAQ question or answer");
    }
    for (const auto& t : d.pricing_tiers) {
        check_ref("pricing_tiers", t.id, t.product_id);
        if (t.age_min > t.age_max) throw ValidationError("pricing tier age_min > age_max");
        if (t.monthly_premium <= 0 || t.annual_premium <= 0) throw ValidationError("non-positive premium");
    }
}

int progress_deadline(void* ctx) {
    auto deadline = static_cast<const std::chrono::steady_clock::time_point*>(ctx);
    return std::chrono::steady_clock::now() > *deadline ? 1 : 0;
}

nlohmann::ordered_json column_value(sqlite3_stmt* st, int i) {
    switch (sqlite3_column_type(st, i)) {
        case SQLITE_INTEGER:
            return sqlite3_column_int64(st, i);
        case SQLITE_FLOAT:
            return sqlite3_column_double(st, i);
        case SQLITE_TEXT: {
            auto p = reinterpret_cast<const char*>(sqlite3_column_text(st, i));
            return std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(st, i)));
        }
        case SQLITE_BLOB:
            return "<blob " + std::to_string(sqlite3_column_bytes(st, i)) + " bytes>";
        default:
            return nullptr;
    }
}

}  // namespace

void to_json(nlohmann::json& j, const KbStats& s) {
    j = nlohmann::json{{"products", s.products},         {"coverage_details", s.coverage_details},
                       {"policy_terms", s.policy_terms}, {"faqs", s.faqs},
                       {"pricing_tiers", s.pricing_tiers}, {"approx_tokens", s.approx_tokens}};
}

std::string schema_description() {
    return "products(id INTEGER PRIMARY KEY, name TEXT, category TEXT, description TEXT)\n"
           "coverage_details(id INTEGER PRIMARY KEY, product_id INTEGER REFERENCES products(id), "
           "coverage_type TEXT, amount REAL, deductible REAL, conditions TEXT)\n"
           "policy_terms(id INTEGER PRIMARY KEY, product_id INTEGER REFERENCES products(id), term_length TEXT, "
           "renewal_policy TEXT, cancellation_policy TEXT)\n"
           "faqs(id INTEGER PRIMARY KEY, product_id INTEGER REFERENCES products(id), question TEXT, answer TEXT)\n"
           "pricing_tiers(id INTEGER PRIMARY KEY, product_id INTEGER REFERENCES products(id), tier_name TEXT, "
           "monthly_premium REAL, annual_premium REAL, age_min INTEGER, age_max INTEGER)\n"
           "Product categories: Life, Health, Auto, Home, Travel, Disability, Dental, Vision, Pet, Business.";
}

KnowledgeBase KnowledgeBase::init_schema(const std::filesystem::path& store_path) {
    auto db = sqlite::Connection::open(store_path.string(), SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
    if (sqlite3_db_readonly(db.get(), "main") == 1) {
        throw StorageError("knowledge base at " + store_path.string() + " is not writable");
    }
    try {
        Transaction tx(db);
        for (const auto& t : kTables) {
            auto cols = table_columns(db, t.name);
            if (cols.empty()) {
                db.exec(t.ddl);
                continue;
            }
            std::vector<std::string> expected(t.columns.begin(), t.columns.begin() + t.column_count);
            if (cols != expected) {
                throw SchemaMismatchError(std::string("table ") + t.name + " has an unexpected column layout");
            }
        }
        tx.commit();
    } catch (const SchemaMismatchError&) {
        throw;
    } catch (const Error& e) {
        throw StorageError("cannot initialize knowledge base at " + store_path.string() + ": " + e.what());
    }
    return KnowledgeBase(store_path);
}

KnowledgeBase KnowledgeBase::open_existing(const std::filesystem::path& store_path) {
    if (!std::filesystem::exists(store_path)) {
        throw StorageError("knowledge base not found at " + store_path.string());
    }
    auto db = open_readonly(store_path);
    for (const auto& t : kTables) {
        std::vector<std::string> cols;
        try {
            cols = table_columns(db, t.name);
        } catch (const Error& e) {
            throw StorageError(std::string("cannot read knowledge base: ") + e.what());
        }
        std::vector<std::string> expected(t.columns.begin(), t.columns.begin() + t.column_count);
        if (cols.empty()) throw StorageError(std::string("knowledge base is missing table ") + t.name);
        if (cols != expected) throw SchemaMismatchError(std::string("table ") + t.name + " has an unexpected column layout");
    }
    return KnowledgeBase(store_path);
}

KbStats KnowledgeBase::seed(const Dataset& dataset, bool overwrite) {
    validate_dataset(dataset);

    auto db = sqlite::Connection::open(path_.string(), SQLITE_OPEN_READWRITE);
    db.exec("PRAGMA foreign_keys = ON");
    {
        Transaction tx(db);
        auto probe = db.prepare(
            "SELECT (SELECT COUNT(*) FROM products) + (SELECT COUNT(*) FROM coverage_details) + "
            "(SELECT COUNT(*) FROM policy_terms) + (SELECT COUNT(*) FROM faqs) + (SELECT COUNT(*) FROM pricing_tiers)");
        probe.step();
        if (probe.column_int(0) > 0) {
            if (!overwrite) throw AlreadySeededError("knowledge base is already seeded; pass overwrite to replace it");
            db.exec("DELETE FROM faqs; DELETE FROM pricing_tiers; DELETE FROM policy_terms; "
                    "DELETE FROM coverage_details; DELETE FROM products;");
        }

        auto run = [](sqlite::Statement& st) {
            st.step();
            st.reset();
        };
        auto ins_p = db.prepare("INSERT INTO products (id, name, category, description) VALUES (?, ?, ?, ?)");
        for (const auto& p : dataset.products) {
            ins_p.bind(1, p.id).bind(2, p.name).bind(3, p.category).bind(4, p.description);
            run(ins_p);
        }
        auto ins_c = db.prepare(
            "INSERT INTO coverage_details (id, product_id, coverage_type, amount, deductible, conditions) "
            "VALUES (?, ?, ?, ?, ?, ?)");
        for (const auto& c : dataset.coverage_details) {
            ins_c.bind(1, c.id).bind(2, c.product_id).bind(3, c.coverage_type).bind(4, c.amount);
            ins_c.bind(5, c.deductible).bind(6, c.conditions);
            run(ins_c);
        }
        auto ins_t = db.prepare(
            "INSERT INTO policy_terms (id, product_id, term_length, renewal_policy, cancellation_policy) "
            "VALUES (?, ?, ?, ?, ?)");
        for (const auto& t : dataset.policy_terms) {
            ins_t.bind(1, t.id).bind(2, t.product_id).bind(3, t.term_length).bind(4, t.renewal_policy);
            ins_t.bind(5, t.cancellation_policy);
            run(ins_t);
        }
        auto ins_f = db.prepare("INSERT INTO faqs (id, product_id, question, answer) VALUES (?, ?, ?, ?)");
        for (const auto& f : dataset.faqs) {
            ins_f.bind(1, f.id).bind(2, f.product_id).bind(3, f.question).bind(4, f.answer);
            run(ins_f);
        }
        auto ins_r = db.prepare(
            "INSERT INTO pricing_tiers (id, product_id, tier_name, monthly_premium, annual_premium, age_min, age_max) "
            "VALUES (?, ?, ?, ?, ?, ?, ?)");
        for (const auto& r : dataset.pricing_tiers) {
            ins_r.bind(1, r.id).bind(2, r.product_id).bind(3, r.tier_name).bind(4, r.monthly_premium);
            ins_r.bind(5, r.annual_premium).bind(6, std::int64_t{r.age_min}).bind(7, std::int64_t{r.age_max});
            run(ins_r);
        }
        tx.commit();
    }
    return stats();
}

KbStats KnowledgeBase::stats() const {
    auto db = open_readonly(path_);
    auto st = db.prepare(
        "SELECT (SELECT COUNT(*) FROM products), (SELECT COUNT(*) FROM coverage_details),"
        " (SELECT COUNT(*) FROM policy_terms), (SELECT COUNT(*) FROM faqs), (SELECT COUNT(*) FROM pricing_tiers),"
        " COALESCE((SELECT SUM(LENGTH(name) + LENGTH(category) + LENGTH(description)) FROM products), 0)"
        " + COALESCE((SELECT SUM(LENGTH(coverage_type) + LENGTH(conditions)) FROM coverage_details), 0)"
        " + COALESCE((SELECT SUM(LENGTH(term_length) + LENGTH(renewal_policy) + LENGTH(cancellation_policy))"
        "             FROM policy_terms), 0)"
        " + COALESCE((SELECT SUM(LENGTH(question) + LENGTH(answer)) FROM faqs), 0)"
        " + COALESCE((SELECT SUM(LENGTH(tier_name)) FROM pricing_tiers), 0)");
    st.step();
    KbStats s;
    s.products = st.column_int(0);
    s.coverage_details = st.column_int(1);
    s.policy_terms = st.column_int(2);
    s.faqs = st.column_int(3);
    s.pricing_tiers = st.column_int(4);
    s.approx_tokens = st.column_int(5) / 4;
    return s;
}

std::vector<ScoredFaq> KnowledgeBase::faq_keyword_search(const std::string& question, std::size_t limit) const {
    if (limit == 0) throw ContractViolation("faq_keyword_search limit must be >= 1");
    const auto words = text::keywords(question);
    if (words.empty()) return {};

    std::string score_expr;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i != 0) score_expr += " + ";
        const auto p = std::to_string(i + 1);
        score_expr += "(CASE WHEN question LIKE ?" + p + " ESCAPE '\\' OR answer LIKE ?" + p +
                      " ESCAPE '\\' THEN 1 ELSE 0 END)";
    }
    const std::string sql = "SELECT id, product_id, question, answer, score FROM (SELECT id, product_id, question, "
                            "answer, " + score_expr + " AS score FROM faqs) WHERE score > 0 "
                            "ORDER BY score DESC, id ASC LIMIT " + std::to_string(limit);

    auto db = open_readonly(path_);
    auto st = db.prepare(sql);
    for (std::size_t i = 0; i < words.size(); ++i) {
        std::string pattern = "%";
        for (char c : words[i]) {
            if (c == '%' || c == '_' || c == '\\') pattern.push_back('\\');
            pattern.push_back(c);
        }
        pattern.push_back('%');
        st.bind(static_cast<int>(i + 1), pattern);
    }
    std::vector<ScoredFaq> out;
    while (st.step()) {
        out.push_back(ScoredFaq{Faq{st.column_int(0), st.column_int(1), st.column_text(2), st.column_text(3)},
                                static_cast<int>(st.column_int(4))});
    }
    return out;
}

std::vector<Row> KnowledgeBase::execute_readonly_sql(const std::string& sql, std::chrono::milliseconds timeout) const {
    auto verdict = pipeline::validate_readonly_sql(sql);
    if (!verdict) throw RejectedSqlError("rejected SQL: " + verdict.reason);

    std::string statement = pipeline::strip_statement(sql);
    const auto words = pipeline::sql_words(statement);
    if (std::find(words.begin(), words.end(), "LIMIT") == words.end()) {
        statement += " LIMIT " + std::to_string(kRowCap);
    }

    auto db = open_readonly(path_);
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    sqlite3_progress_handler(db.get(), 1000, &progress_deadline, const_cast<std::chrono::steady_clock::time_point*>(&deadline));

    auto st = db.prepare(statement);
    if (sqlite3_stmt_readonly(st.get()) == 0) throw RejectedSqlError("rejected SQL: statement is not read-only");

    const int ncol = sqlite3_column_count(st.get());
    std::vector<Row> rows;
    while (rows.size() < kRowCap) {
        int rc = st.step_raw();
        if (rc == SQLITE_DONE) break;
        if (rc == SQLITE_ROW) {
            Row row = Row::object();
            for (int i = 0; i < ncol; ++i) row[sqlite3_column_name(st.get(), i)] = column_value(st.get(), i);
            rows.push_back(std::move(row));
            continue;
        }
        if ((rc & 0xff) == SQLITE_INTERRUPT) {
            throw TimeoutError("query exceeded " + std::to_string(timeout.count()) + " ms");
        }
        throw QueryError(db.errmsg());
    }
    return rows;
}

std::vector<std::string> KnowledgeBase::product_names() const {
    auto db = open_readonly(path_);
    auto st = db.prepare("SELECT name FROM products ORDER BY id");
    std::vector<std::string> out;
    while (st.step()) out.push_back(st.column_text(0));
    return out;
}

std::map<std::string, std::int64_t> KnowledgeBase::products_per_category() const {
    auto db = open_readonly(path_);
    auto st = db.prepare("SELECT category, COUNT(*) FROM products GROUP BY category");
    std::map<std::string, std::int64_t> out;
    while (st.step()) out[st.column_text(0)] = st.column_int(1);
    return out;
}

}  // namespace salesassist::kb
