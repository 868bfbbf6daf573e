#include "dialogos/domain/item_database.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <memory>
#include <set>

#include <sqlite3.h>

#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"

namespace dialogos {

namespace {

std::optional<long long> as_integer(std::string_view s) {
    long long v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
    return v;
}

}  // namespace

bool id_less(std::string_view a, std::string_view b) {
    const auto ia = as_integer(a);
    const auto ib = as_integer(b);
    if (ia && ib) return *ia < *ib;
    if (ia != ib && (ia || ib)) return ia.has_value();  // numbers sort before words
    return a < b;
}

const std::string& Item::id() const { return db_->rows()[row_].front(); }

const std::string& Item::get(std::string_view column) const {
    const auto idx = db_->column_index(column);
    if (!idx) throw QueryError("unknown column '" + std::string(column) + "'");
    return db_->rows()[row_][*idx];
}

ItemDatabase::ItemDatabase(std::string table_name, std::vector<std::string> columns, std::vector<Row> rows)
    : table_(std::move(table_name)), columns_(std::move(columns)), rows_(std::move(rows)) {
    if (table_.empty()) throw ValidationError("table name must not be empty");
    if (columns_.empty()) throw ValidationError("database needs at least one column");
    std::set<std::string> seen_columns;
    for (const auto& c : columns_)
        if (!seen_columns.insert(c).second) throw ValidationError("duplicate column '" + c + "'");

    std::set<std::string> ids;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].size() != columns_.size())
            throw ValidationError("row " + std::to_string(i) + " has " + std::to_string(rows_[i].size()) +
                                  " values, expected " + std::to_string(columns_.size()));
        if (!ids.insert(rows_[i].front()).second) throw ValidationError("duplicate id '" + rows_[i].front() + "'");
    }
    id_order_.resize(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) id_order_[i] = i;
    std::stable_sort(id_order_.begin(), id_order_.end(),
                     [this](std::size_t a, std::size_t b) { return id_less(rows_[a].front(), rows_[b].front()); });
}

std::optional<std::size_t> ItemDatabase::column_index(std::string_view column) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i] == column) return i;
    return std::nullopt;
}

const std::string& ItemDatabase::offer_column() const {
    static const std::string kName = "name";
    return has_column(kName) ? kName : id_column();
}

std::optional<Item> ItemDatabase::find_by_id(std::string_view id) const {
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (rows_[i].front() == id) return Item(*this, i);
    return std::nullopt;
}

std::vector<Item> ItemDatabase::find_by_label(std::string_view label) const {
    const auto col = *column_index(offer_column());
    std::vector<Item> out;
    for (auto r : id_order_)
        if (text::iequals(rows_[r][col], label)) out.emplace_back(*this, r);
    return out;
}

void ItemDatabase::check_against(const Ontology& ontology) const {
    for (const auto& [slot, _] : ontology.informable)
        if (!has_column(slot)) throw ValidationError("informable slot '" + slot + "' is not a database column");
    for (const auto& slot : ontology.requestable)
        if (!has_column(slot)) throw ValidationError("requestable slot '" + slot + "' is not a database column");
}

namespace {

std::vector<std::pair<std::size_t, std::string>> resolve_constraints(const ItemDatabase& db,
                                                                     const SlotMap& constraints) {
    std::vector<std::pair<std::size_t, std::string>> active;
    for (const auto& [slot, value] : constraints) {
        const auto idx = db.column_index(slot);
        if (!idx) throw QueryError("unknown slot '" + slot + "' in query on table " + db.table_name());
        if (text::iequals(value, kDontCare)) continue;
        active.emplace_back(*idx, value);
    }
    return active;
}

bool row_matches(const ItemDatabase::Row& row, const std::vector<std::pair<std::size_t, std::string>>& active) {
    return std::all_of(active.begin(), active.end(),
                       [&](const auto& c) { return text::iequals(row[c.first], c.second); });
}

}  // namespace

std::vector<Item> query(const ItemDatabase& db, const SlotMap& constraints) {
    const auto active = resolve_constraints(db, constraints);
    std::vector<Item> out;
    for (auto r : db.id_order())
        if (row_matches(db.rows()[r], active)) out.emplace_back(db, r);
    return out;
}

std::size_t count_matches(const ItemDatabase& db, const SlotMap& constraints) {
    const auto active = resolve_constraints(db, constraints);
    return static_cast<std::size_t>(std::count_if(db.rows().begin(), db.rows().end(),
                                                  [&](const auto& row) { return row_matches(row, active); }));
}

// --- SQLite persistence ----------------------------------------------------

namespace {

struct DbCloser {
    void operator()(sqlite3* db) const { sqlite3_close(db); }
};
struct StmtFinalizer {
    void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
};
using DbHandle = std::unique_ptr<sqlite3, DbCloser>;
using Statement = std::unique_ptr<sqlite3_stmt, StmtFinalizer>;

std::string quote_ident(std::string_view name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

DbHandle open_db(const std::string& path, int flags) {
    sqlite3* raw = nullptr;
    const int rc = sqlite3_open_v2(path.c_str(), &raw, flags, nullptr);
    DbHandle handle(raw);
    if (rc != SQLITE_OK) {
        const std::string msg = raw ? sqlite3_errmsg(raw) : "out of memory";
        throw LoadError(path, msg);
    }
    return handle;
}

Statement prepare(sqlite3* db, const std::string& sql) {
    sqlite3_stmt* raw = nullptr;
    if (sqlite3_prepare_v2(db, sql.c_str(), -1, &raw, nullptr) != SQLITE_OK)
        throw Error(std::string("sqlite: ") + sqlite3_errmsg(db) + " in: " + sql);
    return Statement(raw);
}

void exec(sqlite3* db, const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        throw Error("sqlite: " + msg + " in: " + sql);
    }
}

}  // namespace

void save_database(const ItemDatabase& db, const std::string& path) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    DbHandle handle;
    try {
        handle = open_db(path, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE);
    } catch (const LoadError& e) {
        throw BuildError("cannot create database " + path + ": " + e.reason());
    }
    auto* h = handle.get();

    std::string create = "CREATE TABLE " + quote_ident(db.table_name()) + " (";
    for (std::size_t i = 0; i < db.columns().size(); ++i) {
        if (i > 0) create += ", ";
        create += quote_ident(db.columns()[i]) + " TEXT NOT NULL";
        if (i == 0) create += " PRIMARY KEY";
    }
    create += ")";

    try {
        exec(h, "BEGIN");
        exec(h, create);
        std::string insert = "INSERT INTO " + quote_ident(db.table_name()) + " VALUES (";
        for (std::size_t i = 0; i < db.columns().size(); ++i) insert += i == 0 ? "?" : ", ?";
        insert += ")";
        auto stmt = prepare(h, insert);
        for (const auto& row : db.rows()) {
            sqlite3_reset(stmt.get());
            for (std::size_t i = 0; i < row.size(); ++i)
                sqlite3_bind_text(stmt.get(), static_cast<int>(i + 1), row[i].c_str(), static_cast<int>(row[i].size()),
                                  SQLITE_TRANSIENT);
            if (sqlite3_step(stmt.get()) != SQLITE_DONE) throw Error(std::string("sqlite: ") + sqlite3_errmsg(h));
        }
        exec(h, "COMMIT");
    } catch (const Error& e) {
        throw BuildError("cannot write database " + path + ": " + e.what());
    }
}

ItemDatabase load_database(const std::string& path) {
    if (!std::filesystem::exists(path)) throw LoadError(path, "file does not exist");
    auto handle = open_db(path, SQLITE_OPEN_READONLY);
    auto* h = handle.get();
    try {
        std::vector<std::string> tables;
        {
            auto stmt = prepare(h, "SELECT name FROM sqlite_master WHERE type='table' ORDER BY name");
            while (sqlite3_step(stmt.get()) == SQLITE_ROW)
                tables.emplace_back(reinterpret_cast<const char*>(sqlite3_column_text(stmt.get(), 0)));
        }
        if (tables.size() != 1)
            throw LoadError(path, "expected exactly one table, found " + std::to_string(tables.size()));

        auto stmt = prepare(h, "SELECT * FROM " + quote_ident(tables.front()) + " ORDER BY rowid");
        const int ncols = sqlite3_column_count(stmt.get());
        std::vector<std::string> columns;
        for (int i = 0; i < ncols; ++i) columns.emplace_back(sqlite3_column_name(stmt.get(), i));
        std::vector<ItemDatabase::Row> rows;
        int rc = 0;
        while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
            ItemDatabase::Row row;
            row.reserve(static_cast<std::size_t>(ncols));
            for (int i = 0; i < ncols; ++i) {
                const auto* txt = sqlite3_column_text(stmt.get(), i);
                row.emplace_back(txt ? reinterpret_cast<const char*>(txt) : "");
            }
            rows.push_back(std::move(row));
        }
        if (rc != SQLITE_DONE) throw LoadError(path, sqlite3_errmsg(h));
        return ItemDatabase(tables.front(), std::move(columns), std::move(rows));
    } catch (const LoadError&) {
        throw;
    } catch (const Error& e) {
        throw LoadError(path, e.what());
    }
}

}  // namespace dialogos
