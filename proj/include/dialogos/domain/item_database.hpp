#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dialogos/dialogue/state.hpp"
#include "dialogos/domain/ontology.hpp"

namespace dialogos {

class ItemDatabase;

// Lightweight view of one row; valid while the database lives.
class Item {
public:
    Item(const ItemDatabase& db, std::size_t row) : db_(&db), row_(row) {}

    const std::string& id() const;
    // Throws QueryError for an unknown column.
    const std::string& get(std::string_view column) const;
    std::size_t row_index() const noexcept { return row_; }

    friend bool operator==(const Item& a, const Item& b) { return a.db_ == b.db_ && a.row_ == b.row_; }

private:
    const ItemDatabase* db_;
    std::size_t row_;
};

// Single-table item store. The first column holds a unique item id.
class ItemDatabase {
public:
    using Row = std::vector<std::string>;

    // Throws ValidationError on arity mismatch, empty schema or duplicate ids.
    ItemDatabase(std::string table_name, std::vector<std::string> columns, std::vector<Row> rows);

    const std::string& table_name() const noexcept { return table_; }
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<Row>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }
    bool empty() const noexcept { return rows_.empty(); }

    const std::string& id_column() const { return columns_.front(); }
    std::optional<std::size_t> column_index(std::string_view column) const;
    bool has_column(std::string_view column) const { return column_index(column).has_value(); }

    // Column items are offered by: "name" when present, otherwise the id.
    const std::string& offer_column() const;

    // Row indices ordered by ascending id (numeric when both ids are numeric).
    const std::vector<std::size_t>& id_order() const noexcept { return id_order_; }

    std::optional<Item> find_by_id(std::string_view id) const;
    // Items whose offer column equals `label` (case-insensitive), in id order.
    std::vector<Item> find_by_label(std::string_view label) const;

    // Throws ValidationError if an ontology slot is not a column.
    void check_against(const Ontology& ontology) const;

    friend bool operator==(const ItemDatabase& a, const ItemDatabase& b) {
        return a.table_ == b.table_ && a.columns_ == b.columns_ && a.rows_ == b.rows_;
    }

private:
    std::string table_;
    std::vector<std::string> columns_;
    std::vector<Row> rows_;
    std::vector<std::size_t> id_order_;
};

// Ordering used for item ids.
bool id_less(std::string_view a, std::string_view b);

// Items whose values match every constraint exactly (case-insensitive).
// "dontcare" constraints are ignored. Result in ascending id order.
// Throws QueryError for a constraint on an unknown column.
std::vector<Item> query(const ItemDatabase& db, const SlotMap& constraints);
std::size_t count_matches(const ItemDatabase& db, const SlotMap& constraints);

// SQLite persistence: one table, every column TEXT, rows in insertion order.
void save_database(const ItemDatabase& db, const std::string& path);
ItemDatabase load_database(const std::string& path);

}  // namespace dialogos
