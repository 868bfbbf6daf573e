#include "dialogos/domain/domain_builder.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "dialogos/common/csv.hpp"
#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"

namespace dialogos {

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

bool blank_row(const csv::Row& row) {
    return std::all_of(row.begin(), row.end(), [](const std::string& f) { return text::trim(f).empty(); });
}

}  // namespace

Domain build_domain_in_memory(const DomainBuildSpec& spec) {
    if (!std::filesystem::exists(spec.csv_path)) throw BuildError("missing file: " + spec.csv_path);
    std::vector<csv::Row> rows;
    try {
        rows = csv::read_file(spec.csv_path);
    } catch (const Error& e) {
        throw BuildError("cannot read " + spec.csv_path + ": " + e.what());
    }
    rows.erase(std::remove_if(rows.begin(), rows.end(), blank_row), rows.end());
    if (rows.empty()) throw BuildError("empty CSV: " + spec.csv_path);
    if (rows.size() < 2) throw BuildError("CSV has a header but no data rows: " + spec.csv_path);

    std::vector<std::string> header;
    for (const auto& h : rows.front()) header.emplace_back(text::trim(h));
    const auto column_of = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw BuildError("unknown column: " + name);
        return static_cast<std::size_t>(it - header.begin());
    };

    for (const auto* list : {&spec.informable_columns, &spec.requestable_columns, &spec.system_requestable_columns})
        for (const auto& c : *list) column_of(c);
    for (const auto& c : spec.system_requestable_columns)
        if (std::find(spec.informable_columns.begin(), spec.informable_columns.end(), c) ==
            spec.informable_columns.end())
            throw BuildError("system_requestable column '" + c + "' is not informable");

    std::vector<ItemDatabase::Row> items;
    std::set<std::string> ids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        ItemDatabase::Row row;
        for (const auto& f : rows[r]) row.emplace_back(text::trim(f));
        if (row.size() != header.size())
            throw BuildError("row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                             " fields, header has " + std::to_string(header.size()));
        if (row.front().empty()) throw BuildError("row " + std::to_string(r + 1) + " has an empty id");
        if (!ids.insert(row.front()).second) throw BuildError("duplicate id: " + row.front());
        items.push_back(std::move(row));
    }

    Ontology ontology;
    for (const auto& c : spec.informable_columns) {
        const auto idx = column_of(c);
        std::vector<std::string> values;
        for (const auto& row : items)
            if (!row[idx].empty()) values.push_back(row[idx]);
        values = sorted_unique(std::move(values));
        if (values.empty()) throw BuildError("informable column '" + c + "' has no values");
        ontology.informable[c] = std::move(values);
    }
    ontology.requestable = sorted_unique(spec.requestable_columns);
    ontology.system_requestable = sorted_unique(spec.system_requestable_columns);
    try {
        ontology.validate();
    } catch (const ValidationError& e) {
        throw BuildError(std::string("invalid ontology: ") + e.what());
    }

    const auto table = spec.table_name.empty() ? std::filesystem::path(spec.csv_path).stem().string() : spec.table_name;
    try {
        return Domain{std::move(ontology), ItemDatabase(table, header, std::move(items))};
    } catch (const ValidationError& e) {
        throw BuildError(e.what());
    }
}

Domain build_domain(const DomainBuildSpec& spec) {
    auto domain = build_domain_in_memory(spec);
    if (!spec.ontology_path.empty()) save_ontology(domain.ontology, spec.ontology_path);
    if (!spec.db_path.empty()) save_database(domain.database, spec.db_path);
    return domain;
}

Domain load_domain(const std::string& ontology_path, const std::string& db_path) {
    auto ontology = load_ontology(ontology_path);
    auto db = load_database(db_path);
    try {
        db.check_against(ontology);
    } catch (const ValidationError& e) {
        throw LoadError(db_path, e.what());
    }
    return Domain{std::move(ontology), std::move(db)};
}

}  // namespace dialogos
