#pragma once

#include <string>
#include <vector>

#include "dialogos/domain/item_database.hpp"
#include "dialogos/domain/ontology.hpp"

namespace dialogos {

struct DomainBuildSpec {
    std::string csv_path;
    std::string table_name;
    std::vector<std::string> informable_columns;
    std::vector<std::string> requestable_columns;
    std::vector<std::string> system_requestable_columns;
    // Outputs. Either may be empty to skip writing that file.
    std::string ontology_path;
    std::string db_path;
};

struct Domain {
    Ontology ontology;
    ItemDatabase database;
};

// Derives ontology and item table from a CSV (header row + item rows; the
// first column is the item id). Empty cells stay in rows but never become
// ontology values. Throws BuildError naming the cause.
Domain build_domain_in_memory(const DomainBuildSpec& spec);

// build_domain_in_memory() plus persisting both artifacts.
Domain build_domain(const DomainBuildSpec& spec);

// Loads both files and checks them against each other.
Domain load_domain(const std::string& ontology_path, const std::string& db_path);

}  // namespace dialogos
