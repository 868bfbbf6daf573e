#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dialogos {

// Slot schema of a slot-filling domain. All lists are kept sorted, which is
// also the "ontology order" the rule-based components iterate in.
struct Ontology {
    std::map<std::string, std::vector<std::string>> informable;
    std::vector<std::string> requestable;
    std::vector<std::string> system_requestable;

    bool is_informable(std::string_view slot) const;
    bool is_requestable(std::string_view slot) const;
    bool is_system_requestable(std::string_view slot) const;
    bool has_value(std::string_view slot, std::string_view value) const;  // case-insensitive
    std::vector<std::string> informable_slots() const;

    // Throws ValidationError listing the first violated invariant.
    void validate() const;

    friend bool operator==(const Ontology&, const Ontology&) = default;
};

// Deterministic rendering: three top-level keys, two-space indentation,
// trailing newline. Identical ontologies give byte-identical text.
std::string ontology_to_json(const Ontology& ontology);
Ontology ontology_from_json(std::string_view text, const std::string& origin = "<memory>");

Ontology load_ontology(const std::string& path);
void save_ontology(const Ontology& ontology, const std::string& path);

}  // namespace dialogos
