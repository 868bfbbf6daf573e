#include "dialogos/domain/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"

namespace dialogos {

using nlohmann::ordered_json;

namespace {

bool contains(const std::vector<std::string>& v, std::string_view s) {
    return std::binary_search(v.begin(), v.end(), s, std::less<>());
}

bool valid_slot_name(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        const auto u = static_cast<unsigned char>(c);
        return !std::isspace(u) && !std::isupper(u);
    });
}

bool sorted_unique(const std::vector<std::string>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

}  // namespace

bool Ontology::is_informable(std::string_view slot) const { return informable.find(std::string(slot)) != informable.end(); }

bool Ontology::is_requestable(std::string_view slot) const { return contains(requestable, slot); }

bool Ontology::is_system_requestable(std::string_view slot) const { return contains(system_requestable, slot); }

bool Ontology::has_value(std::string_view slot, std::string_view value) const {
    const auto it = informable.find(std::string(slot));
    if (it == informable.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const std::string& v) { return text::iequals(v, value); });
}

std::vector<std::string> Ontology::informable_slots() const {
    std::vector<std::string> out;
    out.reserve(informable.size());
    for (const auto& [slot, _] : informable) out.push_back(slot);
    return out;
}

void Ontology::validate() const {
    for (const auto& [slot, values] : informable) {
        if (!valid_slot_name(slot)) throw ValidationError("informable slot '" + slot + "' is not a lowercase token");
        if (values.empty()) throw ValidationError("informable slot '" + slot + "' has no values");
        if (!sorted_unique(values))
            throw ValidationError("values of informable slot '" + slot + "' are not sorted and deduplicated");
        for (const auto& v : values)
            if (v.empty()) throw ValidationError("informable slot '" + slot + "' has an empty value");
    }
    for (const auto* list : {&requestable, &system_requestable}) {
        const char* name = list == &requestable ? "requestable" : "system_requestable";
        if (!sorted_unique(*list)) throw ValidationError(std::string(name) + " slots are not sorted and deduplicated");
        for (const auto& s : *list)
            if (!valid_slot_name(s))
                throw ValidationError(std::string(name) + " slot '" + s + "' is not a lowercase token");
    }
    for (const auto& s : system_requestable)
        if (!is_informable(s)) throw ValidationError("system_requestable slot '" + s + "' is not informable");
}

std::string ontology_to_json(const Ontology& ontology) {
    ordered_json j;
    ordered_json inf = ordered_json::object();
    for (const auto& [slot, values] : ontology.informable) inf[slot] = values;
    j["informable"] = inf;
    j["requestable"] = ontology.requestable;
    j["system_requestable"] = ontology.system_requestable;
    return j.dump(2) + "\n";
}

Ontology ontology_from_json(std::string_view text, const std::string& origin) {
    Ontology o;
    try {
        const auto j = ordered_json::parse(text);
        if (!j.is_object()) throw LoadError(origin, "top level must be an object");
        for (const auto& key : {"informable", "requestable", "system_requestable"})
            if (!j.contains(key)) throw LoadError(origin, std::string("missing key '") + key + "'");
        for (const auto& [key, _] : j.items())
            if (key != "informable" && key != "requestable" && key != "system_requestable")
                throw LoadError(origin, "unexpected key '" + key + "'");
        for (const auto& [slot, values] : j.at("informable").items())
            o.informable[slot] = values.get<std::vector<std::string>>();
        o.requestable = j.at("requestable").get<std::vector<std::string>>();
        o.system_requestable = j.at("system_requestable").get<std::vector<std::string>>();
    } catch (const ordered_json::exception& e) {
        throw LoadError(origin, e.what());
    }
    try {
        o.validate();
    } catch (const ValidationError& e) {
        throw LoadError(origin, e.what());
    }
    return o;
}

Ontology load_ontology(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path, "cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return ontology_from_json(buffer.str(), path);
}

void save_ontology(const Ontology& ontology, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw BuildError("cannot write ontology file " + path);
    out << ontology_to_json(ontology);
    if (!out) throw BuildError("failed writing ontology file " + path);
}

}  // namespace dialogos
