#pragma once

#include <map>
#include <optional>
#include <string>

#include "dialogos/dialogue/act.hpp"

namespace dialogos {

// Utterance templates keyed by "intent", "intent.slot", "intent.dontcare"
// (params whose value is dontcare) or "intent.none" (act without params).
// Placeholders: {slot} and {value}.
class TemplateTable {
public:
    // Templates for all eleven default intents.
    static TemplateTable defaults();
    // Defaults phrased from the user's side ("what is the {slot}?").
    static TemplateTable user_defaults();

    void set(const std::string& key, std::string tmpl) { entries_[key] = std::move(tmpl); }
    std::optional<std::string> find(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

    // Entries of `overrides` replace ours.
    void merge(const TemplateTable& overrides);

private:
    std::map<std::string, std::string> entries_;
};

// Reads a flat mapping key -> template from a YAML or JSON file and layers
// it over `base`. Throws LoadError.
TemplateTable load_templates(const std::string& path, const TemplateTable& base = TemplateTable::defaults());

// Each act is rendered by its most specific template; a template with
// placeholders is instantiated once per parameter (identical consecutive
// renderings collapse), one without placeholders once. The pieces are
// joined by a space. Throws GenerationError naming an intent without
// template.
std::string nlg_generate(const ActList& acts, const TemplateTable& templates);

}  // namespace dialogos
