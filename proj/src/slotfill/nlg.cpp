#include "dialogos/slotfill/nlg.hpp"

#include <filesystem>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"

namespace dialogos {

TemplateTable TemplateTable::defaults() {
    TemplateTable t;
    t.set("hello", "hello.");
    t.set("welcomemsg", "welcome! how may i help you?");
    t.set("bye", "goodbye!");
    t.set("thankyou", "thank you.");
    t.set("reqalts", "is there anything else?");
    t.set("affirm", "yes.");
    t.set("negate", "no.");
    t.set("request", "what {slot} would you like?");
    t.set("inform", "the {slot} is {value}");
    t.set("inform.dontcare", "any {slot} is fine");
    t.set("offer", "i recommend {value}.");
    t.set("canthelp", "sorry, nothing matches {slot} {value}.");
    t.set("canthelp.none", "sorry, i cannot help with that.");
    return t;
}

TemplateTable TemplateTable::user_defaults() {
    TemplateTable t = defaults();
    t.set("request", "what is the {slot}?");
    t.set("inform", "i want {value} {slot}.");
    t.set("inform.dontcare", "i dont care about the {slot}.");
    return t;
}

std::optional<std::string> TemplateTable::find(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void TemplateTable::merge(const TemplateTable& overrides) {
    for (const auto& [k, v] : overrides.entries_) entries_[k] = v;
}

TemplateTable load_templates(const std::string& path, const TemplateTable& base) {
    if (!std::filesystem::exists(path)) throw LoadError(path, "file not found");
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw LoadError(path, e.what());
    }
    if (!root.IsMap()) throw LoadError(path, "expected a mapping from template key to template text");
    TemplateTable table = base;
    for (const auto& entry : root) {
        const auto key = entry.first.as<std::string>();
        if (!entry.second.IsScalar()) throw LoadError(path, "template '" + key + "' is not a string");
        table.set(text::to_lower(key), entry.second.as<std::string>());
    }
    return table;
}

namespace {

bool has_placeholders(const std::string& tmpl) {
    return tmpl.find("{slot}") != std::string::npos || tmpl.find("{value}") != std::string::npos;
}

std::string substitute(std::string tmpl, const SlotParam& param) {
    const auto replace_all = [&](const std::string& from, const std::string& to) {
        for (auto pos = tmpl.find(from); pos != std::string::npos; pos = tmpl.find(from, pos + to.size()))
            tmpl.replace(pos, from.size(), to);
    };
    replace_all("{slot}", param.slot);
    replace_all("{value}", param.value.value_or(""));
    return tmpl;
}

}  // namespace

std::string nlg_generate(const ActList& acts, const TemplateTable& templates) {
    std::vector<std::string> pieces;
    for (const auto& act : acts) {
        const auto intent = text::to_lower(act.intent);
        const auto base = templates.find(intent);
        if (act.params.empty()) {
            const auto tmpl = templates.find(intent + ".none");
            if (tmpl) pieces.push_back(*tmpl);
            else if (base && !has_placeholders(*base)) pieces.push_back(*base);
            else if (base) pieces.push_back(substitute(*base, SlotParam{}));
            else throw GenerationError("no template for intent '" + intent + "'");
            continue;
        }
        std::string previous;
        bool placeholder_free_done = false;
        for (const auto& p : act.params) {
            auto tmpl = templates.find(intent + "." + p.slot);
            if (!tmpl && p.value && text::to_lower(*p.value) == kDontCare) tmpl = templates.find(intent + ".dontcare");
            if (!tmpl) tmpl = base;
            if (!tmpl) throw GenerationError("no template for intent '" + intent + "'");
            if (!has_placeholders(*tmpl)) {
                if (placeholder_free_done) continue;
                placeholder_free_done = true;
            }
            auto rendered = has_placeholders(*tmpl) ? substitute(*tmpl, p) : *tmpl;
            if (rendered == previous) continue;
            previous = rendered;
            pieces.push_back(std::move(rendered));
        }
    }
    return text::join(pieces, " ");
}

}  // namespace dialogos
