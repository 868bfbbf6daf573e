#include "dialogos/dstc2/dstc2.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dialogos/common/csv.hpp"
#include "dialogos/common/errors.hpp"
#include "dialogos/common/text.hpp"
#include "dialogos/learning/tabular_view.hpp"
#include "dialogos/slotfill/dst.hpp"

namespace dialogos::dstc2 {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path.string(), "file not found");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError(path.string(), e.what());
    }
}

const json& member(const json& obj, const char* key, const fs::path& path, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw LoadError(path.string(), where + ": missing \"" + key + "\"");
    return obj.at(key);
}

std::string string_member(const json& obj, const char* key, const fs::path& path, const std::string& where) {
    const auto& v = member(obj, key, path, where);
    if (!v.is_string()) throw LoadError(path.string(), where + ": \"" + key + "\" is not a string");
    return v.get<std::string>();
}

ActList acts_from(const json& list, const fs::path& path, const std::string& where) {
    if (!list.is_array()) throw LoadError(path.string(), where + ": acts must be a list");
    ActList acts;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto at = where + " act " + std::to_string(i);
        const auto intent = string_member(list[i], "act", path, at);
        if (intent.empty()) throw LoadError(path.string(), at + ": empty act name");
        DialogueAct act(intent);
        const auto& slots = list[i].contains("slots") ? list[i]["slots"] : json::array();
        if (!slots.is_array()) throw LoadError(path.string(), at + ": slots must be a list");
        for (const auto& pair : slots) {
            if (!pair.is_array() || pair.empty() || pair.size() > 2 || !pair[0].is_string())
                throw LoadError(path.string(), at + ": each slot must be [name] or [name, value]");
            const auto slot = pair[0].get<std::string>();
            std::optional<std::string> value;
            if (pair.size() == 2) {
                if (pair[1].is_string()) value = pair[1].get<std::string>();
                else if (pair[1].is_number()) value = pair[1].dump();
                else throw LoadError(path.string(), at + ": slot value must be a string or number");
            }
            // DSTC2 writes requests as ["slot", <name>].
            if (text::to_lower(intent) == "request" && slot == "slot" && value)
                act.params.push_back({*value, std::nullopt});
            else
                act.params.push_back({slot, value});
        }
        acts.push_back(std::move(act));
    }
    return acts;
}

std::vector<fs::path> dialogue_directories(const fs::path& root) {
    std::vector<fs::path> dirs;
    if (fs::exists(root / kLogFile) || fs::exists(root / kLabelFile)) dirs.push_back(root);
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const auto& p = entry.path();
        if (fs::exists(p / kLogFile) || fs::exists(p / kLabelFile)) dirs.push_back(p);
    }
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }

}  // namespace

ActList acts_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw LoadError("<memory>", e.what());
    }
    return acts_from(j, "<memory>", "acts");
}

Dialogue read_dialogue(const std::string& directory) {
    const fs::path dir(directory);
    const auto log_path = dir / kLogFile;
    const auto label_path = dir / kLabelFile;
    const auto log = read_json(log_path);
    const auto label = read_json(label_path);

    Dialogue d;
    d.directory = dir.string();
    d.session_id = string_member(log, "session-id", log_path, "log");
    if (string_member(label, "session-id", label_path, "label") != d.session_id)
        throw LoadError(label_path.string(), "session-id does not match " + log_path.string());

    const auto& log_turns = member(log, "turns", log_path, "log");
    const auto& label_turns = member(label, "turns", label_path, "label");
    if (!log_turns.is_array() || !label_turns.is_array())
        throw LoadError(d.directory, "\"turns\" must be a list in both files");
    if (log_turns.size() != label_turns.size())
        throw LoadError(d.directory, "log has " + std::to_string(log_turns.size()) + " turns, label has " +
                                         std::to_string(label_turns.size()));

    for (std::size_t i = 0; i < log_turns.size(); ++i) {
        const auto where = "turn " + std::to_string(i);
        Turn t;
        const auto& lt = log_turns[i];
        const auto& bt = label_turns[i];
        const auto& log_index = member(lt, "turn-index", log_path, where);
        const auto& label_index = member(bt, "turn-index", label_path, where);
        if (!log_index.is_number_integer() || !label_index.is_number_integer() || log_index != label_index ||
            log_index.get<int>() != static_cast<int>(i))
            throw LoadError(d.directory, where + ": turn-index out of sequence");
        t.index = static_cast<int>(i);
        const auto& output = member(lt, "output", log_path, where);
        t.system_transcript = string_member(output, "transcript", log_path, where);
        t.system_acts = acts_from(member(output, "dialog-acts", log_path, where), log_path, where);
        t.user_transcription = string_member(bt, "transcription", label_path, where);
        t.user_acts = acts_from(member(member(bt, "semantics", label_path, where), "json", label_path, where),
                                label_path, where);
        d.turns.push_back(std::move(t));
    }

    if (label.contains("task-information")) {
        const auto& info = label["task-information"];
        if (info.is_object() && info.contains("feedback") && info["feedback"].is_object() &&
            info["feedback"].contains("success") && info["feedback"]["success"].is_boolean())
            d.success = info["feedback"]["success"].get<bool>();
    }
    return d;
}

Ontology derive_ontology(const std::vector<Dialogue>& dialogues) {
    std::map<std::string, std::set<std::string>> informable;
    std::set<std::string> requestable;
    const auto note = [&](const ActList& acts) {
        for (const auto& a : acts) {
            const auto intent = text::to_lower(a.intent);
            for (const auto& p : a.params) {
                if (intent == "request") requestable.insert(p.slot);
                else if (intent == "inform" && p.value && text::to_lower(*p.value) != kDontCare)
                    informable[p.slot].insert(*p.value);
            }
        }
    };
    for (const auto& d : dialogues)
        for (const auto& t : d.turns) {
            note(t.user_acts);
            note(t.system_acts);
        }
    Ontology o;
    for (auto& [slot, values] : informable) {
        o.informable[slot] = {values.begin(), values.end()};
        requestable.insert(slot);
        o.system_requestable.push_back(slot);
    }
    o.requestable = {requestable.begin(), requestable.end()};
    return o;
}

Episode to_episode(const Dialogue& dialogue, std::uint64_t dialogue_id, const Ontology& ontology) {
    const SystemActionSpace space(ontology);
    const MatchCounter no_database = [](const SlotMap&) { return std::size_t{0}; };
    Episode episode;
    episode.dialogue_id = dialogue_id;
    episode.role = Role::system;
    DialogueState state;
    std::string heard;
    for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
        const auto& t = dialogue.turns[i];
        ExperienceTurn turn;
        turn.prev_state = state;
        turn.action_id = space.classify(t.system_acts).value_or(space.size());
        turn.action_text = serialize_acts(t.system_acts);
        auto next = dst_note_own_acts(state, t.system_acts);
        next = dst_update(next, t.user_acts, ontology, no_database).state;
        // A bye from either side ends the episode even if the log goes on.
        const bool last = i + 1 == dialogue.turns.size() || next.is_terminal;
        next.is_terminal = last;
        turn.new_state = next;
        turn.reward = compute_reward(i, last, dialogue.success);
        turn.input_utterance = heard;
        turn.output_utterance = t.system_transcript;
        if (last) turn.success = dialogue.success;
        turn.custom["session_id"] = dialogue.session_id;
        episode.turns.push_back(std::move(turn));
        if (last) break;
        state = next;
        heard = t.user_transcription;
    }
    return episode;
}

Corpus parse_dialogue_logs(const std::string& input_dir, const Ontology* ontology) {
    if (!fs::is_directory(input_dir)) throw LoadError(input_dir, "not a directory");
    Corpus corpus;
    for (const auto& dir : dialogue_directories(input_dir)) {
        try {
            corpus.dialogues.push_back(read_dialogue(dir.string()));
        } catch (const LoadError& e) {
            corpus.errors.push_back({e.path(), e.reason()});
        }
    }
    corpus.ontology = ontology ? *ontology : derive_ontology(corpus.dialogues);
    for (std::size_t i = 0; i < corpus.dialogues.size(); ++i)
        corpus.episodes.push_back(to_episode(corpus.dialogues[i], i, corpus.ontology));
    return corpus;
}

// --- NLU training data ------------------------------------------------------

std::vector<std::string> tokenize(std::string_view transcript) {
    std::string cleaned;
    cleaned.reserve(transcript.size());
    for (char raw : transcript) {
        const auto c = static_cast<unsigned char>(raw);
        if (is_punct(c)) continue;
        cleaned.push_back(static_cast<char>(std::tolower(c)));
    }
    std::vector<std::string> tokens;
    std::istringstream in(cleaned);
    for (std::string tok; in >> tok;) tokens.push_back(tok);
    return tokens;
}

NluExample bio_align(std::string_view transcript, const ActList& acts, AlignStats* stats) {
    NluExample ex;
    ex.tokens = tokenize(transcript);
    if (ex.tokens.empty()) throw ValidationError("cannot align an empty transcript");
    ex.bio_tags.assign(ex.tokens.size(), "O");

    struct Span {
        std::string slot;
        std::vector<std::string> value;
    };
    std::vector<Span> spans;
    for (const auto& a : acts) {
        const auto intent = text::to_lower(a.intent);
        if (intent == "request") {
            for (const auto& p : a.params) ex.intents.insert("request_" + p.slot);
            if (a.params.empty()) ex.intents.insert(intent);
            continue;
        }
        ex.intents.insert(intent);
        if (intent != "inform") continue;
        for (const auto& p : a.params) {
            if (stats) ++stats->informs;
            auto value = tokenize(p.value.value_or(""));
            if (value.empty()) {
                if (stats) ++stats->misses;
                continue;
            }
            spans.push_back({p.slot, std::move(value)});
        }
    }
    std::stable_sort(spans.begin(), spans.end(),
                     [](const Span& a, const Span& b) { return a.value.size() > b.value.size(); });

    std::vector<bool> used(ex.tokens.size(), false);
    for (const auto& span : spans) {
        const auto n = span.value.size();
        bool placed = false;
        for (std::size_t start = 0; !placed && start + n <= ex.tokens.size(); ++start) {
            bool match = true;
            for (std::size_t k = 0; k < n && match; ++k)
                match = !used[start + k] && ex.tokens[start + k] == span.value[k];
            if (!match) continue;
            for (std::size_t k = 0; k < n; ++k) {
                used[start + k] = true;
                ex.bio_tags[start + k] = (k == 0 ? "B-inform-" : "I-inform-") + span.slot;
            }
            placed = true;
        }
        if (!placed && stats) ++stats->misses;
    }
    return ex;
}

bool bio_well_formed(const std::vector<std::string>& tags) {
    std::string open;  // slot of the span being continued, empty outside spans
    for (const auto& tag : tags) {
        if (tag == "O") {
            open.clear();
        } else if (tag.rfind("B-inform-", 0) == 0 && tag.size() > 9) {
            open = tag.substr(9);
        } else if (tag.rfind("I-inform-", 0) == 0 && tag.size() > 9) {
            if (open.empty() || tag.substr(9) != open) return false;
        } else {
            return false;
        }
    }
    return true;
}

std::vector<NluExample> nlu_examples(const std::vector<Dialogue>& dialogues, AlignStats* stats) {
    std::vector<NluExample> out;
    for (const auto& d : dialogues)
        for (const auto& t : d.turns)
            if (!tokenize(t.user_transcription).empty()) out.push_back(bio_align(t.user_transcription, t.user_acts, stats));
    return out;
}

std::string format_nlu_csv(const std::vector<NluExample>& examples) {
    std::string out = csv::format_row({"transcript", "intents", "bio_tags"}, csv::Quoting::all) + '\n';
    for (const auto& ex : examples) {
        const std::vector<std::string> intents(ex.intents.begin(), ex.intents.end());
        out += csv::format_row({text::join(ex.tokens, " "), text::join(intents, " "), text::join(ex.bio_tags, " ")},
                               csv::Quoting::all) +
               '\n';
    }
    return out;
}

void emit_nlu_csv(const std::vector<NluExample>& examples, const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << format_nlu_csv(examples);
    if (!out) throw Error("cannot write " + path);
}

std::vector<NluExample> read_nlu_csv(const std::string& path) {
    std::vector<csv::Row> rows;
    try {
        rows = csv::read_file(path);
    } catch (const Error& e) {
        throw LoadError(path, e.what());
    }
    if (rows.empty() || rows.front() != csv::Row{"transcript", "intents", "bio_tags"})
        throw LoadError(path, "expected the header transcript,intents,bio_tags");
    std::vector<NluExample> out;
    const auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::istringstream in(s);
        for (std::string tok; in >> tok;) parts.push_back(tok);
        return parts;
    };
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 3) throw LoadError(path, "row " + std::to_string(i) + " does not have three fields");
        NluExample ex;
        ex.tokens = split(rows[i][0]);
        const auto intents = split(rows[i][1]);
        ex.intents = {intents.begin(), intents.end()};
        ex.bio_tags = split(rows[i][2]);
        if (ex.bio_tags.size() != ex.tokens.size())
            throw LoadError(path, "row " + std::to_string(i) + " has " + std::to_string(ex.bio_tags.size()) +
                                      " tags for " + std::to_string(ex.tokens.size()) + " tokens");
        out.push_back(std::move(ex));
    }
    return out;
}

}  // namespace dialogos::dstc2
