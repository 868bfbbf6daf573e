#pragma once

#include <set>
#include <string>
#include <vector>

#include "dialogos/dialogue/act.hpp"
#include "dialogos/domain/ontology.hpp"
#include "dialogos/learning/experience.hpp"

namespace dialogos::dstc2 {

// Expected input layout. Every directory below the input root that holds
// both files is one dialogue; dialogues are visited in path order.
//
//   log.json    {"session-id": str,
//                "turns": [{"turn-index": int,
//                           "output": {"transcript": str,
//                                      "dialog-acts": [act, ...]}}, ...]}
//   label.json  {"session-id": str,
//                "task-information": {"feedback": {"success": bool}},  (optional)
//                "turns": [{"turn-index": int,
//                           "transcription": str,
//                           "semantics": {"json": [act, ...]}}, ...]}
//
//   act         {"act": str, "slots": [[slot, value], ...]}
//
// A request is written {"act": "request", "slots": [["slot", name]]}.
// Both files must agree on the session id and the turn indices.
inline constexpr const char* kLogFile = "log.json";
inline constexpr const char* kLabelFile = "label.json";

struct Turn {
    int index = 0;
    std::string system_transcript;
    ActList system_acts;
    std::string user_transcription;
    ActList user_acts;
};

struct Dialogue {
    std::string session_id;
    std::string directory;
    std::vector<Turn> turns;
    bool success = false;
};

struct FileError {
    std::string path;
    std::string reason;
};

struct Corpus {
    std::vector<Dialogue> dialogues;
    std::vector<Episode> episodes;  // one per dialogue, system perspective
    std::vector<FileError> errors;
    Ontology ontology;              // the one used for state tracking
};

// Reads one dialogue directory. Throws ParseError describing the problem.
Dialogue read_dialogue(const std::string& directory);

// Converts DSTC2 act objects ({"act", "slots"}) into acts.
ActList acts_from_json(const std::string& json_text);

// Slots and values seen in the dialogues: inform values become informable
// values, request slots and informable slots become requestable.
Ontology derive_ontology(const std::vector<Dialogue>& dialogues);

// Episode in the experience format. State tracking uses the slot-filling
// DST over `ontology`; the system acts of each turn are the action
// (classified into the system action space, or one past its end when the
// act has no counterpart there).
Episode to_episode(const Dialogue& dialogue, std::uint64_t dialogue_id, const Ontology& ontology);

// Walks `input_dir`. Unreadable dialogues are skipped and listed in
// `errors`. Throws LoadError when the directory does not exist. Without an
// ontology one is derived from the parsed dialogues.
Corpus parse_dialogue_logs(const std::string& input_dir, const Ontology* ontology = nullptr);

// --- NLU training data ------------------------------------------------------

struct NluExample {
    std::vector<std::string> tokens;
    std::set<std::string> intents;
    std::vector<std::string> bio_tags;

    friend bool operator==(const NluExample&, const NluExample&) = default;
};

struct AlignStats {
    std::size_t informs = 0;
    std::size_t misses = 0;  // inform values not found in the transcript
};

// Lowercase, punctuation stripped, split on whitespace.
std::vector<std::string> tokenize(std::string_view transcript);

// Tags inform values as B-inform-slot / I-inform-slot spans, longest value
// first, each token at most once. Requests contribute "request_<slot>"
// intents, every other act its intent. Throws ValidationError on an empty
// transcript.
NluExample bio_align(std::string_view transcript, const ActList& acts, AlignStats* stats = nullptr);

// Tag sequence is well formed: an I- tag continues a B- or I- tag of the
// same slot.
bool bio_well_formed(const std::vector<std::string>& tags);

// One example per user turn with a non-empty transcription.
std::vector<NluExample> nlu_examples(const std::vector<Dialogue>& dialogues, AlignStats* stats = nullptr);

// Header transcript,intents,bio_tags; intents sorted and space-joined; every
// field quoted.
std::string format_nlu_csv(const std::vector<NluExample>& examples);
void emit_nlu_csv(const std::vector<NluExample>& examples, const std::string& path);  // throws Error
std::vector<NluExample> read_nlu_csv(const std::string& path);                        // throws LoadError

}  // namespace dialogos::dstc2
