#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dialogos/dialogue/act.hpp"
#include "dialogos/domain/item_database.hpp"
#include "dialogos/domain/ontology.hpp"

namespace dialogos {

// Pattern-based understanding conditioned on the ontology.
//
// Values: every informable ontology value, plus (when a database is given)
// the values of requestable columns such as names or phone numbers, are
// matched as token spans, longest first; a token belongs to one span.
// Slot cues: the slot name or a synonym ("phone number" -> phone, "colour"
// -> color, ...) yields request(slot) for requestable slots, unless the cue
// sits next to a matched value ("cheap price", "the phone is 0123") or in a
// don't-care context ("any price", "i dont care about the price"), which
// yields inform(slot=dontcare) instead.
// Keywords: bye/goodbye, thank*, hi/hello/hey, "how about"/"anything else"
// (reqalts), welcome, yes, leading no, "sorry" (canthelp carrying the
// matched values), "recommend" + item name (offer).
//
// Output has one act per intent, params sorted by slot, acts sorted by
// intent.
class SlotFillingNlu {
public:
    explicit SlotFillingNlu(const Ontology& ontology, const ItemDatabase* database = nullptr);

    // `context_slot`: the slot the other side just asked for; a bare
    // "dont care"/"any" answer is attributed to it.
    ActList understand(std::string_view utterance, const std::optional<std::string>& context_slot = {}) const;

private:
    struct Entry {
        std::vector<std::string> tokens;
        std::string slot;
        std::string value;
        bool informable;
    };

    struct Cue {
        std::vector<std::string> tokens;
        std::string slot;
    };

    std::vector<Entry> lexicon_;  // longest first
    std::vector<Cue> cues_;       // longest first
    std::string offer_column_;
    Ontology ontology_;
};

ActList nlu_understand(std::string_view utterance, const Ontology& ontology, const ItemDatabase* database = nullptr);

}  // namespace dialogos
