#include "dialogos/dialogue/frame.hpp"

#include "dialogos/common/errors.hpp"

namespace dialogos {

std::string_view to_string(Modality m) {
    switch (m) {
        case Modality::acts:
            return "acts";
        case Modality::text:
            return "text";
        case Modality::custom:
            return "custom";
    }
    return "?";
}

Modality parse_modality(std::string_view s) {
    if (s == "acts") return Modality::acts;
    if (s == "text") return Modality::text;
    if (s == "custom") return Modality::custom;
    throw ValidationError("unknown modality '" + std::string(s) + "' (expected acts, text or custom)");
}

ConversationalFrame ConversationalFrame::from_acts(ActList acts, Role sender, std::uint64_t timestamp) {
    ConversationalFrame f(Modality::acts, sender, timestamp);
    f.acts_ = std::move(acts);
    return f;
}

ConversationalFrame ConversationalFrame::from_text(std::string text, Role sender, std::uint64_t timestamp) {
    ConversationalFrame f(Modality::text, sender, timestamp);
    f.text_ = std::move(text);
    return f;
}

ConversationalFrame ConversationalFrame::from_custom(CustomPayload payload, Role sender, std::uint64_t timestamp) {
    if (payload.empty()) throw ValidationError("custom frame must carry at least one key");
    ConversationalFrame f(Modality::custom, sender, timestamp);
    f.custom_ = std::move(payload);
    return f;
}

const ActList& ConversationalFrame::acts() const {
    if (!acts_) throw ValidationError("frame carries " + std::string(to_string(modality_)) + ", not acts");
    return *acts_;
}

const std::string& ConversationalFrame::text() const {
    if (!text_) throw ValidationError("frame carries " + std::string(to_string(modality_)) + ", not text");
    return *text_;
}

const CustomPayload& ConversationalFrame::custom() const {
    if (!custom_) throw ValidationError("frame carries " + std::string(to_string(modality_)) + ", not custom");
    return *custom_;
}

ConversationalFrame ConversationalFrame::with_timestamp(std::uint64_t ts) const {
    auto copy = *this;
    copy.timestamp_ = ts;
    return copy;
}

std::string ConversationalFrame::describe() const {
    switch (modality_) {
        case Modality::acts:
            return serialize_acts(*acts_);
        case Modality::text:
            return *text_;
        case Modality::custom: {
            std::string out;
            for (const auto& [k, v] : *custom_) {
                if (!out.empty()) out += ' ';
                out += k + "=" + v;
            }
            return out;
        }
    }
    return {};
}

ConversationalFrame make_state_frame(const DialogueState& state, Role sender) {
    return ConversationalFrame::from_custom({{std::string(kStateKey), serialize_state(state)}}, sender);
}

std::optional<DialogueState> state_from_frame(const ConversationalFrame& frame) {
    if (!frame.has_custom()) return std::nullopt;
    const auto& payload = frame.custom();
    const auto it = payload.find(std::string(kStateKey));
    if (it == payload.end()) return std::nullopt;
    return deserialize_state(it->second);
}

}  // namespace dialogos
