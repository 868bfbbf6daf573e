#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dialogos/dialogue/act.hpp"
#include "dialogos/dialogue/state.hpp"

namespace dialogos {

enum class Modality { acts, text, custom };

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view s);  // throws ValidationError

using CustomPayload = std::map<std::string, std::string>;

// Typed envelope exchanged between modules and between agents. Exactly the
// payload matching the modality is present; the factories enforce it.
class ConversationalFrame {
public:
    static ConversationalFrame from_acts(ActList acts, Role sender, std::uint64_t timestamp = 0);
    static ConversationalFrame from_text(std::string text, Role sender, std::uint64_t timestamp = 0);
    // Throws ValidationError when `payload` is empty.
    static ConversationalFrame from_custom(CustomPayload payload, Role sender, std::uint64_t timestamp = 0);

    Modality modality() const noexcept { return modality_; }
    Role sender() const noexcept { return sender_; }
    std::uint64_t timestamp() const noexcept { return timestamp_; }

    // Accessors throw ValidationError if the frame carries another modality.
    const ActList& acts() const;
    const std::string& text() const;
    const CustomPayload& custom() const;

    bool has_acts() const noexcept { return acts_.has_value(); }
    bool has_text() const noexcept { return text_.has_value(); }
    bool has_custom() const noexcept { return custom_.has_value(); }

    ConversationalFrame with_timestamp(std::uint64_t ts) const;

    // Readable one-line rendering for transcripts and logs.
    std::string describe() const;

    friend bool operator==(const ConversationalFrame&, const ConversationalFrame&) = default;

private:
    ConversationalFrame(Modality m, Role sender, std::uint64_t ts) : modality_(m), sender_(sender), timestamp_(ts) {}

    Modality modality_;
    Role sender_;
    std::uint64_t timestamp_;
    std::optional<ActList> acts_;
    std::optional<std::string> text_;
    std::optional<CustomPayload> custom_;
};

// State frames: a dialogue state travels between tracker and policy as a
// custom frame under this key.
inline constexpr std::string_view kStateKey = "dialogue_state";

ConversationalFrame make_state_frame(const DialogueState& state, Role sender);
std::optional<DialogueState> state_from_frame(const ConversationalFrame& frame);

}  // namespace dialogos
