#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dialogos/dialogue/act.hpp"
#include "dialogos/dialogue/state.hpp"
#include "dialogos/domain/ontology.hpp"

namespace dialogos {

using ActionMask = std::vector<bool>;

// Discrete state/action abstraction a tabular learner trains over.
class TabularView {
public:
    virtual ~TabularView() = default;

    virtual std::size_t num_states() const = 0;
    virtual std::size_t num_actions() const = 0;
    virtual std::size_t encode(const DialogueState& state) const = 0;
    virtual ActionMask valid_actions(const DialogueState& state) const = 0;
    // Picked when no action is valid.
    virtual std::size_t fallback_action() const = 0;
    virtual std::string describe(std::size_t action) const = 0;
};

enum class SystemActionKind { request, offer, inform_requested, canthelp, bye, welcomemsg };

struct SystemAction {
    SystemActionKind kind;
    std::string slot;  // request only

    friend bool operator==(const SystemAction&, const SystemAction&) = default;
};

// A = {request(s) : s in system_requestable} + {offer, inform_requested,
// canthelp, bye, welcomemsg}; request ids come first in ontology order.
class SystemActionSpace {
public:
    explicit SystemActionSpace(const Ontology& ontology);

    std::size_t size() const noexcept { return request_slots_.size() + 5; }
    SystemAction action(std::size_t id) const;  // throws std::out_of_range
    std::size_t id_of(const SystemAction& action) const;  // throws std::out_of_range
    std::string describe(std::size_t id) const;

    // Validity rules:
    //   terminal state          -> only bye
    //   request(s)              -> s not yet filled
    //   offer                   -> at least one matching item
    //   inform_requested        -> a slot is requested and an item offered
    //   canthelp                -> no matching item
    //   welcomemsg              -> turn <= 1
    //   bye                     -> always
    ActionMask valid_mask(const DialogueState& state) const;

    // Abstract action of a concrete system act list (by its first act).
    std::optional<std::size_t> classify(const ActList& acts) const;

    std::size_t bye_id() const { return request_slots_.size() + 3; }

private:
    std::vector<std::string> request_slots_;
};

// Per informable slot a trit (empty / filled / dontcare), the requested
// slot (none or a requestable slot), a match-count bucket {0, 1, 2-4, 5+}
// and the terminal bit, packed as a mixed-radix integer.
class SlotStateEncoder {
public:
    explicit SlotStateEncoder(const Ontology& ontology);

    std::size_t size() const noexcept { return size_; }
    std::size_t encode(const DialogueState& state) const;

    struct Fields {
        std::vector<int> slot_trits;
        std::size_t requested = 0;  // 0 = none, else 1 + index into requestable
        int db_bucket = 0;
        bool terminal = false;

        friend bool operator==(const Fields&, const Fields&) = default;
    };
    Fields fields(const DialogueState& state) const;
    Fields decode(std::size_t index) const;

    static int db_bucket(std::size_t count);

private:
    std::vector<std::string> informable_;
    std::vector<std::string> requestable_;
    std::size_t size_ = 0;
};

class SystemView final : public TabularView {
public:
    explicit SystemView(const Ontology& ontology) : actions_(ontology), encoder_(ontology) {}

    std::size_t num_states() const override { return encoder_.size(); }
    std::size_t num_actions() const override { return actions_.size(); }
    std::size_t encode(const DialogueState& state) const override { return encoder_.encode(state); }
    ActionMask valid_actions(const DialogueState& state) const override { return actions_.valid_mask(state); }
    std::size_t fallback_action() const override { return actions_.bye_id(); }
    std::string describe(std::size_t action) const override { return actions_.describe(action); }

    const SystemActionSpace& actions() const noexcept { return actions_; }
    const SlotStateEncoder& encoder() const noexcept { return encoder_; }

private:
    SystemActionSpace actions_;
    SlotStateEncoder encoder_;
};

}  // namespace dialogos
