#include "dialogos/learning/tabular_view.hpp"

#include <algorithm>
#include <stdexcept>

#include "dialogos/common/text.hpp"

namespace dialogos {

namespace {

constexpr std::size_t kFixedActions = 5;
const char* const kFixedNames[kFixedActions] = {"offer", "inform_requested", "canthelp", "bye", "welcomemsg"};
const SystemActionKind kFixedKinds[kFixedActions] = {SystemActionKind::offer, SystemActionKind::inform_requested,
                                                     SystemActionKind::canthelp, SystemActionKind::bye,
                                                     SystemActionKind::welcomemsg};

}  // namespace

SystemActionSpace::SystemActionSpace(const Ontology& ontology) : request_slots_(ontology.system_requestable) {}

SystemAction SystemActionSpace::action(std::size_t id) const {
    if (id < request_slots_.size()) return {SystemActionKind::request, request_slots_[id]};
    const auto k = id - request_slots_.size();
    if (k >= kFixedActions) throw std::out_of_range("system action id " + std::to_string(id) + " out of range");
    return {kFixedKinds[k], {}};
}

std::size_t SystemActionSpace::id_of(const SystemAction& a) const {
    if (a.kind == SystemActionKind::request) {
        const auto it = std::find(request_slots_.begin(), request_slots_.end(), a.slot);
        if (it == request_slots_.end()) throw std::out_of_range("no request action for slot " + a.slot);
        return static_cast<std::size_t>(it - request_slots_.begin());
    }
    for (std::size_t k = 0; k < kFixedActions; ++k)
        if (kFixedKinds[k] == a.kind) return request_slots_.size() + k;
    throw std::out_of_range("unknown system action kind");
}

std::string SystemActionSpace::describe(std::size_t id) const {
    if (id < request_slots_.size()) return "request(" + request_slots_[id] + ")";
    const auto k = id - request_slots_.size();
    if (k >= kFixedActions) throw std::out_of_range("system action id " + std::to_string(id) + " out of range");
    return kFixedNames[k];
}

ActionMask SystemActionSpace::valid_mask(const DialogueState& state) const {
    ActionMask mask(size(), false);
    const auto at = [&](SystemActionKind kind) { return id_of({kind, {}}); };
    mask[bye_id()] = true;
    if (state.is_terminal) return mask;
    for (std::size_t i = 0; i < request_slots_.size(); ++i)
        mask[i] = !state.slots_filled.contains(request_slots_[i]);
    mask[at(SystemActionKind::offer)] = state.db_match_count > 0;
    mask[at(SystemActionKind::inform_requested)] = state.requested_slot.has_value() && state.offered_item.has_value();
    mask[at(SystemActionKind::canthelp)] = state.db_match_count == 0;
    mask[at(SystemActionKind::welcomemsg)] = state.turn <= 1;
    return mask;
}

std::optional<std::size_t> SystemActionSpace::classify(const ActList& acts) const {
    if (acts.empty()) return std::nullopt;
    const auto& a = acts.front();
    const auto intent = text::to_lower(a.intent);
    if (intent == "request") {
        if (a.params.empty()) return std::nullopt;
        const auto it = std::find(request_slots_.begin(), request_slots_.end(), a.params.front().slot);
        if (it == request_slots_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - request_slots_.begin());
    }
    if (intent == "offer") return id_of({SystemActionKind::offer, {}});
    if (intent == "inform") return id_of({SystemActionKind::inform_requested, {}});
    if (intent == "canthelp") return id_of({SystemActionKind::canthelp, {}});
    if (intent == "bye") return bye_id();
    if (intent == "welcomemsg" || intent == "hello") return id_of({SystemActionKind::welcomemsg, {}});
    return std::nullopt;
}

// --- state encoding --------------------------------------------------------

SlotStateEncoder::SlotStateEncoder(const Ontology& ontology)
    : informable_(ontology.informable_slots()), requestable_(ontology.requestable) {
    size_ = 1;
    for (std::size_t i = 0; i < informable_.size(); ++i) size_ *= 3;
    size_ *= (requestable_.size() + 1) * 4 * 2;
}

int SlotStateEncoder::db_bucket(std::size_t count) {
    if (count == 0) return 0;
    if (count == 1) return 1;
    if (count <= 4) return 2;
    return 3;
}

SlotStateEncoder::Fields SlotStateEncoder::fields(const DialogueState& state) const {
    Fields f;
    for (const auto& slot : informable_) {
        const auto it = state.slots_filled.find(slot);
        if (it == state.slots_filled.end()) f.slot_trits.push_back(0);
        else f.slot_trits.push_back(text::to_lower(it->second) == kDontCare ? 2 : 1);
    }
    if (state.requested_slot) {
        const auto it = std::find(requestable_.begin(), requestable_.end(), *state.requested_slot);
        if (it != requestable_.end()) f.requested = 1 + static_cast<std::size_t>(it - requestable_.begin());
    }
    f.db_bucket = db_bucket(state.db_match_count);
    f.terminal = state.is_terminal;
    return f;
}

std::size_t SlotStateEncoder::encode(const DialogueState& state) const {
    const auto f = fields(state);
    std::size_t index = 0;
    for (const int t : f.slot_trits) index = index * 3 + static_cast<std::size_t>(t);
    index = index * (requestable_.size() + 1) + f.requested;
    index = index * 4 + static_cast<std::size_t>(f.db_bucket);
    index = index * 2 + (f.terminal ? 1 : 0);
    return index;
}

SlotStateEncoder::Fields SlotStateEncoder::decode(std::size_t index) const {
    if (index >= size_) throw std::out_of_range("state index out of range");
    Fields f;
    f.terminal = index % 2 == 1;
    index /= 2;
    f.db_bucket = static_cast<int>(index % 4);
    index /= 4;
    f.requested = index % (requestable_.size() + 1);
    index /= requestable_.size() + 1;
    f.slot_trits.assign(informable_.size(), 0);
    for (std::size_t i = informable_.size(); i-- > 0;) {
        f.slot_trits[i] = static_cast<int>(index % 3);
        index /= 3;
    }
    return f;
}

}  // namespace dialogos
