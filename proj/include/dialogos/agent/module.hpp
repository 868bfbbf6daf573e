#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "dialogos/common/rng.hpp"
#include "dialogos/dialogue/frame.hpp"
#include "dialogos/domain/item_database.hpp"
#include "dialogos/domain/ontology.hpp"
#include "dialogos/learning/experience.hpp"

namespace dialogos {

// Module arguments as they come from the config: a JSON object.
using ModuleArgs = nlohmann::json;

// Typed lookups with defaults; a present key of the wrong type throws
// ValidationError naming the key.
std::string arg_string(const ModuleArgs& args, const std::string& key, const std::string& fallback = {});
double arg_double(const ModuleArgs& args, const std::string& key, double fallback);
std::int64_t arg_int(const ModuleArgs& args, const std::string& key, std::int64_t fallback);
bool arg_bool(const ModuleArgs& args, const std::string& key, bool fallback);

// Module-specific values win over global ones.
ModuleArgs merge_args(const ModuleArgs& global_args, const ModuleArgs& module_args);

// Shared, read-only resources a module is initialized with.
struct ModuleEnvironment {
    std::shared_ptr<const Ontology> ontology;
    std::shared_ptr<const ItemDatabase> database;
    Role role = Role::system;
    std::uint64_t seed = 0;  // run seed
};

struct DialogueContext {
    std::uint64_t dialogue_id = 0;
    std::uint64_t seed = 0;  // per-dialogue seed
};

struct TrainingInput {
    const std::deque<Episode>& pool;
    std::size_t epochs;
    std::size_t minibatch_size;
    Rng& rng;
};

// Base class of every pipeline component. The public lifecycle methods
// enforce the call protocol and delegate to the protected hooks.
class ConversationalModule {
public:
    explicit ConversationalModule(std::string type) : type_(std::move(type)) {}
    virtual ~ConversationalModule() = default;

    const std::string& type() const noexcept { return type_; }

    // Modality consumed; nullopt accepts any.
    virtual std::optional<Modality> accepts() const = 0;
    // Modality produced; nullopt means "same as the input".
    virtual std::optional<Modality> produces() const = 0;

    void initialize(const ModuleArgs& args, const ModuleEnvironment& env);
    void start_dialogue(const DialogueContext& context);
    void receive_input(const ConversationalFrame& frame);
    // Throws LifecycleError unless receive_input ran earlier in this turn.
    ConversationalFrame generate_output();
    void end_dialogue();

    // Acts the owning agent emitted this turn (after the whole pipeline ran).
    virtual void observe_own_acts(const ActList& /*acts*/) {}

    // The dialogue state this module tracks, if any.
    virtual std::optional<DialogueState> tracked_state() const { return std::nullopt; }
    // The abstract decision taken this turn, for experience recording.
    virtual std::optional<Decision> last_decision() const { return std::nullopt; }
    // Success verdict from a module that owns a user goal.
    virtual std::optional<bool> judge_success() const { return std::nullopt; }

    virtual bool trainable() const { return false; }
    // Returns the number of episode passes made. Must not touch
    // per-dialogue state.
    virtual std::size_t train(const TrainingInput& /*input*/) { return 0; }
    virtual bool parameters_finite() const { return true; }
    virtual void save(const std::string& /*path*/) const {}
    virtual void load(const std::string& /*path*/) {}

    const ModuleArgs& args() const noexcept { return args_; }

protected:
    virtual void on_initialize(const ModuleArgs& /*args*/, const ModuleEnvironment& /*env*/) {}
    virtual void on_start(const DialogueContext& /*context*/) {}
    virtual void on_input(const ConversationalFrame& frame) = 0;
    virtual ConversationalFrame on_output() = 0;
    virtual void on_end() {}

    // Per-dialogue generator keyed by the module type.
    Rng& rng() { return rng_; }

private:
    std::string type_;
    ModuleArgs args_ = ModuleArgs::object();
    Rng rng_;
    bool has_input_ = false;
};

// Passes every frame through unchanged.
class IdentityModule final : public ConversationalModule {
public:
    IdentityModule() : ConversationalModule("identity") {}
    std::optional<Modality> accepts() const override { return std::nullopt; }
    std::optional<Modality> produces() const override { return std::nullopt; }

protected:
    void on_input(const ConversationalFrame& frame) override { frame_ = frame; }
    ConversationalFrame on_output() override { return *frame_; }

private:
    std::optional<ConversationalFrame> frame_;
};

}  // namespace dialogos
