#include "dialogos/agent/module.hpp"

#include "dialogos/common/errors.hpp"

namespace dialogos {

namespace {

[[noreturn]] void wrong_type(const std::string& key, const char* expected) {
    throw ValidationError("argument '" + key + "' must be " + expected);
}

}  // namespace

std::string arg_string(const ModuleArgs& args, const std::string& key, const std::string& fallback) {
    if (!args.is_object() || !args.contains(key) || args[key].is_null()) return fallback;
    if (!args[key].is_string()) wrong_type(key, "a string");
    return args[key].get<std::string>();
}

double arg_double(const ModuleArgs& args, const std::string& key, double fallback) {
    if (!args.is_object() || !args.contains(key) || args[key].is_null()) return fallback;
    if (!args[key].is_number()) wrong_type(key, "a number");
    return args[key].get<double>();
}

std::int64_t arg_int(const ModuleArgs& args, const std::string& key, std::int64_t fallback) {
    if (!args.is_object() || !args.contains(key) || args[key].is_null()) return fallback;
    if (!args[key].is_number_integer()) wrong_type(key, "an integer");
    return args[key].get<std::int64_t>();
}

bool arg_bool(const ModuleArgs& args, const std::string& key, bool fallback) {
    if (!args.is_object() || !args.contains(key) || args[key].is_null()) return fallback;
    if (!args[key].is_boolean()) wrong_type(key, "a boolean");
    return args[key].get<bool>();
}

ModuleArgs merge_args(const ModuleArgs& global_args, const ModuleArgs& module_args) {
    ModuleArgs merged = global_args.is_object() ? global_args : ModuleArgs::object();
    if (module_args.is_object())
        for (const auto& [key, value] : module_args.items()) merged[key] = value;
    return merged;
}

void ConversationalModule::initialize(const ModuleArgs& args, const ModuleEnvironment& env) {
    args_ = args.is_object() ? args : ModuleArgs::object();
    has_input_ = false;
    on_initialize(args_, env);
}

void ConversationalModule::start_dialogue(const DialogueContext& context) {
    rng_.seed(derive_seed(context.seed, type_));
    has_input_ = false;
    on_start(context);
}

void ConversationalModule::receive_input(const ConversationalFrame& frame) {
    if (const auto want = accepts(); want && *want != frame.modality())
        throw ValidationError(type_ + " accepts " + std::string(to_string(*want)) + " frames, got " +
                              std::string(to_string(frame.modality())));
    on_input(frame);
    has_input_ = true;
}

ConversationalFrame ConversationalModule::generate_output() {
    if (!has_input_) throw LifecycleError(type_ + ": generate_output called before receive_input in this turn");
    has_input_ = false;
    return on_output();
}

void ConversationalModule::end_dialogue() {
    has_input_ = false;
    on_end();
}

}  // namespace dialogos
