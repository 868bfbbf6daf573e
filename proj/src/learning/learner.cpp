#include "dialogos/learning/learner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "dialogos/common/errors.hpp"

namespace dialogos {

using nlohmann::json;

std::string_view to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::random: return "random";
        case LearnerKind::q_learning: return "q_learning";
        case LearnerKind::reinforce: return "reinforce";
    }
    return "?";
}

LearnerKind parse_learner_kind(std::string_view s) {
    if (s == "random") return LearnerKind::random;
    if (s == "q_learning") return LearnerKind::q_learning;
    if (s == "reinforce") return LearnerKind::reinforce;
    throw ValidationError("unknown learner '" + std::string(s) + "' (expected random, q_learning or reinforce)");
}

void LearnerParams::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("learning_rate must lie in [0, 1]");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ValidationError("discount_factor must lie in [0, 1]");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in [0, 1]");
    if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) throw ValidationError("epsilon_decay must lie in (0, 1]");
    if (!(epsilon_min >= 0.0 && epsilon_min <= 1.0)) throw ValidationError("epsilon_min must lie in [0, 1]");
}

LearnerParams default_learner_params(LearnerKind kind) {
    LearnerParams p;
    if (kind == LearnerKind::reinforce) p.alpha = 0.01;
    return p;
}

namespace {

json parse_checkpoint(std::string_view text, const std::string& origin, LearnerKind expected) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw LoadError(origin, e.what());
    }
    if (!j.is_object() || j.value("kind", "") != to_string(expected))
        throw LoadError(origin, "not a " + std::string(to_string(expected)) + " checkpoint");
    return j;
}

void check_dim(const json& j, const char* key, std::size_t expected, const std::string& origin) {
    if (!j.contains(key) || !j[key].is_number_unsigned() || j[key].get<std::size_t>() != expected)
        throw LoadError(origin, std::string(key) + " does not match (expected " + std::to_string(expected) + ")");
}

// Rows of a dense row-major matrix as nested arrays.
json to_rows(const std::vector<double>& values, std::size_t rows, std::size_t cols) {
    json out = json::array();
    for (std::size_t r = 0; r < rows; ++r)
        out.push_back(std::vector<double>(values.begin() + r * cols, values.begin() + (r + 1) * cols));
    return out;
}

void from_rows(const json& j, std::vector<double>& values, std::size_t rows, std::size_t cols,
               const std::string& origin) {
    if (!j.is_array() || j.size() != rows) throw LoadError(origin, "row count does not match the header");
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw LoadError(origin, "row " + std::to_string(r) + " has the wrong width");
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = j[r][c].get<double>();
            if (!std::isfinite(v)) throw LoadError(origin, "non-finite value in row " + std::to_string(r));
            values[r * cols + c] = v;
        }
    }
}

}  // namespace

// --- random ----------------------------------------------------------------

std::size_t RandomLearner::select(std::size_t, const ActionMask& mask, std::size_t fallback, Rng& rng) {
    std::vector<std::size_t> valid;
    for (std::size_t a = 0; a < mask.size(); ++a)
        if (mask[a]) valid.push_back(a);
    if (valid.empty()) return fallback;
    return valid[uniform_index(rng, valid.size())];
}

std::string RandomLearner::checkpoint() const { return json{{"kind", "random"}}.dump(2) + "\n"; }

void RandomLearner::restore(std::string_view text, const std::string& origin) {
    parse_checkpoint(text, origin, LearnerKind::random);
}

// --- Q-learning ------------------------------------------------------------

QLearner::QLearner(std::size_t num_states, std::size_t num_actions, LearnerParams params)
    : TabularLearner(params), table_(num_states, num_actions), epsilon_(params.epsilon) {}

std::size_t QLearner::select(std::size_t state, const ActionMask& mask, std::size_t fallback, Rng& rng) {
    return q_select(table_, state, mask, params_.explore ? epsilon_ : 0.0, rng, fallback);
}

void QLearner::learn(const Episode& episode, const TabularView& view) {
    // Last turn first, so a terminal reward reaches the opening state in
    // a single pass.
    for (auto it = episode.turns.rbegin(); it != episode.turns.rend(); ++it) {
        const auto& turn = *it;
        if (turn.action_id >= table_.num_actions()) continue;
        q_update(table_, view.encode(turn.prev_state), turn.action_id, turn.reward, view.encode(turn.new_state),
                 turn.new_state.is_terminal, params_.alpha, params_.gamma, view.valid_actions(turn.new_state));
    }
}

void QLearner::end_round() { epsilon_ = std::max(params_.epsilon_min, epsilon_ * params_.epsilon_decay); }

std::string QLearner::checkpoint() const {
    json j;
    j["kind"] = "q_learning";
    j["num_states"] = table_.num_states();
    j["num_actions"] = table_.num_actions();
    j["epsilon"] = epsilon_;
    j["q"] = to_rows(table_.values(), table_.num_states(), table_.num_actions());
    return j.dump() + "\n";
}

void QLearner::restore(std::string_view text, const std::string& origin) {
    const auto j = parse_checkpoint(text, origin, LearnerKind::q_learning);
    check_dim(j, "num_states", table_.num_states(), origin);
    check_dim(j, "num_actions", table_.num_actions(), origin);
    QTable loaded(table_.num_states(), table_.num_actions());
    try {
        from_rows(j.at("q"), loaded.values(), loaded.num_states(), loaded.num_actions(), origin);
        epsilon_ = j.value("epsilon", epsilon_);
    } catch (const json::exception& e) {
        throw LoadError(origin, e.what());
    }
    table_ = std::move(loaded);
}

// --- REINFORCE -------------------------------------------------------------

ReinforceLearner::ReinforceLearner(std::size_t num_states, std::size_t num_actions, LearnerParams params)
    : TabularLearner(params), policy_(num_states, num_actions) {}

std::size_t ReinforceLearner::select(std::size_t state, const ActionMask& mask, std::size_t fallback, Rng& rng) {
    const auto phi = one_hot(state);
    if (params_.explore) return policy_.sample(phi, mask, rng, fallback);
    const auto p = policy_.probabilities(phi, mask);
    std::size_t best = fallback;
    for (std::size_t a = 0; a < p.size(); ++a)
        if (p[a] > 0.0 && (best == fallback || p[a] > p[best])) best = a;
    return best;
}

void ReinforceLearner::learn(const Episode& episode, const TabularView& view) {
    std::vector<PolicyStep> steps;
    steps.reserve(episode.turns.size());
    for (const auto& turn : episode.turns) {
        if (turn.action_id >= policy_.num_actions()) continue;
        steps.push_back({one_hot(view.encode(turn.prev_state)), view.valid_actions(turn.prev_state), turn.action_id,
                         turn.reward});
    }
    if (!reinforce_update(policy_, steps, params_.alpha, params_.gamma)) ++skipped_;
}

std::string ReinforceLearner::checkpoint() const {
    json j;
    j["kind"] = "reinforce";
    j["num_features"] = policy_.num_features();
    j["num_actions"] = policy_.num_actions();
    j["weights"] = to_rows(policy_.weights(), policy_.num_actions(), policy_.num_features());
    return j.dump() + "\n";
}

void ReinforceLearner::restore(std::string_view text, const std::string& origin) {
    const auto j = parse_checkpoint(text, origin, LearnerKind::reinforce);
    check_dim(j, "num_features", policy_.num_features(), origin);
    check_dim(j, "num_actions", policy_.num_actions(), origin);
    SoftmaxPolicy loaded(policy_.num_features(), policy_.num_actions());
    try {
        from_rows(j.at("weights"), loaded.weights(), loaded.num_actions(), loaded.num_features(), origin);
    } catch (const json::exception& e) {
        throw LoadError(origin, e.what());
    }
    policy_ = std::move(loaded);
}

// --- shared ----------------------------------------------------------------

std::unique_ptr<TabularLearner> make_learner(LearnerKind kind, const TabularView& view, LearnerParams params) {
    params.validate();
    switch (kind) {
        case LearnerKind::random: return std::make_unique<RandomLearner>(params);
        case LearnerKind::q_learning: return std::make_unique<QLearner>(view.num_states(), view.num_actions(), params);
        case LearnerKind::reinforce:
            return std::make_unique<ReinforceLearner>(view.num_states(), view.num_actions(), params);
    }
    throw ValidationError("unknown learner kind");
}

std::size_t train_round(TabularLearner& learner, const std::deque<Episode>& pool, std::size_t epochs,
                        std::size_t minibatch_size, const TabularView& view, Rng& rng) {
    std::size_t passes = 0;
    if (!pool.empty()) {
        const auto take = std::min(minibatch_size, pool.size());
        std::vector<std::size_t> order(pool.size());
        for (std::size_t e = 0; e < epochs; ++e) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            // Partial Fisher-Yates: the first `take` slots become the sample.
            for (std::size_t i = 0; i < take; ++i) std::swap(order[i], order[i + uniform_index(rng, order.size() - i)]);
            for (std::size_t i = 0; i < take; ++i) learner.learn(pool[order[i]], view);
            passes += take;
        }
    }
    learner.end_round();
    return passes;
}

void save_checkpoint(const TabularLearner& learner, const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << learner.checkpoint();
    if (!out) throw Error("cannot write checkpoint " + path);
}

void load_checkpoint(TabularLearner& learner, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(path, "file not found");
    std::ostringstream buf;
    buf << in.rdbuf();
    learner.restore(buf.str(), path);
}

}  // namespace dialogos
