#pragma once

#include <cstddef>
#include <deque>
#include <memory>
#include <string>
#include <string_view>

#include "dialogos/common/rng.hpp"
#include "dialogos/learning/experience.hpp"
#include "dialogos/learning/q_learning.hpp"
#include "dialogos/learning/reinforce.hpp"
#include "dialogos/learning/tabular_view.hpp"

namespace dialogos {

enum class LearnerKind { random, q_learning, reinforce };

std::string_view to_string(LearnerKind kind);
LearnerKind parse_learner_kind(std::string_view s);  // throws ValidationError

struct LearnerParams {
    double alpha = 0.25;
    double gamma = 0.95;
    double epsilon = 0.25;
    double epsilon_decay = 0.995;
    double epsilon_min = 0.05;
    // false: greedy action choice (evaluation of a trained policy).
    bool explore = true;

    void validate() const;  // throws ValidationError
};

// alpha defaults to 0.25 for Q-learning and 0.01 for REINFORCE.
LearnerParams default_learner_params(LearnerKind kind);

// A policy over the discrete states/actions of a TabularView.
class TabularLearner {
public:
    virtual ~TabularLearner() = default;

    virtual LearnerKind kind() const = 0;
    virtual std::size_t select(std::size_t state, const ActionMask& mask, std::size_t fallback, Rng& rng) = 0;
    // One learning pass over an episode recorded in `view`'s action space.
    virtual void learn(const Episode& episode, const TabularView& view) = 0;
    // Called once after each training round.
    virtual void end_round() {}
    virtual bool finite() const { return true; }

    // Structured-text checkpoint with dimension headers.
    virtual std::string checkpoint() const = 0;
    // Throws LoadError on malformed text or a dimension mismatch.
    virtual void restore(std::string_view text, const std::string& origin) = 0;

    const LearnerParams& params() const noexcept { return params_; }

protected:
    explicit TabularLearner(LearnerParams params) : params_(params) {}
    LearnerParams params_;
};

class RandomLearner final : public TabularLearner {
public:
    explicit RandomLearner(LearnerParams params = {}) : TabularLearner(params) {}
    LearnerKind kind() const override { return LearnerKind::random; }
    std::size_t select(std::size_t state, const ActionMask& mask, std::size_t fallback, Rng& rng) override;
    void learn(const Episode&, const TabularView&) override {}
    std::string checkpoint() const override;
    void restore(std::string_view text, const std::string& origin) override;
};

class QLearner final : public TabularLearner {
public:
    QLearner(std::size_t num_states, std::size_t num_actions, LearnerParams params);
    LearnerKind kind() const override { return LearnerKind::q_learning; }
    std::size_t select(std::size_t state, const ActionMask& mask, std::size_t fallback, Rng& rng) override;
    void learn(const Episode& episode, const TabularView& view) override;
    void end_round() override;
    bool finite() const override { return table_.all_finite(); }
    std::string checkpoint() const override;
    void restore(std::string_view text, const std::string& origin) override;

    const QTable& table() const noexcept { return table_; }
    double epsilon() const noexcept { return epsilon_; }

private:
    QTable table_;
    double epsilon_;
};

class ReinforceLearner final : public TabularLearner {
public:
    ReinforceLearner(std::size_t num_states, std::size_t num_actions, LearnerParams params);
    LearnerKind kind() const override { return LearnerKind::reinforce; }
    std::size_t select(std::size_t state, const ActionMask& mask, std::size_t fallback, Rng& rng) override;
    void learn(const Episode& episode, const TabularView& view) override;
    bool finite() const override { return policy_.all_finite(); }
    std::string checkpoint() const override;
    void restore(std::string_view text, const std::string& origin) override;

    const SoftmaxPolicy& policy() const noexcept { return policy_; }
    std::size_t skipped_updates() const noexcept { return skipped_; }

private:
    SoftmaxPolicy policy_;
    std::size_t skipped_ = 0;
};

std::unique_ptr<TabularLearner> make_learner(LearnerKind kind, const TabularView& view, LearnerParams params);

// One training round: `epochs` passes, each over a minibatch drawn
// uniformly without replacement from the pool. Returns the number of
// episode passes made.
std::size_t train_round(TabularLearner& learner, const std::deque<Episode>& pool, std::size_t epochs,
                        std::size_t minibatch_size, const TabularView& view, Rng& rng);

void save_checkpoint(const TabularLearner& learner, const std::string& path);
void load_checkpoint(TabularLearner& learner, const std::string& path);  // throws LoadError

}  // namespace dialogos
