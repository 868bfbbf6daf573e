#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "dialogos/common/rng.hpp"
#include "dialogos/learning/tabular_view.hpp"

namespace dialogos {

// Sparse feature vector: (feature index, value) pairs. The dialogue
// policies use a single (state index, 1.0) entry.
using Features = std::vector<std::pair<std::size_t, double>>;

inline Features one_hot(std::size_t index) { return {{index, 1.0}}; }

// Linear softmax policy: pi(a|s) proportional to exp(w_a . phi(s)) over the
// valid actions, zero elsewhere.
class SoftmaxPolicy {
public:
    SoftmaxPolicy() = default;
    SoftmaxPolicy(std::size_t num_features, std::size_t num_actions)
        : features_(num_features), actions_(num_actions), weights_(num_features * num_actions, 0.0) {}

    std::size_t num_features() const noexcept { return features_; }
    std::size_t num_actions() const noexcept { return actions_; }

    double& weight(std::size_t a, std::size_t f) { return weights_.at(a * features_ + f); }
    double weight(std::size_t a, std::size_t f) const { return weights_.at(a * features_ + f); }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::vector<double>& weights() noexcept { return weights_; }

    // Uses max-subtraction. An empty mask vector means "all actions valid";
    // a mask with no valid action yields all zeros. Every call records
    // |sum - 1| into max_normalization_error().
    std::vector<double> probabilities(const Features& phi, const ActionMask& mask) const;
    double log_prob(const Features& phi, const ActionMask& mask, std::size_t action) const;

    // d log pi(action|s) / dW, flattened like weights(): row b equals
    // phi * (1[b = action] - pi(b|s)) for valid b and 0 otherwise.
    std::vector<double> grad_log_prob(const Features& phi, const ActionMask& mask, std::size_t action) const;

    std::size_t sample(const Features& phi, const ActionMask& mask, Rng& rng, std::size_t fallback) const;

    double max_normalization_error() const noexcept { return max_norm_error_; }
    void reset_normalization_error() noexcept { max_norm_error_ = 0.0; }

    bool all_finite() const;

private:
    std::size_t features_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> weights_;
    mutable double max_norm_error_ = 0.0;
};

struct PolicyStep {
    Features phi;
    ActionMask mask;
    std::size_t action = 0;
    double reward = 0.0;
};

// Monte-Carlo policy gradient over one episode:
//   G_t = sum_{k>=t} gamma^(k-t) r_k
//   W  += alpha * gamma^t * G_t * grad log pi(a_t|s_t)
// All gradients are taken at the pre-update weights and applied together.
// Returns false (and leaves the weights untouched) when any increment is
// not finite.
bool reinforce_update(SoftmaxPolicy& policy, const std::vector<PolicyStep>& episode, double alpha, double gamma);

}  // namespace dialogos
