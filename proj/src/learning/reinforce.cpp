#include "dialogos/learning/reinforce.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>

namespace dialogos {

namespace {

bool allowed(const ActionMask& mask, std::size_t a) { return mask.empty() || mask[a]; }

}  // namespace

std::vector<double> SoftmaxPolicy::probabilities(const Features& phi, const ActionMask& mask) const {
    std::vector<double> logits(actions_, 0.0);
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < actions_; ++a) {
        if (!allowed(mask, a)) continue;
        double z = 0.0;
        for (const auto& [f, x] : phi) z += weight(a, f) * x;
        logits[a] = z;
        max_logit = std::max(max_logit, z);
    }
    std::vector<double> p(actions_, 0.0);
    if (!std::isfinite(max_logit)) return p;  // nothing valid

    double sum = 0.0;
    for (std::size_t a = 0; a < actions_; ++a) {
        if (!allowed(mask, a)) continue;
        p[a] = std::exp(logits[a] - max_logit);
        sum += p[a];
    }
    double total = 0.0;
    for (auto& v : p) {
        v /= sum;
        total += v;
    }
    max_norm_error_ = std::max(max_norm_error_, std::abs(total - 1.0));
    return p;
}

double SoftmaxPolicy::log_prob(const Features& phi, const ActionMask& mask, std::size_t action) const {
    return std::log(probabilities(phi, mask).at(action));
}

std::vector<double> SoftmaxPolicy::grad_log_prob(const Features& phi, const ActionMask& mask,
                                                 std::size_t action) const {
    const auto p = probabilities(phi, mask);
    std::vector<double> grad(weights_.size(), 0.0);
    for (std::size_t b = 0; b < actions_; ++b) {
        if (!allowed(mask, b)) continue;
        const double coef = (b == action ? 1.0 : 0.0) - p[b];
        for (const auto& [f, x] : phi) grad[b * features_ + f] += coef * x;
    }
    return grad;
}

std::size_t SoftmaxPolicy::sample(const Features& phi, const ActionMask& mask, Rng& rng, std::size_t fallback) const {
    const auto p = probabilities(phi, mask);
    const double u = uniform01(rng);
    double acc = 0.0;
    std::optional<std::size_t> last_valid;
    for (std::size_t a = 0; a < actions_; ++a) {
        if (p[a] <= 0.0) continue;
        acc += p[a];
        last_valid = a;
        if (u < acc) return a;
    }
    return last_valid.value_or(fallback);
}

bool SoftmaxPolicy::all_finite() const {
    return std::all_of(weights_.begin(), weights_.end(), [](double w) { return std::isfinite(w); });
}

bool reinforce_update(SoftmaxPolicy& policy, const std::vector<PolicyStep>& episode, double alpha, double gamma) {
    const auto n = episode.size();
    std::vector<double> returns(n, 0.0);
    double g = 0.0;
    for (std::size_t t = n; t-- > 0;) {
        g = episode[t].reward + gamma * g;
        returns[t] = g;
    }

    std::vector<double> delta(policy.weights().size(), 0.0);
    double discount = 1.0;
    for (std::size_t t = 0; t < n; ++t, discount *= gamma) {
        const auto& step = episode[t];
        const double scale = alpha * discount * returns[t];
        // Steps whose action the mask rules out (foreign or parsed data)
        // still contribute their reward to earlier returns.
        if (scale == 0.0 || !allowed(step.mask, step.action)) continue;
        // Same as grad_log_prob, but only the rows/features phi touches.
        const auto p = policy.probabilities(step.phi, step.mask);
        for (std::size_t b = 0; b < policy.num_actions(); ++b) {
            if (!allowed(step.mask, b)) continue;
            const double coef = (b == step.action ? 1.0 : 0.0) - p[b];
            for (const auto& [f, x] : step.phi) delta[b * policy.num_features() + f] += scale * coef * x;
        }
    }
    if (!std::all_of(delta.begin(), delta.end(), [](double d) { return std::isfinite(d); })) {
        std::cerr << "warning: REINFORCE update skipped: non-finite gradient\n";
        return false;
    }
    auto& w = policy.weights();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += delta[i];
    return true;
}

}  // namespace dialogos
