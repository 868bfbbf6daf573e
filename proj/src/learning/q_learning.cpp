#include "dialogos/learning/q_learning.hpp"

#include <cmath>
#include <limits>

namespace dialogos {

namespace {

bool allowed(const ActionMask& mask, std::size_t a) { return mask.empty() || mask[a]; }

}  // namespace

bool QTable::all_finite() const {
    for (const double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

std::size_t QTable::argmax(std::size_t s, const ActionMask& mask, std::size_t fallback) const {
    std::size_t best = fallback;
    double best_value = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t a = 0; a < actions_; ++a) {
        if (!allowed(mask, a)) continue;
        const double v = at(s, a);
        if (!found || v > best_value) {
            best = a;
            best_value = v;
            found = true;
        }
    }
    return best;
}

double QTable::max_value(std::size_t s, const ActionMask& mask) const {
    bool found = false;
    double best = 0.0;
    for (std::size_t a = 0; a < actions_; ++a) {
        if (!allowed(mask, a)) continue;
        if (!found || at(s, a) > best) best = at(s, a);
        found = true;
    }
    return best;
}

void q_update(QTable& q, std::size_t s, std::size_t a, double reward, std::size_t s_next, bool next_terminal,
              double alpha, double gamma, const ActionMask& next_mask) {
    const double bootstrap = next_terminal ? 0.0 : gamma * q.max_value(s_next, next_mask);
    double& entry = q.at(s, a);
    entry += alpha * (reward + bootstrap - entry);
}

std::size_t q_select(const QTable& q, std::size_t s, const ActionMask& mask, double epsilon, Rng& rng,
                     std::size_t fallback) {
    std::vector<std::size_t> valid;
    for (std::size_t a = 0; a < q.num_actions(); ++a)
        if (allowed(mask, a)) valid.push_back(a);
    if (valid.empty()) return fallback;
    if (uniform01(rng) < epsilon) return valid[uniform_index(rng, valid.size())];
    return q.argmax(s, mask, fallback);
}

}  // namespace dialogos
