#pragma once

#include <cstddef>
#include <vector>

#include "dialogos/common/rng.hpp"
#include "dialogos/learning/tabular_view.hpp"

namespace dialogos {

// Dense state x action table; every entry starts at 0.
class QTable {
public:
    QTable() = default;
    QTable(std::size_t num_states, std::size_t num_actions)
        : states_(num_states), actions_(num_actions), values_(num_states * num_actions, 0.0) {}

    std::size_t num_states() const noexcept { return states_; }
    std::size_t num_actions() const noexcept { return actions_; }

    double& at(std::size_t s, std::size_t a) { return values_.at(s * actions_ + a); }
    double at(std::size_t s, std::size_t a) const { return values_.at(s * actions_ + a); }

    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }

    bool all_finite() const;

    // Highest-valued action among those set in `mask` (lowest id on ties);
    // `fallback` when the mask is empty. An empty mask vector means "all".
    std::size_t argmax(std::size_t s, const ActionMask& mask, std::size_t fallback) const;
    // max_b Q(s, b) over the mask; 0 when the mask is empty.
    double max_value(std::size_t s, const ActionMask& mask) const;

    friend bool operator==(const QTable&, const QTable&) = default;

private:
    std::size_t states_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> values_;
};

// Q(s,a) += alpha * (r + gamma * max_b Q(s',b) * [s' not terminal] - Q(s,a)).
// The max ranges over `next_mask` (all actions when it is empty).
void q_update(QTable& q, std::size_t s, std::size_t a, double reward, std::size_t s_next, bool next_terminal,
              double alpha, double gamma, const ActionMask& next_mask = {});

// Epsilon-greedy over the valid actions. One uniform draw decides between
// exploring and exploiting, a second one (only when exploring) picks the
// action, so the number of draws per call depends only on that outcome.
std::size_t q_select(const QTable& q, std::size_t s, const ActionMask& mask, double epsilon, Rng& rng,
                     std::size_t fallback);

}  // namespace dialogos
