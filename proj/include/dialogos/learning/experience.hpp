#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dialogos/dialogue/state.hpp"

namespace dialogos {

struct ExperienceTurn {
    DialogueState prev_state;
    std::size_t action_id = 0;
    std::string action_text;
    DialogueState new_state;
    double reward = 0.0;
    std::string input_utterance;
    std::string output_utterance;
    std::optional<bool> success;  // final turn only
    std::map<std::string, std::string> custom;

    friend bool operator==(const ExperienceTurn&, const ExperienceTurn&) = default;
};

struct Episode {
    std::uint64_t dialogue_id = 0;
    Role role = Role::system;
    std::vector<ExperienceTurn> turns;

    double total_return() const;

    friend bool operator==(const Episode&, const Episode&) = default;
};

// Checks the chain invariant (turn i new_state == turn i+1 prev_state),
// that exactly the last turn is terminal and that success is present iff
// the turn is terminal. Returns a description of the first violation.
std::optional<std::string> check_episode(const Episode& episode);

// −1 per turn; the final turn adds +20 on success.
inline constexpr double kTurnPenalty = -1.0;
inline constexpr double kSuccessBonus = 20.0;
double compute_reward(std::size_t turn_index, bool is_final, bool success);

struct TrainSchedule {
    std::size_t train_every_n_dialogues = 4;
    std::size_t epochs = 2;
    std::size_t experience_pool_size = 128;
    std::size_t minibatch_size = 32;

    // Throws ValidationError.
    void validate() const;
};

// True iff dialogue_count is a multiple of train_every_n_dialogues.
bool should_train(const TrainSchedule& schedule, std::size_t dialogue_count);

// One decision as seen by the recorder: the state a policy acted on and
// the abstract action it picked.
struct Decision {
    DialogueState state;
    std::size_t action_id = 0;
    std::string action_text;
};

// Experience log: one CSV record per turn, every field quoted.
// Columns: dialogue_id, role, turn, prev_state, action_id, action, reward,
// new_state, input_utterance, output_utterance, success, custom.
std::string experience_log_header();
std::string format_experience_record(std::uint64_t dialogue_id, Role role, std::size_t turn_index,
                                     const ExperienceTurn& turn);
std::vector<Episode> read_experience_log(const std::string& path);

// Keeps the in-memory pool (ring buffer of episodes) and appends finished
// episodes to the on-disk experience log. Turns are assembled from the
// sequence of decisions the agent makes during a dialogue.
class DialogueEpisodeRecorder {
public:
    explicit DialogueEpisodeRecorder(std::size_t pool_size = 64, std::string log_path = {});

    void begin(std::uint64_t dialogue_id, Role role);

    // Decisions on terminal states are not recorded: nothing follows them.
    void observe(const Decision& decision, const std::string& input_utterance, const std::string& output_utterance);

    // Completes the pending turn with `final_state` (forced terminal) and
    // moves the episode into the pool. Returns the finished episode.
    const Episode& finish(const DialogueState& final_state, bool success);

    // Appends an already built episode (used by offline parsers).
    void record_episode(Episode episode);

    // Raw turn append used by tests and offline tools.
    void record_turn(const ExperienceTurn& turn);

    const std::deque<Episode>& pool() const noexcept { return pool_; }
    std::size_t pool_size() const noexcept { return pool_size_; }
    const Episode& current() const noexcept { return current_; }
    std::size_t write_failures() const noexcept { return write_failures_; }
    const std::string& log_path() const noexcept { return log_path_; }

private:
    void push_to_pool(Episode episode);

    std::size_t pool_size_;
    std::string log_path_;
    std::deque<Episode> pool_;
    Episode current_;
    std::optional<ExperienceTurn> pending_;
    std::size_t write_failures_ = 0;
    bool header_written_ = false;
};

}  // namespace dialogos
