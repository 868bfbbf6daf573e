#include "dialogos/learning/experience.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

#include <json.hpp>

#include "dialogos/common/csv.hpp"
#include "dialogos/common/errors.hpp"

namespace dialogos {

double Episode::total_return() const {
    double sum = 0.0;
    for (const auto& t : turns) sum += t.reward;
    return sum;
}

std::optional<std::string> check_episode(const Episode& episode) {
    const auto& turns = episode.turns;
    for (std::size_t i = 0; i < turns.size(); ++i) {
        const bool last = i + 1 == turns.size();
        if (!std::isfinite(turns[i].reward)) return "turn " + std::to_string(i) + " has a non-finite reward";
        if (turns[i].new_state.is_terminal != last)
            return "turn " + std::to_string(i) + (last ? " is the last turn but not terminal" : " is terminal early");
        if (turns[i].success.has_value() != turns[i].new_state.is_terminal)
            return "turn " + std::to_string(i) + ": success must be present exactly on the terminal turn";
        if (!last && !(turns[i].new_state == turns[i + 1].prev_state))
            return "turn " + std::to_string(i) + " does not chain into turn " + std::to_string(i + 1);
    }
    return std::nullopt;
}

double compute_reward(std::size_t /*turn_index*/, bool is_final, bool success) {
    return kTurnPenalty + ((is_final && success) ? kSuccessBonus : 0.0);
}

void TrainSchedule::validate() const {
    if (train_every_n_dialogues == 0) throw ValidationError("train_every_n_dialogues must be positive");
    if (epochs == 0) throw ValidationError("epochs must be positive");
    if (experience_pool_size == 0) throw ValidationError("experience_pool_size must be positive");
    if (minibatch_size == 0) throw ValidationError("minibatch_size must be positive");
    if (minibatch_size > experience_pool_size)
        throw ValidationError("minibatch_size must not exceed experience_pool_size");
}

bool should_train(const TrainSchedule& schedule, std::size_t dialogue_count) {
    return schedule.train_every_n_dialogues > 0 && dialogue_count % schedule.train_every_n_dialogues == 0;
}

// --- log format ----------------------------------------------------------

namespace {

const csv::Row kHeader = {"dialogue_id",     "role",   "turn",      "prev_state",      "action_id",
                          "action",          "reward", "new_state", "input_utterance", "output_utterance",
                          "success",         "custom"};

std::string format_reward(double r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r);
    return buf;
}

}  // namespace

std::string experience_log_header() { return csv::format_row(kHeader, csv::Quoting::all); }

std::string format_experience_record(std::uint64_t dialogue_id, Role role, std::size_t turn_index,
                                     const ExperienceTurn& t) {
    const nlohmann::json custom(t.custom);
    return csv::format_row({std::to_string(dialogue_id), std::string(to_string(role)),
                            std::to_string(turn_index), serialize_state(t.prev_state), std::to_string(t.action_id),
                            t.action_text, format_reward(t.reward), serialize_state(t.new_state), t.input_utterance,
                            t.output_utterance, t.success ? (*t.success ? "true" : "false") : "", custom.dump()},
                           csv::Quoting::all);
}

std::vector<Episode> read_experience_log(const std::string& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty() || rows.front() != kHeader) throw LoadError(path, "missing experience log header");
    std::vector<Episode> episodes;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != kHeader.size())
            throw LoadError(path, "record " + std::to_string(r) + " has " + std::to_string(row.size()) + " fields");
        try {
            const auto id = std::stoull(row[0]);
            const auto role = parse_role(row[1]);
            const auto turn = std::stoull(row[2]);
            if (turn == 0 || episodes.empty() || episodes.back().dialogue_id != id || episodes.back().role != role)
                episodes.push_back(Episode{id, role, {}});
            ExperienceTurn t;
            t.prev_state = deserialize_state(row[3]);
            t.action_id = std::stoull(row[4]);
            t.action_text = row[5];
            t.reward = std::stod(row[6]);
            t.new_state = deserialize_state(row[7]);
            t.input_utterance = row[8];
            t.output_utterance = row[9];
            if (row[10] == "true") t.success = true;
            else if (row[10] == "false") t.success = false;
            t.custom = nlohmann::json::parse(row[11]).get<std::map<std::string, std::string>>();
            episodes.back().turns.push_back(std::move(t));
        } catch (const LoadError&) {
            throw;
        } catch (const std::exception& e) {
            throw LoadError(path, "record " + std::to_string(r) + ": " + e.what());
        }
    }
    return episodes;
}

// --- recorder ------------------------------------------------------------

DialogueEpisodeRecorder::DialogueEpisodeRecorder(std::size_t pool_size, std::string log_path)
    : pool_size_(pool_size == 0 ? 1 : pool_size), log_path_(std::move(log_path)) {}

void DialogueEpisodeRecorder::begin(std::uint64_t dialogue_id, Role role) {
    current_ = Episode{dialogue_id, role, {}};
    pending_.reset();
}

void DialogueEpisodeRecorder::observe(const Decision& decision, const std::string& input_utterance,
                                      const std::string& output_utterance) {
    if (decision.state.is_terminal) return;
    if (pending_) {
        pending_->new_state = decision.state;
        pending_->reward = compute_reward(current_.turns.size(), false, false);
        record_turn(*pending_);
    }
    ExperienceTurn next;
    next.prev_state = decision.state;
    next.action_id = decision.action_id;
    next.action_text = decision.action_text;
    next.input_utterance = input_utterance;
    next.output_utterance = output_utterance;
    pending_ = std::move(next);
}

const Episode& DialogueEpisodeRecorder::finish(const DialogueState& final_state, bool success) {
    if (pending_) {
        pending_->new_state = final_state;
        pending_->new_state.is_terminal = true;
        pending_->reward = compute_reward(current_.turns.size(), true, success);
        pending_->success = success;
        const ExperienceTurn last = std::move(*pending_);
        pending_.reset();
        record_turn(last);
    } else {
        // Nothing was decided (e.g. the user hung up at once); the empty
        // episode still enters the pool so dialogue counts line up.
        push_to_pool(current_);
    }
    return pool_.back();
}

void DialogueEpisodeRecorder::record_episode(Episode episode) {
    current_ = Episode{episode.dialogue_id, episode.role, {}};
    pending_.reset();
    if (episode.turns.empty()) {
        push_to_pool(std::move(episode));
        return;
    }
    for (auto& t : episode.turns) record_turn(t);
    // An episode whose last turn is not terminal is still closed here.
    if (!current_.turns.empty()) {
        push_to_pool(std::move(current_));
        current_ = Episode{};
    }
}

void DialogueEpisodeRecorder::record_turn(const ExperienceTurn& turn) {
    current_.turns.push_back(turn);
    if (!log_path_.empty()) {
        try {
            std::ofstream out;
            if (!header_written_) {
                std::filesystem::create_directories(std::filesystem::path(log_path_).parent_path());
                out.open(log_path_, std::ios::binary | std::ios::trunc);
                if (out) out << experience_log_header() << '\n';
                header_written_ = static_cast<bool>(out);
            } else {
                out.open(log_path_, std::ios::binary | std::ios::app);
            }
            if (!out) throw Error("cannot open " + log_path_);
            out << format_experience_record(current_.dialogue_id, current_.role, current_.turns.size() - 1, turn)
                << '\n';
            if (!out) throw Error("write failed on " + log_path_);
        } catch (const std::exception& e) {
            ++write_failures_;
            std::cerr << "warning: experience log: " << e.what() << '\n';
        }
    }
    if (turn.new_state.is_terminal) {
        push_to_pool(std::move(current_));
        current_ = Episode{pool_.back().dialogue_id, pool_.back().role, {}};
    }
}

void DialogueEpisodeRecorder::push_to_pool(Episode episode) {
    pool_.push_back(std::move(episode));
    while (pool_.size() > pool_size_) pool_.pop_front();
}

}  // namespace dialogos
