#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "dialogos/controller/controller.hpp"

namespace dialogos::app {

// HTTP API, all bodies JSON:
//
//   POST   /api/sessions                  -> 201 {session_id}
//   POST   /api/sessions/{id}/utterances  {text}
//                                         -> 200 {reply_text, reply_acts, state}
//   GET    /api/sessions/{id}/transcript  -> 200 {session_id, is_terminal, turns: [{role, text, acts, state?}]}
//   DELETE /api/sessions/{id}             -> 200 {session_id, turns, success}
//
// state is {slots_filled, requested_slot, db_match_count, turn, is_terminal}.
// Errors are {error: {code, message}} with codes session_not_found (404),
// session_terminal (409), bad_request (400) and module_error (500).

struct ServiceOptions {
    std::uint64_t seed = 0;
    std::size_t max_turns = 30;
    std::chrono::milliseconds session_ttl = std::chrono::minutes(30);
};

struct ServiceResponse {
    int status = 200;
    nlohmann::json body;
};

nlohmann::json state_summary(const DialogueState& state);
nlohmann::json transcript_to_json(const Transcript& transcript);

// Session registry. Each session owns one agent; requests to one session
// are serialized, different sessions proceed in parallel. Session k (in
// creation order) runs dialogue k of the configured seed, so a single
// session replays run_human_text with the same input and seed.
class ChatService {
public:
    using Clock = std::chrono::steady_clock;

    // Throws AssemblyError or ConfigError when the agent cannot talk to a
    // human.
    ChatService(AgentSpec spec, SharedDomain domain, ModuleArgs global_args, ServiceOptions options);
    ~ChatService();

    ChatService(const ChatService&) = delete;
    ChatService& operator=(const ChatService&) = delete;

    ServiceResponse create_session();
    ServiceResponse post_utterance(const std::string& id, const std::string& body);
    ServiceResponse transcript(const std::string& id);
    ServiceResponse end_session(const std::string& id);

    // Ends every session idle for longer than the TTL; returns how many.
    std::size_t expire_idle();
    std::size_t session_count() const;
    std::chrono::milliseconds session_ttl() const noexcept { return options_.session_ttl; }

    // Dialogues ended so far (deleted or expired sessions).
    RunStats stats() const;

    // Test hook for the expiry clock.
    void set_clock(std::function<Clock::time_point()> clock);

private:
    struct Session;

    std::shared_ptr<Session> find(const std::string& id) const;
    DialogueRecord finish(Session& session);
    Clock::time_point now() const;

    AgentSpec spec_;
    SharedDomain domain_;
    ModuleArgs global_args_;
    ServiceOptions options_;
    bool text_in_ = true;

    mutable std::mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_dialogue_ = 0;
    std::function<Clock::time_point()> clock_;

    mutable std::mutex record_mutex_;  // experience log and stats
    RunStats stats_;
};

// Serves a ChatService over HTTP until stop() is called.
class HttpServer {
public:
    explicit HttpServer(ChatService& service);
    ~HttpServer();

    // Binds the listening socket; port 0 picks a free port. Returns the
    // bound port. Throws Error when binding fails.
    int bind(const std::string& host, int port);
    // Blocks until stop(). Idle sessions are swept in the background.
    void run();
    bool running() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace dialogos::app
