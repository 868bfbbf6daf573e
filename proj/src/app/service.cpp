#include "dialogos/app/service.hpp"

#include <condition_variable>
#include <random>
#include <thread>

#include <httplib.h>

#include "dialogos/common/errors.hpp"
#include "dialogos/common/rng.hpp"
#include "dialogos/common/text.hpp"

namespace dialogos::app {

namespace {

ServiceResponse error(int status, const std::string& code, const std::string& message) {
    return {status, {{"error", {{"code", code}, {"message", message}}}}};
}

ServiceResponse not_found(const std::string& id) { return error(404, "session_not_found", "no session " + id); }

std::string new_token() {
    static std::mutex mutex;
    static std::random_device device;
    std::lock_guard lock(mutex);
    std::uniform_int_distribution<int> hex(0, 15);
    std::string out(32, '0');
    for (auto& c : out) c = "0123456789abcdef"[hex(device)];
    return out;
}

}  // namespace

nlohmann::json state_summary(const DialogueState& state) {
    auto slots = nlohmann::json::object();
    for (const auto& [slot, value] : state.slots_filled) slots[slot] = value;
    return {{"slots_filled", slots},
            {"requested_slot", state.requested_slot ? nlohmann::json(*state.requested_slot) : nlohmann::json(nullptr)},
            {"db_match_count", state.db_match_count},
            {"turn", state.turn},
            {"is_terminal", state.is_terminal}};
}

nlohmann::json transcript_to_json(const Transcript& transcript) {
    auto turns = nlohmann::json::array();
    for (const auto& e : transcript)
        turns.push_back({{"role", to_string(e.role)},
                         {"text", e.text},
                         {"acts", e.acts},
                         {"state", e.state ? state_summary(*e.state) : nlohmann::json(nullptr)}});
    return turns;
}

struct ChatService::Session {
    Session(std::string session_id, Agent a) : id(std::move(session_id)), agent(std::move(a)) {}

    std::string id;
    std::mutex mutex;
    Agent agent;
    Transcript transcript;
    std::uint64_t dialogue_id = 0;
    std::size_t turns = 0;
    bool terminal = false;
    bool finished = false;  // closed by the agent rather than cut off
    bool ended = false;
    Clock::time_point last_active;
};

ChatService::ChatService(AgentSpec spec, SharedDomain domain, ModuleArgs global_args, ServiceOptions options)
    : spec_(std::move(spec)),
      domain_(std::move(domain)),
      global_args_(std::move(global_args)),
      options_(options),
      clock_([] { return Clock::now(); }) {
    if (!domain_.ontology || !domain_.database) throw ConfigError({"a domain (ontology and database) is required"});
    if (options_.max_turns == 0) throw ConfigError({"max_turns must be at least 1"});
    // Assemble once up front so configuration problems surface at startup.
    const auto probe = Agent::assemble(spec_, {domain_.ontology, domain_.database, spec_.role, options_.seed},
                                       global_args_);
    if (probe.input_modality() == Modality::custom)
        throw ConfigError({"an agent talking to a human must take text or acts as input"});
    text_in_ = probe.input_modality() != Modality::acts;
}

ChatService::~ChatService() = default;

void ChatService::set_clock(std::function<Clock::time_point()> clock) {
    std::lock_guard lock(registry_mutex_);
    clock_ = std::move(clock);
}

ChatService::Clock::time_point ChatService::now() const { return clock_(); }

std::shared_ptr<ChatService::Session> ChatService::find(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::size_t ChatService::session_count() const {
    std::lock_guard lock(registry_mutex_);
    return sessions_.size();
}

RunStats ChatService::stats() const {
    std::lock_guard lock(record_mutex_);
    return stats_;
}

ServiceResponse ChatService::create_session() {
    std::uint64_t index = 0;
    {
        std::lock_guard lock(registry_mutex_);
        index = next_dialogue_++;
    }
    auto agent = Agent::assemble(spec_, {domain_.ontology, domain_.database, spec_.role, options_.seed}, global_args_);
    agent.start_dialogue(index, dialogue_seed(options_.seed, index));
    auto session = std::make_shared<Session>(new_token(), std::move(agent));
    session->dialogue_id = index;
    std::lock_guard lock(registry_mutex_);
    session->last_active = now();
    sessions_.emplace(session->id, session);
    return {201, {{"session_id", session->id}}};
}

ServiceResponse ChatService::post_utterance(const std::string& id, const std::string& body) {
    const auto session = find(id);
    if (!session) return not_found(id);
    std::lock_guard lock(session->mutex);
    if (session->ended) return not_found(id);
    if (session->terminal) return error(409, "session_terminal", "the dialogue in session " + id + " has ended");

    nlohmann::json request;
    try {
        request = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
        return error(400, "bad_request", "body must be JSON");
    }
    if (!request.is_object() || !request.contains("text") || !request["text"].is_string())
        return error(400, "bad_request", "body must be an object with a string field text");

    const auto text = std::string(text::trim(request["text"].get<std::string>()));
    const Role human = spec_.role == Role::system ? Role::user : Role::system;
    std::optional<ConversationalFrame> frame;
    try {
        frame = text_in_ ? ConversationalFrame::from_text(text, human)
                         : ConversationalFrame::from_acts(deserialize_acts(text), human);
    } catch (const ParseError& e) {
        return error(400, "bad_request", e.what());
    }

    session->last_active = now();
    session->transcript.push_back(TranscriptEntry{human, text, text_in_ ? "" : serialize_acts(frame->acts()), {}});
    std::optional<ConversationalFrame> reply;
    try {
        reply = session->agent.step(*frame);
    } catch (const StepError& e) {
        ++session->turns;
        session->terminal = true;
        return error(500, "module_error", e.what());
    }
    ++session->turns;
    auto& agent = session->agent;
    const auto state = agent.tracked_state();
    session->transcript.push_back(
        TranscriptEntry{spec_.role, frame_utterance(*reply), serialize_acts(agent.last_output_acts()), state});
    if (agent.is_terminal()) {
        session->terminal = true;
        session->finished = !agent.failed();
    } else if (session->turns >= options_.max_turns) {
        session->terminal = true;
    }

    DialogueState shown = state.value_or(DialogueState{});
    if (!state) shown.turn = session->turns;
    shown.is_terminal = session->terminal;
    return {200,
            {{"reply_text", frame_utterance(*reply)},
             {"reply_acts", serialize_acts(agent.last_output_acts())},
             {"state", state_summary(shown)}}};
}

ServiceResponse ChatService::transcript(const std::string& id) {
    const auto session = find(id);
    if (!session) return not_found(id);
    std::lock_guard lock(session->mutex);
    if (session->ended) return not_found(id);
    return {200,
            {{"session_id", id},
             {"is_terminal", session->terminal},
             {"turns", transcript_to_json(session->transcript)}}};
}

DialogueRecord ChatService::finish(Session& session) {
    session.ended = true;
    // Without a user goal, a dialogue the agent closed itself is a success.
    const bool success = session.finished && session.agent.judge_success().value_or(true);
    std::lock_guard lock(record_mutex_);
    const auto& episode = session.agent.end_dialogue(success);
    const DialogueRecord record{session.dialogue_id, session.turns, success, episode.total_return()};
    stats_.add(record);
    session.agent.maybe_train();
    return record;
}

ServiceResponse ChatService::end_session(const std::string& id) {
    std::shared_ptr<Session> session;
    {
        std::lock_guard lock(registry_mutex_);
        const auto it = sessions_.find(id);
        if (it == sessions_.end()) return not_found(id);
        session = it->second;
        sessions_.erase(it);
    }
    std::lock_guard lock(session->mutex);
    const auto record = finish(*session);
    return {200, {{"session_id", id}, {"turns", record.turns}, {"success", record.success}}};
}

std::size_t ChatService::expire_idle() {
    std::vector<std::shared_ptr<Session>> expired;
    {
        std::lock_guard lock(registry_mutex_);
        const auto cutoff = now() - options_.session_ttl;
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            std::unique_lock session_lock(it->second->mutex, std::try_to_lock);
            // A session busy with a request is not idle.
            if (session_lock.owns_lock() && it->second->last_active < cutoff) {
                expired.push_back(it->second);
                it = sessions_.erase(it);
            } else {
                ++it;
            }
        }
    }
    for (const auto& session : expired) {
        std::lock_guard lock(session->mutex);
        finish(*session);
    }
    return expired.size();
}

// --- HTTP -------------------------------------------------------------------

struct HttpServer::Impl {
    explicit Impl(ChatService& s) : service(s) {}

    ChatService& service;
    httplib::Server server;
    std::mutex mutex;
    std::condition_variable cv;
    bool stopping = false;
};

namespace {

void reply(httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

}  // namespace

HttpServer::HttpServer(ChatService& service) : impl_(std::make_unique<Impl>(service)) {
    auto& svr = impl_->server;
    auto& chat = impl_->service;
    svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                             {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                             {"Access-Control-Allow-Headers", "Content-Type"}});
    svr.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    svr.Post("/api/sessions", [&chat](const httplib::Request&, httplib::Response& res) {
        reply(res, chat.create_session());
    });
    svr.Post(R"(/api/sessions/([^/]+)/utterances)", [&chat](const httplib::Request& req, httplib::Response& res) {
        reply(res, chat.post_utterance(req.matches[1], req.body));
    });
    svr.Get(R"(/api/sessions/([^/]+)/transcript)", [&chat](const httplib::Request& req, httplib::Response& res) {
        reply(res, chat.transcript(req.matches[1]));
    });
    svr.Delete(R"(/api/sessions/([^/]+))", [&chat](const httplib::Request& req, httplib::Response& res) {
        reply(res, chat.end_session(req.matches[1]));
    });
    svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        reply(res, error(500, "internal_error", message));
    });
    svr.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.status == 404 && res.body.empty()) reply(res, error(404, "not_found", "no route for " + req.path));
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    auto& svr = impl_->server;
    if (port == 0) {
        const int bound = svr.bind_to_any_port(host);
        if (bound < 0) throw Error("cannot bind " + host);
        return bound;
    }
    if (!svr.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void HttpServer::run() {
    const auto ttl = impl_->service.session_ttl();
    const auto interval = std::clamp<std::chrono::milliseconds>(ttl / 4, std::chrono::milliseconds(10),
                                                                std::chrono::seconds(30));
    std::thread sweeper([this, interval] {
        std::unique_lock lock(impl_->mutex);
        while (!impl_->cv.wait_for(lock, interval, [this] { return impl_->stopping; })) {
            lock.unlock();
            impl_->service.expire_idle();
            lock.lock();
        }
    });
    impl_->server.listen_after_bind();
    {
        std::lock_guard lock(impl_->mutex);
        impl_->stopping = true;
    }
    impl_->cv.notify_all();
    sweeper.join();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

void HttpServer::stop() {
    {
        std::lock_guard lock(impl_->mutex);
        impl_->stopping = true;
    }
    impl_->cv.notify_all();
    if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace dialogos::app
