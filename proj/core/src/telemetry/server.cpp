#include "hqsim/telemetry/server.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include <boost/asio.hpp>

#include "hqsim/error.hpp"
#include "hqsim/session_store.hpp"
#include "hqsim/telemetry/wire.hpp"

namespace hqsim::telemetry {

namespace asio = boost::asio;
using asio::ip::tcp;
using Clock = std::chrono::steady_clock;
using nlohmann::json;

namespace {

constexpr std::size_t kMaxLineBytes = 64 * 1024;

enum class Role { none, pilot, observer };

struct Counters {
    std::atomic<std::uint64_t> connections{0};
    std::atomic<std::uint64_t> messages_in{0};
    std::atomic<std::uint64_t> stale_discarded{0};
    std::atomic<std::uint64_t> observer_rejected{0};
    std::atomic<std::uint64_t> protocol_errors{0};
    std::atomic<std::uint64_t> frames_sent{0};
    std::atomic<std::uint64_t> frames_coalesced{0};
    std::atomic<std::uint64_t> slow_disconnects{0};
    std::atomic<std::uint64_t> ticks{0};
    std::atomic<std::uint64_t> sessions_persisted{0};
};

struct Inbound {
    enum class Kind { message, disconnect };
    Kind kind = Kind::message;
    std::uint64_t conn = 0;
    wire::Message msg;
};

json error_event(const std::string& reason) {
    return {{"name", "error"}, {"reason", reason}};
}

std::string require_string(const json& p, const char* key) {
    const auto it = p.find(key);
    if (it == p.end() || !it->is_string()) {
        throw wire::ProtocolError(std::string("missing string field '") + key + "'");
    }
    return it->get<std::string>();
}

int require_int(const json& p, const char* key) {
    const auto it = p.find(key);
    if (it == p.end() || !it->is_number_integer()) {
        throw wire::ProtocolError(std::string("missing integer field '") + key + "'");
    }
    return it->get<int>();
}

json ssq_json(const SsqScore& s) {
    return {{"N", s.nausea}, {"O", s.oculomotor}, {"D", s.disorientation}, {"T", s.total}};
}

}  // namespace

struct Server::Impl {
    class Connection;

    explicit Impl(ServerOptions o) : opt(std::move(o)) {}

    ServerOptions opt;
    asio::io_context io;
    std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
    tcp::acceptor acceptor{io};
    std::thread io_thread;
    std::thread session_thread;
    Clock::time_point t0 = Clock::now();
    Counters counters;

    // Network thread only.
    std::map<std::uint64_t, std::shared_ptr<Connection>> conns;
    std::uint64_t next_conn = 1;
    std::uint64_t pilot_conn = 0;

    // Session inbox, fed by the network thread.
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Inbound> inbox;
    bool stopping = false;

    std::mutex life_mu;
    std::condition_variable life_cv;
    bool started = false;
    bool stopped = false;
    std::uint16_t bound_port = 0;

    // Session thread only.
    enum class Phase { idle, configured, calibrating, calibrated, flying, done };
    Phase phase = Phase::idle;
    std::uint64_t pilot = 0;
    std::optional<SessionRecord> rec;
    std::vector<HeadSample> cal_samples;
    std::optional<HeadSample> held;
    std::optional<Flight> flight;
    bool training_done = false;
    Clock::time_point next_tick;

    double elapsed() const { return std::chrono::duration<double>(Clock::now() - t0).count(); }

    // Network side.
    void accept_next();
    void post_inbound(Inbound in);
    void deliver(wire::Kind kind, json payload, std::optional<std::uint64_t> to = std::nullopt);

    // Session side.
    void session_main();
    void handle(const Inbound& in);
    void handle_message(const wire::Message& m);
    void event(const std::string& name, json extra = json::object(),
               std::optional<std::uint64_t> to = std::nullopt);
    void tick();
    void begin_flight();
    void end_flight(FlightEnd reason);
    void finish_session(SessionStatus status, const json& extra = json::object());
    std::optional<std::filesystem::path> persist();
    void pilot_gone();
    bool ticking() const { return phase == Phase::flying || phase == Phase::calibrating; }
};

class Server::Impl::Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(Impl& srv, tcp::socket socket, std::uint64_t id)
        : id(id), srv_(srv), socket_(std::move(socket)) {}

    const std::uint64_t id;
    Role role = Role::none;

    void start() { read_next(); }

    void send(wire::Kind kind, const json& payload) {
        if (closed_) return;
        wire::Message m;
        m.kind = kind;
        m.seq = ++out_seq_;
        m.timestamp_s = srv_.elapsed();
        m.payload = payload;
        out_.push_back({std::make_shared<const std::string>(wire::encode(m)), kind == wire::Kind::state});
        if (out_.size() > srv_.opt.max_queued_frames) coalesce();
        if (out_.size() > srv_.opt.max_queued_total) {
            ++srv_.counters.slow_disconnects;
            close();
            return;
        }
        if (!writing_) write_next();
    }

    void close() {
        if (closed_) return;
        closed_ = true;
        boost::system::error_code ignored;
        socket_.shutdown(tcp::socket::shutdown_both, ignored);
        socket_.close(ignored);
        out_.clear();
        srv_.conns.erase(id);
        if (srv_.pilot_conn == id) {
            srv_.pilot_conn = 0;
            srv_.post_inbound({Inbound::Kind::disconnect, id, {}});
        }
    }

private:
    struct Frame {
        // Shared so the buffer of an in-flight write survives coalescing.
        std::shared_ptr<const std::string> line;
        bool state = false;
    };

    // Drops queued state frames except the newest one; the frame being
    // written stays.
    void coalesce() {
        const std::size_t first = writing_ ? 1 : 0;
        std::deque<Frame> kept(out_.begin(), out_.begin() + static_cast<std::ptrdiff_t>(first));
        std::size_t last_state = out_.size();
        for (std::size_t i = out_.size(); i-- > first;) {
            if (out_[i].state) {
                last_state = i;
                break;
            }
        }
        for (std::size_t i = first; i < out_.size(); ++i) {
            if (out_[i].state && i != last_state) {
                ++srv_.counters.frames_coalesced;
                continue;
            }
            kept.push_back(std::move(out_[i]));
        }
        out_.swap(kept);
    }

    void write_next() {
        writing_ = true;
        auto self = shared_from_this();
        auto line = out_.front().line;
        asio::async_write(socket_, asio::buffer(*line),
                          [self, line](const boost::system::error_code& ec, std::size_t) {
                              self->writing_ = false;
                              if (self->closed_) return;
                              if (ec) {
                                  self->close();
                                  return;
                              }
                              ++self->srv_.counters.frames_sent;
                              self->out_.pop_front();
                              if (!self->out_.empty()) self->write_next();
                          });
    }

    void read_next() {
        auto self = shared_from_this();
        asio::async_read_until(socket_, asio::dynamic_buffer(rbuf_, kMaxLineBytes), '\n',
                               [self](const boost::system::error_code& ec, std::size_t n) {
                                   if (self->closed_) return;
                                   if (ec) {
                                       self->close();
                                       return;
                                   }
                                   std::string line = self->rbuf_.substr(0, n - 1);
                                   self->rbuf_.erase(0, n);
                                   if (!line.empty() && line.back() == '\r') line.pop_back();
                                   if (!line.empty()) self->on_line(line);
                                   if (!self->closed_) self->read_next();
                               });
    }

    void reject(std::atomic<std::uint64_t>& counter, const std::string& reason) {
        ++counter;
        send(wire::Kind::event, error_event(reason));
    }

    void on_line(const std::string& line) {
        ++srv_.counters.messages_in;
        wire::Message m;
        try {
            m = wire::decode(line);
        } catch (const wire::ProtocolError& e) {
            reject(srv_.counters.protocol_errors, e.what());
            return;
        }
        if (last_in_seq_ && m.seq <= *last_in_seq_) {
            ++srv_.counters.stale_discarded;
            return;
        }
        last_in_seq_ = m.seq;

        if (m.kind == wire::Kind::hello) {
            on_hello(m);
            return;
        }
        if (role == Role::none) {
            reject(srv_.counters.protocol_errors, "hello required first");
            return;
        }
        if (m.kind == wire::Kind::state || m.kind == wire::Kind::event) {
            reject(srv_.counters.protocol_errors,
                   "'" + std::string(wire::to_string(m.kind)) + "' is server-to-client only");
            return;
        }
        if (role == Role::observer) {
            reject(srv_.counters.observer_rejected,
                   "observer cannot send '" + std::string(wire::to_string(m.kind)) + "'");
            return;
        }
        srv_.post_inbound({Inbound::Kind::message, id, std::move(m)});
    }

    void on_hello(const wire::Message& m) {
        if (role != Role::none) {
            reject(srv_.counters.protocol_errors, "duplicate hello");
            return;
        }
        const auto version = m.payload.find("version");
        if (version == m.payload.end() || !version->is_number_integer() ||
            version->get<int>() != wire::kProtocolVersion) {
            reject(srv_.counters.protocol_errors,
                   "unsupported protocol version; server speaks " +
                       std::to_string(wire::kProtocolVersion));
            close();
            return;
        }
        const std::string wanted = m.payload.value("role", "observer");
        json reply = {{"version", wire::kProtocolVersion},
                      {"server", "hqsim"},
                      {"tick_rate_hz", srv_.opt.settings.base_cfg.tick_rate_hz}};
        if (wanted == "pilot" && srv_.pilot_conn == 0) {
            role = Role::pilot;
            srv_.pilot_conn = id;
        } else {
            role = Role::observer;
            if (wanted == "pilot") reply["note"] = "pilot slot taken";
        }
        reply["role"] = role == Role::pilot ? "pilot" : "observer";
        send(wire::Kind::hello, reply);
    }

    Impl& srv_;
    tcp::socket socket_;
    std::string rbuf_;
    std::deque<Frame> out_;
    bool writing_ = false;
    bool closed_ = false;
    std::uint64_t out_seq_ = 0;
    std::optional<std::uint64_t> last_in_seq_;
};

void Server::Impl::accept_next() {
    acceptor.async_accept([this](const boost::system::error_code& ec, tcp::socket socket) {
        if (!acceptor.is_open()) return;
        if (!ec) {
            socket.set_option(tcp::no_delay(true));
            auto c = std::make_shared<Connection>(*this, std::move(socket), next_conn++);
            conns[c->id] = c;
            ++counters.connections;
            c->start();
        }
        accept_next();
    });
}

void Server::Impl::post_inbound(Inbound in) {
    {
        std::lock_guard lk(mu);
        inbox.push_back(std::move(in));
    }
    cv.notify_one();
}

void Server::Impl::deliver(wire::Kind kind, json payload, std::optional<std::uint64_t> to) {
    asio::post(io, [this, kind, payload = std::move(payload), to] {
        if (to) {
            if (const auto it = conns.find(*to); it != conns.end()) it->second->send(kind, payload);
            return;
        }
        std::vector<std::shared_ptr<Connection>> targets;
        for (const auto& [id, c] : conns) {
            if (c->role != Role::none) targets.push_back(c);
        }
        for (const auto& c : targets) c->send(kind, payload);
    });
}

void Server::Impl::event(const std::string& name, json extra, std::optional<std::uint64_t> to) {
    extra["name"] = name;
    deliver(wire::Kind::event, std::move(extra), to);
}

void Server::Impl::session_main() {
    const double rate = opt.settings.base_cfg.tick_rate_hz * opt.time_scale;
    const auto period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / rate));
    const auto max_lag = std::chrono::duration_cast<Clock::duration>(std::chrono::milliseconds(250));

    std::unique_lock lk(mu);
    while (!stopping) {
        if (!ticking()) {
            cv.wait(lk, [&] { return stopping || !inbox.empty(); });
            if (stopping) break;
        }
        std::deque<Inbound> batch;
        batch.swap(inbox);
        lk.unlock();
        for (const auto& in : batch) handle(in);
        if (ticking()) {
            tick();
            next_tick += period;
            const auto now = Clock::now();
            if (now - next_tick > max_lag) next_tick = now;
            lk.lock();
            cv.wait_until(lk, next_tick, [&] { return stopping; });
        } else {
            lk.lock();
        }
    }
    lk.unlock();

    if (phase == Phase::flying) {
        rec->inputs.push_back({InputRecord::Phase::abort, {}});
        end_flight(FlightEnd::aborted);
    }
}

void Server::Impl::handle(const Inbound& in) {
    if (in.kind == Inbound::Kind::disconnect) {
        if (in.conn == pilot) pilot_gone();
        return;
    }
    pilot = in.conn;
    try {
        handle_message(in.msg);
    } catch (const std::exception& e) {
        event("error", {{"reason", e.what()}}, pilot);
    }
}

void Server::Impl::handle_message(const wire::Message& m) {
    using wire::Kind;
    switch (m.kind) {
        case Kind::configure: {
            if (phase != Phase::idle && phase != Phase::done) {
                throw Error("configure: a session is in progress");
            }
            const auto participant = require_string(m.payload, "participant");
            const int day = require_int(m.payload, "day");
            const SessionEntry entry = find_plan(opt.plans, participant).day(day);
            rec.emplace();
            rec->participant = participant;
            rec->entry = entry;
            rec->status = SessionStatus::aborted;
            cal_samples.clear();
            held.reset();
            training_done = false;
            phase = Phase::configured;
            event("configured", {{"participant", participant},
                                 {"day", day},
                                 {"latency_level", entry.latency_level},
                                 {"training", entry.training},
                                 {"course_seed", entry.course_seed},
                                 {"n_waypoints", opt.settings.n_waypoints}});
            return;
        }
        case Kind::calibrate_begin: {
            if (phase != Phase::configured && !(phase == Phase::calibrated && !training_done)) {
                throw Error("calibrate_begin: not allowed now");
            }
            rec->inputs.clear();
            cal_samples.clear();
            phase = Phase::calibrating;
            next_tick = Clock::now();
            event("calibration_started");
            return;
        }
        case Kind::calibrate_done: {
            if (phase != Phase::calibrating) throw Error("calibrate_done: calibration not running");
            if (cal_samples.empty()) {
                phase = Phase::configured;
                throw Error("calibration missing: no input received during calibration");
            }
            rec->zero = calibrate_zero(cal_samples);
            phase = Phase::calibrated;
            event("calibrated", {{"pitch_offset_deg", rec->zero.pitch_offset_deg},
                                 {"roll_offset_deg", rec->zero.roll_offset_deg},
                                 {"samples", cal_samples.size()}});
            return;
        }
        case Kind::start:
            if (phase != Phase::calibrated) throw Error("start: calibrate first");
            begin_flight();
            return;
        case Kind::input:
            held = wire::parse_input(m.payload);
            return;
        case Kind::stop:
            if (phase == Phase::flying) {
                rec->inputs.push_back({InputRecord::Phase::abort, {}});
                end_flight(FlightEnd::aborted);
            } else if (phase == Phase::configured || phase == Phase::calibrating ||
                       phase == Phase::calibrated) {
                finish_session(SessionStatus::withdrawn);
            } else {
                throw Error("stop: no session in progress");
            }
            return;
        case Kind::ssq_submit: {
            if (!rec) throw Error("ssq_submit: no session configured");
            SsqResponse r;
            r.participant = rec->participant;
            r.session_index = rec->entry.day;
            r.phase = parse_ssq_phase(require_string(m.payload, "phase"));
            const auto items = m.payload.find("items");
            if (items == m.payload.end() || !items->is_array() || items->size() != kSsqItems) {
                throw wire::ProtocolError("ssq_submit: 'items' must hold 16 ratings");
            }
            for (std::size_t i = 0; i < kSsqItems; ++i) {
                if (!(*items)[i].is_number_integer()) {
                    throw wire::ProtocolError("ssq_submit: ratings must be integers");
                }
                r.items[i] = (*items)[i].get<int>();
            }
            r.validate();
            if (r.phase == SsqPhase::pre) {
                if (rec->flight || (phase == Phase::flying && !flight->setup().training)) {
                    throw Error("ssq_submit: pre form after the test flight started");
                }
                rec->ssq_pre = r;
            } else {
                if (phase != Phase::done || !rec->flight) {
                    throw Error("ssq_submit: post form before the test flight ended");
                }
                rec->ssq_post = r;
                persist();
            }
            json extra = ssq_json(score_ssq(r));
            extra["phase"] = to_string(r.phase);
            event("ssq_recorded", std::move(extra));
            return;
        }
        case Kind::hello:
        case Kind::state:
        case Kind::event:
            return;
    }
}

void Server::Impl::begin_flight() {
    const bool training = rec->entry.training && !training_done;
    FlightSetup setup = training ? training_setup(rec->participant, rec->entry, opt.settings, rec->zero)
                                 : test_setup(rec->participant, rec->entry, opt.settings, rec->zero);
    flight.emplace(std::move(setup));
    phase = Phase::flying;
    next_tick = Clock::now();
    event("flight_started", {{"training", training},
                             {"latency_level", flight->setup().latency_level},
                             {"course", to_course_text(flight->course())}});
}

void Server::Impl::tick() {
    wire::StateFrame frame;
    if (phase == Phase::calibrating) {
        frame.phase = "calibration";
        frame.state = QuadState::at_rest(opt.settings.base_cfg);
        if (held) {
            cal_samples.push_back(*held);
            rec->inputs.push_back({InputRecord::Phase::calibration, *held});
            frame.hud = {held->pitch_deg, held->roll_deg};
        }
    } else {
        // Before the first input the head is taken to be at its zero pose.
        const HeadSample head =
            held.value_or(HeadSample{rec->zero.pitch_offset_deg, rec->zero.roll_offset_deg, 0.0, 0.0});
        rec->inputs.push_back({InputRecord::Phase::flight, head});
        flight->tick(head);
        frame.phase = "flight";
        frame.state = flight->state();
        frame.setpoint = flight->setpoint();
        frame.hud = flight->state().attitude;
    }
    ++counters.ticks;
    deliver(wire::Kind::state, wire::state_payload(frame));
    if (phase == Phase::flying && !flight->running()) end_flight(flight->status());
}

void Server::Impl::end_flight(FlightEnd reason) {
    flight->stop(reason);
    FlightOutcome out;
    out.log = flight->log();
    out.end = flight->status();
    out.metrics = try_metrics(out.log, flight->course(), opt.settings.quad);
    const bool training = flight->setup().training;
    flight.reset();

    json extra = {{"training", training}, {"end", to_string(out.end)}};
    if (out.metrics) extra["metrics"] = wire::metrics_json(*out.metrics);

    if (training) {
        rec->training = std::move(out);
        event("flight_ended", extra);
        if (rec->training->end == FlightEnd::completed) {
            training_done = true;
            phase = Phase::calibrated;
        } else {
            finish_session(SessionStatus::aborted, extra);
        }
        return;
    }
    const bool completed = out.end == FlightEnd::completed;
    rec->flight = std::move(out);
    event("flight_ended", extra);
    finish_session(completed ? SessionStatus::completed : SessionStatus::aborted, extra);
}

void Server::Impl::finish_session(SessionStatus status, const json& extra) {
    rec->status = status;
    json payload = extra;
    payload["status"] = to_string(status);
    payload["participant"] = rec->participant;
    payload["day"] = rec->entry.day;
    if (const auto dir = persist()) payload["session_dir"] = dir->string();
    deliver(wire::Kind::stop, std::move(payload));
    // A finished test flight can still receive its post-flight questionnaire.
    phase = rec->flight ? Phase::done : Phase::idle;
}

std::optional<std::filesystem::path> Server::Impl::persist() {
    try {
        const auto dir = write_session_record(opt.data_dir, *rec);
        ++counters.sessions_persisted;
        return dir;
    } catch (const std::exception& e) {
        event("error", {{"reason", std::string("could not persist session: ") + e.what()}});
        return std::nullopt;
    }
}

void Server::Impl::pilot_gone() {
    event("pilot_disconnected");
    switch (phase) {
        case Phase::flying:
            end_flight(FlightEnd::disconnected);
            break;
        case Phase::configured:
        case Phase::calibrating:
        case Phase::calibrated:
            finish_session(SessionStatus::aborted);
            break;
        case Phase::idle:
        case Phase::done:
            break;
    }
    phase = Phase::idle;
}

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
    impl_->opt.settings.validate();
    if (!(impl_->opt.time_scale > 0.0)) throw Error("time_scale must be > 0");
    if (impl_->opt.max_queued_frames < 1 || impl_->opt.max_queued_total < impl_->opt.max_queued_frames) {
        throw Error("invalid outbound queue limits");
    }
}

Server::~Server() {
    stop();
}

void Server::start() {
    auto& s = *impl_;
    {
        std::lock_guard lk(s.life_mu);
        if (s.started) throw Error("server already started");
    }
    try {
        const tcp::endpoint ep(asio::ip::make_address(s.opt.bind_address), s.opt.port);
        s.acceptor.open(ep.protocol());
        s.acceptor.set_option(tcp::acceptor::reuse_address(true));
        s.acceptor.bind(ep);
        s.acceptor.listen();
        s.bound_port = s.acceptor.local_endpoint().port();
    } catch (const boost::system::system_error& e) {
        throw Error("cannot listen on " + s.opt.bind_address + ":" + std::to_string(s.opt.port) + ": " +
                    e.what());
    }
    s.work.emplace(asio::make_work_guard(s.io));
    s.accept_next();
    s.io_thread = std::thread([&s] { s.io.run(); });
    s.session_thread = std::thread([&s] { s.session_main(); });
    std::lock_guard lk(s.life_mu);
    s.started = true;
}

void Server::stop() {
    auto& s = *impl_;
    {
        std::lock_guard lk(s.life_mu);
        if (!s.started || s.stopped) return;
        s.stopped = true;
    }
    {
        std::lock_guard lk(s.mu);
        s.stopping = true;
    }
    s.cv.notify_all();
    if (s.session_thread.joinable()) s.session_thread.join();

    asio::post(s.io, [&s] {
        boost::system::error_code ignored;
        s.acceptor.close(ignored);
        std::vector<std::shared_ptr<Impl::Connection>> all;
        for (const auto& [id, c] : s.conns) all.push_back(c);
        for (const auto& c : all) c->close();
        s.work.reset();
    });
    if (s.io_thread.joinable()) s.io_thread.join();
    s.life_cv.notify_all();
}

void Server::wait() {
    auto& s = *impl_;
    std::unique_lock lk(s.life_mu);
    s.life_cv.wait(lk, [&] { return s.stopped; });
}

std::uint16_t Server::port() const {
    return impl_->bound_port;
}

ServerStats Server::stats() const {
    const auto& c = impl_->counters;
    ServerStats s;
    s.connections = c.connections;
    s.messages_in = c.messages_in;
    s.stale_discarded = c.stale_discarded;
    s.observer_rejected = c.observer_rejected;
    s.protocol_errors = c.protocol_errors;
    s.frames_sent = c.frames_sent;
    s.frames_coalesced = c.frames_coalesced;
    s.slow_disconnects = c.slow_disconnects;
    s.ticks = c.ticks;
    s.sessions_persisted = c.sessions_persisted;
    return s;
}

}  // namespace hqsim::telemetry
