#include "hqsim/session.hpp"

#include <cmath>

#include "hqsim/error.hpp"
#include "hqsim/latency.hpp"

namespace hqsim {

std::string_view to_string(FlightEnd e) {
    switch (e) {
        case FlightEnd::running: return "running";
        case FlightEnd::completed: return "completed";
        case FlightEnd::aborted: return "aborted";
        case FlightEnd::timeout: return "timeout";
        case FlightEnd::disconnected: return "disconnected";
    }
    return "?";
}

std::string_view to_string(SessionStatus s) {
    switch (s) {
        case SessionStatus::completed: return "completed";
        case SessionStatus::aborted: return "aborted";
        case SessionStatus::withdrawn: return "withdrawn";
    }
    return "?";
}

SessionStatus parse_session_status(std::string_view s) {
    if (s == "completed") return SessionStatus::completed;
    if (s == "aborted") return SessionStatus::aborted;
    if (s == "withdrawn") return SessionStatus::withdrawn;
    throw Error("unknown session status '" + std::string(s) + "'");
}

Flight::Flight(FlightSetup setup) : setup_(std::move(setup)) {
    setup_.cfg.validate();
    setup_.mapping.validate(setup_.cfg);
    if (setup_.course.waypoints.empty()) {
        throw Error("Flight: course has no waypoints");
    }
    state_ = QuadState::at_rest(setup_.cfg);
    max_ticks_ = static_cast<std::int64_t>(std::ceil(setup_.max_flight_s * setup_.cfg.tick_rate_hz));

    log_.participant = setup_.participant;
    log_.session_index = setup_.session_index;
    log_.latency_level = setup_.latency_level;
    log_.training = setup_.training;
    log_.course_kind = setup_.course.kind;
    log_.course_seed = setup_.course.seed;
    log_.course_waypoints = static_cast<int>(setup_.course.size());
    log_.cfg = setup_.cfg;
    log_.samples.push_back(FlightSample::from(state_));
}

FlightEnd Flight::tick(const HeadSample& head) {
    if (!running()) {
        throw Error("Flight::tick after the flight ended");
    }
    setpoint_ = map_head(head, setup_.zero, setup_.mapping, setup_.cfg);
    state_ = setup_.direct ? direct_tick(state_, setpoint_, setup_.cfg)
                           : sim_tick(state_, setpoint_, setup_.cfg);
    log_.samples.push_back(FlightSample::from(state_));

    if (setup_.course.destination.contains({state_.x_m, state_.y_m, state_.z_m})) {
        stop(FlightEnd::completed);
    } else if (state_.tick >= max_ticks_) {
        stop(FlightEnd::timeout);
    }
    return status_;
}

void Flight::stop(FlightEnd reason) {
    if (!running()) return;
    status_ = reason;
    log_.completed = reason == FlightEnd::completed;
}

InputPoll ReplayInputSource::poll(const QuadState& /*observed*/, InputRecord::Phase /*phase*/) {
    if (next_ >= records_.size()) {
        return InputPoll::disconnected();
    }
    const auto& r = records_[next_++];
    if (r.phase == InputRecord::Phase::abort) {
        return InputPoll::abort();
    }
    return InputPoll::sample(r.head);
}

int ReplayInputSource::calibration_count() const {
    int n = 0;
    for (const auto& r : records_) {
        if (r.phase != InputRecord::Phase::calibration) break;
        ++n;
    }
    return n;
}

std::optional<SsqResponse> TableSsqSource::fetch(const std::string& participant, int session_index,
                                                 SsqPhase phase) {
    for (const auto& r : responses_) {
        if (r.participant == participant && r.session_index == session_index && r.phase == phase) {
            return r;
        }
    }
    return std::nullopt;
}

void SessionSettings::validate() const {
    base_cfg.validate();
    mapping.validate(base_cfg);
    if (calibration_ticks < 1) throw Error("calibration_ticks must be >= 1");
    if (!(max_flight_s > 0.0)) throw Error("max_flight_s must be > 0");
    if (n_waypoints < 1) throw Error("n_waypoints must be >= 1");
}

SessionSettings session_settings_from(const KeyValues& kv) {
    SessionSettings s;
    s.base_cfg = sim_config_from(kv);
    s.mapping = mapping_config_from(kv);
    if (auto v = kv.get_int("calibration_ticks")) s.calibration_ticks = static_cast<int>(*v);
    if (auto v = kv.get_double("max_flight_s")) s.max_flight_s = *v;
    if (auto v = kv.get_int("n_waypoints")) s.n_waypoints = static_cast<int>(*v);
    s.validate();
    return s;
}

SimConfig config_for_level(const SimConfig& base, int level) {
    return base.with_gain(latency_level(level).gain);
}

FlightSetup training_setup(const std::string& participant, const SessionEntry& entry,
                           const SessionSettings& settings, const ZeroReference& zero) {
    FlightSetup f;
    f.course = make_training_course();
    f.cfg = settings.base_cfg;
    f.mapping = settings.mapping;
    f.zero = zero;
    f.direct = true;
    f.max_flight_s = settings.max_flight_s;
    f.participant = participant;
    f.session_index = entry.day;
    f.latency_level = 0;
    f.training = true;
    return f;
}

FlightSetup test_setup(const std::string& participant, const SessionEntry& entry,
                       const SessionSettings& settings, const ZeroReference& zero) {
    FlightSetup f;
    f.course = generate_course(entry.course_seed, settings.n_waypoints);
    f.cfg = config_for_level(settings.base_cfg, entry.latency_level);
    f.mapping = settings.mapping;
    f.zero = zero;
    f.direct = false;
    f.max_flight_s = settings.max_flight_s;
    f.participant = participant;
    f.session_index = entry.day;
    f.latency_level = entry.latency_level;
    f.training = false;
    return f;
}

ZeroReference run_calibration(InputSource& input, const SessionSettings& settings,
                              std::vector<InputRecord>& recorded) {
    const QuadState rest = QuadState::at_rest(settings.base_cfg);
    std::vector<HeadSample> samples;
    for (int i = 0; i < settings.calibration_ticks; ++i) {
        const auto p = input.poll(rest, InputRecord::Phase::calibration);
        if (p.kind != InputPoll::Kind::sample) break;
        recorded.push_back({InputRecord::Phase::calibration, p.head});
        samples.push_back(p.head);
    }
    if (samples.empty()) {
        throw Error("calibration missing: input source delivered no calibration samples");
    }
    return calibrate_zero(samples);
}

std::optional<MetricsReport> try_metrics(const FlightLog& log, const Course& course,
                                         const QuadExtent& quad) {
    try {
        return metrics_report(log, course, quad);
    } catch (const Error&) {
        return std::nullopt;
    }
}

FlightOutcome run_flight(const FlightSetup& setup, InputSource& input, const QuadExtent& quad,
                         std::vector<InputRecord>& recorded, const SessionHooks& hooks) {
    Flight flight(setup);
    input.begin_flight(flight.course(), flight.setup().cfg);
    if (hooks.on_event) hooks.on_event("flight_started", setup.training ? "training" : "test");

    while (flight.running()) {
        const auto p = input.poll(flight.state(), InputRecord::Phase::flight);
        if (p.kind == InputPoll::Kind::abort) {
            recorded.push_back({InputRecord::Phase::abort, {}});
            flight.stop(FlightEnd::aborted);
            break;
        }
        if (p.kind == InputPoll::Kind::disconnected) {
            flight.stop(FlightEnd::disconnected);
            break;
        }
        recorded.push_back({InputRecord::Phase::flight, p.head});
        flight.tick(p.head);
        if (hooks.on_tick) hooks.on_tick(flight);
    }
    if (hooks.on_event) hooks.on_event("flight_ended", std::string(to_string(flight.status())));

    FlightOutcome out;
    out.log = flight.log();
    out.end = flight.status();
    out.metrics = try_metrics(out.log, flight.course(), quad);
    return out;
}

SessionRecord run_session(const std::string& participant, const SessionEntry& entry,
                          const SessionSettings& settings, InputSource& input, SsqSource* ssq,
                          const SessionHooks& hooks) {
    settings.validate();
    SessionRecord rec;
    rec.participant = participant;
    rec.entry = entry;
    rec.status = SessionStatus::aborted;

    rec.zero = run_calibration(input, settings, rec.inputs);
    if (hooks.on_event) hooks.on_event("calibrated", "");

    if (entry.training) {
        rec.training = run_flight(training_setup(participant, entry, settings, rec.zero), input,
                                  settings.quad, rec.inputs, hooks);
        if (rec.training->end == FlightEnd::disconnected || rec.training->end == FlightEnd::aborted) {
            return rec;
        }
    }
    if (ssq != nullptr) {
        rec.ssq_pre = ssq->fetch(participant, entry.day, SsqPhase::pre);
    }

    rec.flight = run_flight(test_setup(participant, entry, settings, rec.zero), input, settings.quad,
                            rec.inputs, hooks);
    if (rec.flight->end == FlightEnd::completed) {
        rec.status = SessionStatus::completed;
        if (ssq != nullptr) {
            rec.ssq_post = ssq->fetch(participant, entry.day, SsqPhase::post);
        }
    }
    return rec;
}

SessionRecord replay_session(const std::string& participant, const SessionEntry& entry,
                             SessionSettings settings, const std::vector<InputRecord>& inputs) {
    ReplayInputSource source(inputs);
    settings.calibration_ticks = source.calibration_count();
    if (settings.calibration_ticks < 1) {
        throw Error("replay_session: recording has no calibration samples");
    }
    return run_session(participant, entry, settings, source);
}

}  // namespace hqsim
