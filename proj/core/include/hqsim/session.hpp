#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hqsim/control_map.hpp"
#include "hqsim/course.hpp"
#include "hqsim/flight_log.hpp"
#include "hqsim/metrics.hpp"
#include "hqsim/plan.hpp"
#include "hqsim/sim.hpp"
#include "hqsim/ssq.hpp"

namespace hqsim {

enum class FlightEnd {
    running,
    completed,     // entered the destination volume
    aborted,       // manual stop
    timeout,       // tick budget exhausted
    disconnected,  // input source went away
};

std::string_view to_string(FlightEnd e);

struct FlightSetup {
    Course course;
    SimConfig cfg;
    MappingConfig mapping;
    ZeroReference zero;
    // Zero-latency mode: attitude follows the clamped setpoint directly.
    bool direct = false;
    double max_flight_s = 900.0;
    // Metadata copied into the log header.
    std::string participant;
    int session_index = 0;
    int latency_level = 0;
    bool training = false;
};

/// A single flight from the start button to the destination (or an abort).
/// The log holds the state at start and after every tick.
class Flight {
public:
    explicit Flight(FlightSetup setup);

    /// Advances one tick with the given head sample. Throws once finished.
    FlightEnd tick(const HeadSample& head);
    void stop(FlightEnd reason);

    FlightEnd status() const { return status_; }
    bool running() const { return status_ == FlightEnd::running; }
    const QuadState& state() const { return state_; }
    const ControlInput& setpoint() const { return setpoint_; }
    const Course& course() const { return setup_.course; }
    const FlightSetup& setup() const { return setup_; }
    const FlightLog& log() const { return log_; }

private:
    FlightSetup setup_;
    QuadState state_;
    ControlInput setpoint_;
    FlightLog log_;
    FlightEnd status_ = FlightEnd::running;
    std::int64_t max_ticks_ = 0;
};

/// What a head input source returns for one tick.
struct InputPoll {
    enum class Kind { sample, abort, disconnected };
    Kind kind = Kind::sample;
    HeadSample head;

    static InputPoll sample(const HeadSample& h) { return {Kind::sample, h}; }
    static InputPoll abort() { return {Kind::abort, {}}; }
    static InputPoll disconnected() { return {Kind::disconnected, {}}; }
};

class InputSource {
public:
    virtual ~InputSource() = default;

    /// Called before each flight with the course and dynamics in force.
    virtual void begin_flight(const Course& /*course*/, const SimConfig& /*cfg*/) {}

    /// One poll per tick. During calibration `observed` is the resting state.
    virtual InputPoll poll(const QuadState& observed, InputRecord::Phase phase) = 0;
};

/// Replays a recorded input stream; reports a disconnect once exhausted.
class ReplayInputSource final : public InputSource {
public:
    explicit ReplayInputSource(std::vector<InputRecord> records) : records_(std::move(records)) {}

    InputPoll poll(const QuadState& observed, InputRecord::Phase phase) override;

    /// Number of calibration records before the first flight record.
    int calibration_count() const;

private:
    std::vector<InputRecord> records_;
    std::size_t next_ = 0;
};

class SsqSource {
public:
    virtual ~SsqSource() = default;
    virtual std::optional<SsqResponse> fetch(const std::string& participant, int session_index,
                                             SsqPhase phase) = 0;
};

/// Serves responses loaded from an SSQ CSV.
class TableSsqSource final : public SsqSource {
public:
    explicit TableSsqSource(std::vector<SsqResponse> responses) : responses_(std::move(responses)) {}
    std::optional<SsqResponse> fetch(const std::string& participant, int session_index,
                                     SsqPhase phase) override;

private:
    std::vector<SsqResponse> responses_;
};

enum class SessionStatus { completed, aborted, withdrawn };

std::string_view to_string(SessionStatus s);
SessionStatus parse_session_status(std::string_view s);

struct FlightOutcome {
    FlightLog log;
    FlightEnd end = FlightEnd::running;
    // Absent when the log is too short to analyse.
    std::optional<MetricsReport> metrics;
};

struct SessionRecord {
    std::string participant;
    SessionEntry entry;
    ZeroReference zero;
    std::optional<FlightOutcome> training;
    std::optional<FlightOutcome> flight;
    std::optional<SsqResponse> ssq_pre;
    std::optional<SsqResponse> ssq_post;
    std::vector<InputRecord> inputs;
    SessionStatus status = SessionStatus::aborted;
};

struct SessionSettings {
    SimConfig base_cfg;
    MappingConfig mapping;
    int calibration_ticks = 75;
    double max_flight_s = 900.0;
    int n_waypoints = kDefaultWaypointCount;
    QuadExtent quad;

    void validate() const;
};

/// Reads sim keys, mapping keys and the session keys calibration_ticks,
/// max_flight_s and n_waypoints.
SessionSettings session_settings_from(const KeyValues& kv);

/// Observer hooks. on_tick runs on the session thread after every tick.
struct SessionHooks {
    std::function<void(const Flight&)> on_tick;
    std::function<void(const std::string& name, const std::string& detail)> on_event;
};

/// Sim config for a plan entry: base config with the level's gains.
SimConfig config_for_level(const SimConfig& base, int level);

/// Setup of the training flight (single waypoint, zero latency) or the test
/// flight for a plan entry.
FlightSetup training_setup(const std::string& participant, const SessionEntry& entry,
                           const SessionSettings& settings, const ZeroReference& zero);
FlightSetup test_setup(const std::string& participant, const SessionEntry& entry,
                       const SessionSettings& settings, const ZeroReference& zero);

/// Collects `ticks` calibration samples and returns their mean as the zero
/// reference. Throws hqsim::Error ("calibration missing") if the source
/// disconnects or aborts before delivering any sample.
ZeroReference run_calibration(InputSource& input, const SessionSettings& settings,
                              std::vector<InputRecord>& recorded);

/// Flies until the destination, an abort, a disconnect or the tick budget.
FlightOutcome run_flight(const FlightSetup& setup, InputSource& input, const QuadExtent& quad,
                         std::vector<InputRecord>& recorded, const SessionHooks& hooks = {});

/// Metrics for a log, or nullopt when it is too short to analyse.
std::optional<MetricsReport> try_metrics(const FlightLog& log, const Course& course,
                                         const QuadExtent& quad);

/// Calibration, optional training flight, pre-SSQ, test flight, post-SSQ.
SessionRecord run_session(const std::string& participant, const SessionEntry& entry,
                          const SessionSettings& settings, InputSource& input,
                          SsqSource* ssq = nullptr, const SessionHooks& hooks = {});

/// Runs a session again from its recorded inputs. The number of calibration
/// ticks is taken from the recording.
SessionRecord replay_session(const std::string& participant, const SessionEntry& entry,
                             SessionSettings settings, const std::vector<InputRecord>& inputs);

}  // namespace hqsim
