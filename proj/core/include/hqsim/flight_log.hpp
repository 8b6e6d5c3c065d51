#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hqsim/control_map.hpp"
#include "hqsim/course.hpp"
#include "hqsim/sim.hpp"

namespace hqsim {

struct FlightSample {
    double t_s = 0.0;
    double x_m = 0.0;
    double z_m = 0.0;
    double pitch_deg = 0.0;
    double roll_deg = 0.0;

    static FlightSample from(const QuadState& s) {
        return {s.t_s, s.x_m, s.z_m, s.attitude.pitch_deg, s.attitude.roll_deg};
    }

    friend bool operator==(const FlightSample&, const FlightSample&) = default;
};

/// One recorded flight. latency_level is 0 for zero-latency (direct) flights.
struct FlightLog {
    std::string participant;
    int session_index = 0;
    int latency_level = 0;
    bool training = false;
    CourseKind course_kind = CourseKind::slalom;
    std::uint64_t course_seed = 0;
    int course_waypoints = 0;
    SimConfig cfg;
    std::vector<FlightSample> samples;
    bool completed = false;

    std::string session_id() const;

    friend bool operator==(const FlightLog&, const FlightLog&) = default;
};

/// Rebuilds the course a log was flown on from its header.
Course course_for(const FlightLog& log);

/// Line-delimited format: '#'-prefixed `key = value` header lines carrying the
/// session metadata and config snapshot, a column line `t,x,z,pitch,roll`,
/// then one sample per line. Numbers use the shortest exact representation,
/// so a write/read round trip is bit-exact.
void write_flight_log(std::ostream& out, const FlightLog& log);
FlightLog read_flight_log(std::istream& in, const std::string& source = "<stream>");
void save_flight_log(const FlightLog& log, const std::filesystem::path& path);
FlightLog load_flight_log(const std::filesystem::path& path);

/// Raw head input consumed by a session, in tick order. Replaying it through
/// the same session reproduces the flight bit-exactly.
struct InputRecord {
    enum class Phase { calibration, flight, abort };
    Phase phase = Phase::flight;
    HeadSample head;

    friend bool operator==(const InputRecord&, const InputRecord&) = default;
};

void write_input_log(std::ostream& out, const std::vector<InputRecord>& records);
std::vector<InputRecord> read_input_log(std::istream& in, const std::string& source = "<stream>");
void save_input_log(const std::vector<InputRecord>& records, const std::filesystem::path& path);
std::vector<InputRecord> load_input_log(const std::filesystem::path& path);

}  // namespace hqsim
