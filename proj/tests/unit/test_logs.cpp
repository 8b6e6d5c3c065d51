#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "hqsim/error.hpp"
#include "hqsim/flight_log.hpp"
#include "hqsim/rng.hpp"

using namespace hqsim;

namespace {

FlightLog random_log(std::uint64_t seed, int n) {
    Rng rng(seed);
    FlightLog log;
    log.participant = "P7";
    log.session_index = 3;
    log.latency_level = 4;
    log.course_seed = seed;
    log.course_waypoints = 100;
    log.cfg = SimConfig{}.with_gain(7.9);
    log.cfg.drag_mode = DragMode::ode_per_second;
    log.completed = true;
    for (int i = 0; i < n; ++i) {
        log.samples.push_back({i / 75.0, uniform_in(rng, -6, 6), uniform_in(rng, 0, 505),
                               uniform_in(rng, -10, 10), uniform_in(rng, -10, 10)});
    }
    return log;
}

}  // namespace

TEST(FlightLog, RoundTripIsBitExact) {
    FlightLog log = random_log(11, 500);
    log.samples.push_back({1e-300, -0.0, 5e-324, 0.1 + 0.2, 1.0 / 3.0});
    std::stringstream ss;
    write_flight_log(ss, log);
    const FlightLog back = read_flight_log(ss);
    ASSERT_EQ(back.samples.size(), log.samples.size());
    for (std::size_t i = 0; i < log.samples.size(); ++i) {
        EXPECT_EQ(std::memcmp(&back.samples[i], &log.samples[i], sizeof(FlightSample)), 0) << i;
    }
    EXPECT_EQ(back, log);
}

TEST(FlightLog, TrainingHeaderRoundTrip) {
    FlightLog log = random_log(2, 3);
    log.training = true;
    log.course_kind = CourseKind::training;
    log.latency_level = 0;
    log.completed = false;
    std::stringstream ss;
    write_flight_log(ss, log);
    EXPECT_EQ(read_flight_log(ss), log);
    EXPECT_EQ(course_for(log), make_training_course());
}

TEST(FlightLog, CourseForRebuildsSlalom) {
    const FlightLog log = random_log(99, 2);
    EXPECT_EQ(course_for(log), generate_course(99, 100));
}

TEST(FlightLog, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "hqsim_test_flight.log";
    const FlightLog log = random_log(5, 50);
    save_flight_log(log, path);
    EXPECT_EQ(load_flight_log(path), log);
    std::filesystem::remove(path);
    EXPECT_THROW(load_flight_log(path), Error);
}

TEST(FlightLog, MalformedRowRejected) {
    std::stringstream ss;
    write_flight_log(ss, random_log(1, 3));
    std::string text = ss.str() + "0.5,1,2,3\n";
    std::istringstream in(text);
    EXPECT_THROW(read_flight_log(in), ParseError);
}

TEST(InputLog, RoundTripIsBitExact) {
    Rng rng(3);
    std::vector<InputRecord> recs;
    for (int i = 0; i < 200; ++i) {
        InputRecord r;
        r.phase = i < 75 ? InputRecord::Phase::calibration : InputRecord::Phase::flight;
        r.head = {uniform_in(rng, -30, 30), uniform_in(rng, -30, 30), uniform_in(rng, -90, 90),
                  i * 0.0133};
        recs.push_back(r);
    }
    recs.push_back({InputRecord::Phase::abort, {}});
    std::stringstream ss;
    write_input_log(ss, recs);
    EXPECT_EQ(read_input_log(ss), recs);
}
