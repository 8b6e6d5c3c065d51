#pragma once

#include <array>
#include <cstdint>

#include "hqsim/sim.hpp"

namespace hqsim {

/// One row of the published latency table: equal pitch and roll gains and
/// the rise time they produce.
struct LatencyLevel {
    int level = 0;
    double gain = 0.0;
    double latency_s = 0.0;
};

inline constexpr std::array<LatencyLevel, 5> kLatencyLevels{{
    {1, 32.5, 0.2},
    {2, 15.6, 0.4},
    {3, 10.5, 0.6},
    {4, 7.9, 0.8},
    {5, 6.5, 1.0},
}};

/// Throws hqsim::Error for levels outside 1..5.
const LatencyLevel& latency_level(int level);

/// Step from 0 to `step_deg`; converged once the remaining error is strictly
/// below `epsilon_deg`.
struct RiseTimeCriterion {
    double step_deg = 10.0;
    double epsilon_deg = 0.018;
    std::int64_t max_ticks = 1'000'000;

    void validate() const;
};

struct RiseTime {
    std::int64_t ticks = 0;
    double seconds = 0.0;
};

/// Simulates the tilt response to a step setpoint and returns the first tick
/// whose error is below the criterion's threshold.
/// Throws hqsim::Error if the response does not converge within max_ticks.
RiseTime measure_rise_time(double gain, const SimConfig& cfg, const RiseTimeCriterion& crit = {});

struct GainEstimate {
    double gain = 0.0;
    double target_s = 0.0;
    RiseTime realized;

    double relative_error() const { return (realized.seconds - target_s) / target_s; }
};

/// Closed-form gain ln(step/eps)/target, verified by simulation to realize a
/// rise time within `tolerance` (relative) of the target.
GainEstimate gain_for_latency(double target_s, const SimConfig& cfg,
                              const RiseTimeCriterion& crit = {}, double tolerance = 0.10);

/// Continuous-time closed form only (no verification).
double closed_form_gain(double target_s, const RiseTimeCriterion& crit = {});

}  // namespace hqsim
