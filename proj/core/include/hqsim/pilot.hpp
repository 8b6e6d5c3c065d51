#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hqsim/course.hpp"
#include "hqsim/latency.hpp"
#include "hqsim/metrics.hpp"
#include "hqsim/rng.hpp"
#include "hqsim/session.hpp"

namespace hqsim {

/// Scripted "head" for unattended flights.
///
/// Lateral: head roll = lateral_gain * (target_x - x) - lateral_damping * vx,
/// where target_x is the optimal chain evaluated lookahead_m ahead of the
/// quad, never beyond the next un-crossed waypoint plane. Until the quad is
/// gate_clearance_m past a plane the target stays on that waypoint's center.
///
/// Forward: head pitch = forward_pitch_deg while the lateral error fits in an
/// approach cone (capture_m + approach_slope * distance-to-plane, with the
/// distance shortened by vz * brake_lead_s). Outside the cone the pitch is
/// reduced linearly over brake_band_m, down to -back_off * forward pitch once
/// the quad is clear of the previous gate.
///
/// Commands go through a FIFO of reaction_delay_s * tick_rate ticks and get
/// seeded Gaussian noise; head angles are limited to +-head_limit_deg.
struct PilotParams {
    double forward_pitch_deg = 10.0;
    double lateral_gain = 4.0;
    double lookahead_m = 5.0;
    double reaction_delay_s = 0.2;
    double noise_deg = 0.0;
    std::uint64_t seed = 0;

    double lateral_damping = 1.0;
    double capture_m = 0.3;
    double approach_slope = 0.5;
    double brake_lead_s = 0.4;
    double brake_band_m = 0.5;
    double back_off = 0.5;
    double head_limit_deg = 30.0;
    // Distance past a plane during which the pilot keeps aiming at that
    // waypoint's center.
    double gate_clearance_m = 0.5;
};

class SyntheticPilot {
public:
    SyntheticPilot(PilotParams params, double tick_rate_hz);

    /// Resets the delay line and targets for a new flight.
    void begin_flight(const Course& course);

    /// Undelayed, noise-free command for the observed state.
    HeadSample command(const QuadState& observed) const;

    /// One tick: command -> noise -> delay line.
    HeadSample step(const QuadState& observed, double t_s);

    /// Head sample while the user levels their head (noise only).
    HeadSample neutral(double t_s);

    const PilotParams& params() const { return params_; }

private:
    PilotParams params_;
    double tick_rate_hz_;
    std::optional<Course> course_;
    std::deque<HeadSample> delay_;
    std::size_t delay_ticks_ = 0;
    Rng rng_;
    std::normal_distribution<double> noise_{0.0, 1.0};
};

/// Stateless form for a single evaluation without delay or noise.
HeadSample pilot_step(const PilotParams& params, const QuadState& observed, const Course& course,
                      double t_s);

/// Adapts a SyntheticPilot to the session input interface.
class PilotInputSource final : public InputSource {
public:
    PilotInputSource(PilotParams params, double tick_rate_hz) : pilot_(params, tick_rate_hz) {}

    void begin_flight(const Course& course, const SimConfig& cfg) override;
    InputPoll poll(const QuadState& observed, InputRecord::Phase phase) override;

private:
    SyntheticPilot pilot_;
    double calibration_t_ = 0.0;
    double dt_ = 1.0 / 75.0;
};

struct SweepOptions {
    SimConfig base_cfg;
    int n_waypoints = kDefaultWaypointCount;
    double max_flight_s = 900.0;
    QuadExtent quad;
    // Zero-latency direct mapping instead of the level's tilt dynamics.
    bool direct = false;
};

struct SweepRun {
    int level = 0;
    int run = 0;
    std::uint64_t course_seed = 0;
    FlightEnd end = FlightEnd::running;
    std::optional<MetricsReport> metrics;

    bool completed() const { return end == FlightEnd::completed; }
};

struct SweepLevelSummary {
    int level = 0;
    int runs = 0;
    int incomplete = 0;
    double T_mean = 0.0, T_sd = 0.0;
    double S_mean = 0.0, S_sd = 0.0;
    double D_mean = 0.0, D_sd = 0.0;
    double N_w_mean = 0.0, N_w_sd = 0.0;
    double N_c_mean = 0.0, N_c_sd = 0.0;
};

struct SweepResult {
    std::vector<SweepRun> runs;
    std::vector<SweepLevelSummary> levels;
};

/// Flies `runs_per_level` seeded courses per level. Run r uses the same course
/// (seed derived from base_seed and r) at every level, so levels are compared
/// on identical courses. Incomplete flights are excluded from the means.
SweepResult run_pilot_sweep(const PilotParams& params, const std::vector<int>& levels,
                            int runs_per_level, std::uint64_t base_seed,
                            const SweepOptions& options = {});

/// Flies one course with the pilot and returns the outcome.
FlightOutcome fly_with_pilot(const PilotParams& params, const FlightSetup& setup,
                             const QuadExtent& quad = {});

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

std::string sweep_runs_csv(const SweepResult& r);
std::string sweep_summary_csv(const SweepResult& r);

}  // namespace hqsim
