#include "hqsim/pilot.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hqsim/error.hpp"
#include "hqsim/report.hpp"
#include "hqsim/text_io.hpp"

namespace hqsim {

namespace {

struct Target {
    double x = 0.0;
    double plane_z = 0.0;     // z the pilot must reach with the lateral error settled
    double previous_z = 0.0;  // last plane behind the quad
    double capture = 0.0;
};

// Lateral center of the optimal chain at z (start at the origin).
double chain_x(const Course& course, double z) {
    double z0 = 0.0;
    double x0 = 0.0;
    for (const auto& w : course.waypoints) {
        if (z <= w.plane_z_m) {
            const double u = (z - z0) / (w.plane_z_m - z0);
            return x0 + std::clamp(u, 0.0, 1.0) * (w.center_x_m - x0);
        }
        z0 = w.plane_z_m;
        x0 = w.center_x_m;
    }
    return x0;
}

Target pick_target(const PilotParams& p, const QuadState& s, const Course& course) {
    Target t;
    const auto next = std::find_if(course.waypoints.begin(), course.waypoints.end(),
                                   [&](const Waypoint& w) { return w.plane_z_m > s.z_m; });
    if (next == course.waypoints.end()) {
        const Vec3 c = course.destination.center();
        t.x = c.x;
        t.plane_z = c.z;
        t.previous_z = course.waypoints.back().plane_z_m;
        t.capture = (course.destination.max.x - course.destination.min.x) / 4;
        return t;
    }
    t.plane_z = next->plane_z_m;
    t.previous_z = next == course.waypoints.begin() ? 0.0 : std::prev(next)->plane_z_m;
    t.x = chain_x(course, std::min(s.z_m + p.lookahead_m, t.plane_z));
    t.capture = p.capture_m;
    // Still inside the frame just crossed: keep lining up with it.
    if (next != course.waypoints.begin() && s.z_m - t.previous_z < p.gate_clearance_m) {
        t.x = std::prev(next)->center_x_m;
    }
    return t;
}

HeadSample compute_command(const PilotParams& p, const QuadState& s, const Course& course) {
    const Target t = pick_target(p, s, course);
    const double err = t.x - s.x_m;

    HeadSample h;
    h.roll_deg = p.lateral_gain * err - p.lateral_damping * s.vx_mps;

    const double dist = t.plane_z - s.z_m - std::max(s.vz_mps, 0.0) * p.brake_lead_s;
    const double allowed = t.capture + p.approach_slope * std::max(dist, 0.0);
    const double excess = std::abs(err) - allowed;
    double fraction = 1.0;
    if (excess > 0.0) {
        const bool clear_of_gate = s.z_m - t.previous_z > 1.5;
        const double floor = clear_of_gate ? -p.back_off : 0.0;
        fraction = std::max(floor, 1.0 - excess / p.brake_band_m);
    }
    h.pitch_deg = p.forward_pitch_deg * fraction;

    h.pitch_deg = std::clamp(h.pitch_deg, -p.head_limit_deg, p.head_limit_deg);
    h.roll_deg = std::clamp(h.roll_deg, -p.head_limit_deg, p.head_limit_deg);
    h.timestamp_s = s.t_s;
    return h;
}

}  // namespace

SyntheticPilot::SyntheticPilot(PilotParams params, double tick_rate_hz)
    : params_(params), tick_rate_hz_(tick_rate_hz), rng_(params.seed) {
    if (params_.reaction_delay_s < 0.0 || params_.noise_deg < 0.0) {
        throw Error("PilotParams: delay and noise must be non-negative");
    }
    delay_ticks_ = static_cast<std::size_t>(std::lround(params_.reaction_delay_s * tick_rate_hz_));
}

void SyntheticPilot::begin_flight(const Course& course) {
    if (course.waypoints.empty()) {
        throw Error("SyntheticPilot: empty course");
    }
    course_ = course;
    delay_.assign(delay_ticks_, HeadSample{});
}

HeadSample SyntheticPilot::command(const QuadState& observed) const {
    if (!course_) {
        throw Error("SyntheticPilot: begin_flight not called");
    }
    return compute_command(params_, observed, *course_);
}

HeadSample SyntheticPilot::neutral(double t_s) {
    HeadSample h;
    if (params_.noise_deg > 0.0) {
        h.pitch_deg = params_.noise_deg * noise_(rng_);
        h.roll_deg = params_.noise_deg * noise_(rng_);
    }
    h.timestamp_s = t_s;
    return h;
}

HeadSample SyntheticPilot::step(const QuadState& observed, double t_s) {
    HeadSample h = command(observed);
    if (params_.noise_deg > 0.0) {
        h.pitch_deg += params_.noise_deg * noise_(rng_);
        h.roll_deg += params_.noise_deg * noise_(rng_);
    }
    const double lim = params_.head_limit_deg;
    h.pitch_deg = std::clamp(h.pitch_deg, -lim, lim);
    h.roll_deg = std::clamp(h.roll_deg, -lim, lim);

    delay_.push_back(h);
    HeadSample out = delay_.front();
    delay_.pop_front();
    out.timestamp_s = t_s;
    return out;
}

HeadSample pilot_step(const PilotParams& params, const QuadState& observed, const Course& course,
                      double t_s) {
    if (course.waypoints.empty()) {
        throw Error("pilot_step: empty course");
    }
    HeadSample h = compute_command(params, observed, course);
    h.timestamp_s = t_s;
    return h;
}

void PilotInputSource::begin_flight(const Course& course, const SimConfig& cfg) {
    dt_ = cfg.dt();
    pilot_.begin_flight(course);
}

InputPoll PilotInputSource::poll(const QuadState& observed, InputRecord::Phase phase) {
    if (phase == InputRecord::Phase::calibration) {
        calibration_t_ += dt_;
        return InputPoll::sample(pilot_.neutral(calibration_t_));
    }
    return InputPoll::sample(pilot_.step(observed, observed.t_s));
}

FlightOutcome fly_with_pilot(const PilotParams& params, const FlightSetup& setup,
                             const QuadExtent& quad) {
    PilotInputSource source(params, setup.cfg.tick_rate_hz);
    std::vector<InputRecord> discard;
    return run_flight(setup, source, quad, discard);
}

SweepResult run_pilot_sweep(const PilotParams& params, const std::vector<int>& levels,
                            int runs_per_level, std::uint64_t base_seed, const SweepOptions& options) {
    if (runs_per_level < 1) {
        throw Error("run_pilot_sweep: runs_per_level must be >= 1");
    }
    SweepResult result;
    for (const int level : levels) {
        SweepLevelSummary summary;
        summary.level = level;
        std::vector<double> T, S, D, Nw, Nc;
        for (int run = 0; run < runs_per_level; ++run) {
            SweepRun r;
            r.level = level;
            r.run = run;
            r.course_seed = derive_seed(base_seed, static_cast<std::uint64_t>(run));

            FlightSetup setup;
            setup.course = generate_course(r.course_seed, options.n_waypoints);
            setup.cfg = config_for_level(options.base_cfg, level);
            setup.direct = options.direct;
            setup.max_flight_s = options.max_flight_s;
            setup.participant = "pilot";
            setup.session_index = run + 1;
            setup.latency_level = options.direct ? 0 : level;

            PilotParams p = params;
            p.seed = derive_seed(derive_seed(base_seed ^ params.seed, static_cast<std::uint64_t>(run)),
                                 static_cast<std::uint64_t>(level));
            const FlightOutcome out = fly_with_pilot(p, setup, options.quad);
            r.end = out.end;
            r.metrics = out.metrics;
            ++summary.runs;
            if (r.completed() && r.metrics) {
                T.push_back(r.metrics->T_s);
                S.push_back(r.metrics->S_mps);
                D.push_back(r.metrics->D_m);
                Nw.push_back(r.metrics->N_w);
                Nc.push_back(r.metrics->N_c);
            } else {
                ++summary.incomplete;
            }
            result.runs.push_back(r);
        }
        const auto fill = [](const std::vector<double>& v, double& mean, double& sd) {
            const Stat s = describe(v);
            mean = s.mean;
            sd = s.sd;
        };
        fill(T, summary.T_mean, summary.T_sd);
        fill(S, summary.S_mean, summary.S_sd);
        fill(D, summary.D_mean, summary.D_sd);
        fill(Nw, summary.N_w_mean, summary.N_w_sd);
        fill(Nc, summary.N_c_mean, summary.N_c_sd);
        result.levels.push_back(summary);
    }
    return result;
}

namespace {

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw Error("spearman: need two equal-length samples of size >= 2");
    }
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) {
        throw Error("spearman: constant sample");
    }
    return sab / std::sqrt(saa * sbb);
}

std::string sweep_runs_csv(const SweepResult& r) {
    using text::format_double;
    std::ostringstream out;
    out << "latency_level,run,course_seed,end,T,S,D,N_w,N_c\n";
    for (const auto& run : r.runs) {
        out << run.level << ',' << run.run << ',' << run.course_seed << ',' << to_string(run.end);
        if (run.metrics) {
            out << ',' << format_double(run.metrics->T_s) << ',' << format_double(run.metrics->S_mps)
                << ',' << format_double(run.metrics->D_m) << ',' << run.metrics->N_w << ','
                << run.metrics->N_c;
        } else {
            out << ",,,,,";
        }
        out << '\n';
    }
    return out.str();
}

std::string sweep_summary_csv(const SweepResult& r) {
    using text::format_double;
    std::ostringstream out;
    out << "latency_level,runs,incomplete,T_mean,T_sd,S_mean,S_sd,D_mean,D_sd,N_w_mean,N_w_sd,"
           "N_c_mean,N_c_sd\n";
    for (const auto& l : r.levels) {
        out << l.level << ',' << l.runs << ',' << l.incomplete << ',' << format_double(l.T_mean) << ','
            << format_double(l.T_sd) << ',' << format_double(l.S_mean) << ','
            << format_double(l.S_sd) << ',' << format_double(l.D_mean) << ','
            << format_double(l.D_sd) << ',' << format_double(l.N_w_mean) << ','
            << format_double(l.N_w_sd) << ',' << format_double(l.N_c_mean) << ','
            << format_double(l.N_c_sd) << '\n';
    }
    return out.str();
}

}  // namespace hqsim
