#include "hqsim/latency.hpp"

#include <cmath>
#include <string>

#include "hqsim/error.hpp"

namespace hqsim {

const LatencyLevel& latency_level(int level) {
    if (level < 1 || level > static_cast<int>(kLatencyLevels.size())) {
        throw Error("latency level must be in 1..5, got " + std::to_string(level));
    }
    return kLatencyLevels[static_cast<std::size_t>(level - 1)];
}

void RiseTimeCriterion::validate() const {
    if (!(epsilon_deg > 0.0) || !(epsilon_deg < step_deg)) {
        throw Error("RiseTimeCriterion requires 0 < epsilon_deg < step_deg");
    }
    if (max_ticks <= 0) {
        throw Error("RiseTimeCriterion.max_ticks must be positive");
    }
}

RiseTime measure_rise_time(double gain, const SimConfig& cfg, const RiseTimeCriterion& crit) {
    crit.validate();
    if (!std::isfinite(gain) || gain <= 0.0) {
        throw Error("measure_rise_time: gain must be finite and > 0");
    }
    if (cfg.tilt_integrator == TiltIntegrator::euler && gain * cfg.dt() > 1.0) {
        throw Error("measure_rise_time: euler integrator requires gain * dt <= 1");
    }
    const SimConfig stepped = cfg.with_gain(gain);
    const ControlInput setpoint{crit.step_deg, crit.step_deg};

    Attitude att{};
    for (std::int64_t n = 1; n <= crit.max_ticks; ++n) {
        att = tilt_step(att, setpoint, stepped);
        if (std::abs(crit.step_deg - att.pitch_deg) < crit.epsilon_deg) {
            return {n, static_cast<double>(n) * cfg.dt()};
        }
    }
    throw Error("measure_rise_time: no convergence within " + std::to_string(crit.max_ticks) +
                " ticks for gain " + std::to_string(gain));
}

double closed_form_gain(double target_s, const RiseTimeCriterion& crit) {
    crit.validate();
    if (!(target_s > 0.0)) {
        throw Error("closed_form_gain: target must be > 0");
    }
    return std::log(crit.step_deg / crit.epsilon_deg) / target_s;
}

GainEstimate gain_for_latency(double target_s, const SimConfig& cfg, const RiseTimeCriterion& crit,
                              double tolerance) {
    if (!(target_s >= cfg.dt())) {
        throw Error("gain_for_latency: target " + std::to_string(target_s) +
                    " s is shorter than one tick");
    }
    GainEstimate est;
    est.target_s = target_s;
    est.gain = closed_form_gain(target_s, crit);
    est.realized = measure_rise_time(est.gain, cfg, crit);
    if (std::abs(est.relative_error()) > tolerance) {
        throw Error("gain_for_latency: realized rise time " + std::to_string(est.realized.seconds) +
                    " s is not within tolerance of target " + std::to_string(target_s) + " s");
    }
    return est;
}

}  // namespace hqsim
