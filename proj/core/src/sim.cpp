#include "hqsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hqsim/error.hpp"
#include "hqsim/text_io.hpp"

namespace hqsim {

std::string_view to_string(DragMode m) {
    switch (m) {
        case DragMode::ode_per_second: return "ode_per_second";
        case DragMode::per_tick: return "per_tick";
    }
    return "?";
}

std::string_view to_string(TiltIntegrator m) {
    switch (m) {
        case TiltIntegrator::exact: return "exact";
        case TiltIntegrator::euler: return "euler";
    }
    return "?";
}

DragMode parse_drag_mode(std::string_view s) {
    if (s == "ode_per_second") return DragMode::ode_per_second;
    if (s == "per_tick") return DragMode::per_tick;
    throw Error("unknown drag_mode '" + std::string(s) + "'");
}

TiltIntegrator parse_tilt_integrator(std::string_view s) {
    if (s == "exact") return TiltIntegrator::exact;
    if (s == "euler") return TiltIntegrator::euler;
    throw Error("unknown tilt_integrator '" + std::string(s) + "'");
}

SimConfig SimConfig::with_gain(double gain) const {
    SimConfig out = *this;
    out.gain_pitch = gain;
    out.gain_roll = gain;
    return out;
}

void SimConfig::validate() const {
    const auto positive = [](double v, const char* name) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw Error(std::string("SimConfig.") + name + " must be finite and > 0");
        }
    };
    positive(tick_rate_hz, "tick_rate_hz");
    positive(gain_pitch, "gain_pitch");
    positive(gain_roll, "gain_roll");
    positive(max_accel_mps2, "max_accel_mps2");
    positive(drag_coeff, "drag_coeff");
    positive(tilt_limit_deg, "tilt_limit_deg");
    positive(altitude_m, "altitude_m");
    if (tilt_integrator == TiltIntegrator::euler &&
        (gain_pitch * dt() >= 1.0 || gain_roll * dt() >= 1.0)) {
        throw Error("SimConfig: euler tilt integrator requires gain * dt < 1");
    }
    if (drag_mode == DragMode::per_tick && drag_coeff >= 1.0) {
        throw Error("SimConfig: per_tick drag requires drag_coeff < 1");
    }
}

SimConfig sim_config_from(const KeyValues& kv) {
    SimConfig cfg;
    if (auto v = kv.get_double("tick_rate_hz")) cfg.tick_rate_hz = *v;
    if (auto v = kv.get_double("gain_pitch")) cfg.gain_pitch = *v;
    if (auto v = kv.get_double("gain_roll")) cfg.gain_roll = *v;
    if (auto v = kv.get_double("max_accel_mps2")) cfg.max_accel_mps2 = *v;
    if (auto v = kv.get_double("drag_coeff")) cfg.drag_coeff = *v;
    if (auto v = kv.get("drag_mode")) cfg.drag_mode = parse_drag_mode(*v);
    if (auto v = kv.get("tilt_integrator")) cfg.tilt_integrator = parse_tilt_integrator(*v);
    if (auto v = kv.get_double("tilt_limit_deg")) cfg.tilt_limit_deg = *v;
    if (auto v = kv.get_double("altitude_m")) cfg.altitude_m = *v;
    cfg.validate();
    return cfg;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
    return sim_config_from(KeyValues::load(path));
}

std::string to_config_text(const SimConfig& cfg) {
    using text::format_double;
    std::ostringstream out;
    out << "tick_rate_hz = " << format_double(cfg.tick_rate_hz) << '\n'
        << "gain_pitch = " << format_double(cfg.gain_pitch) << '\n'
        << "gain_roll = " << format_double(cfg.gain_roll) << '\n'
        << "max_accel_mps2 = " << format_double(cfg.max_accel_mps2) << '\n'
        << "drag_coeff = " << format_double(cfg.drag_coeff) << '\n'
        << "drag_mode = " << to_string(cfg.drag_mode) << '\n'
        << "tilt_integrator = " << to_string(cfg.tilt_integrator) << '\n'
        << "tilt_limit_deg = " << format_double(cfg.tilt_limit_deg) << '\n'
        << "altitude_m = " << format_double(cfg.altitude_m) << '\n';
    return out.str();
}

QuadState QuadState::at_rest(const SimConfig& cfg) {
    QuadState s;
    s.y_m = cfg.altitude_m;
    return s;
}

ControlInput clamp_setpoint(const ControlInput& input, const SimConfig& cfg) {
    const double lim = cfg.tilt_limit_deg;
    return {std::clamp(input.pitch_setpoint_deg, -lim, lim),
            std::clamp(input.roll_setpoint_deg, -lim, lim)};
}

double tilt_error_factor(double gain, const SimConfig& cfg) {
    switch (cfg.tilt_integrator) {
        case TiltIntegrator::exact: return std::exp(-gain * cfg.dt());
        case TiltIntegrator::euler: return 1.0 - gain * cfg.dt();
    }
    return 0.0;
}

Attitude tilt_step(const Attitude& att, const ControlInput& input, const SimConfig& cfg) {
    // Both forms are written as setpoint + remaining error so that an attitude
    // already at its setpoint stays bit-identical.
    const auto step = [&](double angle, double setpoint, double gain) {
        if (cfg.tilt_integrator == TiltIntegrator::euler) {
            return angle + gain * (setpoint - angle) * cfg.dt();
        }
        return setpoint + (angle - setpoint) * tilt_error_factor(gain, cfg);
    };
    return {step(att.pitch_deg, input.pitch_setpoint_deg, cfg.gain_pitch),
            step(att.roll_deg, input.roll_setpoint_deg, cfg.gain_roll)};
}

QuadState translate_step(const QuadState& state, const SimConfig& cfg) {
    const double dt = cfg.dt();
    const double a = cfg.max_accel_mps2;
    const double d = cfg.drag_coeff;
    const double ax_cmd = state.attitude.roll_deg / cfg.tilt_limit_deg * a;
    const double az_cmd = state.attitude.pitch_deg / cfg.tilt_limit_deg * a;

    QuadState next = state;
    if (cfg.drag_mode == DragMode::ode_per_second) {
        next.vx_mps = state.vx_mps + (ax_cmd - state.vx_mps * d) * dt;
        next.vz_mps = state.vz_mps + (az_cmd - state.vz_mps * d) * dt;
    } else {
        next.vx_mps = state.vx_mps + ax_cmd * dt - state.vx_mps * d;
        next.vz_mps = state.vz_mps + az_cmd * dt - state.vz_mps * d;
    }
    next.x_m = state.x_m + next.vx_mps * dt;
    next.z_m = state.z_m + next.vz_mps * dt;
    next.y_m = cfg.altitude_m;
    return next;
}

namespace {

QuadState advance_clock(QuadState s, const SimConfig& cfg) {
    s.tick += 1;
    s.t_s = static_cast<double>(s.tick) / cfg.tick_rate_hz;
    return s;
}

}  // namespace

QuadState sim_tick(const QuadState& state, const ControlInput& input, const SimConfig& cfg) {
    const ControlInput u = clamp_setpoint(input, cfg);
    QuadState next = state;
    next.attitude = tilt_step(state.attitude, u, cfg);
    return advance_clock(translate_step(next, cfg), cfg);
}

QuadState direct_tick(const QuadState& state, const ControlInput& input, const SimConfig& cfg) {
    const ControlInput u = clamp_setpoint(input, cfg);
    QuadState next = state;
    next.attitude = {u.pitch_setpoint_deg, u.roll_setpoint_deg};
    return advance_clock(translate_step(next, cfg), cfg);
}

}  // namespace hqsim
