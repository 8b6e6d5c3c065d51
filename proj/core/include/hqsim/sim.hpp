#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "hqsim/config_file.hpp"

namespace hqsim {

struct Attitude {
    double pitch_deg = 0.0;
    double roll_deg = 0.0;

    friend bool operator==(const Attitude&, const Attitude&) = default;
};

/// Desired tilt (pitch drives forward motion along z, roll drives lateral x).
struct ControlInput {
    double pitch_setpoint_deg = 0.0;
    double roll_setpoint_deg = 0.0;

    friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

enum class DragMode {
    // Drag as a continuous-time rate: accel = (tilt/limit) a - v d.
    ode_per_second,
    // Drag removes the fraction d of velocity every tick.
    per_tick,
};

enum class TiltIntegrator {
    // Zero-order-hold solution of the first-order tilt ODE over one tick.
    exact,
    // Forward Euler step.
    euler,
};

std::string_view to_string(DragMode m);
std::string_view to_string(TiltIntegrator m);
DragMode parse_drag_mode(std::string_view s);
TiltIntegrator parse_tilt_integrator(std::string_view s);

struct SimConfig {
    double tick_rate_hz = 75.0;
    double gain_pitch = 32.5;
    double gain_roll = 32.5;
    double max_accel_mps2 = 10.0;
    double drag_coeff = 0.05;
    DragMode drag_mode = DragMode::per_tick;
    TiltIntegrator tilt_integrator = TiltIntegrator::exact;
    double tilt_limit_deg = 10.0;
    double altitude_m = 6.0;

    double dt() const { return 1.0 / tick_rate_hz; }

    /// Same config with both tilt gains set to `gain`.
    SimConfig with_gain(double gain) const;

    /// Throws hqsim::Error when a constant is non-positive or non-finite, or
    /// when the euler integrator is combined with gain * dt >= 1.
    void validate() const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Reads the documented keys (field names above); missing keys keep defaults.
/// Unknown keys are left unread so callers sharing the file can consume them.
SimConfig sim_config_from(const KeyValues& kv);
SimConfig load_sim_config(const std::filesystem::path& path);
std::string to_config_text(const SimConfig& cfg);

struct QuadState {
    double x_m = 0.0;
    double z_m = 0.0;
    double y_m = 0.0;
    double vx_mps = 0.0;
    double vz_mps = 0.0;
    Attitude attitude;
    std::int64_t tick = 0;
    double t_s = 0.0;

    static QuadState at_rest(const SimConfig& cfg);

    friend bool operator==(const QuadState&, const QuadState&) = default;
};

ControlInput clamp_setpoint(const ControlInput& input, const SimConfig& cfg);

/// One tick of the first-order tilt response toward an already clamped setpoint.
Attitude tilt_step(const Attitude& att, const ControlInput& input, const SimConfig& cfg);

/// One tick of translation driven by the state's current attitude.
/// Position is integrated with the updated velocity.
QuadState translate_step(const QuadState& state, const SimConfig& cfg);

/// clamp -> tilt -> translate, then advance time by one tick.
QuadState sim_tick(const QuadState& state, const ControlInput& input, const SimConfig& cfg);

/// Zero-latency variant: the attitude is set to the clamped setpoint before
/// translation (no tilt dynamics).
QuadState direct_tick(const QuadState& state, const ControlInput& input, const SimConfig& cfg);

/// Per-tick factor by which the tilt error shrinks for a given gain.
double tilt_error_factor(double gain, const SimConfig& cfg);

}  // namespace hqsim
