#include "hqsim/control_map.hpp"

#include <cmath>
#include <string>

#include "hqsim/error.hpp"

namespace hqsim {

void MappingConfig::validate(const SimConfig& cfg) const {
    if (mode != MappingMode::threshold) {
        return;
    }
    if (!(threshold_deg > 0.0)) {
        throw Error("threshold mapping requires threshold_deg > 0");
    }
    if (!(fixed_tilt_deg > 0.0) || fixed_tilt_deg > cfg.tilt_limit_deg) {
        throw Error("threshold mapping requires 0 < fixed_tilt_deg <= tilt_limit_deg");
    }
}

MappingConfig mapping_config_from(const KeyValues& kv) {
    MappingConfig m;
    if (auto v = kv.get("mapping_mode")) {
        if (*v == "continuous") {
            m.mode = MappingMode::continuous;
        } else if (*v == "threshold") {
            m.mode = MappingMode::threshold;
        } else {
            throw Error("unknown mapping_mode '" + *v + "'");
        }
    }
    if (auto v = kv.get_bool("swap_axes")) m.swap_axes = *v;
    if (auto v = kv.get_double("threshold_deg")) m.threshold_deg = *v;
    if (auto v = kv.get_double("fixed_tilt_deg")) m.fixed_tilt_deg = *v;
    return m;
}

ZeroReference calibrate_zero(std::span<const HeadSample> samples) {
    if (samples.empty()) {
        throw Error("calibrate_zero: no samples");
    }
    double pitch = 0.0;
    double roll = 0.0;
    for (const auto& s : samples) {
        if (!std::isfinite(s.pitch_deg) || !std::isfinite(s.roll_deg)) {
            throw Error("calibrate_zero: non-finite head angle");
        }
        pitch += s.pitch_deg;
        roll += s.roll_deg;
    }
    const auto n = static_cast<double>(samples.size());
    return {pitch / n, roll / n};
}

namespace {

ControlInput pair_axes(double head_pitch, double head_roll, bool swap_axes) {
    return swap_axes ? ControlInput{head_roll, head_pitch} : ControlInput{head_pitch, head_roll};
}

double on_off(double angle, double threshold, double fixed) {
    if (angle > threshold) return fixed;
    if (angle < -threshold) return -fixed;
    return 0.0;
}

}  // namespace

ControlInput map_continuous(const HeadSample& head, const ZeroReference& zero, const SimConfig& cfg,
                            bool swap_axes) {
    const auto raw = pair_axes(head.pitch_deg - zero.pitch_offset_deg,
                               head.roll_deg - zero.roll_offset_deg, swap_axes);
    return clamp_setpoint(raw, cfg);
}

ControlInput map_threshold(const HeadSample& head, const ZeroReference& zero, double threshold_deg,
                           double fixed_tilt_deg, const SimConfig& cfg, bool swap_axes) {
    const double pitch = on_off(head.pitch_deg - zero.pitch_offset_deg, threshold_deg, fixed_tilt_deg);
    const double roll = on_off(head.roll_deg - zero.roll_offset_deg, threshold_deg, fixed_tilt_deg);
    return clamp_setpoint(pair_axes(pitch, roll, swap_axes), cfg);
}

ControlInput map_head(const HeadSample& head, const ZeroReference& zero, const MappingConfig& mapping,
                      const SimConfig& cfg) {
    if (mapping.mode == MappingMode::threshold) {
        return map_threshold(head, zero, mapping.threshold_deg, mapping.fixed_tilt_deg, cfg,
                             mapping.swap_axes);
    }
    return map_continuous(head, zero, cfg, mapping.swap_axes);
}

}  // namespace hqsim
