#pragma once

#include <span>

#include "hqsim/config_file.hpp"
#include "hqsim/sim.hpp"

namespace hqsim {

struct HeadSample {
    double pitch_deg = 0.0;
    double roll_deg = 0.0;
    double yaw_deg = 0.0;
    double timestamp_s = 0.0;

    friend bool operator==(const HeadSample&, const HeadSample&) = default;
};

/// Head angles captured while the user levels their head; subtracted from
/// every later sample.
struct ZeroReference {
    double pitch_offset_deg = 0.0;
    double roll_offset_deg = 0.0;

    friend bool operator==(const ZeroReference&, const ZeroReference&) = default;
};

enum class MappingMode {
    continuous,
    threshold,
};

struct MappingConfig {
    MappingMode mode = MappingMode::continuous;
    // Head pitch drives roll setpoint and head roll drives pitch setpoint.
    bool swap_axes = false;
    double threshold_deg = 5.0;
    double fixed_tilt_deg = 10.0;

    void validate(const SimConfig& cfg) const;
};

/// Keys: mapping_mode (continuous|threshold), swap_axes, threshold_deg, fixed_tilt_deg.
MappingConfig mapping_config_from(const KeyValues& kv);

/// Per-axis mean. Throws hqsim::Error on an empty span or non-finite angles.
ZeroReference calibrate_zero(std::span<const HeadSample> samples);

ControlInput map_continuous(const HeadSample& head, const ZeroReference& zero, const SimConfig& cfg,
                            bool swap_axes = false);

/// ON/OFF mapping: each axis outputs +fixed, 0 or -fixed depending on whether
/// the zeroed angle exceeds +threshold, lies within, or falls below -threshold.
ControlInput map_threshold(const HeadSample& head, const ZeroReference& zero, double threshold_deg,
                           double fixed_tilt_deg, const SimConfig& cfg, bool swap_axes = false);

ControlInput map_head(const HeadSample& head, const ZeroReference& zero, const MappingConfig& mapping,
                      const SimConfig& cfg);

}  // namespace hqsim
