#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hqsim/error.hpp"
#include "hqsim/metrics.hpp"
#include "hqsim/session.hpp"
#include "hqsim/ssq.hpp"

namespace hqsim::wire {

inline constexpr int kProtocolVersion = 1;

enum class Kind {
    hello,
    configure,
    calibrate_begin,
    calibrate_done,
    start,
    input,
    state,
    event,
    stop,
    ssq_submit,
};

std::string_view to_string(Kind k);
std::optional<Kind> parse_kind(std::string_view s);

class ProtocolError : public Error {
public:
    using Error::Error;
};

/// One message: a single JSON object per line,
/// {"kind": "...", "seq": N, "t": seconds, "payload": {...}}.
struct Message {
    Kind kind = Kind::event;
    std::uint64_t seq = 0;
    double timestamp_s = 0.0;
    nlohmann::json payload = nlohmann::json::object();
};

/// Serialized form including the trailing newline.
std::string encode(const Message& m);

/// Throws ProtocolError on malformed JSON or a missing/unknown field.
Message decode(std::string_view line);

// Payload helpers shared by the server, the client and tests.

nlohmann::json input_payload(const HeadSample& head);
HeadSample parse_input(const nlohmann::json& payload);

struct StateFrame {
    std::string phase;  // "calibration" or "flight"
    QuadState state;
    ControlInput setpoint;
    // Horizon-line attitude: the quad's during flight, the head's during calibration.
    Attitude hud;
};

nlohmann::json state_payload(const StateFrame& f);
StateFrame parse_state(const nlohmann::json& payload);

nlohmann::json metrics_json(const MetricsReport& m);

nlohmann::json ssq_payload(SsqPhase phase, const std::array<int, kSsqItems>& items);

}  // namespace hqsim::wire
