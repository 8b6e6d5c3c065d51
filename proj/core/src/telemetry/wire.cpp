#include "hqsim/telemetry/wire.hpp"

#include <array>
#include <cmath>

namespace hqsim::wire {

namespace {

constexpr std::array<std::string_view, 10> kNames{
    "hello", "configure", "calibrate_begin", "calibrate_done", "start",
    "input", "state",     "event",           "stop",           "ssq_submit",
};

double number(const nlohmann::json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) {
        throw ProtocolError(std::string("missing numeric field '") + key + "'");
    }
    return it->get<double>();
}

}  // namespace

std::string_view to_string(Kind k) {
    return kNames[static_cast<std::size_t>(k)];
}

std::optional<Kind> parse_kind(std::string_view s) {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == s) return static_cast<Kind>(i);
    }
    return std::nullopt;
}

std::string encode(const Message& m) {
    nlohmann::json j;
    j["kind"] = to_string(m.kind);
    j["seq"] = m.seq;
    j["t"] = m.timestamp_s;
    j["payload"] = m.payload;
    std::string out = j.dump();
    out.push_back('\n');
    return out;
}

Message decode(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("malformed message: ") + e.what());
    }
    if (!j.is_object()) throw ProtocolError("message must be a JSON object");
    const auto kind = j.find("kind");
    if (kind == j.end() || !kind->is_string()) throw ProtocolError("missing 'kind'");
    const auto k = parse_kind(kind->get<std::string>());
    if (!k) throw ProtocolError("unknown kind '" + kind->get<std::string>() + "'");
    const auto seq = j.find("seq");
    if (seq == j.end() || !seq->is_number_unsigned()) {
        throw ProtocolError("missing or negative 'seq'");
    }
    Message m;
    m.kind = *k;
    m.seq = seq->get<std::uint64_t>();
    if (const auto t = j.find("t"); t != j.end() && t->is_number()) {
        m.timestamp_s = t->get<double>();
    }
    if (const auto p = j.find("payload"); p != j.end()) {
        if (!p->is_object()) throw ProtocolError("'payload' must be an object");
        m.payload = *p;
    }
    return m;
}

nlohmann::json input_payload(const HeadSample& head) {
    return {{"pitch_deg", head.pitch_deg},
            {"roll_deg", head.roll_deg},
            {"yaw_deg", head.yaw_deg},
            {"client_t", head.timestamp_s}};
}

HeadSample parse_input(const nlohmann::json& payload) {
    HeadSample h;
    h.pitch_deg = number(payload, "pitch_deg");
    h.roll_deg = number(payload, "roll_deg");
    h.yaw_deg = payload.contains("yaw_deg") ? number(payload, "yaw_deg") : 0.0;
    h.timestamp_s = payload.contains("client_t") ? number(payload, "client_t") : 0.0;
    if (!std::isfinite(h.pitch_deg) || !std::isfinite(h.roll_deg) || !std::isfinite(h.yaw_deg)) {
        throw ProtocolError("input angles must be finite");
    }
    return h;
}

nlohmann::json state_payload(const StateFrame& f) {
    const auto& s = f.state;
    return {{"phase", f.phase},
            {"tick", s.tick},
            {"t", s.t_s},
            {"x", s.x_m},
            {"y", s.y_m},
            {"z", s.z_m},
            {"vx", s.vx_mps},
            {"vz", s.vz_mps},
            {"pitch_deg", s.attitude.pitch_deg},
            {"roll_deg", s.attitude.roll_deg},
            {"setpoint_pitch_deg", f.setpoint.pitch_setpoint_deg},
            {"setpoint_roll_deg", f.setpoint.roll_setpoint_deg},
            {"hud", {{"pitch_deg", f.hud.pitch_deg}, {"roll_deg", f.hud.roll_deg}}}};
}

StateFrame parse_state(const nlohmann::json& p) {
    StateFrame f;
    f.phase = p.value("phase", "");
    auto& s = f.state;
    s.tick = p.value("tick", std::int64_t{0});
    s.t_s = number(p, "t");
    s.x_m = number(p, "x");
    s.y_m = number(p, "y");
    s.z_m = number(p, "z");
    s.vx_mps = number(p, "vx");
    s.vz_mps = number(p, "vz");
    s.attitude = {number(p, "pitch_deg"), number(p, "roll_deg")};
    f.setpoint = {number(p, "setpoint_pitch_deg"), number(p, "setpoint_roll_deg")};
    if (const auto hud = p.find("hud"); hud != p.end()) {
        f.hud = {number(*hud, "pitch_deg"), number(*hud, "roll_deg")};
    }
    return f;
}

nlohmann::json metrics_json(const MetricsReport& m) {
    return {{"T", m.T_s},   {"S", m.S_mps},  {"D", m.D_m},
            {"N_w", m.N_w}, {"N_c", m.N_c}, {"path_length", m.path_length_m}};
}

nlohmann::json ssq_payload(SsqPhase phase, const std::array<int, kSsqItems>& items) {
    return {{"phase", to_string(phase)}, {"items", items}};
}

}  // namespace hqsim::wire
