#include "hqsim/flight_log.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hqsim/error.hpp"
#include "hqsim/text_io.hpp"

namespace hqsim {

namespace {

constexpr const char* kFlightMagic = "hqsim-flight-log 1";
constexpr const char* kInputMagic = "hqsim-input-log 1";

std::string_view kind_name(CourseKind k) {
    return k == CourseKind::training ? "training" : "slalom";
}

void write_cfg_header(std::ostream& out, const SimConfig& cfg) {
    // Reuse the config file syntax behind a "cfg." prefix.
    std::istringstream lines(to_config_text(cfg));
    for (std::string line; std::getline(lines, line);) {
        out << "# cfg." << line << '\n';
    }
}

}  // namespace

std::string FlightLog::session_id() const {
    return participant + "-s" + std::to_string(session_index) + (training ? "-training" : "");
}

Course course_for(const FlightLog& log) {
    if (log.course_kind == CourseKind::training) {
        return make_training_course();
    }
    return generate_course(log.course_seed, log.course_waypoints);
}

void write_flight_log(std::ostream& out, const FlightLog& log) {
    using text::format_double;
    out << "# " << kFlightMagic << '\n';
    out << "# participant = " << log.participant << '\n';
    out << "# session_index = " << log.session_index << '\n';
    out << "# latency_level = " << log.latency_level << '\n';
    out << "# training = " << (log.training ? 1 : 0) << '\n';
    out << "# course_kind = " << kind_name(log.course_kind) << '\n';
    out << "# course_seed = " << log.course_seed << '\n';
    out << "# course_waypoints = " << log.course_waypoints << '\n';
    out << "# completed = " << (log.completed ? 1 : 0) << '\n';
    write_cfg_header(out, log.cfg);
    out << "t,x,z,pitch,roll\n";
    for (const auto& s : log.samples) {
        out << format_double(s.t_s) << ',' << format_double(s.x_m) << ',' << format_double(s.z_m)
            << ',' << format_double(s.pitch_deg) << ',' << format_double(s.roll_deg) << '\n';
    }
}

FlightLog read_flight_log(std::istream& in, const std::string& source) {
    FlightLog log;
    std::string header_text;
    std::string cfg_text;
    std::string line;
    int lineno = 0;
    bool magic = false;
    bool columns = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = text::trim(line);
        if (view.empty()) continue;
        if (view.front() == '#') {
            const auto body = text::trim(view.substr(1));
            if (!magic) {
                if (body != kFlightMagic) {
                    throw ParseError(source, lineno, "not a flight log");
                }
                magic = true;
            } else if (body.rfind("cfg.", 0) == 0) {
                cfg_text.append(body.substr(4)).push_back('\n');
            } else {
                header_text.append(body).push_back('\n');
            }
            continue;
        }
        if (!magic) {
            throw ParseError(source, lineno, "not a flight log");
        }
        if (!columns) {
            if (view != "t,x,z,pitch,roll") {
                throw ParseError(source, lineno, "expected column line 't,x,z,pitch,roll'");
            }
            columns = true;
            continue;
        }
        const auto f = text::split(view, ',');
        if (f.size() != 5) {
            throw ParseError(source, lineno, "expected 5 fields");
        }
        try {
            log.samples.push_back({text::parse_double(f[0]), text::parse_double(f[1]),
                                   text::parse_double(f[2]), text::parse_double(f[3]),
                                   text::parse_double(f[4])});
        } catch (const Error& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    if (!magic || !columns) {
        throw ParseError(source, lineno, "truncated flight log");
    }
    const auto kv = KeyValues::parse(header_text, source);
    log.participant = kv.get("participant").value_or("");
    log.session_index = static_cast<int>(kv.get_int("session_index").value_or(0));
    log.latency_level = static_cast<int>(kv.get_int("latency_level").value_or(0));
    log.training = kv.get_bool("training").value_or(false);
    log.course_kind = kv.get("course_kind").value_or("slalom") == "training" ? CourseKind::training
                                                                             : CourseKind::slalom;
    log.course_seed = std::stoull(kv.get("course_seed").value_or("0"));
    log.course_waypoints = static_cast<int>(kv.get_int("course_waypoints").value_or(0));
    log.completed = kv.get_bool("completed").value_or(false);
    log.cfg = sim_config_from(KeyValues::parse(cfg_text, source));
    return log;
}

void save_flight_log(const FlightLog& log, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write flight log " + path.string());
    }
    write_flight_log(out, log);
}

FlightLog load_flight_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open flight log " + path.string());
    }
    return read_flight_log(in, path.string());
}

void write_input_log(std::ostream& out, const std::vector<InputRecord>& records) {
    using text::format_double;
    out << "# " << kInputMagic << '\n';
    out << "phase,pitch,roll,yaw,timestamp\n";
    for (const auto& r : records) {
        const char* phase = r.phase == InputRecord::Phase::calibration ? "cal"
                            : r.phase == InputRecord::Phase::abort     ? "abort"
                                                                       : "fly";
        out << phase << ',' << format_double(r.head.pitch_deg) << ','
            << format_double(r.head.roll_deg) << ',' << format_double(r.head.yaw_deg) << ','
            << format_double(r.head.timestamp_s) << '\n';
    }
}

std::vector<InputRecord> read_input_log(std::istream& in, const std::string& source) {
    std::vector<InputRecord> out;
    std::string line;
    int lineno = 0;
    bool magic = false;
    bool columns = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = text::trim(line);
        if (view.empty()) continue;
        if (!magic) {
            if (view.front() != '#' || text::trim(view.substr(1)) != kInputMagic) {
                throw ParseError(source, lineno, "not an input log");
            }
            magic = true;
            continue;
        }
        if (view.front() == '#') continue;
        if (!columns) {
            if (view != "phase,pitch,roll,yaw,timestamp") {
                throw ParseError(source, lineno, "expected column line");
            }
            columns = true;
            continue;
        }
        const auto f = text::split(view, ',');
        if (f.size() != 5) {
            throw ParseError(source, lineno, "expected 5 fields");
        }
        InputRecord r;
        if (f[0] == "cal") {
            r.phase = InputRecord::Phase::calibration;
        } else if (f[0] == "fly") {
            r.phase = InputRecord::Phase::flight;
        } else if (f[0] == "abort") {
            r.phase = InputRecord::Phase::abort;
        } else {
            throw ParseError(source, lineno, "unknown phase '" + f[0] + "'");
        }
        try {
            r.head = {text::parse_double(f[1]), text::parse_double(f[2]), text::parse_double(f[3]),
                      text::parse_double(f[4])};
        } catch (const Error& e) {
            throw ParseError(source, lineno, e.what());
        }
        out.push_back(r);
    }
    if (!magic) {
        throw ParseError(source, lineno, "empty input log");
    }
    return out;
}

void save_input_log(const std::vector<InputRecord>& records, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write input log " + path.string());
    }
    write_input_log(out, records);
}

std::vector<InputRecord> load_input_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open input log " + path.string());
    }
    return read_input_log(in, path.string());
}

}  // namespace hqsim
