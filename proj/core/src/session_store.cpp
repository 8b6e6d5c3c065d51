#include "hqsim/session_store.hpp"

#include <fstream>
#include <sstream>

#include "hqsim/error.hpp"
#include "hqsim/text_io.hpp"

namespace hqsim {

namespace fs = std::filesystem;

std::optional<SsqScore> SessionSummary::ssq_delta() const {
    if (!ssq_pre || !ssq_post) return std::nullopt;
    return *ssq_post - *ssq_pre;
}

SessionSummary summarize(const SessionRecord& rec) {
    SessionSummary s;
    s.participant = rec.participant;
    s.session_index = rec.entry.day;
    s.latency_level = rec.entry.latency_level;
    s.status = rec.status;
    s.course_seed = rec.entry.course_seed;
    s.trained = rec.training.has_value();
    if (rec.flight) {
        s.course_waypoints = rec.flight->log.course_waypoints;
        s.metrics = rec.flight->metrics;
    }
    if (rec.ssq_pre) s.ssq_pre = score_ssq(*rec.ssq_pre);
    if (rec.ssq_post) s.ssq_post = score_ssq(*rec.ssq_post);
    return s;
}

fs::path session_dir(const fs::path& data_dir, const std::string& participant, int day) {
    return data_dir / participant / ("day" + std::to_string(day));
}

namespace {

constexpr std::size_t kFields = 21;

void append_score(std::ostringstream& out, const std::optional<SsqScore>& s) {
    using text::format_double;
    if (s) {
        out << ',' << format_double(s->nausea) << ',' << format_double(s->oculomotor) << ','
            << format_double(s->disorientation) << ',' << format_double(s->total);
    } else {
        out << ",,,,";
    }
}

std::optional<SsqScore> parse_score(const std::vector<std::string>& f, std::size_t at) {
    if (f[at].empty()) return std::nullopt;
    return SsqScore{text::parse_double(f[at]), text::parse_double(f[at + 1]),
                    text::parse_double(f[at + 2]), text::parse_double(f[at + 3])};
}

}  // namespace

std::string session_csv_header() {
    return "participant,session_index,latency_level,status,course_seed,course_waypoints,trained,"
           "T,S,D,N_w,N_c,path_length,"
           "ssq_pre_N,ssq_pre_O,ssq_pre_D,ssq_pre_T,ssq_post_N,ssq_post_O,ssq_post_D,ssq_post_T";
}

std::string session_csv_row(const SessionSummary& s) {
    using text::format_double;
    std::ostringstream out;
    out << s.participant << ',' << s.session_index << ',' << s.latency_level << ','
        << to_string(s.status) << ',' << s.course_seed << ',' << s.course_waypoints << ','
        << (s.trained ? 1 : 0);
    if (s.metrics) {
        const auto& m = *s.metrics;
        out << ',' << format_double(m.T_s) << ',' << format_double(m.S_mps) << ','
            << format_double(m.D_m) << ',' << m.N_w << ',' << m.N_c << ','
            << format_double(m.path_length_m);
    } else {
        out << ",,,,,,";
    }
    append_score(out, s.ssq_pre);
    append_score(out, s.ssq_post);
    return out.str();
}

SessionSummary parse_session_csv_row(const std::string& row) {
    const auto f = text::split(row, ',');
    if (f.size() != kFields) {
        throw Error("session row: expected " + std::to_string(kFields) + " fields, got " +
                    std::to_string(f.size()));
    }
    SessionSummary s;
    s.participant = f[0];
    s.session_index = static_cast<int>(text::parse_int(f[1]));
    s.latency_level = static_cast<int>(text::parse_int(f[2]));
    s.status = parse_session_status(f[3]);
    s.course_seed = std::stoull(f[4]);
    s.course_waypoints = static_cast<int>(text::parse_int(f[5]));
    s.trained = text::parse_bool(f[6]);
    if (!f[7].empty()) {
        MetricsReport m;
        m.T_s = text::parse_double(f[7]);
        m.S_mps = text::parse_double(f[8]);
        m.D_m = text::parse_double(f[9]);
        m.N_w = static_cast<int>(text::parse_int(f[10]));
        m.N_c = static_cast<int>(text::parse_int(f[11]));
        m.path_length_m = text::parse_double(f[12]);
        s.metrics = m;
    }
    s.ssq_pre = parse_score(f, 13);
    s.ssq_post = parse_score(f, 17);
    return s;
}

SessionSummary load_session_summary(const fs::path& session_csv) {
    std::ifstream in(session_csv);
    if (!in) throw Error("cannot open " + session_csv.string());
    std::string header;
    std::string row;
    std::getline(in, header);
    if (text::trim(header) != session_csv_header()) {
        throw Error(session_csv.string() + ": unexpected header");
    }
    if (!std::getline(in, row) || text::trim(row).empty()) {
        throw Error(session_csv.string() + ": missing data row");
    }
    try {
        return parse_session_csv_row(std::string(text::trim(row)));
    } catch (const std::exception& e) {
        throw Error(session_csv.string() + ": " + e.what());
    }
}

fs::path write_session_record(const fs::path& data_dir, const SessionRecord& rec) {
    const fs::path dir = session_dir(data_dir, rec.participant, rec.entry.day);
    fs::create_directories(dir);

    if (rec.flight) {
        save_flight_log(rec.flight->log, dir / "flight.log");
        save_course(course_for(rec.flight->log), dir / "course.txt");
    }
    if (rec.training) {
        save_flight_log(rec.training->log, dir / "training.log");
    }
    save_input_log(rec.inputs, dir / "inputs.log");

    std::vector<SsqResponse> ssq;
    if (rec.ssq_pre) ssq.push_back(*rec.ssq_pre);
    if (rec.ssq_post) ssq.push_back(*rec.ssq_post);
    if (!ssq.empty()) {
        std::ofstream out(dir / "ssq.csv");
        write_ssq_csv(out, ssq);
    }

    // Summary last: its presence marks a complete record.
    const fs::path tmp = dir / "session.csv.tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write " + tmp.string());
        out << session_csv_header() << '\n' << session_csv_row(summarize(rec)) << '\n';
    }
    fs::rename(tmp, dir / "session.csv");
    return dir;
}

}  // namespace hqsim
