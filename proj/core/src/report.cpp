#include "hqsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "hqsim/error.hpp"
#include "hqsim/text_io.hpp"

namespace hqsim {

namespace fs = std::filesystem;

Stat describe(const std::vector<double>& values) {
    Stat s;
    s.n = static_cast<int>(values.size());
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / (s.n - 1));
    }
    return s;
}

std::vector<GroupSummary> aggregate(const std::vector<SessionSummary>& sessions, GroupBy by) {
    struct Columns {
        std::vector<double> T, S, D, N_w, N_c, post, delta;
    };
    std::map<int, Columns> groups;
    for (const auto& s : sessions) {
        if (s.status != SessionStatus::completed || !s.metrics) continue;
        const int key = by == GroupBy::latency_level ? s.latency_level : s.session_index;
        auto& c = groups[key];
        c.T.push_back(s.metrics->T_s);
        c.S.push_back(s.metrics->S_mps);
        c.D.push_back(s.metrics->D_m);
        c.N_w.push_back(s.metrics->N_w);
        c.N_c.push_back(s.metrics->N_c);
        if (s.ssq_post) c.post.push_back(s.ssq_post->total);
        if (auto d = s.ssq_delta()) c.delta.push_back(d->total);
    }
    std::vector<GroupSummary> out;
    for (const auto& [key, c] : groups) {
        GroupSummary g;
        g.key = key;
        g.flights = static_cast<int>(c.T.size());
        g.T = describe(c.T);
        g.S = describe(c.S);
        g.D = describe(c.D);
        g.N_w = describe(c.N_w);
        g.N_c = describe(c.N_c);
        for (double v : c.N_w) g.S_w += static_cast<int>(v);
        for (double v : c.N_c) g.S_c += static_cast<int>(v);
        g.ssq_post_total = describe(c.post);
        g.ssq_delta_total = describe(c.delta);
        out.push_back(g);
    }
    return out;
}

CollectedSessions collect_sessions(const fs::path& data_dir) {
    if (!fs::is_directory(data_dir)) {
        throw Error("export: data directory " + data_dir.string() + " does not exist");
    }
    CollectedSessions out;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(data_dir)) {
        if (entry.is_regular_file() && entry.path().filename() == "session.csv") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        try {
            out.sessions.push_back(load_session_summary(f));
        } catch (const std::exception& e) {
            out.warnings.push_back(std::string("skipping unreadable record: ") + e.what());
        }
    }
    if (out.sessions.empty()) {
        throw Error("export: no readable session records under " + data_dir.string());
    }
    std::stable_sort(out.sessions.begin(), out.sessions.end(), [](const auto& a, const auto& b) {
        return std::tie(a.participant, a.session_index) < std::tie(b.participant, b.session_index);
    });
    return out;
}

std::string flights_csv(const std::vector<SessionSummary>& sessions) {
    using text::format_double;
    std::ostringstream out;
    out << "participant,session_index,latency_level,T,S,D,N_w,N_c,status,ssq_post_total,"
           "ssq_delta_total\n";
    for (const auto& s : sessions) {
        out << s.participant << ',' << s.session_index << ',' << s.latency_level;
        if (s.metrics) {
            out << ',' << format_double(s.metrics->T_s) << ',' << format_double(s.metrics->S_mps)
                << ',' << format_double(s.metrics->D_m) << ',' << s.metrics->N_w << ','
                << s.metrics->N_c;
        } else {
            out << ",,,,,";
        }
        out << ',' << to_string(s.status) << ',';
        if (s.ssq_post) out << format_double(s.ssq_post->total);
        out << ',';
        if (auto d = s.ssq_delta()) out << format_double(d->total);
        out << '\n';
    }
    return out.str();
}

std::string groups_csv(const std::vector<GroupSummary>& groups, GroupBy by) {
    using text::format_double;
    std::ostringstream out;
    out << (by == GroupBy::latency_level ? "latency_level" : "session_index")
        << ",flights,T_mean,T_sd,S_mean,S_sd,D_mean,D_sd,N_w_mean,N_w_sd,N_c_mean,N_c_sd,S_w,S_c,"
           "ssq_post_n,ssq_post_mean,ssq_post_sd,ssq_delta_n,ssq_delta_mean,ssq_delta_sd\n";
    const auto stat = [&](const Stat& s) {
        out << ',' << format_double(s.mean) << ',' << format_double(s.sd);
    };
    for (const auto& g : groups) {
        out << g.key << ',' << g.flights;
        stat(g.T);
        stat(g.S);
        stat(g.D);
        stat(g.N_w);
        stat(g.N_c);
        out << ',' << g.S_w << ',' << g.S_c;
        out << ',' << g.ssq_post_total.n;
        stat(g.ssq_post_total);
        out << ',' << g.ssq_delta_total.n;
        stat(g.ssq_delta_total);
        out << '\n';
    }
    return out.str();
}

ExportResult export_csv(const fs::path& data_dir, const fs::path& out_dir) {
    ExportResult r;
    r.collected = collect_sessions(data_dir);
    r.by_latency = aggregate(r.collected.sessions, GroupBy::latency_level);
    r.by_session = aggregate(r.collected.sessions, GroupBy::session_index);

    fs::create_directories(out_dir);
    const auto write = [&](const std::string& name, const std::string& body) {
        const fs::path p = out_dir / name;
        std::ofstream out(p);
        if (!out) throw Error("cannot write " + p.string());
        out << body;
        r.files.push_back(p);
    };
    write("flights.csv", flights_csv(r.collected.sessions));
    write("by_latency.csv", groups_csv(r.by_latency, GroupBy::latency_level));
    write("by_session.csv", groups_csv(r.by_session, GroupBy::session_index));
    return r;
}

}  // namespace hqsim
