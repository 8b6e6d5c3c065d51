// hqsim command-line tool.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>

#include "hqsim/config_file.hpp"
#include "hqsim/course.hpp"
#include "hqsim/error.hpp"
#include "hqsim/flight_log.hpp"
#include "hqsim/latency.hpp"
#include "hqsim/metrics.hpp"
#include "hqsim/pilot.hpp"
#include "hqsim/plan.hpp"
#include "hqsim/report.hpp"
#include "hqsim/session.hpp"
#include "hqsim/session_store.hpp"
#include "hqsim/telemetry/server.hpp"
#include "hqsim/text_io.hpp"

namespace fs = std::filesystem;
using namespace hqsim;
using text::format_double;

namespace {

constexpr const char* kEnvDataDir = "HQSIM_DATA_DIR";
constexpr const char* kEnvPort = "HQSIM_PORT";

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

SessionSettings load_settings(const std::string& config_path) {
    if (config_path.empty()) return SessionSettings{};
    const KeyValues kv = KeyValues::load(config_path);
    SessionSettings s = session_settings_from(kv);
    for (const auto& key : kv.unread_keys()) {
        std::cerr << "warning: " << config_path << ": unknown key '" << key << "'\n";
    }
    return s;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed: " + path.string());
}

std::string fixed(double v, int precision) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << v;
    return out.str();
}

void print_metrics(std::ostream& out, const MetricsReport& m) {
    out << "T = " << format_double(m.T_s) << " s\n"
        << "S = " << format_double(m.S_mps) << " m/s\n"
        << "D = " << format_double(m.D_m) << " m\n"
        << "N_w = " << m.N_w << '\n'
        << "N_c = " << m.N_c << '\n'
        << "path_length = " << format_double(m.path_length_m) << " m\n";
}

// calibrate -----------------------------------------------------------------

struct CalibrateArgs {
    std::vector<double> targets;
    bool csv = false;
    double epsilon = 0.018;
    double step = 10.0;
    double rate = 75.0;
    std::string integrator = "exact";
};

int cmd_calibrate(const CalibrateArgs& a) {
    SimConfig cfg;
    cfg.tick_rate_hz = a.rate;
    cfg.tilt_integrator = parse_tilt_integrator(a.integrator);
    RiseTimeCriterion crit;
    crit.epsilon_deg = a.epsilon;
    crit.step_deg = a.step;
    crit.validate();

    struct Row {
        int level;
        double published_gain;
        double target;
    };
    std::vector<Row> rows;
    if (a.targets.empty()) {
        for (const auto& l : kLatencyLevels) rows.push_back({l.level, l.gain, l.latency_s});
    } else {
        for (const double t : a.targets) rows.push_back({0, 0.0, t});
    }

    const char* header = "level,target_s,published_gain,published_rise_s,fitted_gain,fitted_rise_s,fitted_error";
    if (a.csv) {
        std::cout << header << '\n';
    } else {
        std::cout << std::left << std::setw(6) << "level" << std::setw(10) << "target_s" << std::setw(16)
                  << "published_gain" << std::setw(18) << "published_rise_s" << std::setw(13)
                  << "fitted_gain" << std::setw(15) << "fitted_rise_s" << "error\n";
    }
    int status = 0;
    for (const auto& r : rows) {
        const bool published = r.published_gain > 0.0;
        std::optional<RiseTime> pub_rise;
        if (published) {
            try {
                pub_rise = measure_rise_time(r.published_gain, cfg, crit);
            } catch (const Error& e) {
                std::cerr << "gain " << format_double(r.published_gain) << ": " << e.what() << '\n';
            }
        }
        std::optional<GainEstimate> fit;
        try {
            fit = gain_for_latency(r.target, cfg, crit);
        } catch (const Error& e) {
            std::cerr << "target " << format_double(r.target) << " s: " << e.what() << '\n';
            status = 1;
        }
        const std::string level = r.level > 0 ? std::to_string(r.level) : "-";
        const auto cell = [&](bool have, double v, int precision) -> std::string {
            if (!have) return "-";
            return a.csv ? format_double(v) : fixed(v, precision);
        };
        const std::vector<std::string> cells{
            level,
            cell(true, r.target, 3),
            cell(published, r.published_gain, 1),
            cell(pub_rise.has_value(), pub_rise ? pub_rise->seconds : 0.0, 3),
            cell(fit.has_value(), fit ? fit->gain : 0.0, 4),
            cell(fit.has_value(), fit ? fit->realized.seconds : 0.0, 3),
            fit ? fixed(100.0 * fit->relative_error(), 1) + "%" : "-",
        };
        if (a.csv) {
            for (std::size_t i = 0; i < cells.size(); ++i) std::cout << (i ? "," : "") << cells[i];
            std::cout << '\n';
        } else {
            const int widths[] = {6, 10, 16, 18, 13, 15, 0};
            for (std::size_t i = 0; i < cells.size(); ++i) std::cout << std::setw(widths[i]) << cells[i];
            std::cout << '\n';
        }
    }
    return status;
}

// serve ---------------------------------------------------------------------

struct ServeArgs {
    std::string port;
    std::string plan;
    std::string data_dir;
    std::string config;
    std::string bind = "127.0.0.1";
    double time_scale = 1.0;
};

int cmd_serve(const ServeArgs& a) {
    telemetry::ServerOptions opt;
    opt.bind_address = a.bind;
    const std::string port = a.port.empty() ? env_or(kEnvPort, "8765") : a.port;
    const long long p = text::parse_int(port);
    if (p < 0 || p > 65535) throw Error("port out of range: " + port);
    opt.port = static_cast<std::uint16_t>(p);
    opt.plans = load_plans(a.plan);
    opt.data_dir = a.data_dir.empty() ? env_or(kEnvDataDir, "data") : a.data_dir;
    opt.settings = load_settings(a.config);
    opt.time_scale = a.time_scale;

    telemetry::Server server(opt);
    server.start();
    std::cout << "listening on " << opt.bind_address << ':' << server.port() << ", data in "
              << opt.data_dir.string() << std::endl;

    boost::asio::io_context signals_io;
    boost::asio::signal_set signals(signals_io, SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code&, int) { server.stop(); });
    signals_io.run();

    const auto s = server.stats();
    std::cout << "stopped: " << s.sessions_persisted << " session records, " << s.ticks << " ticks, "
              << s.stale_discarded << " stale messages discarded\n";
    return 0;
}

// run-session / replay --------------------------------------------------------

struct SessionArgs {
    std::string plan;
    std::string participant;
    int day = 1;
    std::string data_dir;
    std::string config;
    std::string input;
    std::string ssq_csv;
    std::uint64_t pilot_seed = 0;
    double pilot_noise = 0.0;
    double pilot_delay = PilotParams{}.reaction_delay_s;
};

int cmd_run_session(const SessionArgs& a) {
    const auto plans = load_plans(a.plan);
    const SessionEntry entry = find_plan(plans, a.participant).day(a.day);
    const SessionSettings settings = load_settings(a.config);
    const fs::path data_dir = a.data_dir.empty() ? env_or(kEnvDataDir, "data") : a.data_dir;

    std::optional<TableSsqSource> ssq;
    if (!a.ssq_csv.empty()) ssq.emplace(load_ssq_csv(a.ssq_csv));

    SessionRecord rec;
    if (!a.input.empty()) {
        rec = replay_session(a.participant, entry, settings, load_input_log(a.input));
        if (ssq) {
            rec.ssq_pre = ssq->fetch(a.participant, entry.day, SsqPhase::pre);
            if (rec.status == SessionStatus::completed) {
                rec.ssq_post = ssq->fetch(a.participant, entry.day, SsqPhase::post);
            }
        }
    } else {
        PilotParams params;
        params.seed = a.pilot_seed;
        params.noise_deg = a.pilot_noise;
        params.reaction_delay_s = a.pilot_delay;
        PilotInputSource pilot(params, settings.base_cfg.tick_rate_hz);
        rec = run_session(a.participant, entry, settings, pilot, ssq ? &*ssq : nullptr);
    }
    const fs::path dir = write_session_record(data_dir, rec);

    std::cout << "session " << a.participant << " day " << entry.day << " (latency level "
              << entry.latency_level << "): " << to_string(rec.status) << '\n';
    if (rec.flight && rec.flight->metrics) print_metrics(std::cout, *rec.flight->metrics);
    std::cout << "record: " << dir.string() << '\n';
    return rec.status == SessionStatus::completed ? 0 : 1;
}

struct ReplayArgs {
    std::string session_dir;
    std::string plan;
    std::string config;
};

int cmd_replay(const ReplayArgs& a) {
    const fs::path dir = a.session_dir;
    const SessionSummary summary = load_session_summary(dir / "session.csv");
    SessionEntry entry;
    if (!a.plan.empty()) {
        entry = find_plan(load_plans(a.plan), summary.participant).day(summary.session_index);
    } else {
        entry.day = summary.session_index;
        entry.latency_level = summary.latency_level;
        entry.training = summary.trained;
        entry.course_seed = summary.course_seed;
    }
    const SessionRecord rec =
        replay_session(summary.participant, entry, load_settings(a.config), load_input_log(dir / "inputs.log"));
    if (!rec.flight) {
        std::cout << "replay produced no test flight\n";
        return 1;
    }
    const FlightLog stored = load_flight_log(dir / "flight.log");
    const bool same_log = stored == rec.flight->log;
    const Course course = load_course(dir / "course.txt");
    const auto stored_metrics = try_metrics(stored, course, SessionSettings{}.quad);
    const bool same_metrics = stored_metrics == rec.flight->metrics;
    std::cout << "flight log: " << (same_log ? "identical" : "DIFFERENT") << '\n'
              << "metrics: " << (same_metrics ? "identical" : "DIFFERENT") << '\n';
    return same_log && same_metrics ? 0 : 1;
}

// pilot-sweep -----------------------------------------------------------------

struct SweepArgs {
    std::string levels = "1..5";
    int runs = 5;
    std::uint64_t seed = 1;
    std::string out;
    std::string summary_out;
    std::string config;
    int waypoints = kDefaultWaypointCount;
    bool direct = false;
    PilotParams pilot;
};

int cmd_pilot_sweep(const SweepArgs& a) {
    std::vector<int> levels;
    for (const int l : text::parse_int_list(a.levels)) {
        latency_level(l);
        levels.push_back(l);
    }
    const SessionSettings settings = load_settings(a.config);
    SweepOptions opt;
    opt.base_cfg = settings.base_cfg;
    opt.n_waypoints = a.waypoints;
    opt.max_flight_s = settings.max_flight_s;
    opt.quad = settings.quad;
    opt.direct = a.direct;

    const SweepResult r = run_pilot_sweep(a.pilot, levels, a.runs, a.seed, opt);
    if (!a.out.empty()) write_file(a.out, sweep_runs_csv(r));
    if (!a.summary_out.empty()) write_file(a.summary_out, sweep_summary_csv(r));

    std::cout << std::left << std::setw(7) << "level" << std::setw(6) << "runs" << std::setw(6) << "inc"
              << std::setw(10) << "T_mean" << std::setw(9) << "S_mean" << std::setw(9) << "D_mean"
              << std::setw(9) << "N_w" << "N_c\n"
              << std::fixed;
    std::vector<double> lv;
    std::vector<double> t;
    for (const auto& l : r.levels) {
        std::cout << std::setw(7) << l.level << std::setw(6) << l.runs << std::setw(6) << l.incomplete
                  << std::setprecision(2) << std::setw(10) << l.T_mean << std::setprecision(3) << std::setw(9)
                  << l.S_mean << std::setw(9) << l.D_mean << std::setprecision(1) << std::setw(9) << l.N_w_mean
                  << l.N_c_mean << '\n';
        if (l.incomplete < l.runs) {
            lv.push_back(l.level);
            t.push_back(l.T_mean);
        }
    }
    if (lv.size() >= 2) {
        try {
            std::cout << "spearman(level, mean T) = " << std::setprecision(3) << spearman(lv, t) << '\n';
        } catch (const Error&) {
        }
    }
    return 0;
}

// metrics / export / course / plan ------------------------------------------------

int cmd_metrics(const std::string& log_path, const std::string& course_path, bool per_waypoint) {
    const FlightLog log = load_flight_log(log_path);
    const Course course = course_path.empty() ? course_for(log) : load_course(course_path);
    const MetricsReport m = metrics_report(log, course);
    std::cout << "session = " << log.session_id() << '\n';
    print_metrics(std::cout, m);
    if (per_waypoint) {
        std::cout << "waypoint,passed,collided\n";
        for (std::size_t i = 0; i < m.per_waypoint.size(); ++i) {
            std::cout << i + 1 << ',' << m.per_waypoint[i].passed << ',' << m.per_waypoint[i].collided << '\n';
        }
    }
    return 0;
}

int cmd_export(const std::string& data_dir_arg, const std::string& out_arg) {
    const fs::path data_dir = data_dir_arg.empty() ? env_or(kEnvDataDir, "data") : data_dir_arg;
    const fs::path out = out_arg.empty() ? data_dir / "export" : fs::path(out_arg);
    const ExportResult r = export_csv(data_dir, out);
    for (const auto& w : r.collected.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << r.collected.sessions.size() << " session records\n";
    for (const auto& f : r.files) std::cout << "wrote " << f.string() << '\n';
    return 0;
}

int cmd_course(std::uint64_t seed, int waypoints, bool training, const std::string& out) {
    const Course c = training ? make_training_course() : generate_course(seed, waypoints);
    if (out.empty()) {
        std::cout << to_course_text(c);
    } else {
        save_course(c, out);
    }
    return 0;
}

int cmd_plan(const std::vector<std::string>& participants, std::uint64_t seed, bool fixed_course,
             const std::string& out) {
    const auto seeding = fixed_course ? CourseSeeding::fixed : CourseSeeding::per_session;
    const auto plans =
        participants.empty() ? replication_plans(seed, seeding) : build_session_plan(participants, seed, seeding);
    if (out.empty()) {
        std::cout << to_plan_text(plans);
    } else {
        save_plans(plans, out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hqsim: head-motion quadcopter teleoperation simulator"};
    app.require_subcommand(1);
    int status = 0;

    CalibrateArgs cal;
    auto* calibrate = app.add_subcommand("calibrate", "Rise time of each latency level and fitted gains");
    calibrate->add_option("--targets", cal.targets, "Target rise times in seconds (default: the five levels)")
        ->delimiter(',');
    calibrate->add_flag("--csv", cal.csv, "CSV output");
    calibrate->add_option("--epsilon", cal.epsilon, "Convergence threshold in degrees");
    calibrate->add_option("--step", cal.step, "Step size in degrees");
    calibrate->add_option("--rate", cal.rate, "Tick rate in Hz");
    calibrate->add_option("--integrator", cal.integrator, "Tilt integrator")
        ->check(CLI::IsMember({"exact", "euler"}));
    calibrate->callback([&] { status = cmd_calibrate(cal); });

    ServeArgs srv;
    auto* serve = app.add_subcommand("serve", "Run the telemetry service");
    serve->add_option("--port", srv.port, "TCP port (env HQSIM_PORT, default 8765; 0 picks one)");
    serve->add_option("--plan", srv.plan, "Plan file")->required();
    serve->add_option("--data-dir", srv.data_dir, "Session records (env HQSIM_DATA_DIR, default ./data)");
    serve->add_option("--config", srv.config, "key = value settings file");
    serve->add_option("--bind", srv.bind, "Listen address");
    serve->add_option("--time-scale", srv.time_scale, "Tick pacing relative to real time");
    serve->callback([&] { status = cmd_serve(srv); });

    SessionArgs ses;
    auto* run_session_cmd = app.add_subcommand("run-session", "Run one plan session unattended and record it");
    run_session_cmd->add_option("--plan", ses.plan, "Plan file")->required();
    run_session_cmd->add_option("--participant", ses.participant, "Participant id")->required();
    run_session_cmd->add_option("--day", ses.day, "Session day")->required();
    run_session_cmd->add_option("--data-dir", ses.data_dir, "Session records (env HQSIM_DATA_DIR)");
    run_session_cmd->add_option("--config", ses.config, "key = value settings file");
    run_session_cmd->add_option("--input", ses.input, "Replay this input log instead of the synthetic pilot");
    run_session_cmd->add_option("--ssq-csv", ses.ssq_csv, "Questionnaire responses");
    run_session_cmd->add_option("--pilot-seed", ses.pilot_seed, "Synthetic pilot noise seed");
    run_session_cmd->add_option("--pilot-noise", ses.pilot_noise, "Synthetic pilot noise (deg)");
    run_session_cmd->add_option("--pilot-delay", ses.pilot_delay, "Synthetic pilot reaction delay (s)");
    run_session_cmd->callback([&] { status = cmd_run_session(ses); });

    ReplayArgs rep;
    auto* replay = app.add_subcommand("replay", "Re-run a recorded session and compare with its logs");
    replay->add_option("--session-dir", rep.session_dir, "Directory holding session.csv")->required();
    replay->add_option("--plan", rep.plan, "Plan file (default: metadata in session.csv)");
    replay->add_option("--config", rep.config, "Settings the session ran with");
    replay->callback([&] { status = cmd_replay(rep); });

    SweepArgs sw;
    auto* sweep = app.add_subcommand("pilot-sweep", "Fly the synthetic pilot across latency levels");
    sweep->add_option("--levels", sw.levels, "Levels, e.g. 1..5 or 1,3,5");
    sweep->add_option("--runs", sw.runs, "Runs per level");
    sweep->add_option("--seed", sw.seed, "Base seed");
    sweep->add_option("--out", sw.out, "Per-run CSV");
    sweep->add_option("--summary", sw.summary_out, "Per-level CSV");
    sweep->add_option("--config", sw.config, "key = value settings file");
    sweep->add_option("--waypoints", sw.waypoints, "Waypoints per course");
    sweep->add_flag("--direct", sw.direct, "Zero-latency direct mapping");
    sweep->add_option("--forward-pitch", sw.pilot.forward_pitch_deg, "Pilot forward pitch (deg)");
    sweep->add_option("--lateral-gain", sw.pilot.lateral_gain, "Pilot lateral gain (deg/m)");
    sweep->add_option("--lookahead", sw.pilot.lookahead_m, "Pilot lookahead (m)");
    sweep->add_option("--delay", sw.pilot.reaction_delay_s, "Pilot reaction delay (s)");
    sweep->add_option("--noise", sw.pilot.noise_deg, "Pilot noise (deg)");
    sweep->callback([&] { status = cmd_pilot_sweep(sw); });

    std::string log_path;
    std::string course_path;
    bool per_waypoint = false;
    auto* metrics = app.add_subcommand("metrics", "Metrics of a flight log");
    metrics->add_option("--log", log_path, "Flight log")->required();
    metrics->add_option("--course", course_path, "Course file (default: regenerate from the log header)");
    metrics->add_flag("--per-waypoint", per_waypoint, "List pass/collision per waypoint");
    metrics->callback([&] { status = cmd_metrics(log_path, course_path, per_waypoint); });

    std::string export_dir;
    std::string export_out;
    auto* exp = app.add_subcommand("export", "Per-flight and aggregate CSV tables");
    exp->add_option("--data-dir", export_dir, "Session records (env HQSIM_DATA_DIR)");
    exp->add_option("--out", export_out, "Output directory (default <data-dir>/export)");
    exp->callback([&] { status = cmd_export(export_dir, export_out); });

    std::uint64_t course_seed = 1;
    int course_waypoints = kDefaultWaypointCount;
    bool course_training = false;
    std::string course_out;
    auto* course = app.add_subcommand("course", "Write a course file");
    course->add_option("--seed", course_seed, "Course seed");
    course->add_option("--waypoints", course_waypoints, "Number of waypoints");
    course->add_flag("--training", course_training, "The single-waypoint training course");
    course->add_option("--out", course_out, "Output file (default stdout)");
    course->callback([&] { status = cmd_course(course_seed, course_waypoints, course_training, course_out); });

    std::vector<std::string> plan_participants;
    std::uint64_t plan_seed = 1;
    bool plan_fixed = false;
    std::string plan_out;
    auto* plan = app.add_subcommand("plan", "Write a plan file (default: the nine replication orders)");
    plan->add_option("--participants", plan_participants, "Randomize orders for these participants")
        ->delimiter(',');
    plan->add_option("--seed", plan_seed, "Plan seed");
    plan->add_flag("--fixed-course", plan_fixed, "Same course for every session");
    plan->add_option("--out", plan_out, "Output file (default stdout)");
    plan->callback([&] { status = cmd_plan(plan_participants, plan_seed, plan_fixed, plan_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return status;
}
