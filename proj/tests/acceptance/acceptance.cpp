// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

#include "hqsim/latency.hpp"
#include "hqsim/metrics.hpp"
#include "hqsim/pilot.hpp"
#include "hqsim/report.hpp"
#include "hqsim/session.hpp"
#include "hqsim/session_store.hpp"
#include "hqsim/sim.hpp"
#include "hqsim/ssq.hpp"
#include "hqsim/telemetry/server.hpp"
#include "support/oracles.hpp"
#include "support/scripted_client.hpp"
#include "support/synthetic.hpp"

using namespace hqsim;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;
    std::string failures;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failures += " [failed: " + what + "]";
        }
    }
};

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

// --- latency table -----------------------------------------------------------

void table_calibration(Verdict& v) {
    const SimConfig cfg;
    double worst_rise = 0.0, worst_gain = 0.0;
    for (const auto& l : kLatencyLevels) {
        const RiseTime r = measure_rise_time(l.gain, cfg);
        const double rise_err = std::abs(r.seconds - l.latency_s) / l.latency_s;
        const GainEstimate g = gain_for_latency(l.latency_s, cfg);
        const double gain_err = std::abs(g.gain - l.gain) / l.gain;
        worst_rise = std::max(worst_rise, rise_err);
        worst_gain = std::max(worst_gain, gain_err);
        v.require(rise_err <= 0.10, "level " + std::to_string(l.level) + " rise time " +
                                        fmt(r.seconds, 3) + " s");
        v.require(gain_err <= 0.05, "level " + std::to_string(l.level) + " inverted gain " +
                                        fmt(g.gain, 3));
        v.detail << "L" << l.level << " k=" << l.gain << " rise=" << fmt(r.seconds, 3)
                 << "s inv=" << fmt(g.gain, 2) << "  ";
    }
    v.detail << "| worst rise err " << fmt(100 * worst_rise, 1) << "%, worst gain err "
             << fmt(100 * worst_gain, 1) << "%";
}

// --- tilt dynamics -----------------------------------------------------------

void dynamics_oracle(Verdict& v) {
    Rng rng(20260101);
    double worst = 0.0;
    int overshoots = 0;
    int cases = 0;
    for (const TiltIntegrator integ : {TiltIntegrator::exact, TiltIntegrator::euler}) {
        for (int i = 0; i < 10000; ++i, ++cases) {
            SimConfig cfg;
            cfg.tilt_integrator = integ;
            // Euler needs k * dt < 1; the exact step accepts any positive gain.
            const double gain = uniform_in(rng, 0.5, integ == TiltIntegrator::euler ? 74.9 : 200.0);
            cfg = cfg.with_gain(gain);
            const Attitude att{uniform_in(rng, -10, 10), uniform_in(rng, -10, 10)};
            const ControlInput sp{uniform_in(rng, -10, 10), uniform_in(rng, -10, 10)};
            const Attitude got = tilt_step(att, sp, cfg);
            const auto want = [&](double th, double d) {
                return integ == TiltIntegrator::exact ? oracle::tilt_exact(th, d, gain, cfg.dt(), 1)
                                                      : oracle::tilt_euler(th, d, gain, cfg.dt(), 1);
            };
            for (const auto& [g, th, d] : {std::tuple{got.pitch_deg, att.pitch_deg, sp.pitch_setpoint_deg},
                                          std::tuple{got.roll_deg, att.roll_deg, sp.roll_setpoint_deg}}) {
                const double w = want(th, d);
                const double scale = std::max({std::abs(w), std::abs(th), std::abs(d), 1e-12});
                worst = std::max(worst, std::abs(g - w) / scale);
            }
            // Multi-tick trajectory: the error never changes sign or grows.
            Attitude a = att;
            double prev = a.pitch_deg - sp.pitch_setpoint_deg;
            for (int n = 0; n < 50; ++n) {
                a = tilt_step(a, sp, cfg);
                const double e = a.pitch_deg - sp.pitch_setpoint_deg;
                if (e * prev < 0.0 || std::abs(e) > std::abs(prev)) {
                    ++overshoots;
                    break;
                }
                prev = e;
            }
        }
    }
    v.require(worst <= 1e-9, "max relative error " + std::to_string(worst));
    v.require(overshoots == 0, std::to_string(overshoots) + " trajectories overshot");
    v.detail << cases << " cases (exact + euler), max rel err " << worst << ", overshoots "
             << overshoots;
}

// --- latency trend -----------------------------------------------------------

void latency_trend(Verdict& v) {
    const std::vector<int> levels{1, 2, 3, 4, 5};
    const int runs = 5;
    std::vector<double> pooled_T(levels.size(), 0.0), pooled_S(levels.size(), 0.0);
    double min_rho = 1.0;
    int incomplete = 0;
    int seeds_ok = 0;
    for (std::uint64_t base = 1; base <= 10; ++base) {
        const auto res = run_pilot_sweep(PilotParams{}, levels, runs, base);
        std::vector<double> lv, T;
        for (std::size_t i = 0; i < res.levels.size(); ++i) {
            const auto& s = res.levels[i];
            incomplete += s.incomplete;
            lv.push_back(s.level);
            T.push_back(s.T_mean);
            pooled_T[i] += s.T_mean / 10.0;
            pooled_S[i] += s.S_mean / 10.0;
        }
        const double rho = spearman(lv, T);
        min_rho = std::min(min_rho, rho);
        const bool ok = res.levels.back().T_mean > res.levels.front().T_mean &&
                        res.levels.back().S_mean < res.levels.front().S_mean && rho >= 0.8;
        seeds_ok += ok ? 1 : 0;
        v.require(ok, "base seed " + std::to_string(base) + " (rho " + fmt(rho, 2) + ")");
    }
    const double pooled_rho = spearman({1, 2, 3, 4, 5}, pooled_T);
    v.require(pooled_T.back() > pooled_T.front(), "pooled mean T(5) <= T(1)");
    v.require(pooled_S.back() < pooled_S.front(), "pooled mean S(5) >= S(1)");
    v.require(pooled_rho >= 0.8, "pooled rho " + fmt(pooled_rho, 2));
    v.detail << "10 seeds x 5 levels x " << runs << " runs; mean T ";
    for (double t : pooled_T) v.detail << fmt(t, 1) << ' ';
    v.detail << "s; mean S ";
    for (double s : pooled_S) v.detail << fmt(s, 3) << ' ';
    v.detail << "m/s; rho pooled " << fmt(pooled_rho, 2) << ", per-seed min " << fmt(min_rho, 2)
             << ", seeds passing " << seeds_ok << "/10, incomplete flights " << incomplete;
}

// --- ideal flight ------------------------------------------------------------

void ideal_flight(Verdict& v) {
    double worst_D = 0.0;
    int min_w = 100, max_c = 0;
    std::vector<SessionSummary> rows;
    for (const auto& plan : replication_plans(7)) {
        for (const auto& e : plan.sessions) {
            const Course c = generate_course(e.course_seed);
            const auto m = metrics_report(synthetic::ideal_flight(c), c);
            worst_D = std::max(worst_D, std::abs(m.D_m));
            min_w = std::min(min_w, m.N_w);
            max_c = std::max(max_c, m.N_c);
            SessionSummary s;
            s.participant = plan.participant;
            s.session_index = e.day;
            s.latency_level = e.latency_level;
            s.status = SessionStatus::completed;
            s.metrics = m;
            rows.push_back(s);
        }
    }
    v.require(worst_D <= 1e-9, "D = " + std::to_string(worst_D));
    v.require(min_w == 100, "N_w = " + std::to_string(min_w));
    v.require(max_c == 0, "N_c = " + std::to_string(max_c));
    int max_sw = 0;
    for (const GroupBy by : {GroupBy::latency_level, GroupBy::session_index}) {
        for (const auto& g : aggregate(rows, by)) {
            max_sw = std::max(max_sw, g.S_w);
            v.require(g.S_w <= 900, "S_w " + std::to_string(g.S_w) + " > 900");
        }
    }
    v.detail << rows.size() << " ideal flights (9 participants x 5 sessions): max |D| " << worst_D
             << ", min N_w " << min_w << ", max N_c " << max_c << ", max group S_w " << max_sw;
}

// --- collisions --------------------------------------------------------------

void collision_oracle(Verdict& v) {
    const QuadExtent quad;
    int clips = 0, misses = 0, skipped = 0, disagree = 0;
    for (std::uint64_t seed = 0; clips + misses < 200 && seed < 5000; ++seed) {
        const auto sc = synthetic::near_gate(seed);
        const double pen = oracle::max_penetration(sc.log, sc.course.waypoints[0], quad, 6.0, 1000);
        if (std::abs(pen) <= 0.01) {
            ++skipped;
            continue;
        }
        const bool hit = detect_passes_and_collisions(sc.log, sc.course, quad)[0].collided;
        if (hit != (pen > 0.0)) ++disagree;
        (pen > 0.0 ? clips : misses) += 1;
    }
    v.require(disagree == 0, std::to_string(disagree) + " disagreements");
    v.require(clips >= 20 && misses >= 20, "too few scenarios");
    v.detail << clips << " clips + " << misses << " misses agree with the 1000x oracle ("
             << skipped << " within 1 cm skipped), disagreements " << disagree;
}

// --- determinism -------------------------------------------------------------

void determinism(Verdict& v) {
    const auto tmp = fs::temp_directory_path() / ("hqsim_accept_det_" + std::to_string(::getpid()));
    fs::remove_all(tmp);
    int sessions = 0, identical = 0;
    SessionSettings settings;
    for (const auto& plan : replication_plans(11)) {
        if (sessions >= 6) break;
        for (const int day : {1, 3}) {
            PilotParams p;
            p.noise_deg = 0.8;
            p.seed = fnv1a64(plan.participant) + day;
            PilotInputSource src(p, 75.0);
            const auto entry = plan.day(day);
            const auto rec = run_session(plan.participant, entry, settings, src);
            const fs::path dir = write_session_record(tmp, rec);
            const auto inputs = load_input_log(dir / "inputs.log");
            const auto again = replay_session(plan.participant, entry, settings, inputs);
            const FlightLog stored = load_flight_log(dir / "flight.log");
            const bool same = again.flight && rec.flight && again.flight->log == rec.flight->log &&
                              stored == rec.flight->log &&
                              again.flight->metrics == rec.flight->metrics &&
                              metrics_report(stored, course_for(stored)) == *rec.flight->metrics &&
                              (!rec.training || again.training->log == rec.training->log);
            ++sessions;
            identical += same ? 1 : 0;
            v.require(same, plan.participant + " day " + std::to_string(day) + " replay differs");
        }
    }
    fs::remove_all(tmp);

    int courses_ok = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Course a = generate_course(s);
        courses_ok += (a == generate_course(s) && parse_course(to_course_text(a)) == a) ? 1 : 0;
    }
    const bool pinned = generate_course(1).waypoints[0].center_x_m == -3.6612335598746739 &&
                        generate_course(20260101, 5).waypoints[4].center_x_m == -4.0208715719444967;
    v.require(courses_ok == 100, "course regeneration");
    v.require(pinned, "pinned course values changed");
    v.detail << identical << "/" << sessions << " sessions replay bit-exactly (logs + metrics, via "
             << "persisted inputs), " << courses_ok << "/100 courses regenerate, pinned values "
             << (pinned ? "match" : "differ");
}

// --- SSQ ---------------------------------------------------------------------

void ssq(Verdict& v) {
    const auto score = [](std::initializer_list<std::pair<int, int>> ratings) {
        SsqResponse r;
        for (const auto& [item, value] : ratings) r.items[item - 1] = value;
        return score_ssq(r);
    };
    const auto close = [](const SsqScore& s, double n, double o, double d, double t) {
        return std::abs(s.nausea - n) < 1e-9 && std::abs(s.oculomotor - o) < 1e-9 &&
               std::abs(s.disorientation - d) < 1e-9 && std::abs(s.total - t) < 1e-9;
    };
    v.require(score({}) == SsqScore{0, 0, 0, 0}, "all-zero form");
    int forms = 0;
    forms += close(score({{1, 2}, {8, 3}}), 47.7, 15.16, 41.76, 37.4);
    forms += close(score({{2, 1}, {3, 2}, {4, 3}}), 0.0, 45.48, 0.0, 22.44);
    forms += close(score({{5, 3}, {14, 2}, {16, 1}}), 9.54, 22.74, 69.6, 33.66);
    v.require(forms == 3, std::to_string(3 - forms) + " hand forms differ");

    int monotone = 0;
    for (int item = 1; item <= 16; ++item) {
        bool ok = true;
        for (int base = 0; base < 3; ++base) {
            SsqResponse r;
            r.items.fill(base == 2 ? 1 : 0);
            r.items[item - 1] = base;
            const double before = score_ssq(r).total;
            ++r.items[item - 1];
            ok &= score_ssq(r).total > before;
        }
        monotone += ok ? 1 : 0;
    }
    v.require(monotone == 16, "monotonicity");
    v.detail << "zero form (0,0,0,0); " << forms << "/3 hand forms match; " << monotone
             << "/16 items strictly monotone";
}

// --- protocol ----------------------------------------------------------------

void protocol(Verdict& v) {
    using namespace std::chrono_literals;
    const auto dir = fs::temp_directory_path() / ("hqsim_accept_net_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    telemetry::ServerOptions opt;
    opt.plans = replication_plans(5);
    opt.data_dir = dir;
    opt.time_scale = 50.0;
    opt.settings.n_waypoints = 5;
    telemetry::Server server(opt);
    server.start();
    try {
        telemetry::Client pilot, observer;
        pilot.connect("127.0.0.1", server.port());
        pilot.hello("pilot");
        observer.connect("127.0.0.1", server.port());
        observer.hello("observer");

        pilot.send(wire::Kind::configure, {{"participant", "P7"}, {"day", 2}});
        scripted::expect_event(pilot, "configured");
        pilot.send(wire::Kind::calibrate_begin);
        scripted::expect_event(pilot, "calibration_started");
        const auto seq = pilot.send(wire::Kind::input, wire::input_payload({1.5, -0.5, 0, 0}));
        pilot.send_raw({wire::Kind::input, seq, 0.0, wire::input_payload({8, 8, 0, 0})});
        pilot.send_raw({wire::Kind::input, seq - 1, 0.0, wire::input_payload({8, 8, 0, 0})});
        observer.send(wire::Kind::input, wire::input_payload({20, 20, 0, 0}));
        observer.send(wire::Kind::stop);
        for (int frames = 0; frames < 10;) {
            auto m = pilot.receive(10s);
            if (!m) throw std::runtime_error("no calibration frames");
            frames += m->kind == wire::Kind::state;
        }
        pilot.send(wire::Kind::calibrate_done);
        const auto cal = scripted::expect_event(pilot, "calibrated");
        const bool zero_ok = cal.payload.at("pitch_offset_deg") == 1.5 &&
                             cal.payload.at("roll_offset_deg") == -0.5;

        PilotParams p;
        p.reaction_delay_s = 0.0;
        const auto r = scripted::fly(pilot, p, {1.5, -0.5, 0, 0});
        const bool completed = r.stop && r.stop->payload.at("status") == "completed" &&
                               r.stop->payload.at("metrics").at("N_w") == 5;
        const auto watched = observer.wait_for(
            [](const wire::Message& m) { return m.kind == wire::Kind::stop; }, 10s);
        bool inputs_clean = completed;
        if (completed) {
            const fs::path sdir = r.stop->payload.at("session_dir").get<std::string>();
            for (const auto& rec : load_input_log(sdir / "inputs.log")) {
                inputs_clean &= rec.head.pitch_deg != 20.0 && rec.head.pitch_deg != 8.0;
            }
        }
        const auto stats = server.stats();
        v.require(completed, "scripted session did not complete");
        v.require(zero_ok, "calibration offsets include stale or observer input");
        v.require(stats.stale_discarded == 2, "stale count " + std::to_string(stats.stale_discarded));
        v.require(stats.observer_rejected == 2 && inputs_clean && watched.has_value(),
                  "observer isolation");
        v.detail << "calibrate->fly->destination completed in " << r.frames << " frames; stale "
                 << stats.stale_discarded << "/2 discarded; observer messages rejected "
                 << stats.observer_rejected << "/2, observer saw stop: "
                 << (watched ? "yes" : "no") << "; no UI involved";
    } catch (const std::exception& e) {
        v.require(false, e.what());
    }
    server.stop();
    fs::remove_all(dir);
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
        {"table-calibration", table_calibration},
        {"dynamics-oracle", dynamics_oracle},
        {"latency-trend", latency_trend},
        {"ideal-flight-metrics", ideal_flight},
        {"collision-oracle", collision_oracle},
        {"determinism", determinism},
        {"ssq-scoring", ssq},
        {"protocol-robustness", protocol},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            run(v);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %-22s %s (%.0f ms)\n", v.pass ? "PASS" : "FAIL", name.c_str(),
                    (v.detail.str() + v.failures).c_str(), ms);
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
