#include "hqsim/plan.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hqsim/error.hpp"
#include "hqsim/rng.hpp"
#include "hqsim/text_io.hpp"

namespace hqsim {

namespace {

constexpr int kLevels = 5;

// Published level order per participant, days 1..5.
constexpr std::array<std::array<int, kLevels>, 9> kPublishedOrders{{
    {3, 5, 1, 2, 4},
    {1, 4, 5, 3, 2},
    {1, 2, 5, 3, 4},
    {5, 3, 2, 1, 4},
    {5, 2, 1, 3, 4},
    {5, 4, 1, 3, 2},
    {2, 3, 4, 1, 5},
    {3, 4, 5, 2, 1},
    {4, 2, 3, 1, 5},
}};

SessionPlan make_plan(const std::string& participant, const std::array<int, kLevels>& order,
                      std::uint64_t seed, CourseSeeding seeding) {
    SessionPlan plan;
    plan.participant = participant;
    for (int d = 1; d <= kLevels; ++d) {
        SessionEntry e;
        e.day = d;
        e.latency_level = order[static_cast<std::size_t>(d - 1)];
        e.training = d == 1;
        e.course_seed =
            seeding == CourseSeeding::fixed ? seed : session_course_seed(seed, participant, d);
        plan.sessions.push_back(e);
    }
    return plan;
}

}  // namespace

void SessionPlan::validate() const {
    if (participant.empty() || participant.find_first_of(" \t,/\\") != std::string::npos) {
        throw Error("plan: participant id must be non-empty without spaces, commas or slashes");
    }
    if (sessions.size() != kLevels) {
        throw Error("plan " + participant + ": expected 5 sessions");
    }
    std::array<int, kLevels + 1> seen{};
    for (std::size_t i = 0; i < sessions.size(); ++i) {
        const auto& s = sessions[i];
        if (s.day != static_cast<int>(i) + 1) {
            throw Error("plan " + participant + ": days must be 1..5 in order");
        }
        if (s.latency_level < 1 || s.latency_level > kLevels || seen[s.latency_level]++ != 0) {
            throw Error("plan " + participant + ": each latency level 1..5 must appear once");
        }
        if (s.training != (s.day == 1)) {
            throw Error("plan " + participant + ": training belongs to day 1 only");
        }
    }
}

const SessionEntry& SessionPlan::day(int d) const {
    for (const auto& s : sessions) {
        if (s.day == d) return s;
    }
    throw Error("plan " + participant + " has no day " + std::to_string(d));
}

std::uint64_t session_course_seed(std::uint64_t plan_seed, const std::string& participant, int day) {
    return derive_seed(derive_seed(plan_seed, fnv1a64(participant)), static_cast<std::uint64_t>(day));
}

std::vector<SessionPlan> build_session_plan(const std::vector<std::string>& participants,
                                            std::uint64_t seed, CourseSeeding seeding) {
    if (participants.empty()) {
        throw Error("build_session_plan: no participants");
    }
    std::vector<SessionPlan> plans;
    for (const auto& p : participants) {
        Rng rng(derive_seed(seed, fnv1a64(p)));
        std::array<int, kLevels> order{};
        std::iota(order.begin(), order.end(), 1);
        // Fisher-Yates with a portable index draw.
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i + 1));
            std::swap(order[i], order[j]);
        }
        plans.push_back(make_plan(p, order, seed, seeding));
        plans.back().validate();
    }
    return plans;
}

std::vector<SessionPlan> replication_plans(std::uint64_t seed, CourseSeeding seeding) {
    std::vector<SessionPlan> plans;
    for (std::size_t i = 0; i < kPublishedOrders.size(); ++i) {
        plans.push_back(make_plan("P" + std::to_string(i + 1), kPublishedOrders[i], seed, seeding));
    }
    return plans;
}

std::string to_plan_text(const std::vector<SessionPlan>& plans) {
    std::ostringstream out;
    out << "hqsim-plan 1\n";
    for (const auto& p : plans) {
        out << "participant " << p.participant << '\n';
        for (const auto& s : p.sessions) {
            out << "session " << s.day << ' ' << s.latency_level << ' '
                << (s.training ? "training" : "-") << ' ' << s.course_seed << '\n';
        }
        out << "end\n";
    }
    return out.str();
}

std::vector<SessionPlan> parse_plans(const std::string& text_in, const std::string& source) {
    std::vector<SessionPlan> plans;
    std::istringstream in(text_in);
    std::string line;
    int lineno = 0;
    bool header = false;
    bool open = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = text::trim(line);
        if (view.empty() || view.front() == '#') continue;
        std::istringstream fields{std::string(view)};
        std::vector<std::string> f;
        for (std::string tok; fields >> tok;) f.push_back(tok);
        try {
            if (!header) {
                if (f.size() != 2 || f[0] != "hqsim-plan" || f[1] != "1") {
                    throw Error("expected header 'hqsim-plan 1'");
                }
                header = true;
            } else if (f[0] == "participant" && f.size() == 2) {
                if (open) throw Error("missing 'end' before next participant");
                plans.push_back({f[1], {}});
                open = true;
            } else if (f[0] == "session" && f.size() == 5) {
                if (!open) throw Error("'session' outside a participant block");
                SessionEntry e;
                e.day = static_cast<int>(text::parse_int(f[1]));
                e.latency_level = static_cast<int>(text::parse_int(f[2]));
                if (f[3] != "training" && f[3] != "-") throw Error("expected 'training' or '-'");
                e.training = f[3] == "training";
                e.course_seed = std::stoull(f[4]);
                plans.back().sessions.push_back(e);
            } else if (f[0] == "end" && f.size() == 1) {
                if (!open) throw Error("'end' without participant");
                plans.back().validate();
                open = false;
            } else {
                throw Error("unrecognized record '" + std::string(view) + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    if (!header) throw ParseError(source, lineno, "empty plan file");
    if (open) throw ParseError(source, lineno, "missing final 'end'");
    return plans;
}

void save_plans(const std::vector<SessionPlan>& plans, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write plan file " + path.string());
    out << to_plan_text(plans);
}

std::vector<SessionPlan> load_plans(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open plan file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_plans(ss.str(), path.string());
}

const SessionPlan& find_plan(const std::vector<SessionPlan>& plans, const std::string& participant) {
    for (const auto& p : plans) {
        if (p.participant == participant) return p;
    }
    throw Error("participant " + participant + " not found in plan");
}

}  // namespace hqsim
