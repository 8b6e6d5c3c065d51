#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hqsim/session_store.hpp"

namespace hqsim {

struct Stat {
    int n = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation; 0 when n < 2
};

Stat describe(const std::vector<double>& values);

enum class GroupBy { latency_level, session_index };

/// Descriptive statistics for one latency level or one session position.
/// Only completed sessions with metrics contribute.
struct GroupSummary {
    int key = 0;
    int flights = 0;
    Stat T;
    Stat S;
    Stat D;
    Stat N_w;
    Stat N_c;
    int S_w = 0;  // total waypoints passed
    int S_c = 0;  // total collisions
    Stat ssq_post_total;
    Stat ssq_delta_total;
};

std::vector<GroupSummary> aggregate(const std::vector<SessionSummary>& sessions, GroupBy by);

struct CollectedSessions {
    std::vector<SessionSummary> sessions;
    std::vector<std::string> warnings;
};

/// Every <participant>/day<N>/session.csv under data_dir, ordered by
/// participant then session. Unreadable records become warnings.
/// Throws hqsim::Error if the directory is missing or holds no readable record.
CollectedSessions collect_sessions(const std::filesystem::path& data_dir);

struct ExportResult {
    CollectedSessions collected;
    std::vector<GroupSummary> by_latency;
    std::vector<GroupSummary> by_session;
    std::vector<std::filesystem::path> files;
};

/// Writes flights.csv, by_latency.csv and by_session.csv into out_dir.
ExportResult export_csv(const std::filesystem::path& data_dir, const std::filesystem::path& out_dir);

std::string flights_csv(const std::vector<SessionSummary>& sessions);
std::string groups_csv(const std::vector<GroupSummary>& groups, GroupBy by);

}  // namespace hqsim
