#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hqsim/session.hpp"

namespace hqsim {

/// One row of a session's `session.csv`.
struct SessionSummary {
    std::string participant;
    int session_index = 0;
    int latency_level = 0;
    SessionStatus status = SessionStatus::aborted;
    std::uint64_t course_seed = 0;
    int course_waypoints = 0;
    bool trained = false;
    std::optional<MetricsReport> metrics;  // per_waypoint is not persisted here
    std::optional<SsqScore> ssq_pre;
    std::optional<SsqScore> ssq_post;

    std::optional<SsqScore> ssq_delta() const;
};

SessionSummary summarize(const SessionRecord& rec);

/// Session directory: <data_dir>/<participant>/day<N>.
std::filesystem::path session_dir(const std::filesystem::path& data_dir, const std::string& participant,
                                  int day);

/// Writes session.csv, flight.log, training.log, inputs.log, course.txt and
/// ssq.csv (those that apply) and returns the session directory.
std::filesystem::path write_session_record(const std::filesystem::path& data_dir,
                                           const SessionRecord& rec);

std::string session_csv_header();
std::string session_csv_row(const SessionSummary& s);
SessionSummary parse_session_csv_row(const std::string& row);
SessionSummary load_session_summary(const std::filesystem::path& session_csv);

}  // namespace hqsim
