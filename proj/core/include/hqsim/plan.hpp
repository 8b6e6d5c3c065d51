#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hqsim {

/// One experiment day. Day 1 normally opens with a training flight.
struct SessionEntry {
    int day = 1;
    int latency_level = 1;
    bool training = false;
    std::uint64_t course_seed = 0;

    friend bool operator==(const SessionEntry&, const SessionEntry&) = default;
};

struct SessionPlan {
    std::string participant;
    std::vector<SessionEntry> sessions;

    /// Throws unless levels 1..5 each appear once, days are 1..n in order,
    /// and only day 1 carries training.
    void validate() const;

    /// Throws hqsim::Error for an unknown day.
    const SessionEntry& day(int day) const;

    friend bool operator==(const SessionPlan&, const SessionPlan&) = default;
};

enum class CourseSeeding {
    // Seed derived from (plan seed, participant, day).
    per_session,
    // Every session flies the course generated from the plan seed.
    fixed,
};

std::uint64_t session_course_seed(std::uint64_t plan_seed, const std::string& participant, int day);

/// Seeded random permutation of levels 1..5 per participant.
std::vector<SessionPlan> build_session_plan(const std::vector<std::string>& participants,
                                            std::uint64_t seed,
                                            CourseSeeding seeding = CourseSeeding::per_session);

/// The nine published level orders (participants P1..P9), with course seeds
/// derived from `seed`.
std::vector<SessionPlan> replication_plans(std::uint64_t seed,
                                           CourseSeeding seeding = CourseSeeding::per_session);

/// Text format:
///   hqsim-plan 1
///   participant P1
///   session <day> <level> <training|-> <course_seed>
///   ...
///   end
std::string to_plan_text(const std::vector<SessionPlan>& plans);
std::vector<SessionPlan> parse_plans(const std::string& text, const std::string& source = "<string>");
void save_plans(const std::vector<SessionPlan>& plans, const std::filesystem::path& path);
std::vector<SessionPlan> load_plans(const std::filesystem::path& path);

/// Throws hqsim::Error if the participant is not in the list.
const SessionPlan& find_plan(const std::vector<SessionPlan>& plans, const std::string& participant);

}  // namespace hqsim
