#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hqsim {

inline constexpr std::size_t kSsqItems = 16;

enum class SsqPhase { pre, post };

std::string_view to_string(SsqPhase p);
SsqPhase parse_ssq_phase(std::string_view s);

/// Item list, symptom clusters and weights. The built-in table is compiled in
/// from core/data/ssq_table.txt.
class SsqTable {
public:
    struct Item {
        int number = 0;
        std::string name;
        bool nausea = false;
        bool oculomotor = false;
        bool disorientation = false;
    };

    static const SsqTable& builtin();
    static std::string_view builtin_text();
    static SsqTable parse(const std::string& text, const std::string& source = "<string>");
    static SsqTable load(const std::filesystem::path& path);

    const std::array<Item, kSsqItems>& items() const { return items_; }
    double nausea_weight() const { return w_nausea_; }
    double oculomotor_weight() const { return w_oculomotor_; }
    double disorientation_weight() const { return w_disorientation_; }
    double total_weight() const { return w_total_; }

private:
    std::array<Item, kSsqItems> items_{};
    double w_nausea_ = 0.0;
    double w_oculomotor_ = 0.0;
    double w_disorientation_ = 0.0;
    double w_total_ = 0.0;
};

struct SsqResponse {
    std::string participant;
    int session_index = 0;
    SsqPhase phase = SsqPhase::pre;
    std::array<int, kSsqItems> items{};

    /// Throws hqsim::Error if any rating is outside 0..3.
    void validate() const;

    friend bool operator==(const SsqResponse&, const SsqResponse&) = default;
};

struct SsqScore {
    double nausea = 0.0;
    double oculomotor = 0.0;
    double disorientation = 0.0;
    double total = 0.0;

    friend SsqScore operator-(const SsqScore& a, const SsqScore& b) {
        return {a.nausea - b.nausea, a.oculomotor - b.oculomotor,
                a.disorientation - b.disorientation, a.total - b.total};
    }
    friend bool operator==(const SsqScore&, const SsqScore&) = default;
};

SsqScore score_ssq(const SsqResponse& resp, const SsqTable& table = SsqTable::builtin());

/// Post-session ("absolute") scores next to the post - pre change.
struct SsqComparison {
    SsqScore pre;
    SsqScore post;
    SsqScore delta;
};

/// Throws hqsim::Error when the phases are not (pre, post) or the responses
/// belong to different sessions.
SsqComparison ssq_delta(const SsqResponse& pre, const SsqResponse& post,
                        const SsqTable& table = SsqTable::builtin());

/// CSV with header `participant,session_index,phase,i1,...,i16`; one
/// questionnaire per row.
std::vector<SsqResponse> read_ssq_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<SsqResponse> load_ssq_csv(const std::filesystem::path& path);
void write_ssq_csv(std::ostream& out, const std::vector<SsqResponse>& responses);

}  // namespace hqsim
