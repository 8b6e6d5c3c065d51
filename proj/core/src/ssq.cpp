#include "hqsim/ssq.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hqsim/error.hpp"
#include "hqsim/text_io.hpp"

namespace hqsim {

extern const char* const kBuiltinSsqTableText;

std::string_view to_string(SsqPhase p) {
    return p == SsqPhase::pre ? "pre" : "post";
}

SsqPhase parse_ssq_phase(std::string_view s) {
    if (s == "pre") return SsqPhase::pre;
    if (s == "post") return SsqPhase::post;
    throw Error("unknown SSQ phase '" + std::string(s) + "'");
}

std::string_view SsqTable::builtin_text() {
    return kBuiltinSsqTableText;
}

const SsqTable& SsqTable::builtin() {
    static const SsqTable table = parse(std::string(builtin_text()), "<builtin ssq table>");
    return table;
}

SsqTable SsqTable::parse(const std::string& text_in, const std::string& source) {
    SsqTable t;
    std::istringstream in(text_in);
    std::string line;
    int lineno = 0;
    bool header = false;
    std::array<bool, kSsqItems> seen{};
    int weights = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = text::trim(line);
        if (view.empty() || view.front() == '#') continue;
        std::istringstream fields{std::string(view)};
        std::vector<std::string> f;
        for (std::string tok; fields >> tok;) f.push_back(tok);

        if (!header) {
            if (f.size() != 2 || f[0] != "ssq-table" || f[1] != "1") {
                throw ParseError(source, lineno, "expected header 'ssq-table 1'");
            }
            header = true;
        } else if (f[0] == "weight" && f.size() == 3) {
            const double w = text::parse_double(f[2]);
            if (!(w > 0.0)) throw ParseError(source, lineno, "weights must be positive");
            if (f[1] == "nausea") {
                t.w_nausea_ = w;
            } else if (f[1] == "oculomotor") {
                t.w_oculomotor_ = w;
            } else if (f[1] == "disorientation") {
                t.w_disorientation_ = w;
            } else if (f[1] == "total") {
                t.w_total_ = w;
            } else {
                throw ParseError(source, lineno, "unknown weight '" + f[1] + "'");
            }
            ++weights;
        } else if (f[0] == "item" && f.size() >= 3) {
            const auto n = text::parse_int(f[1]);
            if (n < 1 || n > static_cast<long long>(kSsqItems) || seen[n - 1]) {
                throw ParseError(source, lineno, "bad or duplicate item number");
            }
            seen[n - 1] = true;
            Item& item = t.items_[n - 1];
            item.number = static_cast<int>(n);
            item.name = f[2];
            for (std::size_t k = 3; k < f.size(); ++k) {
                if (f[k] == "N") {
                    item.nausea = true;
                } else if (f[k] == "O") {
                    item.oculomotor = true;
                } else if (f[k] == "D") {
                    item.disorientation = true;
                } else {
                    throw ParseError(source, lineno, "unknown cluster '" + f[k] + "'");
                }
            }
        } else {
            throw ParseError(source, lineno, "unrecognized record");
        }
    }
    for (bool s : seen) {
        if (!s) throw ParseError(source, lineno, "table must list all 16 items");
    }
    if (weights != 4) throw ParseError(source, lineno, "table must give four weights");
    return t;
}

SsqTable SsqTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open SSQ table " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

void SsqResponse::validate() const {
    for (std::size_t i = 0; i < kSsqItems; ++i) {
        if (items[i] < 0 || items[i] > 3) {
            throw Error("SSQ item " + std::to_string(i + 1) + " out of range 0..3: " +
                        std::to_string(items[i]));
        }
    }
}

SsqScore score_ssq(const SsqResponse& resp, const SsqTable& table) {
    resp.validate();
    int n = 0;
    int o = 0;
    int d = 0;
    for (std::size_t i = 0; i < kSsqItems; ++i) {
        const auto& item = table.items()[i];
        const int r = resp.items[i];
        n += item.nausea ? r : 0;
        o += item.oculomotor ? r : 0;
        d += item.disorientation ? r : 0;
    }
    return {n * table.nausea_weight(), o * table.oculomotor_weight(),
            d * table.disorientation_weight(), (n + o + d) * table.total_weight()};
}

SsqComparison ssq_delta(const SsqResponse& pre, const SsqResponse& post, const SsqTable& table) {
    if (pre.phase != SsqPhase::pre || post.phase != SsqPhase::post) {
        throw Error("ssq_delta: expected a pre and a post questionnaire");
    }
    if (pre.participant != post.participant || pre.session_index != post.session_index) {
        throw Error("ssq_delta: questionnaires belong to different sessions");
    }
    SsqComparison c;
    c.pre = score_ssq(pre, table);
    c.post = score_ssq(post, table);
    c.delta = c.post - c.pre;
    return c;
}

std::vector<SsqResponse> read_ssq_csv(std::istream& in, const std::string& source) {
    std::vector<SsqResponse> out;
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = text::trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto f = text::split(view, ',');
        if (!header) {
            if (f.size() != 3 + kSsqItems || f[0] != "participant") {
                throw ParseError(source, lineno, "expected SSQ CSV header");
            }
            header = true;
            continue;
        }
        if (f.size() != 3 + kSsqItems) {
            throw ParseError(source, lineno, "expected 19 fields");
        }
        try {
            SsqResponse r;
            r.participant = f[0];
            r.session_index = static_cast<int>(text::parse_int(f[1]));
            r.phase = parse_ssq_phase(f[2]);
            for (std::size_t i = 0; i < kSsqItems; ++i) {
                if (f[3 + i].empty()) {
                    throw Error("item " + std::to_string(i + 1) + " unanswered");
                }
                r.items[i] = static_cast<int>(text::parse_int(f[3 + i]));
            }
            r.validate();
            out.push_back(r);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(source, lineno, e.what());
        }
    }
    return out;
}

std::vector<SsqResponse> load_ssq_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open SSQ CSV " + path.string());
    return read_ssq_csv(in, path.string());
}

void write_ssq_csv(std::ostream& out, const std::vector<SsqResponse>& responses) {
    out << "participant,session_index,phase";
    for (std::size_t i = 1; i <= kSsqItems; ++i) out << ",i" << i;
    out << '\n';
    for (const auto& r : responses) {
        out << r.participant << ',' << r.session_index << ',' << to_string(r.phase);
        for (int v : r.items) out << ',' << v;
        out << '\n';
    }
}

}  // namespace hqsim
