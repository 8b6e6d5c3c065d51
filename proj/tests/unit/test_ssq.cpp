#include <fstream>
#include <sstream>

#include <boost/crc.hpp>
#include <gtest/gtest.h>

#include "hqsim/error.hpp"
#include "hqsim/rng.hpp"
#include "hqsim/ssq.hpp"

using namespace hqsim;

namespace {

SsqResponse form(std::initializer_list<std::pair<int, int>> ratings, SsqPhase phase = SsqPhase::post) {
    SsqResponse r;
    r.participant = "P1";
    r.session_index = 1;
    r.phase = phase;
    for (const auto& [item, value] : ratings) r.items[item - 1] = value;
    return r;
}

void expect_score(const SsqScore& s, double n, double o, double d, double t) {
    EXPECT_NEAR(s.nausea, n, 1e-9);
    EXPECT_NEAR(s.oculomotor, o, 1e-9);
    EXPECT_NEAR(s.disorientation, d, 1e-9);
    EXPECT_NEAR(s.total, t, 1e-9);
}

}  // namespace

TEST(SsqTable, EmbeddedTableMatchesDataFile) {
    std::ifstream in(HQSIM_SOURCE_DIR "/core/data/ssq_table.txt", std::ios::binary);
    ASSERT_TRUE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), SsqTable::builtin_text());

    boost::crc_32_type crc;
    crc.process_bytes(ss.str().data(), ss.str().size());
    EXPECT_EQ(crc.checksum(), 0x0b4cae12u) << "weight table changed; re-verify the hand computations";
}

TEST(SsqTable, ClusterMembership) {
    const auto& t = SsqTable::builtin();
    int n = 0, o = 0, d = 0;
    for (const auto& item : t.items()) {
        n += item.nausea;
        o += item.oculomotor;
        d += item.disorientation;
    }
    EXPECT_EQ(n, 7);
    EXPECT_EQ(o, 7);
    EXPECT_EQ(d, 7);
    EXPECT_EQ(t.nausea_weight(), 9.54);
    EXPECT_EQ(t.oculomotor_weight(), 7.58);
    EXPECT_EQ(t.disorientation_weight(), 13.92);
    EXPECT_EQ(t.total_weight(), 3.74);
}

TEST(SsqScore, AllZero) {
    EXPECT_EQ(score_ssq(form({})), (SsqScore{0, 0, 0, 0}));
}

TEST(SsqScore, AllOnes) {
    SsqResponse r = form({});
    r.items.fill(1);
    expect_score(score_ssq(r), 66.78, 53.06, 97.44, 78.54);
}

TEST(SsqScore, HandForms) {
    // general_discomfort 2 (N, O), nausea 3 (N, D)
    expect_score(score_ssq(form({{1, 2}, {8, 3}})), 47.7, 15.16, 41.76, 37.4);
    // fatigue 1, headache 2, eyestrain 3 (all O)
    expect_score(score_ssq(form({{2, 1}, {3, 2}, {4, 3}})), 0.0, 45.48, 0.0, 22.44);
    // difficulty_focusing 3 (O, D), vertigo 2 (D), burping 1 (N)
    expect_score(score_ssq(form({{5, 3}, {14, 2}, {16, 1}})), 9.54, 22.74, 69.6, 33.66);
}

TEST(SsqScore, SingleItemIncrementsRaiseTotal) {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        SsqResponse base = form({});
        for (auto& v : base.items) v = static_cast<int>(rng() % 3);
        const SsqScore s0 = score_ssq(base);
        for (std::size_t i = 0; i < kSsqItems; ++i) {
            SsqResponse up = base;
            ++up.items[i];
            const SsqScore s1 = score_ssq(up);
            EXPECT_GT(s1.total, s0.total) << "item " << i + 1;
            EXPECT_GE(s1.nausea, s0.nausea);
            EXPECT_GE(s1.oculomotor, s0.oculomotor);
            EXPECT_GE(s1.disorientation, s0.disorientation);
        }
    }
}

TEST(SsqScore, OutOfRangeRejected) {
    EXPECT_THROW(score_ssq(form({{3, 4}})), Error);
    EXPECT_THROW(score_ssq(form({{3, -1}})), Error);
}

TEST(SsqDelta, Examples) {
    const SsqResponse pre = form({{1, 1}, {10, 2}}, SsqPhase::pre);
    SsqResponse post = pre;
    post.phase = SsqPhase::post;
    EXPECT_EQ(ssq_delta(pre, post).delta, (SsqScore{0, 0, 0, 0}));

    const SsqResponse zero = form({}, SsqPhase::pre);
    const auto c = ssq_delta(zero, post);
    EXPECT_EQ(c.delta, c.post);
    EXPECT_EQ(c.post, score_ssq(post));

    const SsqResponse hi = form({{1, 2}, {8, 3}}, SsqPhase::post);
    const SsqResponse lo = form({{5, 3}, {14, 2}, {16, 1}}, SsqPhase::pre);
    const auto d = ssq_delta(lo, hi);
    EXPECT_NEAR(d.delta.nausea, 47.7 - 9.54, 1e-9);
    EXPECT_NEAR(d.delta.oculomotor, 15.16 - 22.74, 1e-9);
    EXPECT_NEAR(d.delta.disorientation, 41.76 - 69.6, 1e-9);
    EXPECT_NEAR(d.delta.total, 37.4 - 33.66, 1e-9);
}

TEST(SsqDelta, MismatchedPairsRejected) {
    const SsqResponse pre = form({}, SsqPhase::pre);
    EXPECT_THROW(ssq_delta(pre, pre), Error);
    SsqResponse other = form({}, SsqPhase::post);
    other.session_index = 2;
    EXPECT_THROW(ssq_delta(pre, other), Error);
}

TEST(SsqCsv, RoundTrip) {
    std::vector<SsqResponse> rs{form({{1, 1}}, SsqPhase::pre), form({{16, 3}, {2, 2}})};
    rs[1].participant = "P9";
    rs[1].session_index = 5;
    std::stringstream ss;
    write_ssq_csv(ss, rs);
    EXPECT_EQ(read_ssq_csv(ss), rs);
}

TEST(SsqCsv, BadRowsRejected) {
    std::istringstream short_row("participant,session_index,phase,i1,i2\nP1,1,pre,0,0\n");
    EXPECT_THROW(read_ssq_csv(short_row), Error);
    std::stringstream ss;
    write_ssq_csv(ss, {form({})});
    std::string text = ss.str();
    text.replace(text.find(",post,"), 6, ",during,");
    std::istringstream in(text);
    EXPECT_THROW(read_ssq_csv(in), Error);
}
