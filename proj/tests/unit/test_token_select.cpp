// Copyright (C) 2026 The trim authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "../oracles.hpp"
#include "trim/error.hpp"
#include "trim/token_select.hpp"

using namespace trim;

namespace {

SignificanceScores from_softmax(std::vector<double> sm) {
    SignificanceScores s;
    s.raw = sm;
    s.softmax = std::move(sm);
    return s;
}

SignificanceScores from_raw(std::vector<double> raw) {
    SignificanceScores s;
    s.softmax = softmax(raw);
    s.raw = std::move(raw);
    return s;
}

bool is_strictly_increasing(const std::vector<std::size_t>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

std::vector<double> random_scores(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> x(n);
    switch (rng() % 4) {
    case 0: {
        std::normal_distribution<double> d(0.0, 1.0);
        for (auto& v : x) v = d(rng);
        break;
    }
    case 1: {
        std::exponential_distribution<double> d(3.0);
        for (auto& v : x) v = d(rng);
        break;
    }
    case 2: {
        std::uniform_int_distribution<int> d(0, 4);
        for (auto& v : x) v = d(rng) * 0.25;
        break;
    }
    default: {
        std::cauchy_distribution<double> d(0.0, 1.0);
        for (auto& v : x) v = d(rng);
        break;
    }
    }
    return x;
}

}  // namespace

TEST_SUITE("token_select") {

TEST_CASE("quartile examples") {
    const std::vector<double> a{1, 2, 3, 4, 100};
    const auto q = quartiles(a);
    CHECK(q.q1 == 2.0);
    CHECK(q.q3 == 4.0);
    CHECK(q.iqr == 2.0);
    CHECK(q.upper_bound == 7.0);

    const std::vector<double> c(9, 0.125);
    const auto qc = quartiles(c);
    CHECK(qc.q1 == 0.125);
    CHECK(qc.q3 == 0.125);
    CHECK(qc.iqr == 0.0);
    CHECK(qc.upper_bound == 0.125);

    const std::vector<double> b{4, 1, 3, 2};
    const auto qb = quartiles(b);
    CHECK(qb.q1 == 1.75);
    CHECK(qb.q3 == 3.25);
    CHECK(qb.upper_bound == 5.5);

    CHECK_THROWS_AS(quartiles(std::vector<double>{}), Error);
}

TEST_CASE("quartiles agree with the counting oracle") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const auto x = random_scores(rng, 1 + rng() % 120);
        const auto q = quartiles(x);
        CHECK(q.q1 == oracle::quantile_type7(x, 0.25));
        CHECK(q.q3 == oracle::quantile_type7(x, 0.75));
        CHECK(q.q1 <= q.q3);
        CHECK(q.upper_bound == q.q3 + 1.5 * q.iqr);
    }
}

TEST_CASE("select_iqr keeps the single far outlier") {
    const auto s = from_raw({0, 0, 0, 0, 10});
    const auto sel = select_iqr(s);
    CHECK(sel.indices == std::vector<std::size_t>{4});
    CHECK(sel.strategy == Strategy::kIqr);
    REQUIRE(sel.threshold);
    CHECK(*sel.threshold == doctest::Approx(s.softmax[0]));
    CHECK(sel.n_total == 5);
}

TEST_CASE("select_iqr falls back to the first argmax") {
    const auto uniform = from_raw(std::vector<double>(16, 0.3));
    const auto sel = select_iqr(uniform);
    CHECK(sel.indices == std::vector<std::size_t>{0});
    CHECK(sel.threshold.has_value());

    const std::vector<double> ties{1, 3, 3, 1};
    CHECK(select_iqr(ties).indices == std::vector<std::size_t>{1});
}

TEST_CASE("select_iqr matches the brute-force filter") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 300; ++trial) {
        const auto x = random_scores(rng, 1 + rng() % 300);
        const auto sel = select_iqr(x);
        CHECK(sel.indices == oracle::iqr_filter(x));
        CHECK(!sel.indices.empty());
        CHECK(is_strictly_increasing(sel.indices));
    }
}

TEST_CASE("select_iqr on standard-normal raw scores keeps a small strict subset") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> d(0.0, 1.0);
    int strict = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> raw(576);
        for (auto& v : raw) v = d(rng);
        const auto k = select_iqr(from_raw(raw)).indices.size();
        strict += (k > 0 && k < 576) ? 1 : 0;
    }
    CHECK(strict >= 990);
}

TEST_CASE("select_topk examples") {
    std::vector<double> sm(576);
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> d(0, 1);
    for (auto& v : sm) v = d(rng);
    const auto s = from_softmax(sm);
    CHECK(select_topk(s, 0.05).indices.size() == 29);
    CHECK(select_topk(s, 1.0).indices.size() == 576);

    const auto tie = from_softmax({0.4, 0.4, 0.1, 0.1});
    CHECK(select_topk(tie, 0.25).indices == std::vector<std::size_t>{0});
    CHECK(select_topk(tie, 0.5).indices == std::vector<std::size_t>{0, 1});
    CHECK(select_topk(tie, 0.75).indices == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("select_topk keeps the largest scores") {
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_scores(rng, 2 + rng() % 200);
        const double ratio = 0.01 + 0.99 * std::uniform_real_distribution<double>(0, 1)(rng);
        const auto sel = select_topk(from_softmax(x), ratio);
        CHECK(sel.indices.size() == token_budget(x.size(), ratio));
        CHECK(is_strictly_increasing(sel.indices));
        const std::set<std::size_t> kept(sel.indices.begin(), sel.indices.end());
        double min_kept = INFINITY;
        double max_dropped = -INFINITY;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (kept.count(i)) {
                min_kept = std::min(min_kept, x[i]);
            } else {
                max_dropped = std::max(max_dropped, x[i]);
            }
        }
        CHECK(min_kept >= max_dropped);
    }
}

TEST_CASE("select_topk is monotone in the ratio") {
    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = from_softmax(random_scores(rng, 1 + rng() % 400));
        std::vector<std::size_t> previous;
        for (double r = 0.05; r <= 1.0; r += 0.05) {
            const auto cur = select_topk(s, r).indices;
            CHECK(std::includes(cur.begin(), cur.end(), previous.begin(), previous.end()));
            previous = cur;
        }
    }
}

TEST_CASE("iqr and topk are permutation equivariant") {
    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 200; ++trial) {
        const auto raw = random_scores(rng, 1 + rng() % 300);
        std::vector<std::size_t> perm(raw.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> praw(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) praw[i] = raw[perm[i]];

        const auto a = from_raw(raw);
        const auto b = from_raw(praw);
        auto mapped = [&](const std::vector<std::size_t>& idx) {
            std::vector<std::size_t> out;
            for (std::size_t i : idx) out.push_back(perm[i]);
            std::sort(out.begin(), out.end());
            return out;
        };
        auto scores_of = [&](const std::vector<std::size_t>& idx) {
            std::vector<double> out;
            for (std::size_t i : idx) out.push_back(a.softmax[i]);
            std::sort(out.begin(), out.end());
            return out;
        };

        // Bound-filtered sets map exactly; tie-broken picks (argmax fallback,
        // equal scores at the top-k boundary) map to equally scored tokens.
        const auto ia = select_iqr(a);
        const auto ib = select_iqr(b);
        if (a.softmax[ia.indices[0]] > *ia.threshold) {
            CHECK(mapped(ib.indices) == ia.indices);
        } else {
            CHECK(scores_of(mapped(ib.indices)) == scores_of(ia.indices));
        }
        const auto ta = select_topk(a, 0.2).indices;
        const auto tb = select_topk(b, 0.2).indices;
        CHECK(scores_of(mapped(tb)) == scores_of(ta));
    }
}

TEST_CASE("select_random") {
    const auto a = select_random(576, 0.21, 1234);
    const auto b = select_random(576, 0.21, 1234);
    CHECK(a.indices == b.indices);
    CHECK(a.indices.size() == 121);
    CHECK(is_strictly_increasing(a.indices));
    CHECK(a.indices.back() < 576);
    CHECK(a.strategy == Strategy::kRandom);
    CHECK(!a.threshold);
    CHECK(select_random(576, 0.21, 1235).indices != a.indices);

    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
        const auto all = select_random(37, 1.0, seed);
        CHECK(all.indices.size() == 37);
        CHECK(all.indices.front() == 0);
        CHECK(all.indices.back() == 36);
    }
}

TEST_CASE("select_random is roughly uniform") {
    const std::size_t n = 20;
    std::vector<int> hits(n, 0);
    const int draws = 20000;
    for (int seed = 0; seed < draws; ++seed) {
        for (std::size_t i : select_random(n, 0.25, static_cast<std::uint64_t>(seed)).indices) {
            ++hits[i];
        }
    }
    // Expected 5000 hits per index; 5 sigma is about 300.
    for (int h : hits) {
        CHECK(std::abs(h - 5000) < 350);
    }
}

TEST_CASE("splitmix64 reference outputs") {
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFull);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
    CHECK(rng.next() == 0x06C45D188009454Full);
    SplitMix64 bounded(5);
    for (int i = 0; i < 1000; ++i) {
        CHECK(bounded.below(7) < 7);
    }
}

TEST_CASE("select_pool") {
    CHECK(select_pool(5, 0.6).indices == std::vector<std::size_t>{0, 2, 4});
    const auto full = select_pool(9, 1.0).indices;
    std::vector<std::size_t> identity(9);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    CHECK(full == identity);

    const auto p = select_pool(576, 0.21);
    REQUIRE(p.indices.size() == 121);
    CHECK(p.indices[0] == 0);
    CHECK(p.indices[1] == 5);
    CHECK(p.indices[2] == 10);
    CHECK(p.indices.back() == 575);
    CHECK(is_strictly_increasing(p.indices));

    CHECK(select_pool(10, 0.01).indices == std::vector<std::size_t>{0});
}

TEST_CASE("budget rounding and ratio validation") {
    CHECK(token_budget(576, 0.05) == 29);   // 28.8
    CHECK(token_budget(576, 0.21) == 121);  // 120.96
    CHECK(token_budget(10, 0.25) == 3);     // 2.5 rounds away from zero
    CHECK(token_budget(10, 0.01) == 1);     // floor of one token
    for (double bad : {0.0, -0.1, 1.0000001, 2.0, static_cast<double>(NAN)}) {
        CHECK_THROWS_AS(token_budget(10, bad), Error);
        CHECK_THROWS_AS(select_random(10, bad, 0), Error);
        CHECK_THROWS_AS(select_pool(10, bad), Error);
        CHECK_THROWS_AS(select_topk(from_softmax({0.5, 0.5}), bad), Error);
    }
}

TEST_CASE("strategy parsing") {
    CHECK(StrategySpec::parse("iqr").kind == Strategy::kIqr);
    const auto t = StrategySpec::parse("topk:0.05");
    CHECK(t.kind == Strategy::kTopK);
    CHECK(t.ratio == 0.05);
    const auto r = StrategySpec::parse("random:0.21:42");
    CHECK(r.kind == Strategy::kRandom);
    CHECK(r.seed == 42);
    CHECK(StrategySpec::parse("pool:1").ratio == 1.0);
    CHECK(r.to_string() == "random:0.21:42");
    CHECK(StrategySpec::parse("pool:0.5").to_string() == "pool:0.5");

    for (const char* bad : {"", "iqr:0.5", "topk", "topk:", "topk:abc", "topk:0", "topk:1.5", "random:0.5",
                            "random:0.5:x", "pool:0.5:1", "median"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(StrategySpec::parse(bad), Error);
    }
}

TEST_CASE("retained mass") {
    const auto s = from_softmax({0.5, 0.25, 0.125, 0.125});
    CHECK(retained_mass(s, SelectionResult{{0, 2}, Strategy::kTopK, std::nullopt, 4}) == 0.625);
    CHECK_THROWS_AS(retained_mass(s, SelectionResult{{0}, Strategy::kTopK, std::nullopt, 5}), Error);
}

}  // TEST_SUITE
