#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "serve/bootstrap.hpp"
#include "serve/error.hpp"

using namespace serve;

namespace {

ServeCounts with_n(std::int64_t n) {
    ServeCounts c;
    c.player_id = "synthetic";
    c.N = n;
    return c;
}

// Redraws until the counts support a fit; tiny samples can empty a branch.
ServeCounts simulate(const ServeStats& truth, std::int64_t n, std::mt19937_64& rng) {
    for (;;) {
        auto c = resample_counts(with_n(n), truth, rng);
        try {
            fit_player(mle_stats(c));
            return c;
        } catch (const Error&) {
        }
    }
}

}  // namespace

TEST_CASE("resample: degenerate probabilities are deterministic") {
    std::mt19937_64 rng(1);
    auto c = resample_counts(with_n(100), ServeStats{1, 1, 1, 1, 0, 0}, rng);
    CHECK(c.n_x1 == 100);
    CHECK(c.n_x2 == 0);
    CHECK(c.n_f1 == 100);
    CHECK(c.n_k1 == 0);
    c = resample_counts(with_n(100), ServeStats{0, 1, 0, 0, 0, 1}, rng);
    CHECK(c.n_x1 == 0);
    CHECK(c.n_x2 == 100);
    CHECK(c.n_f2 == 0);
    CHECK(c.n_k2 == 100);
    c = resample_counts(with_n(100), ServeStats{0, 0, 0, 0, 0, 0}, rng);
    CHECK(c.n_x1 == 0);
    CHECK(c.n_x2 == 0);
    CHECK(c.valid());
}

TEST_CASE("resample: impossible edge probability") {
    std::mt19937_64 rng(2);
    CHECK_THROWS_AS(resample_counts(with_n(100), ServeStats{0.6, 0.9, 0.6, 0.2, 0.5, 0.3}, rng),
                    DegenerateProbability);
}

TEST_CASE("resample: mean of n_f1 matches the tree") {
    const ServeStats s{0.618, 0.943, 0.415, 0.192, 0.354, 0.390};
    const std::int64_t n = 1000;
    std::mt19937_64 rng(3);
    const int reps = 10000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < reps; ++i) {
        auto c = resample_counts(with_n(n), s, rng);
        REQUIRE(c.valid());
        sum += c.n_f1;
        sum2 += static_cast<double>(c.n_f1) * c.n_f1;
    }
    const double mean = sum / reps;
    const double sd = std::sqrt(sum2 / reps - mean * mean);
    const double want = n * s.x1 * s.f1;
    CHECK(std::abs(mean - want) < 4 * sd / std::sqrt(reps));
    // n_f1 ~ Binomial(N, x1 f1) marginally.
    CHECK(sd == doctest::Approx(std::sqrt(want * (1 - s.x1 * s.f1))).epsilon(0.05));
}

TEST_CASE("resample: fixed seed gives the same sequence") {
    const auto fed = fixture::counts12().at("Roger Federer");
    const auto s = mle_stats(fed);
    auto a = replicate_rng(7, 3), b = replicate_rng(7, 3), c = replicate_rng(7, 4);
    for (int i = 0; i < 20; ++i) {
        auto ra = resample_counts(fed, s, a);
        auto rb = resample_counts(fed, s, b);
        auto rc = resample_counts(fed, s, c);
        CHECK(ra == rb);
        if (i == 0) CHECK_FALSE(ra == rc);
    }
}

TEST_CASE("percentile: linear interpolation") {
    CHECK(percentile({3, 1, 2, 4}, 0.0) == 1);
    CHECK(percentile({3, 1, 2, 4}, 1.0) == 4);
    CHECK(percentile({3, 1, 2, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(percentile({10, 20}, 0.25) == doctest::Approx(12.5));
    CHECK(std::isnan(percentile({}, 0.5)));
}

TEST_CASE("bootstrap: constant estimator has zero width") {
    Estimator e{{"c"}, {0}, [](const ServeCounts&) { return std::vector<double>{0.75}; }};
    auto r = bootstrap_ci(fixture::counts12().at("Roger Federer"), e, BootstrapConfig{});
    REQUIRE(r.intervals.size() == 1u);
    CHECK(r.intervals[0].lo == 0.75);
    CHECK(r.intervals[0].hi == 0.75);
    CHECK(r.intervals[0].significant);
    CHECK(r.failed == 0);
}

TEST_CASE("bootstrap: Federer salience interval overlaps the published one") {
    auto r = bootstrap_ci(fixture::counts12().at("Roger Federer"), structural_estimator(), BootstrapConfig{});
    const auto& d = r.intervals.at(0);
    REQUIRE(d.param == "delta");
    MESSAGE("delta " << d.point << " [" << d.lo << ", " << d.hi << "]");
    CHECK(d.lo <= 0.42);
    CHECK(d.hi >= 0.23);
    CHECK(d.lo <= d.point);
    CHECK(d.point <= d.hi);
    CHECK(d.significant);
    const auto& lam = r.intervals.at(1);
    CHECK(lam.param == "lambda");
    CHECK(lam.reference == 1.0);
    CHECK(lam.significant);
}

TEST_CASE("bootstrap: identical results for any thread count") {
    const auto fed = fixture::counts12().at("Pete Sampras");
    BootstrapConfig a, b, c;
    a.threads = 1;
    b.threads = 2;
    c.threads = 5;
    auto ra = bootstrap_ci(fed, structural_estimator(), a);
    auto rb = bootstrap_ci(fed, structural_estimator(), b);
    auto rc = bootstrap_ci(fed, structural_estimator(), c);
    for (std::size_t i = 0; i < ra.intervals.size(); ++i) {
        CHECK(ra.intervals[i].lo == rb.intervals[i].lo);
        CHECK(ra.intervals[i].hi == rb.intervals[i].hi);
        CHECK(ra.intervals[i].lo == rc.intervals[i].lo);
        CHECK(ra.intervals[i].hi == rc.intervals[i].hi);
    }
}

TEST_CASE("bootstrap: config checks") {
    const auto fed = fixture::counts12().at("Roger Federer");
    BootstrapConfig cfg;
    cfg.replications = 1;
    CHECK_THROWS_AS(bootstrap_ci(fed, structural_estimator(), cfg), ConfigError);
    cfg.replications = 10;
    cfg.level = 1.0;
    CHECK_THROWS_AS(bootstrap_ci(fed, structural_estimator(), cfg), ConfigError);
}

TEST_CASE("bootstrap: too many failed replicates") {
    const auto fed = fixture::counts12().at("Roger Federer");
    // The original counts succeed; replicates fail whenever n_f1 is odd.
    Estimator flaky{{"v"}, {0}, [](const ServeCounts& c) -> std::vector<double> {
                        if (c.n_f1 % 2 == 1) throw DomainError("odd");
                        return {1.0};
                    }};
    auto even = fed;
    if (even.n_f1 % 2) {
        --even.n_f1;
        ++even.n_k1;
    }
    BootstrapConfig cfg;
    cfg.replications = 200;
    CHECK_THROWS_AS(bootstrap_ci(even, flaky, cfg), TooManyFailures);
}

TEST_CASE("bootstrap: narrower intervals with more data") {
    std::mt19937_64 rng(4);
    BootstrapConfig cfg;
    cfg.replications = 200;
    std::vector<double> small, large;
    for (int i = 0; i < 15; ++i) {
        auto p = synth::draw_player(rng);
        auto cs = simulate(p.stats, 5000, rng);
        auto cl = simulate(p.stats, 20000, rng);
        auto rs = bootstrap_ci(cs, structural_estimator(), cfg);
        auto rl = bootstrap_ci(cl, structural_estimator(), cfg);
        small.push_back(rs.intervals[0].hi - rs.intervals[0].lo);
        large.push_back(rl.intervals[0].hi - rl.intervals[0].lo);
    }
    auto median = [](std::vector<double> v) { return percentile(std::move(v), 0.5); };
    MESSAGE("median delta width " << median(small) << " -> " << median(large));
    CHECK(median(large) < median(small));
}

TEST_CASE("bootstrap: coverage of the salience weight") {
    std::mt19937_64 rng(5);
    BootstrapConfig cfg;
    int covered = 0;
    const int datasets = 200;
    for (int i = 0; i < datasets; ++i) {
        auto p = synth::draw_player(rng);
        auto counts = simulate(p.stats, 20000, rng);
        cfg.seed = 900 + i;
        auto r = bootstrap_ci(counts, structural_estimator(), cfg);
        const auto& d = r.intervals[0];
        covered += d.lo <= p.beta - 1 && p.beta - 1 <= d.hi;
    }
    MESSAGE("coverage " << covered << "/" << datasets);
    CHECK(covered >= 0.88 * datasets);
}
