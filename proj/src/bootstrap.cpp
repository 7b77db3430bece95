#include "serve/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "serve/error.hpp"
#include "serve/parallel.hpp"
#include "serve/structural.hpp"

namespace serve {

Estimator structural_estimator(double eps) {
    Estimator e;
    e.names = {"delta", "lambda", "tau_f", "a_f", "tau_k", "a_k"};
    e.reference = {0, 1, 0, 0, 0, 0};
    e.fn = [eps](const ServeCounts& c) {
        const auto fit = fit_player(mle_stats(c), eps);
        const auto& sk = fit.skills;
        return std::vector<double>{fit.prefs.delta, sk.lambda, sk.tau_f, sk.a_f, sk.tau_k, sk.a_k};
    };
    return e;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::int64_t draw(std::int64_t n, double p, std::mt19937_64& rng) {
    if (n <= 0 || p <= 0) return 0;
    if (p >= 1) return n;
    return std::binomial_distribution<std::int64_t>(n, p)(rng);
}

double edge_prob(double k, double f, const char* which) {
    if (f >= 1) return 0;
    double r = k / (1 - f);
    if (r < -1e-12 || r > 1 + 1e-12)
        throw DegenerateProbability(std::string(which) + "/(1-f) outside [0,1]");
    return std::clamp(r, 0.0, 1.0);
}

}  // namespace

std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{splitmix64(seed), splitmix64(seed ^ splitmix64(index + 1))};
    return std::mt19937_64(seq);
}

double percentile(std::vector<double> v, double q) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(i);
    return v[i] + frac * (v[i + 1] - v[i]);
}

ServeCounts resample_counts(const ServeCounts& counts, const ServeStats& s, std::mt19937_64& rng) {
    const double r1 = edge_prob(s.k1, s.f1, "k1");
    const double r2 = edge_prob(s.k2, s.f2, "k2");
    ServeCounts c;
    c.player_id = counts.player_id;
    c.n_matches = counts.n_matches;
    c.N = counts.N;
    c.n_x1 = draw(c.N, s.x1, rng);
    c.n_x2 = draw(c.N - c.n_x1, s.x2, rng);
    c.n_f1 = draw(c.n_x1, s.f1, rng);
    c.n_k1 = draw(c.n_x1 - c.n_f1, r1, rng);
    c.n_f2 = draw(c.n_x2, s.f2, rng);
    c.n_k2 = draw(c.n_x2 - c.n_f2, r2, rng);
    return c;
}

BootstrapResult bootstrap_ci(const ServeCounts& counts, const Estimator& est, const BootstrapConfig& cfg) {
    if (cfg.replications < 2) throw ConfigError("bootstrap needs at least 2 replications");
    if (!(cfg.level > 0 && cfg.level < 1)) throw ConfigError("bootstrap level must be in (0,1)");

    const ServeStats stats = mle_stats(counts);
    const std::vector<double> point = est.fn(counts);
    const std::size_t dim = point.size();

    std::vector<std::optional<std::vector<double>>> reps(cfg.replications);
    parallel_for(
        reps.size(),
        [&](std::size_t i) {
            auto rng = replicate_rng(cfg.seed, i);
            try {
                auto v = est.fn(resample_counts(counts, stats, rng));
                if (v.size() == dim && std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); }))
                    reps[i] = std::move(v);
            } catch (const Error&) {
            }
        },
        cfg.threads);

    BootstrapResult out;
    out.replications = cfg.replications;
    for (const auto& r : reps) out.failed += !r.has_value();
    if (out.failed * 5 > cfg.replications)
        throw TooManyFailures(std::to_string(out.failed) + " of " + std::to_string(cfg.replications) +
                              " replicates failed");

    const double tail = (1 - cfg.level) / 2;
    for (std::size_t d = 0; d < dim; ++d) {
        std::vector<double> col;
        col.reserve(reps.size());
        for (const auto& r : reps)
            if (r) col.push_back((*r)[d]);
        IntervalEstimate ie;
        ie.param = d < est.names.size() ? est.names[d] : "p" + std::to_string(d);
        ie.reference = d < est.reference.size() ? est.reference[d] : 0.0;
        ie.point = point[d];
        ie.lo = percentile(col, tail);
        ie.hi = percentile(col, 1 - tail);
        ie.significant = ie.lo > ie.reference || ie.hi < ie.reference;
        out.intervals.push_back(ie);
    }
    return out;
}

}  // namespace serve
