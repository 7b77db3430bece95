#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "serve/estimation.hpp"
#include "serve/ingest.hpp"

namespace serve {

struct BootstrapConfig {
    int replications = 300;
    double level = 0.95;
    std::uint64_t seed = 20250916;
    unsigned threads = 0;  // 0 = hardware concurrency; results do not depend on it
};

struct IntervalEstimate {
    std::string param;
    double point = 0;
    double lo = 0;
    double hi = 0;
    double reference = 0;
    bool significant = false;  // interval excludes `reference`
};

struct BootstrapResult {
    std::vector<IntervalEstimate> intervals;
    int replications = 0;
    int failed = 0;
};

// A statistic of the counts. `fn` may throw to mark a failed replicate.
struct Estimator {
    std::vector<std::string> names;
    std::vector<double> reference;
    std::function<std::vector<double>(const ServeCounts&)> fn;
};

// delta, lambda, tau_f, a_f, tau_k, a_k of the structural fit; lambda is
// tested against 1, the rest against 0.
Estimator structural_estimator(double eps = 1e-10);

// Independent generator for replicate `index` of a run seeded with `seed`.
std::mt19937_64 replicate_rng(std::uint64_t seed, std::uint64_t index);

// Linear-interpolation quantile (sorts `v`).
double percentile(std::vector<double> v, double q);

// Draws a new set of counts down the serve tree with the given probabilities.
ServeCounts resample_counts(const ServeCounts& counts, const ServeStats& stats, std::mt19937_64& rng);

// Percentile intervals. Throws TooManyFailures when more than 20% of the
// replicates fail, and propagates a failure of the point estimate.
BootstrapResult bootstrap_ci(const ServeCounts& counts, const Estimator& est, const BootstrapConfig& cfg);

}  // namespace serve
