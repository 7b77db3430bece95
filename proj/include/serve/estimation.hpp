#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "serve/ingest.hpp"

namespace serve {

// Observed serve probabilities. f is the one-shot win share and k the
// multi-shot win share, both conditional on the serve landing in.
struct ServeStats {
    double x1 = 0, x2 = 0;
    double f1 = 0, f2 = 0;
    double k1 = 0, k2 = 0;

    double y1() const { return f1 + k1; }
    double y2() const { return f2 + k2; }
    // Probability of winning a service point at the observed strategy.
    double point_prob() const { return x1 * y1() + (1 - x1) * x2 * y2(); }
    bool valid() const;
};

struct DataConditionReport {
    bool a1_holds = false;  // 0 < x1 < x2 < 1
    bool a2_holds = false;  // ln(x2/x1) < x2
    bool a3_holds = false;  // 2(x2 - x1) < x2^2
    std::string details;

    bool all() const { return a1_holds && a2_holds && a3_holds; }
};

// Throws DegenerateCounts when N, n_x1, n_x2 or N - n_x1 is zero.
ServeStats mle_stats(const ServeCounts& c);

// Log-likelihood of the serve tree; the multi-shot edge has success
// probability k/(1-f) over the n_x - n_f rallies that were not one-shot.
// Throws DomainError when the counts are impossible under `s`.
double log_likelihood(const ServeCounts& c, const ServeStats& s);

DataConditionReport validate_theorem_conditions(double x1, double x2);

void write_stats_csv(std::ostream& out, const std::map<std::string, ServeStats>& stats);
std::map<std::string, ServeStats> read_stats_csv(std::istream& in);

}  // namespace serve
