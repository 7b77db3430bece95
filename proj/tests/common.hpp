#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>

#include "serve/estimation.hpp"
#include "serve/ingest.hpp"
#include "serve/scoring.hpp"
#include "serve/structural.hpp"

namespace fixture {

inline std::string path(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

inline std::map<std::string, serve::ServeStats> stats12() {
    std::ifstream in(path("stats12.csv"));
    return serve::read_stats_csv(in);
}

inline std::map<std::string, serve::ServeCounts> counts12() {
    std::ifstream in(path("counts12.csv"));
    return serve::read_counts_csv(in);
}

inline serve::PrizeLadder us_open_2025() {
    std::ifstream in(path("us_open_2025_mens_singles.json"));
    return serve::load_prize_ladder(in);
}

// Published structural estimates: delta, lambda, tau_f, a_f, tau_k, a_k.
struct Estimates {
    double delta, lambda, tau_f, a_f, tau_k, a_k;
};

inline const std::map<std::string, Estimates>& published_estimates() {
    static const std::map<std::string, Estimates> m{
        {"Novak Djokovic", {.27, 3.67, 3.09, 1.26, -19.58, -7.48}},
        {"Rafael Nadal", {.21, 4.89, 4.62, 1.43, -105.09, -44.96}},
        {"Roger Federer", {.32, 2.81, 2.64, 1.35, -16.27, -5.50}},
        {"Pete Sampras", {.42, 1.93, 1.49, 1.13, -6.41, -1.38}},
        {"Boris Becker", {.56, 1.73, 1.59, 1.12, -13.23, -3.55}},
        {"Carlos Alcaraz", {.05, 3.66, 3.56, 1.34, -25.78, -10.11}},
        {"Jannik Sinner", {.06, 2.52, 2.61, 1.28, -11.65, -4.08}},
        {"Ivo Karlovic", {1.19, 4.37, 1.42, .96, -7.41, -1.61}},
        {"John Isner", {.79, 5.33, 1.78, 1.11, -5.68, -1.19}},
        {"Reilly Opelka", {.36, 3.89, 1.81, 1.19, -4.63, -.84}},
        {"David Ferrer", {-.01, 2.90, 4.82, 1.41, 40.72, 16.62}},
        {"Diego Schwartzman", {-.38, 3.57, 6.45, 1.60, 62.62, 26.49}},
    };
    return m;
}

// Published counterfactual row: dx1, dx2, dpt, dgm, dset, dmat (points), dprize (thousands).
struct Counterfactual {
    double dx1, dx2, dpt, dgm, dset, dmat, dprize_k;
};

inline const std::map<std::string, Counterfactual>& published_counterfactuals() {
    static const std::map<std::string, Counterfactual> m{
        {"Novak Djokovic", {-1.06, -4.31, .12, .18, .39, .73, 8.07}},
        {"Rafael Nadal", {-.63, -2.36, .04, .06, .13, .24, 2.56}},
        {"Roger Federer", {-1.07, -6.01, .20, .27, .64, 1.20, 13.51}},
        {"Pete Sampras", {-2.25, -9.94, .57, .82, 1.82, 3.41, 42.01}},
        {"Boris Becker", {-2.53, -10.79, .64, 1.14, 2.13, 3.99, 50.26}},
        {"Carlos Alcaraz", {-.21, -.89, 0, .01, .02, .03, .31}},
        {"Jannik Sinner", {-.23, -1.61, .01, .02, .04, .07, .80}},
        {"Ivo Karlovic", {-4.69, -10.79, 1.53, 1.61, 4.64, 8.66, 132.87}},
        {"John Isner", {-3.87, -10.18, 1.20, 1.33, 3.67, 6.86, 97.63}},
        {"Reilly Opelka", {-2.24, -7.71, .48, .57, 1.48, 2.78, 33.36}},
        {"David Ferrer", {.04, .21, 0, 0, 0, 0, .01}},
        {"Diego Schwartzman", {1.14, 6.25, .17, .38, .60, 1.12, 12.56}},
    };
    return m;
}

inline const std::array<double, 7> kTGrid{0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};

// Published relative-curvature tables over kTGrid; NaN marks an unsolved cell.
struct TRow {
    std::array<double, 7> delta, lambda;
};

inline const std::map<std::string, TRow>& published_t_grid() {
    constexpr double na = std::numeric_limits<double>::quiet_NaN();
    static const std::map<std::string, TRow> m{
        {"Novak Djokovic", {{.26, .27, .27, .27, .25, .23, .19}, {3.22, 3.44, 3.67, 3.90, 4.10, 4.27, 4.41}}},
        {"Rafael Nadal", {{.21, .21, .21, .21, .21, .20, .19}, {4.74, 4.82, 4.89, 4.96, 5.01, 5.06, 5.10}}},
        {"Roger Federer", {{.31, .32, .32, .32, .30, .27, .24}, {2.44, 2.62, 2.81, 3.00, 3.17, 3.31, 3.42}}},
        {"Pete Sampras", {{na, .42, .42, .42, .39, .35, .29}, {na, 1.71, 1.93, 2.18, 2.44, 2.67, 2.84}}},
        {"Boris Becker", {{.56, .56, .56, .56, .55, .54, .51}, {1.54, 1.63, 1.73, 1.83, 1.93, 2.03, 2.12}}},
        {"Carlos Alcaraz", {{.05, .05, .05, .05, .04, .03, .01}, {3.34, 3.50, 3.66, 3.81, 3.95, 4.07, 4.17}}},
        {"Jannik Sinner", {{.05, .06, .06, .06, .04, .02, -.01}, {2.15, 2.33, 2.52, 2.72, 2.90, 3.06, 3.18}}},
        {"Ivo Karlovic", {{1.15, 1.18, 1.19, 1.17, 1.08, .95, .81}, {3.14, 3.67, 4.37, 5.21, 5.99, 6.55, 6.88}}},
        {"John Isner", {{.73, .77, .79, .73, .59, .43, .29}, {3.11, 3.95, 5.33, 7.07, 8.14, 8.54, 8.66}}},
        {"Reilly Opelka", {{na, .35, .36, .33, .23, .12, .01}, {na, 2.97, 3.89, 5.07, 5.89, 6.25, 6.36}}},
        {"David Ferrer", {{-.01, -.01, -.01, -.01, -.01, -.00, .00}, {3.08, 2.99, 2.90, 2.83, 2.77, 2.71, 2.66}}},
        {"Diego Schwartzman", {{-.38, -.38, -.38, -.38, -.38, -.38, -.38}, {3.69, 3.62, 3.57, 3.52, 3.47, 3.43, 3.40}}},
    };
    return m;
}
// Federer row of the relative-curvature tables.
inline const std::array<double, 7> kFedererDeltaT{.31, .32, .32, .32, .30, .27, .24};
inline const std::array<double, 7> kFedererLambdaT{2.44, 2.62, 2.81, 3.00, 3.17, 3.31, 3.42};

}  // namespace fixture

namespace synth {

// A player drawn from the model: skills and preference, plus the serve
// statistics an optimizing player with those primitives would produce.
struct Player {
    serve::SkillParams skills;
    double beta = 1;
    serve::ServeStats stats;
};

// Rejection sampler over parameters satisfying the model's regularity
// conditions and yielding interior probabilities.
inline Player draw_player(std::mt19937_64& rng, std::optional<double> fixed_beta = std::nullopt) {
    std::uniform_real_distribution<double> U(0, 1);
    auto uni = [&](double a, double b) { return a + (b - a) * U(rng); };
    for (;;) {
        const double lam = uni(1.3, 6.0);
        const double x2 = uni(0.80, 0.97);
        const double z2 = std::pow(x2, lam);
        const double z1 = z2 * (1 - lam / (1 + lam) * x2);
        const double x1 = std::pow(z1, 1 / lam);
        if (!serve::validate_theorem_conditions(x1, x2).all()) continue;

        const double tau_f = uni(1.0, 6.0);
        const double f2 = uni(0.10, 0.30);
        const double a_f = tau_f * f2 + z2;
        const double f1 = (a_f - z1) / tau_f;
        if (!(f1 < 0.7)) continue;

        const double beta = fixed_beta ? *fixed_beta : uni(0.6, 2.2);
        double tau_k;
        if (U(rng) < 0.8) {
            const double floor = 1.2 * std::max(tau_f, beta * tau_f);
            tau_k = -uni(floor, floor + 40);
        } else {
            tau_k = uni(5.0, 60.0);
        }
        const double r = beta * tau_f / tau_k;
        const double a_k = (z2 * (1 + lam) * (1 + r) - a_f) / r;
        const double k1 = (a_k - z1) / tau_k;
        const double k2 = (a_k - z2) / tau_k;
        if (!(k1 > 0.05 && k2 > 0.05 && k1 < 0.6 && k2 < 0.6)) continue;
        if (!(f1 + k1 < 0.95 && f2 + k2 < 0.95)) continue;
        if (std::abs(k1 - k2) < 1e-3) continue;

        Player p;
        p.skills = serve::SkillParams::from_components(lam, a_f, tau_f, a_k, tau_k);
        if (!(p.skills.tau > 0 && p.skills.a > 0 && p.skills.a < lam + 1)) continue;
        p.beta = beta;
        p.stats = serve::ServeStats{x1, x2, f1, f2, k1, k2};
        return p;
    }
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::abs(want);
}

}  // namespace synth
