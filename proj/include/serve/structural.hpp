#pragma once

#include <cmath>
#include <map>
#include <ostream>
#include <string>

#include "serve/error.hpp"
#include "serve/estimation.hpp"

namespace serve {

// x^p for x in (0,1], via exp(p ln x).
inline double xpow(double x, double p) { return std::exp(p * std::log(x)); }

// Power-function win curves: f(x) = (a_f - x^lambda)/tau_f, likewise k, and
// their sum y(x) = (a - x^lambda)/tau.
struct SkillParams {
    double lambda = 0;
    double a_f = 0, tau_f = 0;
    double a_k = 0, tau_k = 0;
    double a = 0, tau = 0;

    static SkillParams from_components(double lambda, double a_f, double tau_f, double a_k,
                                       double tau_k);

    double f(double x) const { return (a_f - xpow(x, lambda)) / tau_f; }
    double k(double x) const { return (a_k - xpow(x, lambda)) / tau_k; }
    double y(double x) const { return (a - xpow(x, lambda)) / tau; }
};

struct PreferenceParams {
    double beta = 1;
    double delta = 0;  // beta - 1
};

struct Condition3Report {
    bool i = false;    // lambda > 1
    bool ii = false;   // tau_f > 0 and (tau_k > 0 or -tau_k > max(tau_f, beta tau_f))
    bool iii = false;  // 0 < a < lambda + 1
};

struct StructuralFit {
    ServeStats stats;
    SkillParams skills;
    PreferenceParams prefs;
    bool soc_ok = false;
    Condition3Report cond3;
    int iterations = 0;
    double residual = 0;  // |Lambda(lambda) - lambda|
};

struct PreconditionFailed : ModelError {
    explicit PreconditionFailed(DataConditionReport r)
        : ModelError("data conditions fail: " + r.details), report(std::move(r)) {}
    DataConditionReport report;
};

struct LambdaSolution {
    double lambda = 0;
    int iterations = 0;
    double residual = 0;
    double upper = 0;  // final upper end of the initial bracket
};

constexpr double kLambdaLower = 1e-6;
constexpr double kLambdaUpperStart = 4.0;
// Near-equal serve rates push the fixed point arbitrarily high. This is the
// largest doubling of the start bracket that still bisects down to the
// default eps in at most 60 halvings.
constexpr double kLambdaUpperMax = 67108864.0;  // 4 * 2^24
constexpr double kDefaultEps = 1e-10;

// (x2/x1)^lambda (1 + lambda (1 - x2)) - 1. Throws DomainError unless
// 0 < x1 < x2 < 1 and lambda >= 0.
double lambda_map(double lambda, double x1, double x2);

// Bisection on lambda_map(l) - l until the bracket is narrower than eps.
LambdaSolution solve_lambda_detailed(double x1, double x2, double eps = kDefaultEps);
double solve_lambda(double x1, double x2, double eps = kDefaultEps);

SkillParams recover_slopes_constants(double lambda, const ServeStats& s);
PreferenceParams recover_beta(double lambda, const ServeStats& s);

// Throws FitError tagged with the failing stage.
StructuralFit fit_player(const ServeStats& s, double eps = kDefaultEps);

struct Strategy {
    double x1 = 0, x2 = 0;
};

// Interior optimum of the perceived point probability. Throws NoInteriorSolution.
Strategy optimal_strategy(const SkillParams& sk, double beta);

struct Utility {
    double outcome = 0;    // true point-win probability
    double process = 0;    // (beta - 1) * multi-shot win probability
    double perceived = 0;  // outcome + process
};

Utility decompose_utility(double x1, double x2, const SkillParams& sk, double beta);

// Diagonal Hessian entries of the perceived objective at the fitted strategy.
struct SecondOrder {
    double d11 = 0, d22 = 0;
};
SecondOrder soc_terms(const StructuralFit& fit);
bool check_soc(const StructuralFit& fit);

Condition3Report condition3(const SkillParams& sk, double beta);

enum class StaticsSign { Increasing, Decreasing, Invariant };
const char* to_string(StaticsSign s);

// Direction in which the optimal serve-in rates move as beta increases.
StaticsSign comparative_statics_sign(const SkillParams& sk);

void write_fit_csv_header(std::ostream& out);
void write_fit_csv_row(std::ostream& out, const std::string& id, const StructuralFit& fit);

}  // namespace serve
