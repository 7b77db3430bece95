#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "serve/estimation.hpp"

namespace serve {

// f(x) = a_f + tau_f exp(lambda x), k likewise.
struct SoftmaxFit {
    double lambda = 0;
    double a_f = 0, tau_f = 0;
    double a_k = 0, tau_k = 0;
    double beta = 1, delta = 0;
    double residual = 0;
    int sign_changes = 0;  // genuine roots seen on the scan grid
};

constexpr double kScanLow = 1e-3;
constexpr double kScanHigh = 64.0;

// Throws NoRoot, SingularDenominator, DomainError.
SoftmaxFit softmax_fit(const ServeStats& s, double eps = 1e-10);

// Right-hand side of the softmax fixed-point equation for lambda.
double softmax_lambda_map(double lambda, double x1, double x2);

// Power curves with the multi-shot exponent scaled by t:
// f(x) = (a_f - x^lambda)/tau_f, k(x) = (a_k - x^(t lambda))/tau_k.
struct CurvatureTFit {
    double t = 1;
    double lambda = 0;
    double a_f = 0, tau_f = 0;
    double a_k = 0, tau_k = 0;
    double beta = 1, delta = 0;
    double residual = 0;
    bool solved = false;
    int sign_changes = 0;  // genuine roots on the (1e-3, 64] scan, for diagnostics
};

constexpr double kCurvatureUpper = 10.0;

// Updated lambda from the two first-order conditions given the current one.
double curvature_t_update(const ServeStats& s, double t, double lambda);

// Bisection over (1e-6, 10]. Returns solved = false when it does not close
// on a fixed point, which is how unsolved cells are reported.
CurvatureTFit curvature_t_fit(const ServeStats& s, double t, double eps = 1e-10);

// Aversion to double faults in place of process utility; lambda is shared
// with the main model.
struct DoubleFaultFit {
    double gamma = 0;
    double lambda = 0;
    double a = 0, tau = 0;
};

DoubleFaultFit double_fault_fit(const ServeStats& s, double eps = 1e-10);

// Single-pass local-linear smoother with tricube weights over the
// ceil(span * n) nearest neighbours, Euclidean distance after scaling each
// covariate to unit variance. Throws TooFewPoints below 5 observations.
std::vector<double> lowess(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                           double span = 0.5);

// Same smoother fit on (xs, ys), evaluated at `queries`.
std::vector<double> lowess_at(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                              const std::vector<std::vector<double>>& queries, double span = 0.5);

struct GammaInput {
    std::string player_id;
    double gamma = 0;
    ServeStats stats;
};

struct GammaMoment {
    double fitted = 0, lo = 0, hi = 0;
    bool positive = false;  // lo > 0
};

struct GammaDiagnostic {
    std::string player_id;
    GammaMoment first;   // smoothed gamma * f1
    GammaMoment second;  // smoothed gamma * f2
    bool flagged() const { return first.positive || second.positive; }
};

// Smooths gamma * f_j on (x1, x2, y1, y2) and bootstraps players B times.
// Throws TooFewPoints below 10 players, ConfigError when B < 100.
std::vector<GammaDiagnostic> gamma_diagnostic(const std::vector<GammaInput>& players, double span,
                                              int replications, std::uint64_t seed, double level = 0.95,
                                              unsigned threads = 0);

}  // namespace serve
