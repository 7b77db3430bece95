#include "serve/robustness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "serve/bootstrap.hpp"
#include "serve/error.hpp"
#include "serve/parallel.hpp"
#include "serve/structural.hpp"

namespace serve {

namespace {

constexpr int kScanPoints = 2000;
// A sign change whose bisected midpoint leaves |g| above this is a pole.
constexpr double kRootTolerance = 1e-6;

template <class G>
double bisect(G&& g, double lo, double hi, double eps) {
    const bool rising = g(lo) < 0;
    while (hi - lo >= eps) {
        const double mid = 0.5 * (lo + hi);
        if ((g(mid) < 0) == rising)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Roots of g on a log-spaced grid, in increasing order, with poles removed.
template <class G>
std::vector<double> scan_roots(G&& g, double eps) {
    std::vector<double> roots;
    const double step = std::log(kScanHigh / kScanLow) / (kScanPoints - 1);
    double prev_x = kScanLow, prev_g = g(prev_x);
    for (int i = 1; i < kScanPoints; ++i) {
        const double x = kScanLow * std::exp(step * i);
        const double gx = g(x);
        if (std::isfinite(prev_g) && std::isfinite(gx) && (prev_g < 0) != (gx < 0)) {
            const double r = bisect(g, prev_x, x, eps);
            if (std::abs(g(r)) < kRootTolerance) roots.push_back(r);
        }
        prev_x = x;
        prev_g = gx;
    }
    return roots;
}

void require_strategy(const ServeStats& s) {
    if (!(0 < s.x1 && s.x1 < s.x2 && s.x2 < 1)) throw DomainError("need 0 < x1 < x2 < 1");
}

}  // namespace

double softmax_lambda_map(double lambda, double x1, double x2) {
    const double e1 = std::exp(lambda * x1);
    const double e2 = std::exp(lambda * x2);
    return (e2 - e1) / (x1 * e1 - x2 * (1 - x2) * e2);
}

SoftmaxFit softmax_fit(const ServeStats& s, double eps) {
    require_strategy(s);
    if (s.f1 == s.f2) throw SingularDenominator("f1 == f2");
    if (s.k1 == s.k2) throw SingularDenominator("k1 == k2");
    auto g = [&](double l) { return softmax_lambda_map(l, s.x1, s.x2) - l; };
    const auto roots = scan_roots(g, eps);
    if (roots.empty()) throw NoRoot("no softmax fixed point on (0.001, 64]");

    SoftmaxFit fit;
    fit.sign_changes = static_cast<int>(roots.size());
    fit.lambda = roots.front();
    fit.residual = std::abs(g(fit.lambda));
    const double lam = fit.lambda;
    const double z1 = std::exp(lam * s.x1), z2 = std::exp(lam * s.x2);
    fit.tau_f = (s.f2 - s.f1) / (z2 - z1);
    fit.a_f = s.f1 - fit.tau_f * z1;
    fit.tau_k = (s.k2 - s.k1) / (z2 - z1);
    fit.a_k = s.k1 - fit.tau_k * z1;
    const double den = s.k2 * (z2 - z1) + lam * (s.k2 - s.k1) * s.x2 * z2;
    if (den == 0) throw SingularDenominator("softmax beta denominator vanishes");
    fit.beta = -(s.f2 * (z2 - z1) + lam * (s.f2 - s.f1) * s.x2 * z2) / den;
    fit.delta = fit.beta - 1;
    return fit;
}

namespace {

struct TParams {
    double tau_f, a_f, tau_k, a_k, beta;
};

TParams t_params(const ServeStats& s, double t, double lam) {
    const double z1 = xpow(s.x1, lam), z2 = xpow(s.x2, lam);
    const double w1 = xpow(s.x1, t * lam), w2 = xpow(s.x2, t * lam);
    TParams p;
    p.tau_f = -(z1 - z2) / (s.f1 - s.f2);
    p.tau_k = -(w1 - w2) / (s.k1 - s.k2);
    p.a_f = p.tau_f * s.f1 + z1;
    p.a_k = p.tau_k * s.k1 + w1;
    p.beta = -(p.a_f * p.tau_k - p.tau_k * (1 + lam) * z2) / (p.a_k * p.tau_f - p.tau_f * (1 + t * lam) * w2);
    return p;
}

}  // namespace

double curvature_t_update(const ServeStats& s, double t, double lam) {
    const double z1 = xpow(s.x1, lam), z2 = xpow(s.x2, lam);
    const double w1 = xpow(s.x1, t * lam), w2 = xpow(s.x2, t * lam);
    const TParams p = t_params(s, t, lam);
    const double r = p.beta * p.tau_f / p.tau_k;
    return (p.a_f - z1 + r * (p.a_k - w1) - s.x2 * (p.a_f - z2 + r * (p.a_k - w2))) /
           (z1 + t * w1 * r);
}

CurvatureTFit curvature_t_fit(const ServeStats& s, double t, double eps) {
    CurvatureTFit fit;
    fit.t = t;
    if (!(t > 0) || !(0 < s.x1 && s.x1 < s.x2 && s.x2 < 1) || s.f1 == s.f2 || s.k1 == s.k2)
        return fit;
    auto g = [&](double l) { return curvature_t_update(s, t, l) - l; };

    // Plain bisection from a fixed bracket, without checking that the bracket
    // holds a sign change. When it does not, the iterate runs into the upper
    // end or onto a pole and the residual test below rejects it.
    double lo = kLambdaLower, hi = kCurvatureUpper;
    while (hi - lo >= eps) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    const double lam = 0.5 * (lo + hi);
    fit.residual = std::abs(g(lam));
    fit.sign_changes = static_cast<int>(scan_roots(g, eps).size());
    if (!(fit.residual < kRootTolerance) || lam > kCurvatureUpper - 1e-6) return fit;

    const TParams p = t_params(s, t, lam);
    fit.lambda = lam;
    fit.tau_f = p.tau_f;
    fit.a_f = p.a_f;
    fit.tau_k = p.tau_k;
    fit.a_k = p.a_k;
    fit.beta = p.beta;
    fit.delta = p.beta - 1;
    fit.solved = std::isfinite(p.beta);
    return fit;
}

DoubleFaultFit double_fault_fit(const ServeStats& s, double eps) {
    DoubleFaultFit fit;
    fit.lambda = solve_lambda(s.x1, s.x2, eps);
    const double dy = s.y1() - s.y2();
    if (dy == 0) throw SingularDenominator("y1 == y2");
    const double z1 = xpow(s.x1, fit.lambda), z2 = xpow(s.x2, fit.lambda);
    fit.tau = (z2 - z1) / dy;
    fit.a = fit.tau * s.y2() + z2;
    fit.gamma = (z2 * (fit.lambda + 1) - fit.a) / fit.tau;
    return fit;
}

std::vector<double> lowess_at(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                              const std::vector<std::vector<double>>& queries, double span) {
    const std::size_t n = xs.size();
    if (n < 5 || ys.size() != n) throw TooFewPoints("lowess needs at least 5 observations");
    if (!(span > 0 && span <= 1)) throw DomainError("lowess span must be in (0, 1]");
    const std::size_t dim = xs.front().size();

    std::vector<double> scale(dim, 1.0);
    for (std::size_t d = 0; d < dim; ++d) {
        double mean = 0;
        for (const auto& x : xs) mean += x[d];
        mean /= static_cast<double>(n);
        double var = 0;
        for (const auto& x : xs) var += (x[d] - mean) * (x[d] - mean);
        var /= static_cast<double>(n);
        if (var > 0) scale[d] = std::sqrt(var);
    }

    const auto k = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(span * static_cast<double>(n))));
    std::vector<double> out;
    out.reserve(queries.size());
    std::vector<double> dist(n), sorted(n);
    for (const auto& q : queries) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double u = (xs[i][d] - q[d]) / scale[d];
                acc += u * u;
            }
            dist[i] = std::sqrt(acc);
        }
        sorted = dist;
        std::nth_element(sorted.begin(), sorted.begin() + (std::min(k, n) - 1), sorted.end());
        const double h = sorted[std::min(k, n) - 1];

        Eigen::MatrixXd X(n, dim + 1);
        Eigen::VectorXd Y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double w;
            if (h > 0) {
                const double r = dist[i] / h;
                w = r < 1 ? std::pow(1 - r * r * r, 3) : 0.0;
            } else {
                w = dist[i] == 0 ? 1.0 : 0.0;
            }
            const double sw = std::sqrt(w);
            X(i, 0) = sw;
            for (std::size_t d = 0; d < dim; ++d) X(i, d + 1) = sw * (xs[i][d] - q[d]) / scale[d];
            Y(i) = sw * ys[i];
        }
        // Covariates are centred on the query, so the intercept is the fit.
        const Eigen::VectorXd coef = X.completeOrthogonalDecomposition().solve(Y);
        out.push_back(coef(0));
    }
    return out;
}

std::vector<double> lowess(const std::vector<std::vector<double>>& xs, const std::vector<double>& ys,
                           double span) {
    return lowess_at(xs, ys, xs, span);
}

std::vector<GammaDiagnostic> gamma_diagnostic(const std::vector<GammaInput>& players, double span,
                                              int replications, std::uint64_t seed, double level,
                                              unsigned threads) {
    const std::size_t n = players.size();
    if (n < 10) throw TooFewPoints("gamma diagnostic needs at least 10 players");
    if (replications < 100) throw ConfigError("gamma diagnostic needs at least 100 replications");

    std::vector<std::vector<double>> xs(n);
    std::vector<double> v1(n), v2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = players[i].stats;
        xs[i] = {s.x1, s.x2, s.y1(), s.y2()};
        v1[i] = players[i].gamma * s.f1;
        v2[i] = players[i].gamma * s.f2;
    }
    const auto fit1 = lowess(xs, v1, span);
    const auto fit2 = lowess(xs, v2, span);

    struct Rep {
        std::vector<double> m1, m2;
    };
    std::vector<std::optional<Rep>> reps(replications);
    parallel_for(
        reps.size(),
        [&](std::size_t r) {
            auto rng = replicate_rng(seed, r);
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            std::vector<std::vector<double>> bx(n);
            std::vector<double> b1(n), b2(n);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = pick(rng);
                bx[i] = xs[j];
                b1[i] = v1[j];
                b2[i] = v2[j];
            }
            try {
                reps[r] = Rep{lowess_at(bx, b1, xs, span), lowess_at(bx, b2, xs, span)};
            } catch (const Error&) {
            }
        },
        threads);

    const double tail = (1 - level) / 2;
    std::vector<GammaDiagnostic> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> c1, c2;
        for (const auto& r : reps) {
            if (!r) continue;
            if (std::isfinite(r->m1[i])) c1.push_back(r->m1[i]);
            if (std::isfinite(r->m2[i])) c2.push_back(r->m2[i]);
        }
        auto moment = [&](double fitted, const std::vector<double>& col) {
            GammaMoment m;
            m.fitted = fitted;
            m.lo = percentile(col, tail);
            m.hi = percentile(col, 1 - tail);
            m.positive = m.lo > 0;
            return m;
        };
        out[i].player_id = players[i].player_id;
        out[i].first = moment(fit1[i], c1);
        out[i].second = moment(fit2[i], c2);
    }
    return out;
}

}  // namespace serve
