#include "serve/structural.hpp"

#include <algorithm>
#include <iomanip>

namespace serve {

SkillParams SkillParams::from_components(double lambda, double a_f, double tau_f, double a_k,
                                         double tau_k) {
    SkillParams sk;
    sk.lambda = lambda;
    sk.a_f = a_f;
    sk.tau_f = tau_f;
    sk.a_k = a_k;
    sk.tau_k = tau_k;
    // Sum of two power curves with the same exponent is again a power curve.
    const double den = tau_f + tau_k;
    sk.tau = tau_f * tau_k / den;
    sk.a = (a_f * tau_k + a_k * tau_f) / den;
    return sk;
}

double lambda_map(double lambda, double x1, double x2) {
    if (!(0 < x1 && x1 < x2 && x2 < 1)) throw DomainError("lambda_map needs 0 < x1 < x2 < 1");
    if (!(lambda >= 0)) throw DomainError("lambda_map needs lambda >= 0");
    return std::exp(lambda * std::log(x2 / x1)) * (1 + lambda * (1 - x2)) - 1;
}

LambdaSolution solve_lambda_detailed(double x1, double x2, double eps) {
    auto rep = validate_theorem_conditions(x1, x2);
    if (!rep.all()) throw PreconditionFailed(rep);
    if (!(eps > 0)) throw DomainError("eps must be positive");

    double lo = kLambdaLower;
    double hi = kLambdaUpperStart;
    while (lambda_map(hi, x1, x2) <= hi) {
        hi *= 2;
        if (hi > kLambdaUpperMax)
            throw BracketError("no upper bracket with Lambda(u) > u up to " +
                               std::to_string(kLambdaUpperMax));
    }
    LambdaSolution sol;
    sol.upper = hi;
    while (hi - lo >= eps) {
        const double mid = 0.5 * (lo + hi);
        if (lambda_map(mid, x1, x2) < mid)
            lo = mid;
        else
            hi = mid;
        ++sol.iterations;
    }
    sol.lambda = 0.5 * (lo + hi);
    sol.residual = std::abs(lambda_map(sol.lambda, x1, x2) - sol.lambda);
    return sol;
}

double solve_lambda(double x1, double x2, double eps) {
    return solve_lambda_detailed(x1, x2, eps).lambda;
}

SkillParams recover_slopes_constants(double lambda, const ServeStats& s) {
    const double z1 = xpow(s.x1, lambda);
    const double z2 = xpow(s.x2, lambda);
    if (z1 == z2) throw DivisionByZero("delta z is zero (x1 == x2)");
    if (s.f1 == s.f2) throw DivisionByZero("delta f is zero (f1 == f2)");
    if (s.k1 == s.k2) throw DivisionByZero("delta k is zero (k1 == k2)");
    // -(z2/f2)(dz/df) with relative differences; the f2 and z2 scalings cancel.
    const double tau_f = -(z1 - z2) / (s.f1 - s.f2);
    const double tau_k = -(z1 - z2) / (s.k1 - s.k2);
    const double a_f = tau_f * s.f1 + z1;
    const double a_k = tau_k * s.k1 + z1;
    return SkillParams::from_components(lambda, a_f, tau_f, a_k, tau_k);
}

PreferenceParams recover_beta(double lambda, const ServeStats& s) {
    if (!(s.x2 > 0 && s.f2 > 0 && s.k2 > 0))
        throw SingularDenominator("recover_beta needs x2, f2, k2 > 0");
    const double z1 = xpow(s.x1, lambda);
    const double z2 = xpow(s.x2, lambda);
    const double dz = (z1 - z2) / z2;
    // f2 (dz + lambda df) over k2 (dz + lambda dk), with df, dk relative to f2, k2.
    const double num = s.f2 * dz + lambda * (s.f1 - s.f2);
    const double den = s.k2 * dz + lambda * (s.k1 - s.k2);
    if (std::abs(den) < 1e-14 * (std::abs(s.k2 * dz) + std::abs(lambda * (s.k1 - s.k2))) || den == 0)
        throw SingularDenominator("dz + lambda*dk vanishes");
    PreferenceParams p;
    p.beta = -num / den;
    p.delta = p.beta - 1;
    return p;
}

Condition3Report condition3(const SkillParams& sk, double beta) {
    Condition3Report c;
    c.i = sk.lambda > 1;
    c.ii = sk.tau_f > 0 && (sk.tau_k > 0 || -sk.tau_k > std::max(sk.tau_f, beta * sk.tau_f));
    c.iii = 0 < sk.a && sk.a < sk.lambda + 1;
    return c;
}

StructuralFit fit_player(const ServeStats& s, double eps) {
    StructuralFit fit;
    fit.stats = s;
    const char* stage = "solve_lambda";
    try {
        auto sol = solve_lambda_detailed(s.x1, s.x2, eps);
        fit.iterations = sol.iterations;
        fit.residual = sol.residual;
        stage = "recover_slopes_constants";
        fit.skills = recover_slopes_constants(sol.lambda, s);
        stage = "recover_beta";
        fit.prefs = recover_beta(sol.lambda, s);
    } catch (const FitError&) {
        throw;
    } catch (const ModelError& e) {
        throw FitError(stage, e.what());
    }
    fit.cond3 = condition3(fit.skills, fit.prefs.beta);
    fit.soc_ok = check_soc(fit);
    return fit;
}

Strategy optimal_strategy(const SkillParams& sk, double beta) {
    const double lam = sk.lambda;
    const double ratio = beta * sk.tau_f / sk.tau_k;
    if (!(1 + ratio > 0)) throw NoInteriorSolution("1 + beta*tau_f/tau_k must be positive");
    const double z2 = (sk.a_f + sk.a_k * ratio) / ((1 + lam) * (1 + ratio));
    if (!(z2 > 0 && z2 < 1)) throw NoInteriorSolution("x2^lambda outside (0,1)");
    Strategy st;
    st.x2 = std::exp(std::log(z2) / lam);
    const double z1 = z2 * (1 - lam / (1 + lam) * st.x2);
    if (!(z1 > 0 && z1 < 1)) throw NoInteriorSolution("x1^lambda outside (0,1)");
    st.x1 = std::exp(std::log(z1) / lam);
    return st;
}

Utility decompose_utility(double x1, double x2, const SkillParams& sk, double beta) {
    if (!(x1 > 0 && x1 < 1 && x2 > 0 && x2 < 1)) throw DomainError("strategy outside (0,1)");
    Utility u;
    u.outcome = x1 * sk.y(x1) + (1 - x1) * x2 * sk.y(x2);
    u.process = (beta - 1) * (x1 * sk.k(x1) + (1 - x1) * x2 * sk.k(x2));
    u.perceived = u.outcome + u.process;
    return u;
}

SecondOrder soc_terms(const StructuralFit& fit) {
    const auto& sk = fit.skills;
    const double lam = sk.lambda;
    const double beta = fit.prefs.beta;
    // (x * perceived_y(x))'' = -(1/tau_f + beta/tau_k) lambda (1+lambda) x^(lambda-1)
    const double curv = 1 / sk.tau_f + beta / sk.tau_k;
    const double x1 = fit.stats.x1, x2 = fit.stats.x2;
    SecondOrder h;
    h.d11 = -curv * lam * (1 + lam) * xpow(x1, lam - 1);
    h.d22 = -(1 - x1) * curv * lam * (1 + lam) * xpow(x2, lam - 1);
    return h;
}

bool check_soc(const StructuralFit& fit) {
    auto h = soc_terms(fit);
    return h.d11 <= 0 && h.d22 <= 0;
}

const char* to_string(StaticsSign s) {
    switch (s) {
        case StaticsSign::Increasing: return "Increasing";
        case StaticsSign::Decreasing: return "Decreasing";
        case StaticsSign::Invariant: return "Invariant";
    }
    return "?";
}

StaticsSign comparative_statics_sign(const SkillParams& sk) {
    if (sk.a_f == sk.a_k) return StaticsSign::Invariant;
    const double prod = sk.tau_k * (sk.a_f - sk.a_k);
    return prod < 0 ? StaticsSign::Increasing : StaticsSign::Decreasing;
}

void write_fit_csv_header(std::ostream& out) {
    out << "player_id,delta,beta,lambda,tau_f,a_f,tau_k,a_k,a,tau,soc_ok,cond3_i,cond3_ii,cond3_iii,"
           "residual,iterations\n";
}

void write_fit_csv_row(std::ostream& out, const std::string& id, const StructuralFit& fit) {
    const auto& sk = fit.skills;
    const auto old = out.precision(15);
    out << id << ',' << fit.prefs.delta << ',' << fit.prefs.beta << ',' << sk.lambda << ','
        << sk.tau_f << ',' << sk.a_f << ',' << sk.tau_k << ',' << sk.a_k << ',' << sk.a << ','
        << sk.tau << ',' << fit.soc_ok << ',' << fit.cond3.i << ',' << fit.cond3.ii << ','
        << fit.cond3.iii << ',' << fit.residual << ',' << fit.iterations << '\n';
    out.precision(old);
}

}  // namespace serve
