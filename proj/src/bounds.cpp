#include "serve/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "serve/error.hpp"

namespace serve {

const char* to_string(SignConclusion c) {
    switch (c) {
        case SignConclusion::PositiveLowerBound: return "PositiveLowerBound";
        case SignConclusion::LikelyPositive: return "LikelyPositive";
        case SignConclusion::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

// Value of serving at rate a then b, with win probabilities looked up at the
// observed endpoints: g(x1*) = g1, g(x2*) = g2.
struct Endpoints {
    double x1, x2, g1, g2;
    double at(double x) const { return x == x1 ? g1 : g2; }
    double value(double a, double b) const { return a * at(a) + (1 - a) * b * at(b); }
};

}  // namespace

EndpointABC endpoint_abc(const ServeStats& s, Endpoint at) {
    const Endpoints y{s.x1, s.x2, s.y1(), s.y2()};
    const Endpoints k{s.x1, s.x2, s.k1, s.k2};
    const Endpoints f{s.x1, s.x2, s.f1, s.f2};
    const double x0 = at == Endpoint::X1Star ? s.x1 : s.x2;
    EndpointABC r;
    r.at = at;
    r.A = y.value(x0, s.x2) - y.value(s.x1, s.x1);
    r.B = k.value(x0, s.x2) - k.value(s.x1, s.x1);
    r.C = f.value(x0, s.x2) - f.value(s.x1, s.x1);
    return r;
}

BoundsResult optimality_bounds(const ServeStats& s) {
    BoundsResult r;
    r.abc_x1 = endpoint_abc(s, Endpoint::X1Star);
    r.abc_x2 = endpoint_abc(s, Endpoint::X2Star);

    // Each inequality reads A + delta * B >= 0.
    auto apply = [&r](double A, double B) {
        if (B > 0)
            r.lower = std::max(r.lower, -A / B);
        else if (B < 0)
            r.upper = std::min(r.upper, -A / B);
    };
    // Observed strategy beats serving the first-serve rate twice.
    apply(r.abc_x1.A, r.abc_x1.B);
    // Observed strategy beats serving the second-serve rate twice.
    apply(r.abc_x1.A - r.abc_x2.A, r.abc_x1.B - r.abc_x2.B);

    r.lemma1_b = r.abc_x1.B > r.abc_x1.A && r.abc_x1.A > 0;
    r.lemma1_c = r.abc_x2.B > 0 && 0 > r.abc_x2.A;
    r.sign_conclusion = r.lower > 0 ? SignConclusion::PositiveLowerBound : SignConclusion::Inconclusive;
    return r;
}

TriangleGeometry lemma2_geometry(const ServeStats& s) {
    const double x1 = s.x1, x2 = s.x2, f1 = s.f1, f2 = s.f2;
    const double m1 = x1 * f1, m2 = x2 * f2;
    if (!(m1 > m2)) throw ConditionBFailed("need x1*f1 > x2*f2");

    TriangleGeometry g;
    g.b12 = (2 - x1) * m1 - m2;
    g.x12 = m2 * x1 / ((1 - x2) * m1 + m2 * x1);
    g.x14 = g.b12 * x1 / (m1 - m2 * x1);
    g.x24 = (m2 - (1 - x2) * g.b12) / (m2 * (2 - x2));
    g.A1 = 0.5 * std::abs(x2 * (f1 - f2) * (g.x12 - x1));
    if (g.x14 < g.x24)
        g.A2 = 0.5 * std::abs((g.x12 - g.x14) * (m2 / (1 - x2) * (1 - g.x24) - f1 * g.x24));
    if (g.A1 > 0) g.ratio = g.A2 / g.A1;
    return g;
}

SignConclusion classify_player(const ServeStats& s, double ratio_threshold) {
    const auto b = optimality_bounds(s);
    if (b.sign_conclusion == SignConclusion::PositiveLowerBound) return b.sign_conclusion;
    if (!b.lemma1_ok()) return SignConclusion::Inconclusive;
    try {
        const auto g = lemma2_geometry(s);
        if (g.ratio && *g.ratio <= ratio_threshold) return SignConclusion::LikelyPositive;
    } catch (const ConditionBFailed&) {
    }
    return SignConclusion::Inconclusive;
}

void write_bounds_csv_header(std::ostream& out) {
    out << "player_id,lower,upper,lemma1_b,lemma1_c,b12,x12,x14,x24,A1,A2,ratio,classification\n";
}

void write_bounds_csv_row(std::ostream& out, const std::string& id, const ServeStats& s,
                          double ratio_threshold) {
    const auto b = optimality_bounds(s);
    const auto old = out.precision(15);
    out << id << ',' << b.lower << ',' << b.upper << ',' << b.lemma1_b << ',' << b.lemma1_c;
    try {
        const auto g = lemma2_geometry(s);
        out << ',' << g.b12 << ',' << g.x12 << ',' << g.x14 << ',' << g.x24 << ',' << g.A1 << ','
            << g.A2 << ',';
        if (g.ratio) out << *g.ratio;
    } catch (const ConditionBFailed&) {
        out << ",,,,,,,";
    }
    out << ',' << to_string(classify_player(s, ratio_threshold)) << '\n';
    out.precision(old);
}

}  // namespace serve
