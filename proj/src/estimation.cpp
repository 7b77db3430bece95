#include "serve/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "serve/error.hpp"

namespace serve {

bool ServeStats::valid() const {
    auto prob = [](double v) { return v >= 0 && v <= 1; };
    return prob(x1) && prob(x2) && prob(f1) && prob(f2) && prob(k1) && prob(k2) &&
           f1 + k1 <= 1 + 1e-12 && f2 + k2 <= 1 + 1e-12;
}

ServeStats mle_stats(const ServeCounts& c) {
    if (c.N <= 0) throw DegenerateCounts(c.player_id + ": N = 0");
    if (c.n_x1 <= 0) throw DegenerateCounts(c.player_id + ": no first serve in");
    if (c.N - c.n_x1 <= 0) throw DegenerateCounts(c.player_id + ": no second serve attempted");
    if (c.n_x2 <= 0) throw DegenerateCounts(c.player_id + ": no second serve in");
    const double N = static_cast<double>(c.N);
    const double nx1 = static_cast<double>(c.n_x1);
    const double nx2 = static_cast<double>(c.n_x2);
    ServeStats s;
    s.x1 = nx1 / N;
    s.x2 = nx2 / (N - nx1);
    s.f1 = c.n_f1 / nx1;
    s.k1 = c.n_k1 / nx1;
    s.f2 = c.n_f2 / nx2;
    s.k2 = c.n_k2 / nx2;
    return s;
}

namespace {

double log_choose(double n, double k) {
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

// log of C(n, k) p^k (1-p)^(n-k), with 0*log(0) taken as 0.
double binom_term(std::int64_t n, std::int64_t k, double p, const char* edge) {
    const std::int64_t fails = n - k;
    if ((p <= 0 && k > 0) || (p >= 1 && fails > 0))
        throw DomainError(std::string("probability on edge ") + edge +
                          " is degenerate but the counts have both outcomes");
    double v = log_choose(static_cast<double>(n), static_cast<double>(k));
    if (k > 0) v += k * std::log(p);
    if (fails > 0) v += fails * std::log1p(-p);
    return v;
}

double conditional(double k, double f) {
    if (f >= 1) return 0.0;
    return k / (1 - f);
}

}  // namespace

double log_likelihood(const ServeCounts& c, const ServeStats& s) {
    double ll = 0;
    ll += binom_term(c.N, c.n_x1, s.x1, "x1");
    ll += binom_term(c.N - c.n_x1, c.n_x2, s.x2, "x2");
    ll += binom_term(c.n_x1, c.n_f1, s.f1, "f1");
    ll += binom_term(c.n_x1 - c.n_f1, c.n_k1, conditional(s.k1, s.f1), "k1");
    ll += binom_term(c.n_x2, c.n_f2, s.f2, "f2");
    ll += binom_term(c.n_x2 - c.n_f2, c.n_k2, conditional(s.k2, s.f2), "k2");
    return ll;
}

DataConditionReport validate_theorem_conditions(double x1, double x2) {
    DataConditionReport r;
    r.a1_holds = 0 < x1 && x1 < x2 && x2 < 1;
    if (r.a1_holds) {
        r.a2_holds = std::log(x2 / x1) < x2;
        r.a3_holds = 2 * (x2 - x1) < x2 * x2;
    }
    std::ostringstream os;
    if (!r.a1_holds) os << "A1 fails: need 0 < x1 < x2 < 1 (x1=" << x1 << ", x2=" << x2 << "); ";
    if (r.a1_holds && !r.a2_holds) os << "A2 fails: ln(x2/x1)=" << std::log(x2 / x1) << " >= x2; ";
    if (r.a1_holds && !r.a3_holds) os << "A3 fails: 2(x2-x1)=" << 2 * (x2 - x1) << " >= x2^2; ";
    r.details = os.str();
    return r;
}

void write_stats_csv(std::ostream& out, const std::map<std::string, ServeStats>& stats) {
    out << "player_id,x1,x2,f1,f2,k1,k2\n";
    const auto old = out.precision(15);
    for (const auto& [id, s] : stats)
        out << id << ',' << s.x1 << ',' << s.x2 << ',' << s.f1 << ',' << s.f2 << ',' << s.k1 << ','
            << s.k2 << '\n';
    out.precision(old);
}

std::map<std::string, ServeStats> read_stats_csv(std::istream& in) {
    static const char* const cols[] = {"player_id", "x1", "x2", "f1", "f2", "k1", "k2"};
    std::vector<std::string> header;
    if (!csv::next_row(in, header)) throw EmptyFile();
    int idx[7];
    for (int c = 0; c < 7; ++c) {
        auto it = std::find(header.begin(), header.end(), cols[c]);
        if (it == header.end()) throw MissingColumn(cols[c]);
        idx[c] = static_cast<int>(it - header.begin());
    }
    std::map<std::string, ServeStats> out;
    std::vector<std::string> f;
    std::size_t row = 0;
    while (csv::next_row(in, f)) {
        ++row;
        if (f.size() < header.size()) throw TypeError(row, "player_id", "short row");
        ServeStats s;
        double* dst[] = {&s.x1, &s.x2, &s.f1, &s.f2, &s.k1, &s.k2};
        for (int k = 0; k < 6; ++k) {
            const std::string& v = f[idx[k + 1]];
            std::size_t used = 0;
            try {
                *dst[k] = std::stod(v, &used);
            } catch (const std::exception&) {
                used = std::string::npos;
            }
            if (used != v.size()) throw TypeError(row, cols[k + 1], "expected number, got '" + v + "'");
        }
        if (!s.valid()) throw InconsistentOutcome(row, "probabilities out of range");
        out.emplace(f[idx[0]], s);
    }
    return out;
}

}  // namespace serve
