#include "serve/scoring.hpp"

#include <array>
#include <cmath>
#include <json.hpp>

#include "serve/error.hpp"

namespace serve {

double game_prob(double p) {
    const double q = 1 - p;
    const double deuce_den = 1 - 2 * p * q;  // >= 1/2 on [0,1]
    return std::pow(p, 4) * (1 + 4 * q + 10 * q * q) +
           20 * std::pow(p, 3) * std::pow(q, 3) * p * p / deuce_den;
}

namespace {

// A serves point 0, then B serves 1-2, A serves 3-4, ...
bool a_serves_point(int index) { return ((index + 1) / 2) % 2 == 0; }

}  // namespace

double tiebreak_prob(double p_serve, double p_return) {
    // From any tie at 6-6 or later the next two points are split one serve
    // each, so what remains is a race between winning both and losing both.
    const double win2 = p_serve * p_return;
    const double lose2 = (1 - p_serve) * (1 - p_return);
    const double tied = win2 + lose2 > 0 ? win2 / (win2 + lose2) : 0.5;

    // v[a][b]: chance A wins from a points to b.
    std::array<std::array<double, 8>, 8> v{};
    for (int b = 0; b <= 5; ++b) v[7][b] = 1;
    for (int a = 0; a <= 5; ++a) v[a][7] = 0;
    v[6][6] = tied;
    for (int a = 6; a >= 0; --a) {
        for (int b = 6; b >= 0; --b) {
            if (a == 6 && b == 6) continue;
            const double p = a_serves_point(a + b) ? p_serve : p_return;
            v[a][b] = p * v[a + 1][b] + (1 - p) * v[a][b + 1];
        }
    }
    return v[0][0];
}

double set_prob(double hold_a, double hold_b, double p_serve, double p_return) {
    // g[a][b]: chance A wins the set from a games to b. A serves when a+b is even.
    std::array<std::array<double, 8>, 8> g{};
    for (int b = 0; b <= 5; ++b) g[6][b] = 1;
    for (int a = 0; a <= 5; ++a) g[a][6] = 0;
    g[7][5] = 1;
    g[5][7] = 0;
    g[6][6] = tiebreak_prob(p_serve, p_return);
    // 6-5 and 5-6 lead to 7-5 / 6-6 / 5-7.
    for (int a = 6; a >= 0; --a) {
        for (int b = 6; b >= 0; --b) {
            if ((a == 6 && b <= 4) || (b == 6 && a <= 4) || (a == 6 && b == 6)) continue;
            const double w = (a + b) % 2 == 0 ? hold_a : 1 - hold_b;
            g[a][b] = w * g[a + 1][b] + (1 - w) * g[a][b + 1];
        }
    }
    return g[0][0];
}

double match_prob(double p_set, int best_of) {
    if (best_of < 1 || best_of % 2 == 0)
        throw InvalidBestOf("best_of must be a positive odd integer, got " + std::to_string(best_of));
    const int need = (best_of + 1) / 2;
    // Win the last set after losing j of the earlier ones.
    double total = 0;
    double coef = 1;  // C(need-1+j, j)
    for (int j = 0; j < need; ++j) {
        if (j > 0) coef = coef * (need - 1 + j) / j;
        total += coef * std::pow(p_set, need) * std::pow(1 - p_set, j);
    }
    return total;
}

ScoreChain score_chain(double p_serve, double q_return, int best_of) {
    ScoreChain c;
    c.p_point_serve = p_serve;
    c.q_point_opp_serve = q_return;
    c.best_of = best_of;
    c.p_game_hold = game_prob(p_serve);
    c.p_set = set_prob(c.p_game_hold, game_prob(1 - q_return), p_serve, q_return);
    c.p_match = match_prob(c.p_set, best_of);
    return c;
}

void PrizeLadder::validate() const {
    if (rounds < 1) throw ConfigError("prize ladder needs rounds >= 1");
    if (prizes.size() != static_cast<std::size_t>(rounds) + 1)
        throw ConfigError("prize ladder needs rounds + 1 prizes, got " + std::to_string(prizes.size()));
    for (std::size_t r = 1; r < prizes.size(); ++r)
        if (prizes[r] < prizes[r - 1]) throw ConfigError("prize ladder must be non-decreasing");
}

PrizeLadder load_prize_ladder(std::istream& in) {
    PrizeLadder l;
    try {
        const auto j = nlohmann::json::parse(in);
        l.rounds = j.at("rounds").get<int>();
        l.prizes = j.at("prizes").get<std::vector<double>>();
        if (j.contains("note")) l.note = j["note"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad prize ladder: ") + e.what());
    }
    l.validate();
    return l;
}

double expected_prize(double q, const PrizeLadder& ladder) {
    double total = 0;
    double reach = 1;  // q^r
    for (int r = 0; r < ladder.rounds; ++r) {
        total += reach * (1 - q) * ladder.prizes[r];
        reach *= q;
    }
    return total + reach * ladder.prizes[ladder.rounds];
}

}  // namespace serve
