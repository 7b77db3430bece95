#pragma once

#include <istream>
#include <string>
#include <vector>

namespace serve {

// Probability of holding serve with point-win probability p.
double game_prob(double p);

// Seven-point tiebreak, win by two. Player A serves the first point, then
// the serve changes every two points. p_return is A's chance of winning a
// point on B's serve.
double tiebreak_prob(double p_serve, double p_return);

// Set to six games, win by two, tiebreak at 6-6. A serves the first game.
// hold_b is the opponent's probability of holding serve.
double set_prob(double hold_a, double hold_b, double p_serve, double p_return);

// Probability of winning ceil(best_of/2) sets first. Throws InvalidBestOf.
double match_prob(double p_set, int best_of);

struct ScoreChain {
    double p_point_serve = 0;
    double q_point_opp_serve = 0;
    double p_game_hold = 0;
    double p_set = 0;
    double p_match = 0;
    int best_of = 5;
};

// Chain for a player with serve-point probability p_serve against an
// opponent on whose serve the player wins points with probability q_return.
ScoreChain score_chain(double p_serve, double q_return, int best_of = 5);

// prizes[r] is paid on exit after winning r matches; prizes[rounds] to the champion.
struct PrizeLadder {
    int rounds = 0;
    std::vector<double> prizes;
    std::string note;

    void validate() const;  // throws ConfigError
};

PrizeLadder load_prize_ladder(std::istream& in);
double expected_prize(double q_match, const PrizeLadder& ladder);

}  // namespace serve
