#pragma once

#include <ostream>
#include <string>

#include "serve/scoring.hpp"
#include "serve/structural.hpp"

namespace serve {

struct Reoptimized {
    double x1 = 0, x2 = 0;
    double point = 0;  // point-win probability at (x1, x2) on the fitted curve
};

// Strategy a player with the same skills but no process utility would pick.
// Throws NoInteriorSolution.
Reoptimized reoptimize_at_beta_one(const StructuralFit& fit);

// Deltas are counterfactual minus observed, in percentage points except
// delta_prize, which is in currency units.
struct CounterfactualReport {
    double delta = 0;  // fitted salience weight
    double delta_x1 = 0, delta_x2 = 0;
    double delta_point = 0, delta_game = 0, delta_set = 0, delta_match = 0;
    double delta_prize = 0;
    double baseline_point = 0;
    double baseline_match = 0;  // 0.5 by construction
    Reoptimized counterfactual;
};

// The opponent mirrors the player's observed serve, so the baseline match is
// a coin flip; the counterfactual only changes the player's own serve.
CounterfactualReport counterfactual_report(const StructuralFit& fit, const PrizeLadder& ladder,
                                           int best_of = 5);

void write_counterfactual_csv_header(std::ostream& out);
void write_counterfactual_csv_row(std::ostream& out, const std::string& id,
                                  const CounterfactualReport& r);

}  // namespace serve
