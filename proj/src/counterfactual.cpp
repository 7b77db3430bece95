#include "serve/counterfactual.hpp"

#include <cmath>
#include <iomanip>

namespace serve {

Reoptimized reoptimize_at_beta_one(const StructuralFit& fit) {
    const auto& sk = fit.skills;
    if (!(sk.tau > 0)) throw NoInteriorSolution("aggregate slope tau must be positive");
    const Strategy st = optimal_strategy(sk, 1.0);
    Reoptimized r;
    r.x1 = st.x1;
    r.x2 = st.x2;
    r.point = st.x1 * sk.y(st.x1) + (1 - st.x1) * st.x2 * sk.y(st.x2);
    return r;
}

CounterfactualReport counterfactual_report(const StructuralFit& fit, const PrizeLadder& ladder,
                                           int best_of) {
    const auto& s = fit.stats;
    CounterfactualReport r;
    r.delta = fit.prefs.delta;
    r.counterfactual = reoptimize_at_beta_one(fit);

    const double p_obs = s.point_prob();
    const double q_ret = 1 - p_obs;  // opponent serves as well as the player did
    r.baseline_point = p_obs;
    const ScoreChain base = score_chain(p_obs, q_ret, best_of);
    const ScoreChain cf = score_chain(r.counterfactual.point, q_ret, best_of);
    r.baseline_match = base.p_match;

    r.delta_x1 = 100 * (r.counterfactual.x1 - s.x1);
    r.delta_x2 = 100 * (r.counterfactual.x2 - s.x2);
    r.delta_point = 100 * (cf.p_point_serve - base.p_point_serve);
    r.delta_game = 100 * (cf.p_game_hold - base.p_game_hold);
    r.delta_set = 100 * (cf.p_set - base.p_set);
    r.delta_match = 100 * (cf.p_match - base.p_match);
    r.delta_prize = expected_prize(0.5 + r.delta_match / 100, ladder) - expected_prize(0.5, ladder);
    return r;
}

void write_counterfactual_csv_header(std::ostream& out) {
    out << "player_id,delta,dx1,dx2,dpt,dgm,dset,dmat,dprize\n";
}

void write_counterfactual_csv_row(std::ostream& out, const std::string& id,
                                  const CounterfactualReport& r) {
    const auto old = out.precision(15);
    out << id << ',' << r.delta << ',' << r.delta_x1 << ',' << r.delta_x2 << ',' << r.delta_point
        << ',' << r.delta_game << ',' << r.delta_set << ',' << r.delta_match << ',' << r.delta_prize
        << '\n';
    out.precision(old);
}

}  // namespace serve
