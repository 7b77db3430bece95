#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <string>

#include "serve/estimation.hpp"

namespace serve {

enum class Endpoint { X1Star, X2Star };

// A(x0) = p(x0, x2*) - p(x1*, x1*) split into its multi-shot part B and
// its one-shot part C, using only the observed endpoint probabilities.
struct EndpointABC {
    Endpoint at = Endpoint::X1Star;
    double A = 0, B = 0, C = 0;
};

enum class SignConclusion { PositiveLowerBound, LikelyPositive, Inconclusive };
const char* to_string(SignConclusion c);

struct BoundsResult {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    EndpointABC abc_x1, abc_x2;
    bool lemma1_b = false;  // B(x1*) > A(x1*) > 0
    bool lemma1_c = false;  // B(x2*) > 0 > A(x2*)
    bool lemma1_ok() const { return lemma1_b && lemma1_c; }
    SignConclusion sign_conclusion = SignConclusion::Inconclusive;
};

// Triangle of feasible one-shot curves through the observed points, and the
// part of it the sufficient condition rules out.
struct TriangleGeometry {
    double b12 = 0, x12 = 0, x14 = 0, x24 = 0;
    double A1 = 0, A2 = 0;
    std::optional<double> ratio;  // A2/A1, empty when A1 == 0
};

constexpr double kDefaultRatioThreshold = 0.114;

EndpointABC endpoint_abc(const ServeStats& s, Endpoint at);
BoundsResult optimality_bounds(const ServeStats& s);

// Throws ConditionBFailed unless x1 f1 > x2 f2.
TriangleGeometry lemma2_geometry(const ServeStats& s);

SignConclusion classify_player(const ServeStats& s, double ratio_threshold = kDefaultRatioThreshold);

void write_bounds_csv_header(std::ostream& out);
void write_bounds_csv_row(std::ostream& out, const std::string& id, const ServeStats& s,
                          double ratio_threshold = kDefaultRatioThreshold);

}  // namespace serve
