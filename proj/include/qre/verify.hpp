#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qre/games.hpp"
#include "qre/strategy.hpp"

namespace qre {

enum class Verdict { qre_consistent, sqre_consistent, rejected };

// Structured outcome of the equilibrium condition checks on a candidate
// strategy: strict monotonicity in the game's direction, interiority, a
// unique crossing of 1/2, indifference of the crossing type, and (for the
// symmetric variant) the paired-payoff condition.
struct VerificationReport {
    bool shape_ok = false;
    bool interior_ok = false;
    std::optional<double> crossing;
    std::optional<double> indifference_residual;     // |delta_u at the crossing|
    std::optional<double> symmetry_max_violation;    // only filled by verify_sqre
    Verdict verdict = Verdict::rejected;
    std::vector<std::string> reasons;                // empty when fully consistent
    double tolerance = 0.0;
};

inline constexpr double kConstructedTol = 1e-8; // constructions are exact up to rounding
inline constexpr double kEstimatedTol = 1e-3;   // user-supplied or estimated strategies

// Theorem-style QRE test: monotone in the expected direction, interior,
// unique crossing t~ of 1/2 with |delta_u(t~)| <= tol. All failures are
// verdicts, not exceptions; the residual is reported whenever computable.
VerificationReport verify_qre(const GameSpec& game, const Strategy& sigma,
                              double tol = kConstructedTol);

// Max over a level-uniform grid of paired probabilities (p, 1-p) of
// |delta_u(t) + delta_u(t')| where sigma(t) = p and sigma(t') = 1-p; levels
// whose partner is outside the value range are skipped.
double verify_symmetry(const GameSpec& game, const Strategy& sigma, int pairs = 64);

// QRE conditions plus the symmetry condition within tol.
VerificationReport verify_sqre(const GameSpec& game, const Strategy& sigma,
                               double tol = kConstructedTol);

// A recovered quantal response: sampled (payoff difference, choice
// probability) pairs with d strictly increasing, plus the canonical logistic
// tail continuation matching value and slope at each end of the observed
// range.
struct QuantalResponseCurve {
    struct Point {
        double d;
        double q;
    };
    std::vector<Point> points;
    std::string tail_rule = "logistic-value-slope";
    // logistic tails q = 1/(1+exp(-(a+b d))) fitted at each end
    double tail_lo_a = 0.0, tail_lo_b = 0.0;
    double tail_hi_a = 0.0, tail_hi_b = 0.0;

    double d_min() const { return points.front().d; }
    double d_max() const { return points.back().d; }

    // evaluation: linear interpolation inside the observed range, logistic
    // continuation outside
    double eval(double d) const;
};

// Samples the curve at `samples` types (plus the strategy's own knots and the
// crossing type, so interpolation is exact there). Requires sigma to pass
// verify_qre at `tol`.
QuantalResponseCurve recover_quantal_response(const GameSpec& game, const Strategy& sigma,
                                              int samples, double tol = kEstimatedTol);

} // namespace qre
