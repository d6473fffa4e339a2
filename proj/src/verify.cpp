#include "qre/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qre/errors.hpp"

namespace qre {

namespace {

bool direction_matches(Monotonicity m, EquilibriumShape s) {
    return (s == EquilibriumShape::decreasing && m == Monotonicity::strictly_decreasing) ||
           (s == EquilibriumShape::increasing && m == Monotonicity::strictly_increasing);
}

} // namespace

VerificationReport verify_qre(const GameSpec& game, const Strategy& sigma, double tol) {
    validate(game);
    VerificationReport rep;
    rep.tolerance = tol;

    const ActionConvention conv = action_convention(game);
    const ShapeReport sh = sigma.shape(0.5);

    rep.shape_ok = direction_matches(sh.classification, conv.shape);
    if (!rep.shape_ok)
        rep.reasons.push_back(conv.shape == EquilibriumShape::decreasing
                                  ? "not strictly decreasing"
                                  : "not strictly increasing");

    rep.interior_ok = sh.interior;
    if (!rep.interior_ok) rep.reasons.push_back("not interior");

    if (sh.level_plateau) {
        rep.reasons.push_back("plateau at 1/2: no unique crossing");
    } else if (sh.crossing_multiplicity != 1) {
        rep.reasons.push_back("crossing multiplicity " +
                              std::to_string(sh.crossing_multiplicity) + " (need exactly 1)");
    } else {
        rep.crossing = sh.crossing_type;
    }

    if (rep.crossing) {
        try {
            rep.indifference_residual = std::abs(delta_u(game, sigma, *rep.crossing));
            if (*rep.indifference_residual > tol)
                rep.reasons.push_back("indifference residual " +
                                      std::to_string(*rep.indifference_residual) +
                                      " exceeds tolerance");
        } catch (const Error& e) {
            rep.reasons.push_back(std::string("payoffs undefined: ") + e.what());
        }
    }

    rep.verdict = rep.reasons.empty() ? Verdict::qre_consistent : Verdict::rejected;
    return rep;
}

double verify_symmetry(const GameSpec& game, const Strategy& sigma, int pairs) {
    if (pairs < 1) throw DomainError("verify_symmetry: need at least one level pair");
    const ShapeReport sh = sigma.shape(0.5);
    if (sh.classification == Monotonicity::neither || !sh.interior || !sh.crossing_type)
        throw DomainError("verify_symmetry: needs a strictly monotone interior strategy "
                          "with a unique crossing");

    const double top = sigma.max_value();
    const double bottom = sigma.min_value();
    double worst = 0.0;
    for (int i = 1; i <= pairs; ++i) {
        // level-uniform grid keeps both branches sampled at paired probabilities
        double p = 0.5 + (top - 0.5) * static_cast<double>(i) / (pairs + 1);
        double partner = 1.0 - p;
        if (partner < bottom) continue; // no type attains the mirrored level
        double t = sigma.inverse(p);
        double t_partner = sigma.inverse(partner);
        double v = std::abs(delta_u(game, sigma, t) + delta_u(game, sigma, t_partner));
        worst = std::max(worst, v);
    }
    return worst;
}

VerificationReport verify_sqre(const GameSpec& game, const Strategy& sigma, double tol) {
    VerificationReport rep = verify_qre(game, sigma, tol);
    if (rep.verdict == Verdict::rejected) return rep;
    try {
        rep.symmetry_max_violation = verify_symmetry(game, sigma);
    } catch (const Error& e) {
        rep.reasons.push_back(std::string("symmetry check failed: ") + e.what());
        return rep; // verdict stays qre_consistent: the QRE conditions held
    }
    if (*rep.symmetry_max_violation <= tol) {
        rep.verdict = Verdict::sqre_consistent;
    } else {
        rep.reasons.push_back("symmetry violation " +
                              std::to_string(*rep.symmetry_max_violation) +
                              " exceeds tolerance");
    }
    return rep;
}

double QuantalResponseCurve::eval(double d) const {
    if (d < points.front().d) {
        return 1.0 / (1.0 + std::exp(-(tail_lo_a + tail_lo_b * d)));
    }
    if (d > points.back().d) {
        return 1.0 / (1.0 + std::exp(-(tail_hi_a + tail_hi_b * d)));
    }
    auto it = std::lower_bound(points.begin(), points.end(), d,
                               [](const Point& pt, double v) { return pt.d < v; });
    if (it->d == d) return it->q;
    const Point& b = *it;
    const Point& a = *(it - 1);
    return a.q + (b.q - a.q) * (d - a.d) / (b.d - a.d);
}

QuantalResponseCurve recover_quantal_response(const GameSpec& game, const Strategy& sigma,
                                              int samples, double tol) {
    if (samples < 2) throw DomainError("recover_quantal_response: need at least 2 samples");
    VerificationReport rep = verify_qre(game, sigma, tol);
    if (rep.verdict == Verdict::rejected) {
        std::string why;
        for (const auto& r : rep.reasons) why += (why.empty() ? "" : "; ") + r;
        throw Error(ErrorCode::precondition_failed,
                    "recover_quantal_response: strategy is not a QRE (" + why + ")");
    }

    // type grid: uniform plus the strategy's knots and the crossing, so the
    // sampled curve is exact at every kink
    std::set<double> types;
    for (int i = 0; i < samples; ++i)
        types.insert(static_cast<double>(i) / (samples - 1));
    for (const Knot& k : sigma.knots()) types.insert(k.t);
    if (rep.crossing) types.insert(*rep.crossing);

    QuantalResponseCurve curve;
    curve.points.reserve(types.size());
    for (double t : types) curve.points.push_back({delta_u(game, sigma, t), sigma.eval(t)});
    std::sort(curve.points.begin(), curve.points.end(),
              [](const auto& a, const auto& b) { return a.d < b.d; });
    curve.points.erase(std::unique(curve.points.begin(), curve.points.end(),
                                   [](const auto& a, const auto& b) { return a.d == b.d; }),
                       curve.points.end());

    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        if (!(curve.points[i + 1].q >= curve.points[i].q))
            throw Error(ErrorCode::precondition_failed,
                        "recovered curve is not increasing in the payoff difference");
    }

    auto fit_tail = [](const QuantalResponseCurve::Point& p0,
                       const QuantalResponseCurve::Point& p1, double& a, double& b) {
        // slope of the chord at the boundary, mapped through the logit link
        double slope = (p1.q - p0.q) / (p1.d - p0.d);
        double q = p0.q;
        b = std::max(slope / (q * (1.0 - q)), 1e-12);
        a = std::log(q / (1.0 - q)) - b * p0.d;
    };
    fit_tail(curve.points.front(), curve.points[1], curve.tail_lo_a, curve.tail_lo_b);
    {
        const auto& pn = curve.points.back();
        const auto& pm = curve.points[curve.points.size() - 2];
        double slope = (pn.q - pm.q) / (pn.d - pm.d);
        curve.tail_hi_b = std::max(slope / (pn.q * (1.0 - pn.q)), 1e-12);
        curve.tail_hi_a = std::log(pn.q / (1.0 - pn.q)) - curve.tail_hi_b * pn.d;
    }
    return curve;
}

} // namespace qre
