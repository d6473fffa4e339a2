#include "qre/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qre/errors.hpp"

namespace qre {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Raw polyline helpers: like Strategy but without the [0,1] invariants, used
// while solving for plateau levels (basis values may leave the unit box) and
// for sigma_low segments that do not span the whole type space.

double polyline_eval(const std::vector<Knot>& ks, double t) {
    if (t <= ks.front().t) return ks.front().p;
    if (t >= ks.back().t) return ks.back().p;
    auto it = std::upper_bound(ks.begin(), ks.end(), t,
                               [](double v, const Knot& k) { return v < k.t; });
    std::size_t i = static_cast<std::size_t>(it - ks.begin()) - 1;
    if (ks[i].t == t) return ks[i].p;
    const Knot& a = ks[i];
    const Knot& b = ks[i + 1];
    return a.p + (b.p - a.p) * (t - a.t) / (b.t - a.t);
}

double polyline_integral(const std::vector<Knot>& ks, double a, double b) {
    double acc = 0.0;
    double lo = a;
    double v_lo = polyline_eval(ks, a);
    std::size_t i = 0;
    while (i + 1 < ks.size() && ks[i + 1].t <= a) ++i;
    while (lo < b) {
        double hi = (i + 1 < ks.size()) ? ks[i + 1].t : b;
        double v_hi;
        if (hi >= b) {
            hi = b;
            v_hi = polyline_eval(ks, b);
        } else {
            v_hi = ks[i + 1].p;
        }
        acc += 0.5 * (v_lo + v_hi) * (hi - lo);
        lo = hi;
        v_lo = v_hi;
        ++i;
    }
    return acc;
}

// Inverse of a strictly decreasing polyline.
double polyline_inverse_decreasing(const std::vector<Knot>& ks, double p) {
    if (!(p >= ks.back().p && p <= ks.front().p))
        throw DomainError("inverse: value outside the polyline's range");
    std::size_t lo = 0, hi = ks.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (p > ks[mid].p)
            hi = mid;
        else
            lo = mid;
    }
    if (p == ks[lo].p) return ks[lo].t;
    if (p == ks[hi].p) return ks[hi].t;
    const Knot& a = ks[lo];
    const Knot& b = ks[hi];
    return a.t + (p - a.p) * (b.t - a.t) / (b.p - a.p);
}

struct DecreasingTargets {
    double t_tilde;
    double sigma_l; // conditional mean over [0, t~]
    double sigma_h; // conditional mean over [t~, 1]
};

// Two tilted plateaus joined by a steep ramp through (t~, 1/2), levels solved
// so both conditional means are exact.
Strategy build_decreasing_two_plateau(const DecreasingTargets& tg, const ConstructStyle& style) {
    const double t = tg.t_tilde;
    double w = std::min({style.ramp_width, t / 4.0, (1.0 - t) / 4.0});
    double d = style.tilt;
    for (int attempt = 0; attempt < 48; ++attempt, w *= 0.5, d *= 0.5) {
        double L = (t * tg.sigma_l - (0.5 - d) * w / 2.0) / (t - w / 2.0);
        double H = ((1.0 - t) * tg.sigma_h - (0.5 + d) * w / 2.0) / (1.0 - t - w / 2.0);
        if (L + d < 1.0 && L - d > 0.5 && H + d < 0.5 && H - d > 0.0) {
            return Strategy({{0.0, L + d},
                             {t - w, L - d},
                             {t, 0.5},
                             {t + w, H + d},
                             {1.0, H - d}});
        }
    }
    throw ConstraintError(ErrorCode::constraint_infeasible,
                          "conditional-mean targets leave no room for a strictly "
                          "decreasing interior strategy");
}

Strategy construct_qre_vd(const VolunteersDilemma& g, double t_tilde, ConstructStyle style) {
    TypeSet R = qre_indifferent_set(GameSpec{g});
    if (!R.contains(t_tilde))
        throw ConstraintError(ErrorCode::unsupportable_type,
                              "indifferent type outside the QRE set (" +
                                  std::to_string(R.lower) + ", " + std::to_string(R.upper) + ")");
    // sigma_L = -sigma_H (1-t)/t + (B-t)/(Bt); keep sigma_L inside (1/2, 1)
    const double B = g.B;
    const double t = t_tilde;
    double h_lo = std::max(0.0, (B - t - B * t) / (B * (1.0 - t)));
    double h_hi = std::min(0.5, (2.0 * B - 2.0 * t - B * t) / (2.0 * B * (1.0 - t)));
    double sigma_h = std::isnan(style.level) ? 0.5 * (h_lo + h_hi) : style.level;
    if (!(sigma_h > h_lo && sigma_h < h_hi))
        throw ConstraintError(ErrorCode::constraint_infeasible,
                              "sigma_H outside the admissible range (" + std::to_string(h_lo) +
                                  ", " + std::to_string(h_hi) + ")");
    double sigma_l = -sigma_h * (1.0 - t) / t + (B - t) / (B * t);
    return build_decreasing_two_plateau({t, sigma_l, sigma_h}, style);
}

Strategy construct_qre_cg(const CompromiseGame& g, double s_tilde, ConstructStyle style) {
    TypeSet R = qre_indifferent_set(GameSpec{g});
    if (!R.contains(s_tilde))
        throw ConstraintError(ErrorCode::unsupportable_type,
                              "indifferent type outside the QRE set (0, M)");
    // sigma_H = sigma_L * s(1-M)/(M(1-s)) must land in (0, 1/2)
    const double rho = s_tilde * (1.0 - g.M) / (g.M * (1.0 - s_tilde));
    double l_hi = std::min(1.0, 0.5 / rho);
    double sigma_l = std::isnan(style.level) ? 0.5 * (0.5 + l_hi) : style.level;
    if (!(sigma_l > 0.5 && sigma_l < l_hi))
        throw ConstraintError(ErrorCode::constraint_infeasible,
                              "sigma_L outside the admissible range (0.5, " +
                                  std::to_string(l_hi) + ")");
    double sigma_h = sigma_l * rho;
    return build_decreasing_two_plateau({s_tilde, sigma_l, sigma_h}, style);
}

Strategy construct_qre_gg(const GlobalGame& g, double x_tilde, ConstructStyle style) {
    TypeSet R = qre_indifferent_set(GameSpec{g});
    if (!R.contains(x_tilde))
        throw ConstraintError(ErrorCode::unsupportable_type,
                              "indifferent type outside the QRE set (k, k+c)");
    // threshold state pinned by the indifference condition
    const double theta = x_tilde * (2.0 * g.eps + g.c) / g.c -
                         g.eps * (2.0 * g.k + g.c) / g.c;
    if (theta < g.eps || theta > 1.0 - g.eps)
        throw ConstraintError(ErrorCode::constraint_infeasible,
                              "required threshold state " + std::to_string(theta) +
                                  " leaves the admissible window range [eps, 1-eps]");

    // step limit: alpha * L + (1-alpha) * H = 1/2 with alpha the share of the
    // window below x~; fix H and solve, so H must keep L positive
    const double alpha = (x_tilde - (theta - g.eps)) / (2.0 * g.eps);
    double h_hi = alpha < 0.5 ? std::min(1.0, 0.5 / (1.0 - alpha)) : 1.0;
    double sigma_h = std::isnan(style.level) ? 0.5 * (0.5 + h_hi) : style.level;
    if (!(sigma_h > 0.5 && sigma_h < h_hi))
        throw ConstraintError(ErrorCode::constraint_infeasible,
                              "sigma_H outside the admissible range (0.5, " +
                                  std::to_string(h_hi) + ")");

    const double x = x_tilde;
    double w = std::min({style.ramp_width, x / 4.0, (1.0 - x) / 4.0});
    double d = style.tilt;
    for (int attempt = 0; attempt < 48; ++attempt, w *= 0.5, d *= 0.5) {
        auto make = [&](double L, double H) {
            return std::vector<Knot>{
                {0.0, L - d}, {x - w, L + d}, {x, 0.5}, {x + w, H - d}, {1.0, H + d}};
        };
        auto wmean = [&](double L, double H) {
            return polyline_integral(make(L, H), theta - g.eps, theta + g.eps) / (2.0 * g.eps);
        };
        const double gamma = wmean(0.0, 0.0);
        const double ca = wmean(1.0, 0.0) - gamma;
        const double cb = wmean(0.0, 1.0) - gamma;
        const double L = (0.5 - gamma - cb * sigma_h) / ca;
        if (L - d > 0.0 && L + d < 0.5 && sigma_h - d > 0.5 && sigma_h + d < 1.0)
            return Strategy(make(L, sigma_h));
    }
    throw ConstraintError(ErrorCode::constraint_infeasible,
                          "window-mean constraint leaves no room for a strictly "
                          "increasing interior strategy");
}

Strategy construct_sqre_vd(const VolunteersDilemma& g, double t_tilde, ConstructStyle style) {
    const double B = g.B;
    const double lo = B / (B + 1.0);
    const double hi = 0.5 * B;
    if (t_tilde < lo || t_tilde > hi)
        throw ConstraintError(ErrorCode::unsupportable_type,
                              "indifferent type outside the SQRE set (" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + ")");
    const double t = t_tilde;
    const double sigma1 = t * (B - 1.0) / (B * (2.0 * t - 1.0));
    if (!(sigma1 > 0.5 && sigma1 < 1.0))
        throw ConstraintError(ErrorCode::constraint_infeasible,
                              "required lower-interval mean " + std::to_string(sigma1) +
                                  " is not interior");

    // levels on the mirrored right branch; the left free part must stay above
    // the mirror's peak 1-q2, so q2 > 1-sigma1
    double m_lo = 1.0 - sigma1;
    double m = std::isnan(style.level) ? 0.5 * (m_lo + 0.5) : style.level;
    if (!(m > m_lo && m < 0.5))
        throw ConstraintError(ErrorCode::constraint_infeasible,
                              "mirror level outside the admissible range (" +
                                  std::to_string(m_lo) + ", 0.5)");

    const double left_end = 2.0 * t - 1.0;
    double w = std::min({style.ramp_width, (1.0 - t) / 4.0});
    double d = std::min({style.tilt, (0.5 - m) / 4.0, (m - m_lo) / 4.0});
    double w2 = std::min(style.ramp_width, left_end / 4.0);
    double d2 = style.tilt;
    for (int attempt = 0; attempt < 48; ++attempt, w *= 0.5, d *= 0.5, w2 *= 0.5, d2 *= 0.5) {
        double q1 = m + d;
        double q2 = m - d;
        if (!(q1 < 0.5 && q2 > m_lo)) continue;
        // mean over [0, 2t-1] must equal sigma1 exactly
        double Z = (sigma1 * left_end - (1.0 - q2 - d2) * w2 / 2.0) / (left_end - w2 / 2.0);
        if (!(Z + d2 < 1.0 && Z - d2 > 1.0 - q2)) continue;
        return Strategy({{0.0, Z + d2},
                         {left_end - w2, Z - d2},
                         {left_end, 1.0 - q2},
                         {t - w, 1.0 - q1},
                         {t, 0.5},
                         {t + w, q1},
                         {1.0, q2}});
    }
    throw ConstraintError(ErrorCode::constraint_infeasible,
                          "symmetric construction leaves no room for a strictly "
                          "decreasing interior strategy");
}

Strategy construct_sqre_gg(const GlobalGame& g, double x_tilde, ConstructStyle style) {
    const double x_star = (2.0 * g.k + g.c) / 2.0;
    if (std::abs(x_tilde - x_star) > 1e-12)
        throw ConstraintError(ErrorCode::unsupportable_type,
                              "the SQRE set is the singleton {" + std::to_string(x_star) + "}");
    const double x = x_star;
    const double r = std::min(x, 1.0 - x);
    double u2 = std::isnan(style.level) ? 0.85 : style.level;
    if (!(u2 > 0.5 && u2 < 1.0))
        throw ConstraintError(ErrorCode::constraint_infeasible,
                              "span-edge level must lie in (0.5, 1)");
    double u1 = 0.5 * (0.5 + u2);
    double w = std::min({style.ramp_width, r / 4.0});

    std::vector<Knot> ks;
    if (x - r > 0.0) ks.push_back({0.0, (1.0 - u2) / 2.0});
    ks.push_back({x - r, 1.0 - u2});
    ks.push_back({x - w, 1.0 - u1});
    ks.push_back({x, 0.5});
    ks.push_back({x + w, u1});
    ks.push_back({x + r, u2});
    if (x + r < 1.0) ks.push_back({1.0, (1.0 + u2) / 2.0});
    // collapse duplicated endpoints when the span touches 0 or 1
    if (ks.front().t != 0.0) ks.insert(ks.begin(), Knot{0.0, ks.front().p});
    if (ks.back().t != 1.0) ks.push_back({1.0, ks.back().p});
    return Strategy(std::move(ks));
}

} // namespace

TypeSet qre_indifferent_set(const GameSpec& game) {
    validate(game);
    return std::visit(
        [](const auto& g) -> TypeSet {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>)
                return TypeSet::interval(g.B / (g.B + 2.0), 2.0 * g.B / (g.B + 2.0));
            else if constexpr (std::is_same_v<T, GlobalGame>)
                return TypeSet::interval(g.k, g.k + g.c);
            else
                return TypeSet::interval(0.0, g.M);
        },
        game);
}

TypeSet sqre_indifferent_set(const GameSpec& game) {
    validate(game);
    return std::visit(
        [](const auto& g) -> TypeSet {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>)
                return TypeSet::interval(g.B / (g.B + 1.0), 0.5 * g.B);
            else if constexpr (std::is_same_v<T, GlobalGame>)
                return TypeSet::point((2.0 * g.k + g.c) / 2.0);
            else
                return TypeSet::interval(0.0, g.M);
        },
        game);
}

TypeSet vd_mean_range(double B, EquilibriumModel model) {
    validate(GameSpec{VolunteersDilemma{B}});
    switch (model) {
        case EquilibriumModel::qre:
            return TypeSet::interval(B / (B + 2.0), (B + 1.0) / (B + 2.0));
        case EquilibriumModel::sqre:
            return TypeSet::interval(0.5, B / (B + 1.0));
        case EquilibriumModel::ne:
            return TypeSet::point(B / (B + 1.0));
    }
    throw DomainError("unknown model");
}

double vd_mean_from_indifferent_type(double B, double c_tilde) {
    validate(GameSpec{VolunteersDilemma{B}});
    if (!(c_tilde >= 0.0 && c_tilde <= 1.0)) throw DomainError("indifferent type outside [0,1]");
    return 1.0 - c_tilde / B;
}

Strategy construct_qre(const GameSpec& game, double t_tilde, ConstructStyle style) {
    validate(game);
    return std::visit(
        [&](const auto& g) -> Strategy {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>)
                return construct_qre_vd(g, t_tilde, style);
            else if constexpr (std::is_same_v<T, GlobalGame>)
                return construct_qre_gg(g, t_tilde, style);
            else
                return construct_qre_cg(g, t_tilde, style);
        },
        game);
}

Strategy construct_sqre_symmetric(const GameSpec& game, double t_tilde, ConstructStyle style) {
    validate(game);
    return std::visit(
        [&](const auto& g) -> Strategy {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>)
                return construct_sqre_vd(g, t_tilde, style);
            else if constexpr (std::is_same_v<T, GlobalGame>)
                return construct_sqre_gg(g, t_tilde, style);
            else
                throw DomainError(
                    "compromise-game SQRE goes through complete_sqre_compromise");
        },
        game);
}

SymmetricExtension build_symmetric_extension(const std::vector<Knot>& sigma_low, int T,
                                             bool allow_overrun) {
    if (T < 1) throw DomainError("partition size must be at least 1");
    if (sigma_low.size() < 2 || sigma_low.front().t != 0.0)
        throw DomainError("sigma_low must start at t = 0");
    const double s_tilde = sigma_low.back().t;
    if (!(s_tilde > 0.0 && s_tilde < 1.0))
        throw DomainError("sigma_low must end at an interior indifferent type");
    if (std::abs(sigma_low.back().p - 0.5) > 1e-12)
        throw DomainError("sigma_low must reach exactly 1/2 at its right end");
    const double p0 = sigma_low.front().p;
    if (!(p0 < 1.0)) throw DomainError("sigma_low(0) must be below 1");
    for (std::size_t i = 0; i + 1 < sigma_low.size(); ++i) {
        if (!(sigma_low[i + 1].t > sigma_low[i].t))
            throw DomainError("sigma_low knots must have strictly increasing types");
        if (!(sigma_low[i + 1].p < sigma_low[i].p))
            throw DomainError("sigma_low must be strictly decreasing");
    }

    SymmetricConstructionTrace tr;
    const int n = T;
    tr.h.resize(n + 1);
    for (int i = 0; i <= n; ++i)
        tr.h[i] = 0.5 + (p0 - 0.5) * static_cast<double>(i) / static_cast<double>(n);
    tr.h[0] = 0.5;
    tr.h[n] = p0;

    tr.delta.resize(n);
    tr.s.resize(n + 1);
    tr.D.resize(n);
    tr.L.resize(n + 1);
    tr.eps.assign(n + 1, 0.0);
    tr.x.resize(n + 1);
    tr.y.resize(n + 1);

    for (int i = 0; i < n; ++i) tr.delta[i] = tr.h[i + 1] - tr.h[i];
    for (int i = 0; i <= n; ++i) tr.s[i] = polyline_inverse_decreasing(sigma_low, tr.h[i]);
    for (int i = 0; i < n; ++i) tr.D[i] = polyline_integral(sigma_low, tr.s[i + 1], tr.s[i]);
    tr.L[0] = 0.5;
    for (int i = 1; i <= n; ++i) tr.L[i] = tr.L[i - 1] - tr.delta[i - 1];
    for (int i = 1; i <= n; ++i) tr.eps[i] = tr.D[i - 1] / (0.5 * tr.L[i - 1] + 0.5 * tr.L[i]);

    tr.x[0] = s_tilde;
    tr.y[0] = 0.5;
    for (int i = 1; i <= n; ++i) {
        tr.x[i] = tr.x[i - 1] + tr.eps[i];
        tr.y[i] = tr.y[i - 1] - tr.delta[i - 1];
    }

    if (!allow_overrun && tr.x[n] > 1.0)
        throw ConstraintError(ErrorCode::infeasible_extension,
                              "symmetric extension exits the type space (x_T = " +
                                  std::to_string(tr.x[n]) + ")");

    SymmetricExtension out;
    out.trace = std::move(tr);
    out.segment.reserve(n + 1);
    for (int i = 0; i <= n; ++i) out.segment.push_back({out.trace.x[i], out.trace.y[i]});
    return out;
}

CompletedSqre complete_sqre_compromise(const std::vector<Knot>& sigma_low, int T, double M,
                                       CompromiseTail tail) {
    validate(GameSpec{CompromiseGame{M}});
    SymmetricExtension ext = build_symmetric_extension(sigma_low, T, false);
    const double s_tilde = sigma_low.back().t;
    const double x_T = ext.segment.back().t;
    const double y_T = ext.segment.back().p;

    const double I_low = polyline_integral(sigma_low, 0.0, s_tilde);
    const double I_mid = polyline_integral(ext.segment, s_tilde, x_T);
    const double sigma_bar = I_low / M; // indifference: M sigma_bar = s~ sigma_L(s~)
    const double I_tail = sigma_bar - I_low - I_mid;

    std::vector<Knot> tail_knots;
    const double span = 1.0 - x_T;
    if (span <= 1e-12) {
        if (std::abs(I_tail) > 1e-12)
            throw ConstraintError(ErrorCode::slack_infeasible,
                                  "extension reaches t = 1 with mean slack left over");
    } else {
        if (!(I_tail > 0.0 && I_tail < y_T * span))
            throw ConstraintError(
                ErrorCode::slack_infeasible,
                "tail needs integral " + std::to_string(I_tail) + " on [" +
                    std::to_string(x_T) + ", 1] but the admissible range is (0, " +
                    std::to_string(y_T * span) + ")");
        double v_end = std::isnan(tail.end_value) ? y_T * 1e-2 : tail.end_value;
        if (!(v_end > 0.0 && v_end < y_T))
            throw ConstraintError(ErrorCode::slack_infeasible,
                                  "tail end value must lie in (0, y_T)");
        // straight tail first, then knee placements from gentle to extreme
        double v_line = 2.0 * I_tail / span - y_T;
        if (v_line > 0.0 && v_line < y_T) {
            tail_knots = {{1.0, v_line}};
        } else {
            const double fracs[] = {tail.knee_fraction, 0.9, 0.1, 0.99, 0.01};
            for (double f : fracs) {
                double a = f * span;
                double b = span - a;
                if (a <= 0.0 || b <= 0.0) continue;
                double z = (2.0 * I_tail - y_T * a - v_end * b) / (a + b);
                if (z > v_end && z < y_T) {
                    tail_knots = {{x_T + a, z}, {1.0, v_end}};
                    break;
                }
            }
            if (tail_knots.empty())
                throw ConstraintError(ErrorCode::slack_infeasible,
                                      "no admissible tail meets the mean constraint");
        }
    }

    std::vector<Knot> full(sigma_low);
    full.insert(full.end(), ext.segment.begin() + 1, ext.segment.end());
    if (span <= 1e-12)
        full.back().t = 1.0;
    else
        full.insert(full.end(), tail_knots.begin(), tail_knots.end());

    CompletedSqre out{Strategy(std::move(full)), std::move(ext.trace), s_tilde, sigma_bar};
    return out;
}

CompromiseSymmetryReport sqre_necessary_checks_compromise(const Strategy& sigma, double M) {
    validate(GameSpec{CompromiseGame{M}});
    ShapeReport sh = sigma.shape(0.5);
    if (sh.classification != Monotonicity::strictly_decreasing || !sh.crossing_type)
        throw DomainError("necessary checks need a strictly decreasing strategy "
                          "with a unique crossing of 1/2");
    const double s_tilde = *sh.crossing_type;

    CompromiseSymmetryReport rep{};
    rep.strict_pairing_ok = true;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    rep.witness_eps = 0.0;
    const int grid = 512;
    for (int i = 1; i <= grid; ++i) {
        double e = s_tilde * static_cast<double>(i) / grid;
        double margin = sigma.eval(s_tilde - e) - (1.0 - sigma.eval(s_tilde + e));
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.witness_eps = e;
        }
    }
    rep.strict_pairing_ok = rep.worst_margin > 1e-12;

    rep.tail_condition_applicable = M < 0.5;
    rep.tail_condition_ok = true;
    rep.tail_threshold = s_tilde;
    if (rep.tail_condition_applicable) {
        const double floor = 1.0 - sigma.eval(0.0);
        rep.tail_condition_ok = sigma.eval(1.0) > floor;
        if (!rep.tail_condition_ok)
            rep.tail_threshold = floor <= sigma.max_value() ? sigma.inverse(floor) : 1.0;
    }
    return rep;
}

} // namespace qre
