#include "qre/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qre/errors.hpp"

namespace qre {

namespace {

Monotonicity classify(const std::vector<Knot>& knots) {
    bool all_down = true;
    bool all_up = true;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (!(knots[i + 1].p < knots[i].p)) all_down = false;
        if (!(knots[i + 1].p > knots[i].p)) all_up = false;
    }
    if (all_down) return Monotonicity::strictly_decreasing;
    if (all_up) return Monotonicity::strictly_increasing;
    return Monotonicity::neither;
}

} // namespace

Strategy::Strategy(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.size() < 2) throw DomainError("strategy needs at least two knots");
    if (knots_.front().t != 0.0) throw DomainError("first knot must sit at t = 0");
    if (knots_.back().t != 1.0) throw DomainError("last knot must sit at t = 1");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        const auto& k = knots_[i];
        if (!(k.p >= 0.0 && k.p <= 1.0) || !std::isfinite(k.t))
            throw DomainError("knot probability outside [0,1] at t = " + std::to_string(k.t));
        if (i > 0 && !(k.t > knots_[i - 1].t))
            throw DomainError("knot types must be strictly increasing");
    }
    monotonicity_ = classify(knots_);
    interior_ = true;
    min_p_ = 1.0;
    max_p_ = 0.0;
    for (const auto& k : knots_) {
        if (!(k.p > 0.0 && k.p < 1.0)) interior_ = false;
        min_p_ = std::min(min_p_, k.p);
        max_p_ = std::max(max_p_, k.p);
    }
}

Strategy Strategy::constant(double p) { return Strategy({{0.0, p}, {1.0, p}}); }

std::size_t Strategy::segment_index(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                               [](double v, const Knot& k) { return v < k.t; });
    std::size_t i = static_cast<std::size_t>(it - knots_.begin());
    return i == 0 ? 0 : i - 1;
}

double Strategy::eval(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("eval: type outside [0,1]");
    std::size_t i = segment_index(t);
    if (knots_[i].t == t) return knots_[i].p;
    if (i + 1 >= knots_.size()) return knots_.back().p;
    const Knot& a = knots_[i];
    const Knot& b = knots_[i + 1];
    return a.p + (b.p - a.p) * (t - a.t) / (b.t - a.t);
}

double Strategy::integral(double a, double b) const {
    if (!(a >= 0.0 && b <= 1.0 && a <= b)) throw DomainError("integral: bad interval");
    if (a == b) return 0.0;
    std::size_t i = segment_index(a);
    double acc = 0.0;
    double lo = a;
    double v_lo = eval(a);
    while (lo < b) {
        double hi = (i + 1 < knots_.size()) ? knots_[i + 1].t : 1.0;
        double v_hi;
        if (hi >= b) {
            hi = b;
            v_hi = eval(b);
        } else {
            v_hi = knots_[i + 1].p;
        }
        acc += 0.5 * (v_lo + v_hi) * (hi - lo);
        lo = hi;
        v_lo = v_hi;
        ++i;
    }
    return acc;
}

double Strategy::conditional_mean(double a, double b) const {
    if (!(a >= 0.0 && b <= 1.0 && a < b))
        throw DomainError("conditional_mean: requires 0 <= a < b <= 1");
    return integral(a, b) / (b - a);
}

double Strategy::window_mean(double theta, double eps, bool clip) const {
    if (!(eps > 0.0)) throw DomainError("window_mean: eps must be positive");
    double lo = theta - eps;
    double hi = theta + eps;
    if (!clip) {
        if (lo < 0.0 || hi > 1.0)
            throw DomainError("window_mean: window exits [0,1] and clipping is disabled");
        return integral(lo, hi) / (2.0 * eps);
    }
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
    if (!(lo < hi)) throw DomainError("window_mean: clipped window is empty");
    return integral(lo, hi) / (hi - lo);
}

ShapeReport Strategy::shape(double level) const {
    ShapeReport rep;
    rep.level = level;
    rep.classification = monotonicity_;
    rep.interior = interior_;

    const std::size_t n = knots_.size();
    std::vector<bool> at_level(n);
    for (std::size_t i = 0; i < n; ++i) at_level[i] = (knots_[i].p == level);

    std::vector<double> points;
    for (std::size_t i = 0; i < n; ++i) {
        if (!at_level[i]) continue;
        bool left_flat = i > 0 && at_level[i - 1];
        bool right_flat = i + 1 < n && at_level[i + 1];
        if (left_flat || right_flat)
            rep.level_plateau = true;
        else
            points.push_back(knots_[i].t);
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double da = knots_[i].p - level;
        double db = knots_[i + 1].p - level;
        if (da * db < 0.0) {
            const Knot& a = knots_[i];
            const Knot& b = knots_[i + 1];
            points.push_back(a.t + (level - a.p) * (b.t - a.t) / (b.p - a.p));
        }
    }
    std::sort(points.begin(), points.end());
    rep.crossing_multiplicity = static_cast<int>(points.size());
    if (points.size() == 1 && !rep.level_plateau) rep.crossing_type = points.front();
    return rep;
}

double Strategy::inverse(double p) const {
    if (monotonicity_ == Monotonicity::neither)
        throw DomainError("inverse: strategy is not strictly monotone");
    if (!(p >= min_p_ && p <= max_p_))
        throw DomainError("inverse: probability outside the strategy's range");
    const bool dec = monotonicity_ == Monotonicity::strictly_decreasing;
    // binary search for the segment whose value range contains p
    std::size_t lo = 0, hi = knots_.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        bool go_left = dec ? (p > knots_[mid].p) : (p < knots_[mid].p);
        if (go_left)
            hi = mid;
        else
            lo = mid;
    }
    const Knot& a = knots_[lo];
    const Knot& b = knots_[hi];
    if (p == a.p) return a.t;
    if (p == b.p) return b.t;
    return a.t + (p - a.p) * (b.t - a.t) / (b.p - a.p);
}

} // namespace qre
