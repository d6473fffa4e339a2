#include "qre/games.hpp"

#include <algorithm>
#include <cmath>

#include "qre/errors.hpp"
#include "qre/rng.hpp"

namespace qre {

namespace {

// Generalized threshold result for nondecreasing sigma. `all_fail` covers
// strategies whose window mean never exceeds 1/2 over the admissible states
// (every attack fails), `all_succeed` the opposite.
struct ThresholdResult {
    enum class Kind { interior, all_fail, all_succeed } kind;
    double theta_star = 0.0;
};

bool nondecreasing(const Strategy& sigma) {
    auto ks = sigma.knots();
    for (std::size_t i = 0; i + 1 < ks.size(); ++i)
        if (ks[i + 1].p < ks[i].p) return false;
    return true;
}

ThresholdResult find_threshold(const GlobalGame& g, const Strategy& sigma) {
    const double lo_theta = g.eps;
    const double hi_theta = 1.0 - g.eps;
    const double w_hi = sigma.window_mean(hi_theta, g.eps);
    if (w_hi < 0.5) return {ThresholdResult::Kind::all_fail};
    const double w_lo = sigma.window_mean(lo_theta, g.eps);
    if (w_lo > 0.5) return {ThresholdResult::Kind::all_succeed};
    // theta* = sup{theta : W(theta) <= 1/2}; W is nondecreasing, so the
    // predicate is monotone and plain bisection applies.
    double lo = lo_theta, hi = hi_theta;
    if (w_hi == 0.5) return {ThresholdResult::Kind::interior, hi_theta};
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        if (sigma.window_mean(mid, g.eps) <= 0.5)
            lo = mid;
        else
            hi = mid;
    }
    return {ThresholdResult::Kind::interior, 0.5 * (lo + hi)};
}

double failure_prob_at(const GlobalGame& g, const ThresholdResult& th, double x) {
    switch (th.kind) {
        case ThresholdResult::Kind::all_fail: return 1.0;
        case ThresholdResult::Kind::all_succeed: return 0.0;
        case ThresholdResult::Kind::interior: break;
    }
    if (x <= th.theta_star - g.eps) return 1.0;
    if (x >= th.theta_star + g.eps) return 0.0;
    return (th.theta_star - x + g.eps) / (2.0 * g.eps);
}

void require_gg_monotone(const Strategy& sigma) {
    if (!nondecreasing(sigma))
        throw DomainError(
            "global game payoffs need a (weakly) increasing strategy; the raw "
            "double-integral failure probability for arbitrary strategies is not implemented");
}

// Mass of attackers at state theta, honoring the boundary signal structure
// (x ~ U[0,2theta] below eps, x ~ U[2theta-1,1] above 1-eps).
double attack_mass(const GlobalGame& g, const Strategy& sigma, double theta) {
    if (theta < g.eps) {
        if (theta <= 0.0) return sigma.eval(0.0);
        return sigma.conditional_mean(0.0, 2.0 * theta);
    }
    if (theta > 1.0 - g.eps) {
        if (theta >= 1.0) return sigma.eval(1.0);
        return sigma.conditional_mean(2.0 * theta - 1.0, 1.0);
    }
    return sigma.window_mean(theta, g.eps);
}

} // namespace

void validate(const GameSpec& game) {
    std::visit(
        [](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>) {
                if (!(g.B > 1.0 && g.B < 2.0))
                    throw DomainError("volunteer's dilemma needs B in (1,2)");
            } else if constexpr (std::is_same_v<T, GlobalGame>) {
                if (!(g.k > 0.0 && g.k < 1.0)) throw DomainError("global game needs k in (0,1)");
                if (!(g.c > 0.0 && g.c < 1.0)) throw DomainError("global game needs c in (0,1)");
                if (!(g.c + g.k > 0.0 && g.c + g.k < 1.0))
                    throw DomainError("global game needs c+k in (0,1)");
                if (!(g.eps > 0.0 && g.eps < std::min(g.k, 1.0 - g.k - g.c)))
                    throw DomainError("global game needs 0 < eps < min{k, 1-k-c}");
            } else {
                if (!(g.M > 0.0 && g.M <= 0.5))
                    throw DomainError("compromise game needs M in (0, 1/2]");
            }
        },
        game);
}

ActionConvention action_convention(const GameSpec& game) {
    return std::visit(
        [](const auto& g) -> ActionConvention {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>)
                return {"volunteer", EquilibriumShape::decreasing};
            else if constexpr (std::is_same_v<T, GlobalGame>)
                return {"attack", EquilibriumShape::increasing};
            else
                return {"flee", EquilibriumShape::decreasing};
        },
        game);
}

NeDescription ne_strategy(const GameSpec& game) {
    return std::visit(
        [](const auto& g) -> NeDescription {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>)
                return {NeDescription::Kind::threshold_below, g.B / (g.B + 1.0)};
            else if constexpr (std::is_same_v<T, GlobalGame>)
                return {NeDescription::Kind::threshold_above, (2.0 * g.k + g.c) / 2.0};
            else
                return {NeDescription::Kind::constant_zero, 0.0};
        },
        game);
}

double delta_u(const GameSpec& game, const Strategy& sigma, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("delta_u: type outside [0,1]");
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>) {
                return g.B * (1.0 - sigma.mean()) - t;
            } else if constexpr (std::is_same_v<T, GlobalGame>) {
                require_gg_monotone(sigma);
                auto th = find_threshold(g, sigma);
                return t - g.k - g.c * failure_prob_at(g, th, t);
            } else {
                return g.M * sigma.mean() - sigma.integral(0.0, t);
            }
        },
        game);
}

PayoffPair payoff_pair(const GameSpec& game, const Strategy& sigma, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("payoff_pair: type outside [0,1]");
    return std::visit(
        [&](const auto& g) -> PayoffPair {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>) {
                return {g.B - t, g.B * sigma.mean()};
            } else if constexpr (std::is_same_v<T, GlobalGame>) {
                require_gg_monotone(sigma);
                auto th = find_threshold(g, sigma);
                return {t - g.k - g.c * failure_prob_at(g, th, t), 0.0};
            } else {
                // flee: compromise against fleeing opponents plus the win
                // against weaker fighting opponents; fight: win iff stronger
                return {g.M * sigma.mean() + t - sigma.integral(0.0, t), t};
            }
        },
        game);
}

double threshold_state(const GlobalGame& game, const Strategy& sigma) {
    require_gg_monotone(sigma);
    auto th = find_threshold(game, sigma);
    if (th.kind != ThresholdResult::Kind::interior)
        throw DegenerateStrategyError(
            "no threshold state: the window mean never crosses 1/2 on the admissible range");
    return th.theta_star;
}

double failure_prob(const GlobalGame& game, const Strategy& sigma, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("failure_prob: signal outside [0,1]");
    require_gg_monotone(sigma);
    auto th = find_threshold(game, sigma);
    if (th.kind != ThresholdResult::Kind::interior)
        throw DegenerateStrategyError(
            "no threshold state: the window mean never crosses 1/2 on the admissible range");
    return failure_prob_at(game, th, x);
}

double indifferent_type_from_payoffs(const GameSpec& game, const Strategy& sigma) {
    return std::visit(
        [&](const auto& g) -> double {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>) {
                double root = g.B * (1.0 - sigma.mean());
                if (!(root >= 0.0 && root <= 1.0))
                    throw DegenerateStrategyError("indifferent type falls outside [0,1]");
                return root;
            } else if constexpr (std::is_same_v<T, GlobalGame>) {
                require_gg_monotone(sigma);
                auto th = find_threshold(g, sigma);
                // delta_u is piecewise linear in x; solve branch by branch
                if (th.kind == ThresholdResult::Kind::all_fail) {
                    double root = g.k + g.c;
                    if (root > 1.0) throw DegenerateStrategyError("indifferent type above 1");
                    return root;
                }
                if (th.kind == ThresholdResult::Kind::all_succeed) return g.k;
                double ts = th.theta_star;
                if (g.k + g.c <= ts - g.eps) return g.k + g.c;
                if (g.k >= ts + g.eps) return g.k;
                return (2.0 * g.eps * g.k + g.c * (ts + g.eps)) / (2.0 * g.eps + g.c);
            } else {
                const double target = g.M * sigma.mean();
                if (target <= 0.0)
                    throw DegenerateStrategyError("degenerate compromise strategy: zero mean");
                // integral(0,s) rises from 0 to mean >= target, so a root exists
                double lo = 0.0, hi = 1.0;
                while (hi - lo > 1e-14) {
                    double mid = 0.5 * (lo + hi);
                    if (sigma.integral(0.0, mid) < target)
                        lo = mid;
                    else
                        hi = mid;
                }
                return 0.5 * (lo + hi);
            }
        },
        game);
}

std::vector<double> delta_u_batch(const GameSpec& game, const Strategy& sigma,
                                  const std::vector<double>& types) {
    for (double t : types)
        if (!(t >= 0.0 && t <= 1.0)) throw DomainError("delta_u_batch: type outside [0,1]");
    std::vector<double> out(types.size());
    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>) {
                const double base = g.B * (1.0 - sigma.mean());
                for (std::size_t i = 0; i < types.size(); ++i) out[i] = base - types[i];
            } else if constexpr (std::is_same_v<T, GlobalGame>) {
                require_gg_monotone(sigma);
                auto th = find_threshold(g, sigma);
                for (std::size_t i = 0; i < types.size(); ++i)
                    out[i] = types[i] - g.k - g.c * failure_prob_at(g, th, types[i]);
            } else {
                const double base = g.M * sigma.mean();
                std::vector<std::size_t> order(types.size());
                for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
                std::sort(order.begin(), order.end(),
                          [&](std::size_t a, std::size_t b) { return types[a] < types[b]; });
                double prefix = 0.0;
                double prev = 0.0;
                for (std::size_t i : order) {
                    prefix += sigma.integral(prev, types[i]);
                    prev = types[i];
                    out[i] = base - prefix;
                }
            }
        },
        game);
    return out;
}

MonteCarloEstimate monte_carlo_delta_u(const GameSpec& game, const Strategy& sigma,
                                       double t, std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw DomainError("monte_carlo_delta_u: need at least one sample");
    CounterRng rng(seed);
    double mean = 0.0, m2 = 0.0;
    std::int64_t count = 0;
    auto push = [&](double x) {
        ++count;
        double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    };

    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>) {
                for (std::int64_t i = 0; i < n; ++i) {
                    double c_opp = rng.next_double();
                    bool volunteers = rng.bernoulli(sigma.eval(c_opp));
                    push((g.B - t) - (volunteers ? g.B : 0.0));
                }
            } else if constexpr (std::is_same_v<T, GlobalGame>) {
                const double lo = std::max(0.0, t - g.eps);
                const double hi = std::min(1.0, t + g.eps);
                for (std::int64_t i = 0; i < n; ++i) {
                    double theta = rng.uniform(lo, hi);
                    bool fails = attack_mass(g, sigma, theta) <= 0.5;
                    push(theta - g.k - (fails ? g.c : 0.0));
                }
            } else {
                for (std::int64_t i = 0; i < n; ++i) {
                    double s_opp = rng.next_double();
                    bool flees = rng.bernoulli(sigma.eval(s_opp));
                    double win = s_opp < t ? 1.0 : 0.0; // ties pay zero
                    double flee_payoff = flees ? g.M : win;
                    push(flee_payoff - win);
                }
            }
        },
        game);

    double se = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return {mean, se};
}

} // namespace qre
