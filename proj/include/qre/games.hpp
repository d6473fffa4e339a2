#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "qre/strategy.hpp"

namespace qre {

// Two players decide whether to volunteer for a costly task. If at least one
// volunteers, both receive B in (1,2); the volunteer pays their private cost
// c ~ U[0,1]. Action 1 = volunteer.
struct VolunteersDilemma {
    double B;
};

// A continuum of players decide whether to attack a regime. The attack
// succeeds iff strictly more than half the mass attacks. The state theta is
// U[0,1]; each player sees a signal x within eps of theta. Attacking pays
// theta - k on success and theta - k - c on failure; abstaining pays 0.
// Action 1 = attack.
struct GlobalGame {
    double k;
    double c;
    double eps;
};

// Two players with private strengths s ~ U[0,1] decide to fight or flee.
// If anyone fights, the stronger player gets 1 and the weaker 0; if both
// flee, each gets the compromise payoff M in (0, 1/2]. Action 1 = flee.
struct CompromiseGame {
    double M;
};

using GameSpec = std::variant<VolunteersDilemma, GlobalGame, CompromiseGame>;

// Throws DomainError when the parameters violate the game's admissibility
// constraints (B in (1,2); k,c in (0,1), c+k in (0,1), 0 < eps < min{k,1-k-c};
// M in (0,1/2]).
void validate(const GameSpec& game);

enum class EquilibriumShape { decreasing, increasing };

// Action-1 label and the monotonicity direction any QRE must have.
struct ActionConvention {
    std::string action1;
    EquilibriumShape shape;
};

ActionConvention action_convention(const GameSpec& game);

// Nash benchmark: a threshold rule or the constant-fight strategy.
struct NeDescription {
    enum class Kind { threshold_below, threshold_above, constant_zero } kind;
    double threshold = 0.0; // meaningful for the threshold kinds
};

NeDescription ne_strategy(const GameSpec& game);

// Expected payoff of action 1 minus action 0 for type t against symmetric
// opponent play sigma. For the global game sigma must be weakly increasing
// (the threshold-state form of the failure probability is only valid there);
// anything else throws DomainError.
double delta_u(const GameSpec& game, const Strategy& sigma, double t);

struct PayoffPair {
    double u1;
    double u0;
};

// Both action payoffs; u1 - u0 agrees with delta_u to rounding error.
PayoffPair payoff_pair(const GameSpec& game, const Strategy& sigma, double t);

// The state at which exactly half the population attacks:
// window_mean(sigma, theta, eps) = 1/2, located by bisection over the
// admissible range [eps, 1-eps] to absolute tolerance 1e-12. Requires a
// strictly increasing sigma whose window mean brackets 1/2.
double threshold_state(const GlobalGame& game, const Strategy& sigma);

// Subjective failure probability of Eq.-style piecewise form:
// 1 below theta*-eps, linear inside the window, 0 above theta*+eps.
double failure_prob(const GlobalGame& game, const Strategy& sigma, double x);

// The unique root of t |-> delta_u(game, sigma, t) in [0,1]. Defined for any
// sigma the game's delta_u accepts; the payoff difference is strictly
// monotone in t, so the root is unique when it exists.
double indifferent_type_from_payoffs(const GameSpec& game, const Strategy& sigma);

// delta_u evaluated at many types in one pass: the mean / threshold state /
// prefix integrals are computed once instead of per type.
std::vector<double> delta_u_batch(const GameSpec& game, const Strategy& sigma,
                                  const std::vector<double>& types);

struct MonteCarloEstimate {
    double estimate;
    double standard_error;
};

// Simulation oracle for delta_u, independent of the closed-form path: it
// draws opponents (or posterior states for the global game) and averages
// realized payoff differences. Deterministic given the seed.
MonteCarloEstimate monte_carlo_delta_u(const GameSpec& game, const Strategy& sigma,
                                       double t, std::int64_t n, std::uint64_t seed);

} // namespace qre
