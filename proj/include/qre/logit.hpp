#pragma once

#include <optional>
#include <vector>

#include "qre/games.hpp"
#include "qre/strategy.hpp"

namespace qre {

// logit quantal response 1/(1+exp(-lambda d)); lambda >= 0
double logit_response(double lambda, double d);

enum class SolverInit { constant_half, ne_step_smoothed, user_supplied };

struct SolverConfig {
    int grid_size = 1001;      // uniform type grid, >= 3
    double damping = 0.5;      // in (0, 1]
    double tol = 1e-10;        // sup-norm fixed-point residual
    long max_iters = 100000;
    SolverInit init = SolverInit::constant_half;
    std::optional<Strategy> initial; // used when init == user_supplied
};

struct SolveResult {
    Strategy strategy;
    double residual;            // final sup-norm fixed-point residual
    long iterations;
    double indifferent_type;    // root of delta_u, exact for lambda = 0 too
};

// Damped Picard iteration sigma <- (1-damping) sigma + damping q(sigma) on a
// uniform grid; grid payoffs reuse the exact piecewise-linear integrals, so
// the solver and the verifier share one integral backend. Non-convergence
// throws ConvergenceError carrying the last residual. Large lambda should be
// reached by warm-starting along a sweep; cold starts may oscillate.
SolveResult solve_logit_qre(const GameSpec& game, double lambda, const SolverConfig& cfg = {});

struct SweepPoint {
    double lambda;
    Strategy strategy;
    double indifferent_type;
    double residual;
    long iterations;
};

// Solves an ascending list of lambdas, warm-starting each from the previous
// solution. Convergence errors propagate with the offending lambda attached.
std::vector<SweepPoint> lambda_sweep(const GameSpec& game, const std::vector<double>& lambdas,
                                     const SolverConfig& cfg = {});

} // namespace qre
