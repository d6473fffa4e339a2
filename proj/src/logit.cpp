#include "qre/logit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qre/errors.hpp"

namespace qre {

double logit_response(double lambda, double d) {
    if (!(lambda >= 0.0)) throw DomainError("logit_response: lambda must be >= 0");
    const double z = lambda * d;
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

std::vector<double> initial_values(const GameSpec& game, const SolverConfig& cfg,
                                   const std::vector<double>& grid) {
    std::vector<double> v(grid.size(), 0.5);
    switch (cfg.init) {
        case SolverInit::constant_half:
            break;
        case SolverInit::ne_step_smoothed: {
            NeDescription ne = ne_strategy(game);
            const double width = 0.05;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                switch (ne.kind) {
                    case NeDescription::Kind::threshold_below:
                        v[i] = 1.0 / (1.0 + std::exp((grid[i] - ne.threshold) / width));
                        break;
                    case NeDescription::Kind::threshold_above:
                        v[i] = 1.0 / (1.0 + std::exp(-(grid[i] - ne.threshold) / width));
                        break;
                    case NeDescription::Kind::constant_zero:
                        v[i] = 1e-3;
                        break;
                }
            }
            break;
        }
        case SolverInit::user_supplied: {
            if (!cfg.initial)
                throw DomainError("solver: user_supplied init needs cfg.initial");
            for (std::size_t i = 0; i < grid.size(); ++i) v[i] = cfg.initial->eval(grid[i]);
            break;
        }
    }
    if (std::holds_alternative<GlobalGame>(game)) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            if (v[i + 1] < v[i])
                throw DomainError("solver: global-game seeds must be weakly increasing");
    }
    return v;
}

Strategy grid_strategy(const std::vector<double>& grid, const std::vector<double>& v) {
    std::vector<Knot> ks(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) ks[i] = {grid[i], v[i]};
    return Strategy(std::move(ks));
}

} // namespace

SolveResult solve_logit_qre(const GameSpec& game, double lambda, const SolverConfig& cfg) {
    validate(game);
    if (!(lambda >= 0.0)) throw DomainError("solver: lambda must be >= 0");
    if (cfg.grid_size < 3) throw DomainError("solver: grid_size must be >= 3");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0))
        throw DomainError("solver: damping must lie in (0,1]");
    if (!(cfg.tol > 0.0)) throw DomainError("solver: tol must be positive");

    std::vector<double> grid(cfg.grid_size);
    for (int i = 0; i < cfg.grid_size; ++i)
        grid[i] = static_cast<double>(i) / (cfg.grid_size - 1);
    grid.back() = 1.0;

    std::vector<double> v = initial_values(game, cfg, grid);
    std::vector<double> target(v.size());
    double residual = std::numeric_limits<double>::infinity();

    for (long iter = 1; iter <= cfg.max_iters; ++iter) {
        Strategy s = grid_strategy(grid, v);
        std::vector<double> d = delta_u_batch(game, s, grid);
        residual = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            target[i] = logit_response(lambda, d[i]);
            residual = std::max(residual, std::abs(v[i] - target[i]));
        }
        if (residual <= cfg.tol) {
            double t_tilde = indifferent_type_from_payoffs(game, s);
            return {std::move(s), residual, iter, t_tilde};
        }
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = (1.0 - cfg.damping) * v[i] + cfg.damping * target[i];
    }
    throw ConvergenceError("logit solve did not converge within " +
                               std::to_string(cfg.max_iters) + " iterations (lambda = " +
                               std::to_string(lambda) + ", residual = " +
                               std::to_string(residual) + ")",
                           residual);
}

std::vector<SweepPoint> lambda_sweep(const GameSpec& game, const std::vector<double>& lambdas,
                                     const SolverConfig& cfg) {
    if (lambdas.empty()) throw DomainError("lambda_sweep: empty lambda list");
    if (!std::is_sorted(lambdas.begin(), lambdas.end()))
        throw DomainError("lambda_sweep: lambdas must be sorted ascending");

    std::vector<SweepPoint> out;
    out.reserve(lambdas.size());
    SolverConfig step = cfg;
    for (double lam : lambdas) {
        SolveResult r = solve_logit_qre(game, lam, step);
        out.push_back({lam, r.strategy, r.indifferent_type, r.residual, r.iterations});
        step.init = SolverInit::user_supplied; // warm start the next lambda
        step.initial = r.strategy;
    }
    return out;
}

} // namespace qre
