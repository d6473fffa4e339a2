#pragma once

#include <limits>
#include <vector>

#include "qre/games.hpp"
#include "qre/strategy.hpp"

namespace qre {

// An open interval or a singleton of types.
struct TypeSet {
    enum class Kind { open_interval, singleton } kind;
    double lower;
    double upper; // == lower for singletons
    double measure;

    static TypeSet interval(double lo, double hi) {
        return {Kind::open_interval, lo, hi, hi - lo};
    }
    static TypeSet point(double v) { return {Kind::singleton, v, v, 0.0}; }

    bool contains(double t) const {
        return kind == Kind::open_interval ? (t > lower && t < upper) : t == lower;
    }
};

// Types supportable as the indifferent type in some QRE / SQRE.
TypeSet qre_indifferent_set(const GameSpec& game);
TypeSet sqre_indifferent_set(const GameSpec& game);

enum class EquilibriumModel { qre, sqre, ne };

// Attainable values of the mean volunteering probability in the volunteer's
// dilemma, per model.
TypeSet vd_mean_range(double B, EquilibriumModel model);

// Mean implied by an indifferent type via the indifference condition.
double vd_mean_from_indifferent_type(double B, double c_tilde);

// Geometry of constructed strategies: a steep linear ramp of half-width
// `ramp_width` through (t_tilde, 1/2) joins two gently tilted plateaus whose
// levels are solved in closed form so the game's moment constraint holds
// exactly. `level` is the free conditional-mean parameter of the supporting
// family (VD and GG: the plateau past the crossing; CG: the plateau before
// it); NaN picks the midpoint of the admissible range.
struct ConstructStyle {
    double level = std::numeric_limits<double>::quiet_NaN();
    double ramp_width = 1e-3;
    double tilt = 1e-3;
};

// A strictly monotone interior strategy with crossing t_tilde supporting a
// QRE of the game. Throws unsupportable_type when t_tilde is outside the
// admissible open set, constraint_infeasible when the style parameters can't
// satisfy the moment constraint.
Strategy construct_qre(const GameSpec& game, double t_tilde, ConstructStyle style = {});

// Pointwise-symmetric SQRE construction for the volunteer's dilemma and the
// global game (sigma(t_tilde - e) = 1 - sigma(t_tilde + e) on the mirrored
// span). The compromise game goes through the sequence construction below.
Strategy construct_sqre_symmetric(const GameSpec& game, double t_tilde,
                                  ConstructStyle style = {});

// Audit trail of the symmetric-extension procedure for the compromise game:
// level partition h_0..h_T, interval lengths delta_t, pre-images s_t, payoff
// increments D_t, levels L_t, horizontal steps eps_t, and the vertices of the
// piecewise-linear extension.
struct SymmetricConstructionTrace {
    std::vector<double> h;
    std::vector<double> delta;
    std::vector<double> s;
    std::vector<double> D;
    std::vector<double> L;
    std::vector<double> eps; // eps[0] unused; steps are eps[1..T]
    std::vector<double> x;
    std::vector<double> y;

    std::size_t T() const { return delta.size(); }
};

struct SymmetricExtension {
    std::vector<Knot> segment; // vertices (x_t, y_t), t = 0..T
    SymmetricConstructionTrace trace;
};

// Runs the extension procedure on sigma restricted to [0, s_tilde], given as
// knots with front t = 0, back p = 1/2 at t = s_tilde, strictly decreasing,
// sigma(0) < 1. Uses the uniform partition of [1/2, sigma(0)] into T levels.
// Unless allow_overrun is set, throws infeasible_extension when the
// construction exits the type space (x_T > 1).
SymmetricExtension build_symmetric_extension(const std::vector<Knot>& sigma_low,
                                             int T, bool allow_overrun = false);

// Tail drawn beyond the extension: a single segment to (1, end_value), or a
// two-segment path with a knee at x_T + knee_fraction * (1 - x_T) whose level
// is solved so the global mean constraint holds exactly.
struct CompromiseTail {
    double end_value = std::numeric_limits<double>::quiet_NaN(); // NaN: auto
    double knee_fraction = 0.5;
};

struct CompletedSqre {
    Strategy strategy;
    SymmetricConstructionTrace trace;
    double s_tilde;
    double sigma_bar; // equals s_tilde * sigma_L / M by construction
};

// Assembles sigma_low + extension + tail into a full SQRE candidate for the
// compromise game with payoff M, enforcing the indifference mean constraint
// exactly. Throws slack_infeasible when no admissible tail can absorb it.
CompletedSqre complete_sqre_compromise(const std::vector<Knot>& sigma_low, int T,
                                       double M, CompromiseTail tail = {});

struct CompromiseSymmetryReport {
    bool strict_pairing_ok;   // sigma(s~-e) > 1 - sigma(s~+e) for e in (0, s~]
    double worst_margin;      // min over the grid of the pairing slack
    double witness_eps;       // e attaining the worst margin
    bool tail_condition_applicable; // only when M < 1/2
    bool tail_condition_ok;   // sigma eventually exceeds 1 - sigma(0)
    double tail_threshold;    // S with sigma(s) > 1 - sigma(0) for s > S (when ok)
};

// Necessary conditions for SQRE in the compromise game (strict pairing above
// the antisymmetric mirror; the tail eventually dominating 1 - sigma(0)).
CompromiseSymmetryReport sqre_necessary_checks_compromise(const Strategy& sigma, double M);

} // namespace qre
