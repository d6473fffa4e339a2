#pragma once

#include <optional>
#include <span>
#include <vector>

namespace qre {

struct Knot {
    double t; // type in [0,1]
    double p; // choice probability in [0,1]
};

enum class Monotonicity {
    strictly_decreasing,
    strictly_increasing,
    neither,
};

// Outcome of classifying a strategy against a probability level (1/2 by
// default): monotonicity over knot values, interiority, and how the level set
// {t : sigma(t) = level} looks.
struct ShapeReport {
    Monotonicity classification = Monotonicity::neither;
    bool interior = false;
    std::optional<double> crossing_type; // set iff exactly one isolated crossing and no plateau
    int crossing_multiplicity = 0;       // number of isolated level-attaining points
    bool level_plateau = false;          // sigma equals the level on a segment of positive length
    double level = 0.5;
};

// A strategy sigma: [0,1] -> [0,1] stored as a continuous piecewise-linear
// function over strictly increasing knots with t0 = 0 and tN = 1. All
// integrals are closed-form trapezoids, so the equilibrium identities the
// rest of the library relies on hold to rounding error, not quadrature error.
// Immutable after construction; every operation is const and thread-safe.
class Strategy {
public:
    explicit Strategy(std::vector<Knot> knots);

    static Strategy constant(double p);

    // Linear interpolation between bracketing knots; exact at knot types.
    double eval(double t) const;
    double operator()(double t) const { return eval(t); }

    // Exact integral of sigma over [a,b], 0 <= a <= b <= 1.
    double integral(double a, double b) const;

    // Mean over the whole type space.
    double mean() const { return integral(0.0, 1.0); }

    // (1/(b-a)) * integral over [a,b]; requires a < b.
    double conditional_mean(double a, double b) const;

    // Average over [theta-eps, theta+eps]. With clip=false the window must
    // stay inside [0,1]; with clip=true it is intersected with [0,1] and
    // normalized by the clipped length.
    double window_mean(double theta, double eps, bool clip = false) const;

    ShapeReport shape(double level = 0.5) const;

    // Unique t with eval(t) = p; requires strict monotonicity and p within
    // the value range. Exact on the containing segment.
    double inverse(double p) const;

    bool interior() const { return interior_; }
    Monotonicity monotonicity() const { return monotonicity_; }

    std::span<const Knot> knots() const { return knots_; }
    std::size_t size() const { return knots_.size(); }

    double min_value() const { return min_p_; }
    double max_value() const { return max_p_; }

private:
    std::vector<Knot> knots_;
    Monotonicity monotonicity_;
    bool interior_;
    double min_p_;
    double max_p_;

    // index of the last knot with knot.t <= t
    std::size_t segment_index(double t) const;
};

} // namespace qre
