#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qre/games.hpp"
#include "qre/strategy.hpp"

namespace qre {

struct DataRow {
    double type;            // in [0,1]
    int action;             // 0 or 1 (action 1 per the game's convention)
    std::string subject;    // optional
    std::optional<long> round;
    std::string treatment;  // optional label, e.g. the M value
};

// Observed (type, action) rows plus a sorted index so kernel windows and
// split means are prefix-sum lookups. Rows are immutable after construction.
class Dataset {
public:
    explicit Dataset(std::vector<DataRow> rows);

    std::size_t size() const { return rows_.size(); }
    const std::vector<DataRow>& rows() const { return rows_; }

    // ascending types with aligned actions (bootstrap weights index into these)
    const std::vector<double>& sorted_types() const { return sorted_types_; }
    const std::vector<double>& sorted_actions() const { return sorted_actions_; }
    // rows of each subject as positions into the sorted arrays
    const std::vector<std::vector<std::uint32_t>>& subject_positions() const {
        return subject_positions_;
    }
    bool has_subjects() const { return !subject_positions_.empty(); }

private:
    std::vector<DataRow> rows_;
    std::vector<double> sorted_types_;
    std::vector<double> sorted_actions_;
    std::vector<std::vector<std::uint32_t>> subject_positions_;
};

// CSV with a header naming at least `type` and `action`; optional `subject`,
// `round`, `treatment` columns. Parse failures cite the offending line.
Dataset load_csv(const std::string& path);
Dataset load_csv_stream(std::istream& in, const std::string& origin = "<stream>");
void write_csv(const Dataset& data, std::ostream& out);

// h = n^(-1/5) * sample standard deviation of the binary actions.
// Degenerate (all-equal) actions throw, as does n < 2.
double silverman_bandwidth(const Dataset& data);

struct KernelEstimate {
    double h = 0.0;
    std::vector<double> s;          // uniform evaluation grid on [0,1]
    std::vector<double> sigma_hat;  // NaN where the window is empty
    std::vector<long> counts;       // observations per window

    bool defined(std::size_t i) const { return counts[i] > 0; }
};

// Uniform-kernel estimate: sigma_hat(s) is the mean action among rows with
// |type - s| <= h. Empty windows are flagged, never interpolated.
KernelEstimate kernel_estimate(const Dataset& data, double h, int grid);

// First down-crossing of 1/2 by linear interpolation between adjacent
// defined grid points. No crossing throws (itself evidence against the
// interior-crossing requirement).
double estimate_indifferent_type(const KernelEstimate& est);

// beta = E[a | type >= s~](1 - s~) - E[a | type <= s~] s~ (1-M)/M,
// with both conditional means taken as raw action means.
double beta_statistic(const Dataset& data, double M, double s_tilde);

struct BootstrapOptions {
    int grid = 201;                  // kernel grid used in each replicate
    bool cluster_by_subject = false; // resample subjects instead of rows
    bool fix_s_tilde = false;        // reuse the full-sample crossing estimate
    int jobs = 1;                    // parallel replicate workers
};

struct TestResult {
    double s_tilde_hat = 0.0;
    double beta_hat = 0.0;
    double ci95_lo = 0.0, ci95_hi = 0.0;
    double ci99_lo = 0.0, ci99_hi = 0.0;
    long replicates = 0;
    long failed_replicates = 0;
    std::uint64_t seed = 0;
    bool reject_95 = false; // 0 outside the 95% interval
    bool reject_99 = false;
    double bandwidth = 0.0; // full-sample h
    int grid = 0;
    bool cluster_by_subject = false;
    bool s_tilde_fixed = false;
};

// Percentile bootstrap for beta: each replicate resamples (rows by default,
// subjects in cluster mode), re-estimates h, the kernel fit, s~ and beta.
// Deterministic given the seed; replicates failing to produce a crossing are
// counted, and more than 10% failures aborts with unstable_estimate.
TestResult bootstrap_ci(const Dataset& data, double M, long reps, std::uint64_t seed,
                        const BootstrapOptions& opts = {});

struct MonotonicityReport {
    long violations = 0;        // adjacent-grid increases (decreasing convention)
    double max_increase = 0.0;  // largest adjacent increase
    double isotonic_max_distance = 0.0; // sup distance to the decreasing projection
    double isotonic_rms_distance = 0.0;
};

// Descriptive only; the paper-style convention is a decreasing curve.
MonotonicityReport monotonicity_diagnostic(const KernelEstimate& est);

enum class TypeGrid { continuous, hundredths };

// Synthetic data: types uniform (continuous or on {0, .01, ..., 1}), actions
// Bernoulli(sigma(type)). The game only stamps the treatment label.
Dataset simulate_dataset(const GameSpec& game, const Strategy& sigma, long n,
                         std::uint64_t seed, TypeGrid grid = TypeGrid::continuous);

} // namespace qre
