#include "qre/empirics.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "qre/errors.hpp"
#include "qre/rng.hpp"

namespace qre {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, long line, const std::string& col) {
    double v;
    auto t = trim(s);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ParseError("cannot parse " + col + " value '" + t + "'", line);
    return v;
}

} // namespace

Dataset::Dataset(std::vector<DataRow> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw DomainError("dataset must be nonempty");
    for (const auto& r : rows_) {
        if (!(r.type >= 0.0 && r.type <= 1.0))
            throw DomainError("dataset type outside [0,1]: " + std::to_string(r.type));
        if (r.action != 0 && r.action != 1)
            throw DomainError("dataset action must be 0 or 1");
    }
    std::vector<std::uint32_t> order(rows_.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return rows_[a].type < rows_[b].type;
    });
    sorted_types_.resize(rows_.size());
    sorted_actions_.resize(rows_.size());
    std::map<std::string, std::vector<std::uint32_t>> by_subject;
    bool any_subject = false;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const DataRow& r = rows_[order[i]];
        sorted_types_[i] = r.type;
        sorted_actions_[i] = static_cast<double>(r.action);
        if (!r.subject.empty()) any_subject = true;
        by_subject[r.subject].push_back(static_cast<std::uint32_t>(i));
    }
    if (any_subject)
        for (auto& [name, pos] : by_subject) subject_positions_.push_back(std::move(pos));
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return load_csv_stream(in, path);
}

Dataset load_csv_stream(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(origin + ": empty file");
    auto headers = split_csv_line(line);
    int c_type = -1, c_action = -1, c_subject = -1, c_round = -1, c_treatment = -1;
    for (int i = 0; i < static_cast<int>(headers.size()); ++i) {
        std::string h = trim(headers[i]);
        if (h == "type") c_type = i;
        else if (h == "action") c_action = i;
        else if (h == "subject") c_subject = i;
        else if (h == "round") c_round = i;
        else if (h == "treatment") c_treatment = i;
    }
    if (c_type < 0 || c_action < 0)
        throw ParseError(origin + ": header must contain 'type' and 'action' columns", 1);

    std::vector<DataRow> rows;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) <= std::max(c_type, c_action))
            throw ParseError("too few columns", line_no);
        DataRow r;
        r.type = parse_double(cells[c_type], line_no, "type");
        if (!(r.type >= 0.0 && r.type <= 1.0))
            throw ParseError("type " + std::to_string(r.type) + " outside [0,1]", line_no);
        double a = parse_double(cells[c_action], line_no, "action");
        if (a != 0.0 && a != 1.0) throw ParseError("action must be 0 or 1", line_no);
        r.action = static_cast<int>(a);
        if (c_subject >= 0 && c_subject < static_cast<int>(cells.size()))
            r.subject = trim(cells[c_subject]);
        if (c_round >= 0 && c_round < static_cast<int>(cells.size())) {
            std::string v = trim(cells[c_round]);
            if (!v.empty()) r.round = static_cast<long>(parse_double(v, line_no, "round"));
        }
        if (c_treatment >= 0 && c_treatment < static_cast<int>(cells.size()))
            r.treatment = trim(cells[c_treatment]);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw ParseError(origin + ": no data rows");
    return Dataset(std::move(rows));
}

void write_csv(const Dataset& data, std::ostream& out) {
    bool subjects = false, rounds = false, treatments = false;
    for (const auto& r : data.rows()) {
        subjects |= !r.subject.empty();
        rounds |= r.round.has_value();
        treatments |= !r.treatment.empty();
    }
    out << "type,action";
    if (subjects) out << ",subject";
    if (rounds) out << ",round";
    if (treatments) out << ",treatment";
    out << "\n";
    char buf[32];
    for (const auto& r : data.rows()) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), r.type);
        out.write(buf, p - buf);
        out << ',' << r.action;
        if (subjects) out << ',' << r.subject;
        if (rounds) {
            out << ',';
            if (r.round) out << *r.round;
        }
        if (treatments) out << ',' << r.treatment;
        out << "\n";
    }
}

namespace {

// One bootstrap replicate's estimation pipeline over multiplicity weights
// aligned with the sorted arrays. Unit weights give the full-sample fit.
struct WeightedFit {
    const Dataset& data;
    std::vector<double> w_prefix;  // prefix of weights
    std::vector<double> wa_prefix; // prefix of weight * action

    explicit WeightedFit(const Dataset& d) : data(d) {}

    void from_weights(const std::vector<std::uint32_t>& w) {
        const std::size_t n = data.size();
        w_prefix.assign(n + 1, 0.0);
        wa_prefix.assign(n + 1, 0.0);
        const auto& a = data.sorted_actions();
        for (std::size_t i = 0; i < n; ++i) {
            w_prefix[i + 1] = w_prefix[i] + w[i];
            wa_prefix[i + 1] = wa_prefix[i] + w[i] * a[i];
        }
    }

    void unit_weights() {
        const std::size_t n = data.size();
        w_prefix.assign(n + 1, 0.0);
        wa_prefix.assign(n + 1, 0.0);
        const auto& a = data.sorted_actions();
        for (std::size_t i = 0; i < n; ++i) {
            w_prefix[i + 1] = w_prefix[i] + 1.0;
            wa_prefix[i + 1] = wa_prefix[i] + a[i];
        }
    }

    double total() const { return w_prefix.back(); }

    // [lo, hi] window sums via binary search on the sorted types
    std::pair<double, double> window(double lo, double hi) const {
        const auto& t = data.sorted_types();
        auto b = std::lower_bound(t.begin(), t.end(), lo) - t.begin();
        auto e = std::upper_bound(t.begin(), t.end(), hi) - t.begin();
        return {w_prefix[e] - w_prefix[b], wa_prefix[e] - wa_prefix[b]};
    }

    double bandwidth() const {
        double n = total();
        if (n < 2.0) throw DomainError("bandwidth needs at least two observations");
        double sum_a = wa_prefix.back();
        double mean = sum_a / n;
        // actions are binary, so sum of squares equals the sum
        double var = (sum_a - n * mean * mean) / (n - 1.0);
        if (!(var > 0.0))
            throw DegenerateStrategyError("all actions identical: zero-variance bandwidth");
        return std::pow(n, -0.2) * std::sqrt(var);
    }

    // Returns the estimated crossing of 1/2, or NaN when there is none.
    double crossing(double h, int grid) const {
        double prev_val = kNaN;
        double prev_s = 0.0;
        for (int j = 0; j < grid; ++j) {
            double s = static_cast<double>(j) / (grid - 1);
            auto [cnt, sum] = window(s - h, s + h);
            if (cnt <= 0.0) {
                prev_val = kNaN;
                continue;
            }
            double val = sum / cnt;
            if (!std::isnan(prev_val) && prev_val >= 0.5 && val < 0.5)
                return prev_s + (prev_val - 0.5) / (prev_val - val) * (s - prev_s);
            prev_val = val;
            prev_s = s;
        }
        return kNaN;
    }

    double beta(double M, double s_tilde) const {
        const auto& t = data.sorted_types();
        auto le = std::upper_bound(t.begin(), t.end(), s_tilde) - t.begin();
        auto ge = std::lower_bound(t.begin(), t.end(), s_tilde) - t.begin();
        double n_lo = w_prefix[le];
        double a_lo = wa_prefix[le];
        double n_hi = w_prefix.back() - w_prefix[ge];
        double a_hi = wa_prefix.back() - wa_prefix[ge];
        if (n_lo <= 0.0 || n_hi <= 0.0)
            throw Error(ErrorCode::insufficient_data,
                        "beta: one side of the split at " + std::to_string(s_tilde) +
                            " has no observations");
        double mean_hi = a_hi / n_hi;
        double mean_lo = a_lo / n_lo;
        return mean_hi * (1.0 - s_tilde) - mean_lo * s_tilde * (1.0 - M) / M;
    }
};

} // namespace

double silverman_bandwidth(const Dataset& data) {
    if (data.size() < 2) throw DomainError("silverman_bandwidth: need n >= 2");
    WeightedFit fit(data);
    fit.unit_weights();
    return fit.bandwidth();
}

KernelEstimate kernel_estimate(const Dataset& data, double h, int grid) {
    if (!(h > 0.0)) throw DomainError("kernel_estimate: bandwidth must be positive");
    if (grid < 2) throw DomainError("kernel_estimate: grid must have at least 2 points");
    WeightedFit fit(data);
    fit.unit_weights();
    KernelEstimate est;
    est.h = h;
    est.s.resize(grid);
    est.sigma_hat.resize(grid);
    est.counts.resize(grid);
    for (int j = 0; j < grid; ++j) {
        double s = static_cast<double>(j) / (grid - 1);
        est.s[j] = s;
        auto [cnt, sum] = fit.window(s - h, s + h);
        est.counts[j] = static_cast<long>(cnt);
        est.sigma_hat[j] = cnt > 0.0 ? sum / cnt : kNaN;
    }
    return est;
}

double estimate_indifferent_type(const KernelEstimate& est) {
    for (std::size_t j = 0; j + 1 < est.s.size(); ++j) {
        if (!est.defined(j) || !est.defined(j + 1)) continue;
        double a = est.sigma_hat[j];
        double b = est.sigma_hat[j + 1];
        if (a >= 0.5 && b < 0.5)
            return est.s[j] + (a - 0.5) / (a - b) * (est.s[j + 1] - est.s[j]);
    }
    throw Error(ErrorCode::no_crossing,
                "estimated choice probabilities never cross 1/2 from above");
}

double beta_statistic(const Dataset& data, double M, double s_tilde) {
    validate(GameSpec{CompromiseGame{M}});
    if (!(s_tilde > 0.0 && s_tilde < 1.0))
        throw DomainError("beta_statistic: s~ must be interior");
    WeightedFit fit(data);
    fit.unit_weights();
    return fit.beta(M, s_tilde);
}

TestResult bootstrap_ci(const Dataset& data, double M, long reps, std::uint64_t seed,
                        const BootstrapOptions& opts) {
    validate(GameSpec{CompromiseGame{M}});
    if (reps < 100) throw DomainError("bootstrap_ci: need at least 100 replicates");
    if (opts.grid < 2) throw DomainError("bootstrap_ci: grid too small");
    if (opts.cluster_by_subject && !data.has_subjects())
        throw DomainError("bootstrap_ci: cluster mode needs a subject column");

    TestResult res;
    res.replicates = reps;
    res.seed = seed;
    res.grid = opts.grid;
    res.cluster_by_subject = opts.cluster_by_subject;
    res.s_tilde_fixed = opts.fix_s_tilde;

    // full-sample estimate
    WeightedFit full(data);
    full.unit_weights();
    res.bandwidth = full.bandwidth();
    double s_full = full.crossing(res.bandwidth, opts.grid);
    if (std::isnan(s_full))
        throw Error(ErrorCode::no_crossing,
                    "full sample: estimated choice probabilities never cross 1/2");
    res.s_tilde_hat = s_full;
    res.beta_hat = full.beta(M, s_full);

    const std::size_t n = data.size();
    const auto& subjects = data.subject_positions();
    std::vector<double> betas(reps, kNaN);
    std::atomic<long> failures{0};

    auto run_range = [&](long rep_begin, long rep_end) {
        WeightedFit fit(data);
        std::vector<std::uint32_t> w(n);
        for (long r = rep_begin; r < rep_end; ++r) {
            CounterRng rng(seed, static_cast<std::uint64_t>(r) + 1);
            std::fill(w.begin(), w.end(), 0u);
            if (opts.cluster_by_subject) {
                for (std::size_t s = 0; s < subjects.size(); ++s) {
                    const auto& rows = subjects[rng.below(subjects.size())];
                    for (std::uint32_t pos : rows) ++w[pos];
                }
            } else {
                for (std::size_t i = 0; i < n; ++i) ++w[rng.below(n)];
            }
            try {
                fit.from_weights(w);
                double h = fit.bandwidth();
                double st = opts.fix_s_tilde ? s_full : fit.crossing(h, opts.grid);
                if (std::isnan(st)) throw Error(ErrorCode::no_crossing, "no crossing");
                betas[r] = fit.beta(M, st);
            } catch (const Error&) {
                ++failures;
            }
        }
    };

    int jobs = std::max(1, opts.jobs);
    if (jobs == 1) {
        run_range(0, reps);
    } else {
        std::vector<std::thread> pool;
        long chunk = (reps + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
            long b = j * chunk;
            long e = std::min(reps, b + chunk);
            if (b < e) pool.emplace_back(run_range, b, e);
        }
        for (auto& th : pool) th.join();
    }

    res.failed_replicates = failures.load();
    if (res.failed_replicates * 10 > reps)
        throw UnstableEstimateError(std::to_string(res.failed_replicates) + " of " +
                                    std::to_string(reps) +
                                    " bootstrap replicates failed (more than 10%)");

    std::vector<double> ok;
    ok.reserve(reps);
    for (double b : betas)
        if (!std::isnan(b)) ok.push_back(b);
    std::sort(ok.begin(), ok.end());

    auto quantile = [&](double p) {
        double idx = p * (ok.size() - 1);
        std::size_t lo = static_cast<std::size_t>(idx);
        std::size_t hi = std::min(lo + 1, ok.size() - 1);
        double frac = idx - lo;
        return ok[lo] * (1.0 - frac) + ok[hi] * frac;
    };
    res.ci95_lo = quantile(0.025);
    res.ci95_hi = quantile(0.975);
    res.ci99_lo = quantile(0.005);
    res.ci99_hi = quantile(0.995);
    res.reject_95 = !(res.ci95_lo <= 0.0 && 0.0 <= res.ci95_hi);
    res.reject_99 = !(res.ci99_lo <= 0.0 && 0.0 <= res.ci99_hi);
    return res;
}

MonotonicityReport monotonicity_diagnostic(const KernelEstimate& est) {
    MonotonicityReport rep;
    std::vector<double> defined;
    for (std::size_t j = 0; j < est.s.size(); ++j) {
        if (!est.defined(j)) continue;
        defined.push_back(est.sigma_hat[j]);
    }
    for (std::size_t j = 0; j + 1 < est.s.size(); ++j) {
        if (!est.defined(j) || !est.defined(j + 1)) continue;
        double rise = est.sigma_hat[j + 1] - est.sigma_hat[j];
        if (rise > 0.0) {
            ++rep.violations;
            rep.max_increase = std::max(rep.max_increase, rise);
        }
    }
    if (defined.empty()) return rep;

    // pool-adjacent-violators for the nonincreasing projection (negate and fit
    // nondecreasing)
    std::vector<double> vals;
    std::vector<double> wts;
    for (double v : defined) {
        vals.push_back(-v);
        wts.push_back(1.0);
        while (vals.size() >= 2 && vals[vals.size() - 2] > vals.back()) {
            double wv = wts[wts.size() - 2] + wts.back();
            double merged = (vals[vals.size() - 2] * wts[wts.size() - 2] +
                             vals.back() * wts.back()) / wv;
            vals.pop_back();
            wts.pop_back();
            vals.back() = merged;
            wts.back() = wv;
        }
    }
    std::vector<double> proj;
    proj.reserve(defined.size());
    for (std::size_t b = 0; b < vals.size(); ++b)
        for (long k = 0; k < static_cast<long>(wts[b]); ++k) proj.push_back(-vals[b]);
    double sq = 0.0;
    for (std::size_t i = 0; i < defined.size(); ++i) {
        double d = std::abs(defined[i] - proj[i]);
        rep.isotonic_max_distance = std::max(rep.isotonic_max_distance, d);
        sq += d * d;
    }
    rep.isotonic_rms_distance = std::sqrt(sq / defined.size());
    return rep;
}

Dataset simulate_dataset(const GameSpec& game, const Strategy& sigma, long n,
                         std::uint64_t seed, TypeGrid grid) {
    validate(game);
    if (n < 1) throw DomainError("simulate_dataset: need n >= 1");
    std::string label = std::visit(
        [](const auto& g) -> std::string {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, VolunteersDilemma>)
                return "vd:B=" + std::to_string(g.B);
            else if constexpr (std::is_same_v<T, GlobalGame>)
                return "gg:k=" + std::to_string(g.k);
            else
                return "cg:M=" + std::to_string(g.M);
        },
        game);
    CounterRng rng(seed);
    std::vector<DataRow> rows;
    rows.reserve(n);
    for (long i = 0; i < n; ++i) {
        double t = grid == TypeGrid::hundredths
                       ? static_cast<double>(rng.below(101)) / 100.0
                       : rng.next_double();
        DataRow r;
        r.type = t;
        r.action = rng.bernoulli(sigma.eval(t)) ? 1 : 0;
        r.treatment = label;
        rows.push_back(std::move(r));
    }
    return Dataset(std::move(rows));
}

} // namespace qre
