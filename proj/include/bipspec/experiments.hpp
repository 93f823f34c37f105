#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bipspec/graphs.hpp"
#include "bipspec/mplaw.hpp"
#include "bipspec/spectra.hpp"

namespace bipspec {

inline constexpr int kReportSchema = 1;
inline constexpr std::string_view kVersion = "0.1.0";

enum class Model { er, regular };

/// How spectra are scaled and which count N_I is compared against.
///  consistent: eigenvalues of R / sqrt(max(m, n)), predicted (m + n) mu(I).
///  literal:    eigenvalues of R / sqrt(n),         predicted n mu(I).
/// The two agree on scale when m == n; the literal count is then half the
/// consistent one because mu carries the mass of all m + n eigenvalues.
enum class Convention { consistent, literal };

std::string_view to_string(Model model);
std::string_view to_string(Convention convention);
Model parse_model(std::string_view text);
Convention parse_convention(std::string_view text);

/// Random block matrix family: regular graphs (normalized adjacency) or
/// Erdos-Renyi graphs (standardized adjacency).
struct Ensemble {
    Model model = Model::regular;
    Index m = 0;
    Index n = 0;
    Index dL = 0;   // regular only
    double p = 0.0; // er only
    std::optional<std::uint64_t> mixing_steps;

    void validate() const;
    double alpha() const { return static_cast<double>(m) / static_cast<double>(n); }
    /// Expected left degree: dL, or n * p.
    double left_degree() const;
    /// Bound K on the absolute value of a standardized entry.
    double entry_bound() const;
    /// Spectral scale for a convention (1/sqrt(m) or 1/sqrt(n)).
    double scale(Convention convention) const;
    /// Upper-right block of the normalized matrix for one draw.
    Eigen::MatrixXd sample_block(std::uint64_t seed) const;
    Spectrum sample_spectrum(std::uint64_t seed, Convention convention) const;
};

/// Minimum interval length in the local law, (log d / (delta^3 sqrt d))^{1/4}.
double theorem_min_length(double degree, double delta);

// ---------------------------------------------------------------------------
// Local law

struct LocalLawConfig {
    Ensemble ensemble;
    double delta = 0.15;
    int intervals_per_side = 4;
    /// Fraction of the support width b - a trimmed from each edge of the grid region.
    double bulk_margin = 0.1;
    /// Overrides the default min(theorem length, grid cell) interval length.
    std::optional<double> interval_length;
    /// Explicit intervals replace the generated grid.
    std::vector<Interval> intervals;
    int trials = 50;
    std::uint64_t seed = 0;
    Convention convention = Convention::consistent;
    double pass_threshold = 0.95;
    unsigned threads = 1;
};

enum class IntervalStatus { pass, fail, zero_measure };
std::string_view to_string(IntervalStatus status);

/// Compares a count with its prediction: zero_measure when predicted == 0,
/// else pass iff |count - predicted| < delta * predicted.
IntervalStatus classify(Index count, double predicted, double delta);

struct TrialRecord {
    int index = 0;
    std::uint64_t seed = 0;
    std::vector<Index> counts;
};

struct LocalLawAggregate {
    Index comparisons = 0;
    Index passes = 0;
    Index zero_measure = 0;
    double pass_rate = 0.0;
    int trials_all_pass = 0;
    double trial_pass_rate = 0.0;
    double max_rel_dev = 0.0;
    double mean_rel_dev = 0.0;
};

struct LocalLawReport {
    LocalLawConfig config;
    double alpha = 1.0;
    double scale = 1.0;
    double theorem_min_length = 0.0;
    double interval_length = 0.0;
    bool length_capped = false;
    std::vector<Interval> intervals;
    std::vector<double> mu;
    std::vector<double> predicted;
    std::vector<TrialRecord> trials;
    LocalLawAggregate aggregate;
    std::vector<std::string> warnings;

    bool passed() const { return aggregate.pass_rate >= config.pass_threshold; }
};

/// Default grid: `per_side` intervals centred in equal cells of
/// [a + margin (b - a), b - margin (b - a)], mirrored onto the negative side.
std::vector<Interval> bulk_grid(const LimitLaw& law, int per_side, double margin, double length);

LocalLawReport run_local_law(const LocalLawConfig& config);
LocalLawReport run_local_law_regular(LocalLawConfig config);
LocalLawReport run_local_law_er(LocalLawConfig config);

nlohmann::json to_json(const LocalLawReport& report);
/// CSV summary `trial,interval_lo,interval_hi,N_I,predicted,rel_dev,pass`.
void write_summary_csv(std::ostream& out, const LocalLawReport& report);
/// Re-derives every pass/fail flag of a JSON report from its stored counts
/// and a fresh evaluation of mu(I); returns the number of mismatches.
Index recheck_report(const nlohmann::json& report);

// ---------------------------------------------------------------------------
// Proportions

struct ProportionEstimate {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    double estimate = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    bool covers(double value) const { return lo <= value && value <= hi; }
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval.
ProportionEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

struct RegularityReport {
    Index m = 0;
    Index n = 0;
    double p = 0.0;
    Index dL = 0; // n p
    Index dR = 0; // m p
    std::uint64_t seed = 0;
    ProportionEstimate estimate;
};

/// Fraction of G(m, n, p) draws that are (np, mp)-regular. Throws
/// InfeasibleError("non-integral") unless np and mp are integers.
RegularityReport estimate_regularity_probability(Index m, Index n, double p, std::uint64_t trials,
                                                 std::uint64_t seed, unsigned threads = 1);

struct FactorFrequencyReport {
    Index m = 0;
    Index n = 0;
    double p = 0.0;
    double delta = 0.0;
    Index dL_factor = 0;
    Index dR_factor = 0;
    double omega = 0.0; // np / ln n
    std::optional<double> theta;
    std::uint64_t seed = 0;
    ProportionEstimate estimate;
};

/// Demands dL' = floor(np (1 - delta)), dR' = m dL' / n; throws
/// InfeasibleError("non-integral") when dR' is not an integer.
DegreeSpec rounded_factor_demands(Index m, Index n, double p, double delta);

/// Frequency with which G(m, n, p) contains a (dL', dR')-regular factor.
FactorFrequencyReport regular_factor_frequency(Index m, Index n, double p, double delta, int trials,
                                               std::uint64_t seed, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Concentration of Lipschitz trace statistics

enum class TraceFunction { f1, f2, g1, g2, identity, constant };
std::string_view to_string(TraceFunction f);
TraceFunction parse_trace_function(std::string_view text);

struct ConcentrationConfig {
    Ensemble ensemble;
    TraceFunction function = TraceFunction::f1;
    Interval window{0.5, 1.0};
    double window_c = 4.0;
    /// Lipschitz constant L; defaults to the window slope (1 for identity).
    std::optional<double> lipschitz;
    std::vector<double> thresholds;
    /// Constant c of the reference curve 4 exp(-c T^2 / (K^2 L^2)).
    double bound_constant = 1.0;
    int trials = 50;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct TailRow {
    double threshold = 0.0;
    double empirical = 0.0;
    double bound = 0.0;
};

struct ConcentrationReport {
    ConcentrationConfig config;
    double entry_bound = 0.0;
    double lipschitz = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> statistics;
    std::vector<TailRow> tails;
    /// min over T with positive tail of -log(tail / 4) K^2 L^2 / T^2.
    std::optional<double> fitted_c;
};

ConcentrationReport concentration_tail_check(const ConcentrationConfig& config);
nlohmann::json to_json(const ConcentrationReport& report);

// ---------------------------------------------------------------------------
// Convergence rate of E N_I

struct RateSweepConfig {
    std::vector<Index> sizes;
    double alpha = 1.0;
    double p = 0.5;
    Interval interval{0.5, 1.0};
    int trials = 30;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct RateRow {
    Index n = 0;
    Index m = 0;
    double mu = 0.0;
    double predicted = 0.0;
    double mean_count = 0.0;
    double std_error = 0.0;
    double abs_dev = 0.0;
    double rel_dev = 0.0;
};

struct RateSweepReport {
    RateSweepConfig config;
    std::vector<RateRow> rows;
    /// Least-squares slope of log |mean N_I - predicted| against log n.
    std::optional<double> gamma;
};

RateSweepReport convergence_rate_sweep(const RateSweepConfig& config);
nlohmann::json to_json(const RateSweepReport& report);

nlohmann::json to_json(const RegularityReport& report);
nlohmann::json to_json(const FactorFrequencyReport& report);

} // namespace bipspec
