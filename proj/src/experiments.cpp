#include "bipspec/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "bipspec/factors.hpp"
#include "bipspec/parallel.hpp"
#include "bipspec/rng.hpp"

namespace bipspec {

using nlohmann::json;

std::string_view to_string(Model model)
{
    return model == Model::er ? "er" : "regular";
}

std::string_view to_string(Convention convention)
{
    return convention == Convention::consistent ? "consistent" : "literal";
}

Model parse_model(std::string_view text)
{
    if (text == "er")
        return Model::er;
    if (text == "regular")
        return Model::regular;
    throw DomainError("unknown model '" + std::string(text) + "' (expected er or regular)");
}

Convention parse_convention(std::string_view text)
{
    if (text == "consistent")
        return Convention::consistent;
    if (text == "literal")
        return Convention::literal;
    throw DomainError("unknown convention '" + std::string(text) + "' (expected consistent or literal)");
}

// ---------------------------------------------------------------------------
// Ensemble

void Ensemble::validate() const
{
    if (m < 1 || n < 1)
        throw DomainError("ensemble needs m >= 1 and n >= 1");
    if (m < n)
        throw DomainError("ensemble needs m >= n (alpha = m/n >= 1); swap the two sides");
    if (model == Model::regular) {
        if ((m * dL) % n != 0)
            throw InfeasibleError("infeasible", "m*dL must be divisible by n for a (dL, dR)-regular graph");
        require_feasible(m, n, {dL, m * dL / n});
        if (dL <= 0 || dL >= n)
            throw DomainError("normalized regular matrix needs 0 < dL < n");
    } else if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("er ensemble needs 0 < p < 1");
    }
}

double Ensemble::left_degree() const
{
    return model == Model::regular ? static_cast<double>(dL) : static_cast<double>(n) * p;
}

double Ensemble::entry_bound() const
{
    return er_entry_bound(model == Model::regular ? static_cast<double>(dL) / static_cast<double>(n) : p);
}

double Ensemble::scale(Convention convention) const
{
    const Index side = convention == Convention::consistent ? std::max(m, n) : n;
    return 1.0 / std::sqrt(static_cast<double>(side));
}

Eigen::MatrixXd Ensemble::sample_block(std::uint64_t seed) const
{
    if (model == Model::regular) {
        const DegreeSpec spec{dL, m * dL / n};
        return normalized_regular_block(sample_regular(m, n, spec, seed, mixing_steps), spec);
    }
    return normalized_er_block(sample_er(m, n, p, seed), p);
}

Spectrum Ensemble::sample_spectrum(std::uint64_t seed, Convention convention) const
{
    return bipartite_spectrum(sample_block(seed), scale(convention));
}

double theorem_min_length(double degree, double delta)
{
    if (!(degree > 1.0) || !(delta > 0.0))
        throw DomainError("theorem_min_length needs degree > 1 and delta > 0");
    return std::pow(std::log(degree) / (delta * delta * delta * std::sqrt(degree)), 0.25);
}

// ---------------------------------------------------------------------------
// Local law

std::string_view to_string(IntervalStatus status)
{
    switch (status) {
    case IntervalStatus::pass:
        return "pass";
    case IntervalStatus::fail:
        return "fail";
    case IntervalStatus::zero_measure:
        return "zero-measure";
    }
    return "unknown";
}

IntervalStatus classify(Index count, double predicted, double delta)
{
    if (!(predicted > 0.0))
        return IntervalStatus::zero_measure;
    return std::abs(static_cast<double>(count) - predicted) < delta * predicted ? IntervalStatus::pass
                                                                                 : IntervalStatus::fail;
}

std::vector<Interval> bulk_grid(const LimitLaw& law, int per_side, double margin, double length)
{
    if (per_side < 1)
        throw DomainError("interval grid needs at least one interval per side");
    if (!(margin >= 0.0 && margin < 0.5))
        throw DomainError("bulk margin must lie in [0, 0.5)");
    const double width = law.b() - law.a();
    const double lo = law.a() + margin * width;
    const double hi = law.b() - margin * width;
    const double cell = (hi - lo) / per_side;
    if (!(length > 0.0) || length > cell * (1.0 + 1e-12))
        throw DomainError("interval length must be positive and fit the grid cell");

    std::vector<Interval> positive;
    for (int k = 0; k < per_side; ++k) {
        const double center = lo + (k + 0.5) * cell;
        positive.emplace_back(center - 0.5 * length, center + 0.5 * length);
    }
    std::vector<Interval> grid;
    for (auto it = positive.rbegin(); it != positive.rend(); ++it)
        grid.emplace_back(-it->hi, -it->lo);
    grid.insert(grid.end(), positive.begin(), positive.end());
    return grid;
}

namespace {

void validate_local_law(const LocalLawConfig& config)
{
    config.ensemble.validate();
    if (!(config.delta > 0.0))
        throw DomainError("delta must be positive");
    if (config.trials < 1)
        throw DomainError("trials must be at least 1");
    if (!(config.pass_threshold >= 0.0 && config.pass_threshold <= 1.0))
        throw DomainError("pass threshold must lie in [0, 1]");
    for (const auto& interval : config.intervals) {
        if (!interval.avoids_zero()) {
            std::ostringstream msg;
            msg << "interval [" << interval.lo << ", " << interval.hi
                << "] contains 0; local-law intervals must avoid 0";
            throw DomainError(msg.str());
        }
    }
}

} // namespace

LocalLawReport run_local_law(const LocalLawConfig& config)
{
    validate_local_law(config);
    const Ensemble& ensemble = config.ensemble;
    const LimitLaw law(ensemble.alpha());

    LocalLawReport report;
    report.config = config;
    report.alpha = law.alpha();
    report.scale = ensemble.scale(config.convention);

    const double degree = ensemble.left_degree();
    report.theorem_min_length = degree > 1.0 ? theorem_min_length(degree, config.delta) : 0.0;
    if (degree <= std::log(static_cast<double>(ensemble.n)))
        report.warnings.push_back("left degree <= log n: outside the d_L = omega(log n) regime");

    if (!config.intervals.empty()) {
        report.intervals = config.intervals;
        report.interval_length = 0.0;
        for (const auto& interval : report.intervals)
            report.interval_length = std::max(report.interval_length, interval.length());
    } else {
        const double width = law.b() - law.a();
        const double cell = (1.0 - 2.0 * config.bulk_margin) * width / config.intervals_per_side;
        double length = config.interval_length.value_or(std::min(report.theorem_min_length, cell));
        report.intervals = bulk_grid(law, config.intervals_per_side, config.bulk_margin, length);
        report.interval_length = length;
    }
    report.length_capped = report.interval_length < report.theorem_min_length;
    if (report.length_capped) {
        std::ostringstream msg;
        msg << "interval length " << report.interval_length << " is below the theorem minimum "
            << report.theorem_min_length << " (the minimum does not fit the support at this degree)";
        report.warnings.push_back(msg.str());
    }
    if (config.convention == Convention::literal)
        report.warnings.push_back("literal convention: spectrum scaled by n^{-1/2} and compared with n mu(I)");

    const double factor = config.convention == Convention::consistent
                              ? static_cast<double>(ensemble.m + ensemble.n)
                              : static_cast<double>(ensemble.n);
    for (const auto& interval : report.intervals) {
        const double mu = measure(interval, law);
        report.mu.push_back(mu);
        report.predicted.push_back(factor * mu);
    }

    report.trials.resize(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t t) {
        TrialRecord record;
        record.index = static_cast<int>(t);
        record.seed = derive_seed(config.seed, t);
        const Spectrum spectrum = ensemble.sample_spectrum(record.seed, config.convention);
        for (const auto& interval : report.intervals)
            record.counts.push_back(count_in_interval(spectrum, interval));
        report.trials[t] = std::move(record);
    });

    auto& agg = report.aggregate;
    double rel_sum = 0.0;
    for (const auto& trial : report.trials) {
        bool all_pass = true;
        for (std::size_t k = 0; k < report.intervals.size(); ++k) {
            const auto status = classify(trial.counts[k], report.predicted[k], config.delta);
            if (status == IntervalStatus::zero_measure) {
                ++agg.zero_measure;
                continue;
            }
            ++agg.comparisons;
            const double rel = std::abs(static_cast<double>(trial.counts[k]) - report.predicted[k]) /
                               report.predicted[k];
            rel_sum += rel;
            agg.max_rel_dev = std::max(agg.max_rel_dev, rel);
            if (status == IntervalStatus::pass)
                ++agg.passes;
            else
                all_pass = false;
        }
        if (all_pass)
            ++agg.trials_all_pass;
    }
    agg.pass_rate = agg.comparisons > 0 ? static_cast<double>(agg.passes) / agg.comparisons : 1.0;
    agg.mean_rel_dev = agg.comparisons > 0 ? rel_sum / agg.comparisons : 0.0;
    agg.trial_pass_rate = static_cast<double>(agg.trials_all_pass) / config.trials;
    return report;
}

LocalLawReport run_local_law_regular(LocalLawConfig config)
{
    config.ensemble.model = Model::regular;
    return run_local_law(config);
}

LocalLawReport run_local_law_er(LocalLawConfig config)
{
    config.ensemble.model = Model::er;
    return run_local_law(config);
}

namespace {

json ensemble_json(const Ensemble& e)
{
    json j = {{"model", to_string(e.model)}, {"m", e.m}, {"n", e.n}};
    if (e.model == Model::regular) {
        j["dL"] = e.dL;
        j["dR"] = e.m * e.dL / e.n;
        j["mixing_steps"] = e.mixing_steps.value_or(default_mixing_steps(e.m, {e.dL, e.m * e.dL / e.n}));
        j["sampler"] = "switch-chain MCMC from a circulant start (approximately uniform)";
    } else {
        j["p"] = e.p;
    }
    return j;
}

json law_json(const LimitLaw& law)
{
    return {{"alpha", law.alpha()}, {"a", law.a()}, {"b", law.b()}, {"atom0", law.atom0()}};
}

json metadata_json()
{
    return {{"library", "bipspec"}, {"version", kVersion}, {"rng", "mt19937_64, splitmix64-derived per-trial seeds"}};
}

std::string format_double(double v)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

} // namespace

json to_json(const LocalLawReport& report)
{
    const auto& config = report.config;
    json intervals = json::array();
    for (std::size_t k = 0; k < report.intervals.size(); ++k)
        intervals.push_back({{"lo", report.intervals[k].lo},
                             {"hi", report.intervals[k].hi},
                             {"mu", report.mu[k]},
                             {"predicted", report.predicted[k]}});

    json trials = json::array();
    for (const auto& trial : report.trials) {
        json status = json::array();
        json rel = json::array();
        for (std::size_t k = 0; k < trial.counts.size(); ++k) {
            status.push_back(to_string(classify(trial.counts[k], report.predicted[k], config.delta)));
            if (report.predicted[k] > 0.0)
                rel.push_back(std::abs(static_cast<double>(trial.counts[k]) - report.predicted[k]) /
                              report.predicted[k]);
            else
                rel.push_back(nullptr);
        }
        trials.push_back(
            {{"index", trial.index}, {"seed", trial.seed}, {"counts", trial.counts}, {"status", status}, {"rel_dev", rel}});
    }

    const auto& agg = report.aggregate;
    return {
        {"schema", kReportSchema},
        {"experiment", "local_law"},
        {"config",
         {{"ensemble", ensemble_json(config.ensemble)},
          {"delta", config.delta},
          {"trials", config.trials},
          {"seed", config.seed},
          {"convention", to_string(config.convention)},
          {"pass_threshold", config.pass_threshold},
          {"intervals_per_side", config.intervals_per_side},
          {"bulk_margin", config.bulk_margin}}},
        {"law", law_json(LimitLaw(report.alpha))},
        {"normalization",
         {{"convention", to_string(config.convention)},
          {"scale", report.scale},
          {"predicted", config.convention == Convention::consistent ? "(m+n)*mu(I)" : "n*mu(I)"}}},
        {"theorem_min_length", report.theorem_min_length},
        {"interval_length", report.interval_length},
        {"length_capped", report.length_capped},
        {"intervals", intervals},
        {"trials", trials},
        {"aggregate",
         {{"comparisons", agg.comparisons},
          {"passes", agg.passes},
          {"zero_measure", agg.zero_measure},
          {"pass_rate", agg.pass_rate},
          {"trials_all_pass", agg.trials_all_pass},
          {"trial_pass_rate", agg.trial_pass_rate},
          {"max_rel_dev", agg.max_rel_dev},
          {"mean_rel_dev", agg.mean_rel_dev},
          {"passed", report.passed()}}},
        {"warnings", report.warnings},
        {"metadata", metadata_json()},
    };
}

void write_summary_csv(std::ostream& out, const LocalLawReport& report)
{
    out << "trial,interval_lo,interval_hi,N_I,predicted,rel_dev,pass\n";
    for (const auto& trial : report.trials) {
        for (std::size_t k = 0; k < report.intervals.size(); ++k) {
            const double predicted = report.predicted[k];
            const auto status = classify(trial.counts[k], predicted, report.config.delta);
            const std::string rel =
                predicted > 0.0 ? format_double(std::abs(static_cast<double>(trial.counts[k]) - predicted) / predicted)
                                : "";
            out << trial.index << ',' << format_double(report.intervals[k].lo) << ','
                << format_double(report.intervals[k].hi) << ',' << trial.counts[k] << ',' << format_double(predicted)
                << ',' << rel << ',' << to_string(status) << '\n';
        }
    }
}

Index recheck_report(const json& report)
{
    const LimitLaw law(report.at("law").at("alpha").get<double>());
    const auto& cfg = report.at("config");
    const double delta = cfg.at("delta").get<double>();
    const auto& ensemble = cfg.at("ensemble");
    const auto m = ensemble.at("m").get<Index>();
    const auto n = ensemble.at("n").get<Index>();
    const double factor = cfg.at("convention").get<std::string>() == "consistent" ? static_cast<double>(m + n)
                                                                                   : static_cast<double>(n);
    std::vector<double> predicted;
    for (const auto& interval : report.at("intervals"))
        predicted.push_back(factor * measure(Interval(interval.at("lo").get<double>(), interval.at("hi").get<double>()), law));

    Index mismatches = 0;
    for (const auto& trial : report.at("trials")) {
        const auto& counts = trial.at("counts");
        const auto& status = trial.at("status");
        for (std::size_t k = 0; k < predicted.size(); ++k) {
            const auto expected = to_string(classify(counts.at(k).get<Index>(), predicted[k], delta));
            if (status.at(k).get<std::string>() != expected)
                ++mismatches;
        }
    }
    return mismatches;
}

// ---------------------------------------------------------------------------
// Proportions

ProportionEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials, double z)
{
    if (trials == 0 || successes > trials)
        throw DomainError("wilson interval needs 0 <= successes <= trials, trials > 0");
    ProportionEstimate e;
    e.successes = successes;
    e.trials = trials;
    const double nt = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double center = (phat + z2 / (2.0 * nt)) / denom;
    const double half = z / denom * std::sqrt(phat * (1.0 - phat) / nt + z2 / (4.0 * nt * nt));
    e.estimate = phat;
    e.lo = std::max(0.0, center - half);
    e.hi = std::min(1.0, center + half);
    return e;
}

namespace {

Index integral_degree(double value, const char* name)
{
    const double rounded = std::round(value);
    if (std::abs(value - rounded) > 1e-9 * std::max(1.0, std::abs(value)))
        throw InfeasibleError("non-integral", std::string(name) + " = " + format_double(value) +
                                                  " is not an integer; regularity has probability 0");
    return static_cast<Index>(rounded);
}

// Trials are grouped in fixed blocks, each with its own derived stream, so
// the estimate is identical for any worker count.
constexpr std::uint64_t kTrialBlock = 1 << 14;

} // namespace

RegularityReport estimate_regularity_probability(Index m, Index n, double p, std::uint64_t trials,
                                                 std::uint64_t seed, unsigned threads)
{
    if (m < 1 || n < 1)
        throw DomainError("regularity estimate needs m >= 1 and n >= 1");
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("edge probability must lie in [0, 1]");
    if (trials == 0)
        throw DomainError("trials must be at least 1");

    RegularityReport report;
    report.m = m;
    report.n = n;
    report.p = p;
    report.seed = seed;
    report.dL = integral_degree(static_cast<double>(n) * p, "n*p");
    report.dR = integral_degree(static_cast<double>(m) * p, "m*p");

    const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
    std::vector<std::uint64_t> hits(blocks, 0);
    parallel_for(blocks, threads, [&](std::size_t block) {
        Rng rng = make_rng(derive_seed(seed, block));
        const std::uint64_t begin = block * kTrialBlock;
        const std::uint64_t end = std::min(trials, begin + kTrialBlock);
        std::vector<Index> rows(m);
        std::vector<Index> cols(n);
        std::uint64_t local = 0;
        for (std::uint64_t t = begin; t < end; ++t) {
            std::fill(rows.begin(), rows.end(), 0);
            std::fill(cols.begin(), cols.end(), 0);
            for (Index i = 0; i < m; ++i)
                for (Index j = 0; j < n; ++j)
                    if (bernoulli(rng, p)) {
                        ++rows[i];
                        ++cols[j];
                    }
            const bool regular = std::ranges::all_of(rows, [&](Index d) { return d == report.dL; }) &&
                                 std::ranges::all_of(cols, [&](Index d) { return d == report.dR; });
            local += regular ? 1 : 0;
        }
        hits[block] = local;
    });
    report.estimate = wilson_interval(std::accumulate(hits.begin(), hits.end(), std::uint64_t{0}), trials);
    return report;
}

DegreeSpec rounded_factor_demands(Index m, Index n, double p, double delta)
{
    if (!(delta >= 0.0 && delta < 1.0))
        throw DomainError("delta must lie in [0, 1)");
    const double target = static_cast<double>(n) * p * (1.0 - delta);
    const auto dl = static_cast<Index>(std::floor(target + 1e-9));
    if ((m * dl) % n != 0)
        throw InfeasibleError("non-integral", "dR' = m*dL'/n = " + std::to_string(m) + "*" + std::to_string(dl) + "/" +
                                                  std::to_string(n) + " is not an integer");
    const DegreeSpec spec{dl, m * dl / n};
    require_feasible(m, n, spec);
    return spec;
}

FactorFrequencyReport regular_factor_frequency(Index m, Index n, double p, double delta, int trials,
                                               std::uint64_t seed, unsigned threads)
{
    if (trials < 1)
        throw DomainError("trials must be at least 1");
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("edge probability must lie in [0, 1]");
    const DegreeSpec demands = rounded_factor_demands(m, n, p, delta);

    FactorFrequencyReport report;
    report.m = m;
    report.n = n;
    report.p = p;
    report.delta = delta;
    report.dL_factor = demands.dL;
    report.dR_factor = demands.dR;
    report.seed = seed;
    const double log_n = std::log(static_cast<double>(n));
    report.omega = log_n > 0.0 ? static_cast<double>(n) * p / log_n : 0.0;
    if (report.omega > 1.0 && delta > 0.0)
        report.theta = -std::log(delta) / std::log(report.omega);

    std::vector<std::uint8_t> found(trials, 0);
    parallel_for(trials, threads, [&](std::size_t t) {
        const BipartiteGraph g = sample_er(m, n, p, derive_seed(seed, t));
        found[t] = regular_factor_check(g, static_cast<int>(demands.dL), static_cast<int>(demands.dR)) ? 1 : 0;
    });
    report.estimate = wilson_interval(std::accumulate(found.begin(), found.end(), std::uint64_t{0}), trials);
    return report;
}

json to_json(const RegularityReport& report)
{
    const auto& e = report.estimate;
    return {{"schema", kReportSchema},
            {"experiment", "regularity_probability"},
            {"config", {{"m", report.m}, {"n", report.n}, {"p", report.p}, {"trials", e.trials}, {"seed", report.seed}}},
            {"degrees", {{"dL", report.dL}, {"dR", report.dR}}},
            {"successes", e.successes},
            {"estimate", e.estimate},
            {"wilson95", {e.lo, e.hi}},
            {"metadata", metadata_json()}};
}

json to_json(const FactorFrequencyReport& report)
{
    const auto& e = report.estimate;
    json theta = report.theta ? json(*report.theta) : json(nullptr);
    return {{"schema", kReportSchema},
            {"experiment", "regular_factor_frequency"},
            {"config",
             {{"m", report.m},
              {"n", report.n},
              {"p", report.p},
              {"delta", report.delta},
              {"trials", e.trials},
              {"seed", report.seed}}},
            {"demands", {{"dL", report.dL_factor}, {"dR", report.dR_factor}}},
            {"omega", report.omega},
            {"theta", theta},
            {"successes", e.successes},
            {"frequency", e.estimate},
            {"wilson95", {e.lo, e.hi}},
            {"metadata", metadata_json()}};
}

// ---------------------------------------------------------------------------
// Concentration

std::string_view to_string(TraceFunction f)
{
    switch (f) {
    case TraceFunction::f1:
        return "f1";
    case TraceFunction::f2:
        return "f2";
    case TraceFunction::g1:
        return "g1";
    case TraceFunction::g2:
        return "g2";
    case TraceFunction::identity:
        return "identity";
    case TraceFunction::constant:
        return "constant";
    }
    return "unknown";
}

TraceFunction parse_trace_function(std::string_view text)
{
    for (auto f : {TraceFunction::f1, TraceFunction::f2, TraceFunction::g1, TraceFunction::g2, TraceFunction::identity,
                   TraceFunction::constant})
        if (to_string(f) == text)
            return f;
    throw DomainError("unknown trace function '" + std::string(text) + "'");
}

ConcentrationReport concentration_tail_check(const ConcentrationConfig& config)
{
    config.ensemble.validate();
    if (config.trials < 2)
        throw DomainError("concentration check needs at least 2 trials");
    if (config.thresholds.empty())
        throw DomainError("concentration check needs at least one threshold T");
    for (double t : config.thresholds)
        if (!(t > 0.0))
            throw DomainError("thresholds must be positive");

    const auto kind = (config.function == TraceFunction::g1 || config.function == TraceFunction::g2)
                          ? WindowKind::lower
                          : WindowKind::upper;
    const WindowPair window(config.window, config.window_c, kind);

    double default_l = window.slope();
    if (config.function == TraceFunction::identity)
        default_l = 1.0;
    else if (config.function == TraceFunction::constant)
        default_l = 0.0;
    const double lipschitz = config.lipschitz.value_or(default_l);
    if (!(lipschitz > 0.0))
        throw DomainError("Lipschitz constant must be positive (degenerate f)");

    auto f = [&](double x) {
        switch (config.function) {
        case TraceFunction::f1:
        case TraceFunction::g1:
            return window.first(x);
        case TraceFunction::f2:
        case TraceFunction::g2:
            return window.second(x);
        case TraceFunction::identity:
            return x;
        case TraceFunction::constant:
            return 1.0;
        }
        return 0.0;
    };

    ConcentrationReport report;
    report.config = config;
    report.entry_bound = config.ensemble.entry_bound();
    report.lipschitz = lipschitz;
    report.statistics.resize(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t t) {
        const Spectrum s = config.ensemble.sample_spectrum(derive_seed(config.seed, t), Convention::consistent);
        report.statistics[t] = trace_statistic(s, f);
    });

    const double count = static_cast<double>(config.trials);
    report.mean = std::accumulate(report.statistics.begin(), report.statistics.end(), 0.0) / count;
    double ss = 0.0;
    for (double z : report.statistics)
        ss += (z - report.mean) * (z - report.mean);
    report.stddev = std::sqrt(ss / (count - 1.0));

    const double kl2 = std::pow(report.entry_bound * lipschitz, 2);
    for (double threshold : config.thresholds) {
        const auto exceed = std::ranges::count_if(report.statistics,
                                                  [&](double z) { return std::abs(z - report.mean) >= threshold; });
        TailRow row;
        row.threshold = threshold;
        row.empirical = static_cast<double>(exceed) / count;
        row.bound = std::min(1.0, 4.0 * std::exp(-config.bound_constant * threshold * threshold / kl2));
        report.tails.push_back(row);
        if (row.empirical > 0.0) {
            const double c_hat = -std::log(row.empirical / 4.0) * kl2 / (threshold * threshold);
            report.fitted_c = report.fitted_c ? std::min(*report.fitted_c, c_hat) : c_hat;
        }
    }
    return report;
}

json to_json(const ConcentrationReport& report)
{
    const auto& config = report.config;
    json tails = json::array();
    for (const auto& row : report.tails)
        tails.push_back({{"T", row.threshold}, {"empirical", row.empirical}, {"bound", row.bound}});
    return {{"schema", kReportSchema},
            {"experiment", "concentration"},
            {"config",
             {{"ensemble", ensemble_json(config.ensemble)},
              {"function", to_string(config.function)},
              {"window", {config.window.lo, config.window.hi}},
              {"window_c", config.window_c},
              {"bound_constant", config.bound_constant},
              {"trials", config.trials},
              {"seed", config.seed}}},
            {"K", report.entry_bound},
            {"L", report.lipschitz},
            {"mean", report.mean},
            {"stddev", report.stddev},
            {"statistics", report.statistics},
            {"tails", tails},
            {"fitted_c", report.fitted_c ? json(*report.fitted_c) : json(nullptr)},
            {"metadata", metadata_json()}};
}

// ---------------------------------------------------------------------------
// Convergence rate

RateSweepReport convergence_rate_sweep(const RateSweepConfig& config)
{
    if (config.sizes.size() < 3)
        throw DomainError("rate sweep needs at least 3 sizes to fit an exponent");
    if (!(config.alpha >= 1.0))
        throw DomainError("rate sweep needs alpha >= 1");
    if (config.trials < 2)
        throw DomainError("rate sweep needs at least 2 trials per size");

    RateSweepReport report;
    report.config = config;
    for (std::size_t s = 0; s < config.sizes.size(); ++s) {
        RateRow row;
        row.n = config.sizes[s];
        row.m = static_cast<Index>(std::llround(config.alpha * static_cast<double>(row.n)));
        const Ensemble ensemble{Model::er, row.m, row.n, 0, config.p, std::nullopt};
        ensemble.validate();
        const LimitLaw law(ensemble.alpha());
        row.mu = measure(config.interval, law);
        row.predicted = static_cast<double>(row.m + row.n) * row.mu;

        const std::uint64_t size_seed = derive_seed(config.seed, s);
        std::vector<double> counts(config.trials);
        parallel_for(config.trials, config.threads, [&](std::size_t t) {
            const Spectrum spectrum = ensemble.sample_spectrum(derive_seed(size_seed, t), Convention::consistent);
            counts[t] = static_cast<double>(count_in_interval(spectrum, config.interval));
        });
        const double trials = static_cast<double>(config.trials);
        row.mean_count = std::accumulate(counts.begin(), counts.end(), 0.0) / trials;
        double ss = 0.0;
        for (double c : counts)
            ss += (c - row.mean_count) * (c - row.mean_count);
        row.std_error = std::sqrt(ss / (trials - 1.0) / trials);
        row.abs_dev = std::abs(row.mean_count - row.predicted);
        row.rel_dev = row.predicted > 0.0 ? row.abs_dev / row.predicted : 0.0;
        report.rows.push_back(row);
    }

    std::vector<std::pair<double, double>> points;
    for (const auto& row : report.rows)
        if (row.abs_dev > 0.0)
            points.emplace_back(std::log(static_cast<double>(row.n)), std::log(row.abs_dev));
    if (points.size() >= 2) {
        double mx = 0.0;
        double my = 0.0;
        for (const auto& [x, y] : points) {
            mx += x;
            my += y;
        }
        mx /= points.size();
        my /= points.size();
        double sxy = 0.0;
        double sxx = 0.0;
        for (const auto& [x, y] : points) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
        if (sxx > 0.0)
            report.gamma = sxy / sxx;
    }
    return report;
}

json to_json(const RateSweepReport& report)
{
    const auto& config = report.config;
    json rows = json::array();
    for (const auto& row : report.rows)
        rows.push_back({{"n", row.n},
                        {"m", row.m},
                        {"mu", row.mu},
                        {"predicted", row.predicted},
                        {"mean_count", row.mean_count},
                        {"std_error", row.std_error},
                        {"abs_dev", row.abs_dev},
                        {"rel_dev", row.rel_dev}});
    return {{"schema", kReportSchema},
            {"experiment", "rate_sweep"},
            {"config",
             {{"sizes", config.sizes},
              {"alpha", config.alpha},
              {"p", config.p},
              {"interval", {config.interval.lo, config.interval.hi}},
              {"trials", config.trials},
              {"seed", config.seed}}},
            {"rows", rows},
            {"gamma", report.gamma ? json(*report.gamma) : json(nullptr)},
            {"metadata", metadata_json()}};
}

} // namespace bipspec
