#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bipspec/experiments.hpp"
#include "bipspec/factors.hpp"
#include "bipspec/graphs.hpp"
#include "bipspec/mplaw.hpp"
#include "bipspec/spectra.hpp"

namespace bipspec::cli {

namespace {

using nlohmann::json;

std::string fmt17(double v)
{
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep))
        parts.push_back(item);
    return parts;
}

double parse_double(const std::string& text)
{
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw DomainError("not a number: '" + text + "'");
    return value;
}

std::vector<double> parse_doubles(const std::string& text)
{
    std::vector<double> out;
    for (const auto& part : split(text, ','))
        out.push_back(parse_double(part));
    if (out.empty())
        throw DomainError("empty list");
    return out;
}

std::vector<int> parse_ints(const std::string& text)
{
    std::vector<int> out;
    for (const auto& part : split(text, ',')) {
        const double v = parse_double(part);
        if (v != std::floor(v) || std::abs(v) > 1e9)
            throw DomainError("not an integer: '" + part + "'");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty())
        throw DomainError("empty list");
    return out;
}

Interval parse_interval(const std::string& text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 2)
        throw DomainError("interval must be written lo:hi, got '" + text + "'");
    return {parse_double(parts[0]), parse_double(parts[1])};
}

// Demand list of the expected length; a single value is broadcast.
std::vector<int> demand_list(const std::string& text, Index size, const char* side)
{
    auto values = parse_ints(text);
    if (values.size() == 1)
        values.assign(size, values.front());
    if (static_cast<Index>(values.size()) != size)
        throw DomainError(std::string(side) + " demand list has " + std::to_string(values.size()) +
                          " entries, graph has " + std::to_string(size));
    return values;
}

unsigned env_threads()
{
    if (const char* env = std::getenv("BIPSPEC_THREADS")) {
        try {
            const double v = parse_double(env);
            if (v >= 0 && v == std::floor(v))
                return static_cast<unsigned>(v);
        } catch (const DomainError&) {
        }
        throw DomainError(std::string("BIPSPEC_THREADS must be a non-negative integer, got '") + env + "'");
    }
    return 0;
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out)
        throw std::runtime_error("write to " + path + " failed");
}

// Splices `--config FILE` (JSON object mirroring the long flags) into the
// argument list right after the subcommand, ahead of the user's own flags;
// with last-wins option policy, explicit flags override file values.
std::vector<std::string> expand_config(std::vector<std::string> args, const std::vector<std::string>& subcommands)
{
    std::optional<std::string> path;
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw CLI::ArgumentMismatch("--config requires a file path");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            kept.push_back(args[i]);
        }
    }
    if (!path)
        return kept;

    std::ifstream in(*path);
    if (!in)
        throw CLI::ValidationError("--config", "cannot open " + *path);
    json config;
    try {
        in >> config;
    } catch (const json::exception& e) {
        throw CLI::ValidationError("--config", std::string("invalid JSON: ") + e.what());
    }
    if (!config.is_object())
        throw CLI::ValidationError("--config", "config file must hold a JSON object");

    std::vector<std::string> injected;
    for (const auto& [key, value] : config.items()) {
        const std::string flag = "--" + key;
        if (value.is_boolean()) {
            if (value.get<bool>())
                injected.push_back(flag);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty())
                    joined += ',';
                joined += item.is_string() ? item.get<std::string>() : item.dump();
            }
            injected.push_back(flag + "=" + joined);
        } else if (value.is_string()) {
            injected.push_back(flag + "=" + value.get<std::string>());
        } else {
            injected.push_back(flag + "=" + value.dump());
        }
    }
    auto at = std::find_first_of(kept.begin() + 1, kept.end(), subcommands.begin(), subcommands.end());
    if (at == kept.end())
        throw CLI::ValidationError("--config", "a subcommand is required");
    kept.insert(at + 1, injected.begin(), injected.end());
    return kept;
}

struct EnsembleArgs {
    std::string model = "regular";
    Index m = 0;
    Index n = 0;
    std::optional<Index> dl;
    std::optional<double> p;
    std::optional<std::uint64_t> mixing_steps;

    void add_to(CLI::App* app)
    {
        app->add_option("--model", model, "Graph ensemble")->check(CLI::IsMember({"er", "regular"}));
        app->add_option("--m", m, "Left vertex count (the larger side)")->required();
        app->add_option("--n", n, "Right vertex count")->required();
        app->add_option("--dl", dl, "Left degree of the regular ensemble");
        app->add_option("--p", p, "Edge probability of the ER ensemble");
        app->add_option("--mixing-steps", mixing_steps, "Switch-chain length (default 10 m dL ln(m dL))");
    }

    Ensemble build() const
    {
        Ensemble e;
        e.model = parse_model(model);
        e.m = m;
        e.n = n;
        e.mixing_steps = mixing_steps;
        if (e.model == Model::regular) {
            if (!dl)
                throw DomainError("--model regular needs --dl");
            e.dL = *dl;
        } else {
            if (!p)
                throw DomainError("--model er needs --p");
            e.p = *p;
        }
        e.validate();
        return e;
    }
};

struct Context {
    std::ostream& out;
    std::ostream& err;
    unsigned threads = 0;
    bool json_output = false;
};

// ---------------------------------------------------------------------------

void add_mp_eval(CLI::App& app, Context& ctx, std::function<int()>& action)
{
    auto* cmd = app.add_subcommand("mp-eval", "Evaluate the limit law density (and CDF) on a grid");
    auto alpha = std::make_shared<double>(1.0);
    auto from = std::make_shared<double>(-2.0);
    auto to = std::make_shared<double>(2.0);
    auto points = std::make_shared<long>(101);
    auto with_cdf = std::make_shared<bool>(false);
    auto law_kind = std::make_shared<std::string>("sym");
    cmd->add_option("--alpha", *alpha, "Aspect ratio m/n >= 1")->required();
    cmd->add_option("--from", *from, "Grid start");
    cmd->add_option("--to", *to, "Grid end");
    cmd->add_option("--points", *points, "Number of grid points (>= 2)");
    cmd->add_flag("--cdf", *with_cdf, "Append the CDF column");
    cmd->add_option("--law", *law_kind, "sym: symmetrized law; mp: Marchenko-Pastur density")
        ->check(CLI::IsMember({"sym", "mp"}));
    cmd->callback([=, &ctx, &action] {
        action = [=, &ctx] {
            if (!(*alpha >= 1.0))
                throw DomainError("--alpha must be >= 1");
            if (!(*from < *to))
                throw DomainError("--from must be below --to");
            if (*points < 2)
                throw DomainError("--points must be at least 2");
            const LimitLaw law(*alpha);
            ctx.out << (*with_cdf ? "x,density,cdf\n" : "x,density\n");
            for (long i = 0; i < *points; ++i) {
                const double x = i + 1 == *points ? *to : *from + (*to - *from) * i / (*points - 1);
                const double density = *law_kind == "mp" ? mp_density(x, *alpha) : sym_density(x, law);
                ctx.out << fmt17(x) << ',' << fmt17(density);
                if (*with_cdf)
                    ctx.out << ',' << fmt17(cdf(x, law));
                ctx.out << '\n';
            }
            return kExitOk;
        };
    });
}

void add_sample(CLI::App& app, Context& ctx, std::function<int()>& action)
{
    auto* cmd = app.add_subcommand("sample", "Sample a bipartite graph and write its edge list");
    auto model = std::make_shared<std::string>();
    auto m = std::make_shared<Index>(0);
    auto n = std::make_shared<Index>(0);
    auto p = std::make_shared<std::optional<double>>();
    auto dl = std::make_shared<std::optional<Index>>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto out_path = std::make_shared<std::string>();
    auto mixing = std::make_shared<std::optional<std::uint64_t>>();
    cmd->add_option("--model", *model, "er or regular")->required()->check(CLI::IsMember({"er", "regular"}));
    cmd->add_option("--m", *m, "Left vertex count")->required();
    cmd->add_option("--n", *n, "Right vertex count")->required();
    cmd->add_option("--p", *p, "Edge probability (er)");
    cmd->add_option("--dl", *dl, "Left degree (regular)");
    cmd->add_option("--seed", *seed, "RNG seed")->required();
    cmd->add_option("--out", *out_path, "Edge-list output path")->required();
    cmd->add_option("--mixing-steps", *mixing, "Switch-chain length (regular)");
    cmd->callback([=, &ctx, &action] {
        action = [=, &ctx] {
            std::optional<BipartiteGraph> g;
            if (*model == "er") {
                if (!*p)
                    throw DomainError("--model er needs --p");
                g = sample_er(*m, *n, **p, *seed);
            } else {
                if (!*dl)
                    throw DomainError("--model regular needs --dl");
                if (*m < 1 || *n < 1)
                    throw DomainError("--m and --n must be positive");
                if ((*m * **dl) % *n != 0)
                    throw InfeasibleError("infeasible", "m*dL is not divisible by n: no (dL, dR)-regular graph");
                g = sample_regular(*m, *n, {**dl, *m * **dl / *n}, *seed, *mixing);
            }
            write_edge_list(*out_path, *g);
            ctx.out << *model << ' ' << g->m() << ' ' << g->n() << ' ' << g->edge_count() << ' ' << *seed << '\n';
            return kExitOk;
        };
    });
}

void add_spectrum(CLI::App& app, Context& ctx, std::function<int()>& action)
{
    auto* cmd = app.add_subcommand("spectrum", "Eigenvalues of a graph's (normalized) block adjacency");
    auto in_path = std::make_shared<std::string>();
    auto normalize = std::make_shared<std::string>();
    auto p = std::make_shared<std::optional<double>>();
    auto dl = std::make_shared<std::optional<Index>>();
    auto out_path = std::make_shared<std::string>();
    auto bins = std::make_shared<std::optional<int>>();
    auto hist_path = std::make_shared<std::string>();
    auto scale_kind = std::make_shared<std::string>("auto");
    cmd->add_option("--in", *in_path, "Edge-list input")->required();
    cmd->add_option("--normalize", *normalize, "regular, er or none")
        ->required()
        ->check(CLI::IsMember({"regular", "er", "none"}));
    cmd->add_option("--p", *p, "Edge probability for --normalize er");
    cmd->add_option("--dl", *dl, "Left degree for --normalize regular (default: inferred)");
    cmd->add_option("--out", *out_path, "Eigenvalue CSV output")->required();
    cmd->add_option("--hist", *bins, "Also write a histogram with this many bins");
    cmd->add_option("--hist-out", *hist_path, "Histogram CSV path (default: <out>.hist.csv)");
    cmd->add_option("--scale", *scale_kind,
                    "Eigenvalue scale: auto (larger side when normalized, 1 otherwise), larger, smaller, unit")
        ->check(CLI::IsMember({"auto", "larger", "smaller", "unit"}));
    cmd->callback([=, &ctx, &action] {
        action = [=, &ctx] {
            const BipartiteGraph g = read_edge_list(*in_path);
            Eigen::MatrixXd block;
            if (*normalize == "regular") {
                const Index d = dl->value_or(g.left_degrees()[0]);
                if ((g.m() * d) % g.n() != 0)
                    throw InfeasibleError("infeasible", "m*dL is not divisible by n");
                const DegreeSpec spec{d, g.m() * d / g.n()};
                if (!is_regular(g, spec))
                    throw InfeasibleError("infeasible", "graph in " + *in_path + " is not (" + std::to_string(spec.dL) +
                                                            ", " + std::to_string(spec.dR) + ")-regular");
                if (spec.dL <= 0 || spec.dL >= g.n())
                    throw InfeasibleError("infeasible", "normalization needs 0 < dL < n");
                block = normalized_regular_block(g, spec);
            } else if (*normalize == "er") {
                if (!*p)
                    throw DomainError("--normalize er needs --p");
                block = normalized_er_block(g, **p);
            } else {
                block = g.biadjacency().cast<double>();
            }
            std::string kind = *scale_kind;
            if (kind == "auto")
                kind = *normalize == "none" ? "unit" : "larger";
            double scale = 1.0;
            if (kind == "larger")
                scale = 1.0 / std::sqrt(static_cast<double>(std::max(g.m(), g.n())));
            else if (kind == "smaller")
                scale = 1.0 / std::sqrt(static_cast<double>(std::min(g.m(), g.n())));
            const Spectrum s = bipartite_spectrum(block, scale);

            std::ostringstream csv;
            write_spectrum_csv(csv, s);
            write_text(*out_path, csv.str());

            if (*bins) {
                const Eigen::VectorXd v = s.scaled();
                double lo = v.minCoeff();
                double hi = v.maxCoeff();
                if (!(hi > lo)) {
                    lo -= 0.5;
                    hi += 0.5;
                }
                const auto counts = histogram(s, lo, hi, **bins);
                std::ostringstream h;
                h << "bin_lo,bin_hi,count\n";
                const double width = (hi - lo) / **bins;
                for (int b = 0; b < **bins; ++b)
                    h << fmt17(lo + b * width) << ',' << fmt17(b + 1 == **bins ? hi : lo + (b + 1) * width) << ','
                      << counts[b] << '\n';
                write_text(hist_path->empty() ? *out_path + ".hist.csv" : *hist_path, h.str());
            }
            ctx.out << "spectrum " << s.size() << " eigenvalues, scale " << fmt17(scale) << '\n';
            return kExitOk;
        };
    });
}

void add_local_law(CLI::App& app, Context& ctx, std::function<int()>& action)
{
    auto* cmd = app.add_subcommand("local-law", "Monte-Carlo check of eigenvalue counts on short intervals");
    auto ensemble = std::make_shared<EnsembleArgs>();
    auto config = std::make_shared<LocalLawConfig>();
    auto intervals = std::make_shared<std::string>();
    auto convention = std::make_shared<std::string>("consistent");
    auto out_dir = std::make_shared<std::string>();
    ensemble->add_to(cmd);
    cmd->add_option("--delta", config->delta, "Relative tolerance delta")->required();
    cmd->add_option("--trials", config->trials, "Number of trials");
    cmd->add_option("--seed", config->seed, "Master seed")->required();
    cmd->add_option("--out", *out_dir, "Output directory for report.json and summary.csv")->required();
    cmd->add_option("--intervals-per-side", config->intervals_per_side, "Grid intervals on each side of 0");
    cmd->add_option("--bulk-margin", config->bulk_margin, "Fraction of b - a trimmed at each support edge");
    cmd->add_option("--interval-length", config->interval_length, "Override the grid interval length");
    cmd->add_option("--intervals", *intervals, "Explicit intervals lo:hi,lo:hi,... (replace the grid)");
    cmd->add_option("--convention", *convention, "consistent ((m+n) mu, 1/sqrt(m)) or literal (n mu, 1/sqrt(n))")
        ->check(CLI::IsMember({"consistent", "literal"}));
    cmd->add_option("--pass-threshold", config->pass_threshold, "Required aggregate pass rate (exit 4 below)");
    cmd->callback([=, &ctx, &action] {
        action = [=, &ctx] {
            LocalLawConfig cfg = *config;
            cfg.ensemble = ensemble->build();
            cfg.convention = parse_convention(*convention);
            cfg.threads = ctx.threads;
            if (!intervals->empty())
                for (const auto& part : split(*intervals, ','))
                    cfg.intervals.push_back(parse_interval(part));
            const LocalLawReport report = run_local_law(cfg);
            const json j = to_json(report);

            std::filesystem::create_directories(*out_dir);
            write_text((std::filesystem::path(*out_dir) / "report.json").string(), j.dump(2) + "\n");
            std::ostringstream csv;
            write_summary_csv(csv, report);
            write_text((std::filesystem::path(*out_dir) / "summary.csv").string(), csv.str());

            if (ctx.json_output)
                ctx.out << j.dump(2) << '\n';
            else
                ctx.out << "pass_rate " << fmt17(report.aggregate.pass_rate) << " comparisons "
                        << report.aggregate.comparisons << " threshold " << fmt17(cfg.pass_threshold) << ' '
                        << (report.passed() ? "PASS" : "FAIL") << '\n';
            for (const auto& w : report.warnings)
                ctx.err << "warning: " << w << '\n';
            return report.passed() ? kExitOk : kExitThreshold;
        };
    });
}

void add_factor_check(CLI::App& app, Context& ctx, std::function<int()>& action)
{
    auto* cmd = app.add_subcommand("factor-check", "Decide whether a graph has an f-factor");
    auto in_path = std::make_shared<std::string>();
    auto fa = std::make_shared<std::string>();
    auto fb = std::make_shared<std::string>();
    auto ore_ryser = std::make_shared<bool>(false);
    auto factor_out = std::make_shared<std::string>();
    cmd->add_option("--in", *in_path, "Edge-list input")->required();
    cmd->add_option("--fa", *fa, "Left demands (comma list, or one value for all)")->required();
    cmd->add_option("--fb", *fb, "Right demands (comma list, or one value for all)")->required();
    cmd->add_flag("--ore-ryser", *ore_ryser, "Also run the exhaustive subset check");
    cmd->add_option("--factor-out", *factor_out, "Write the factor found as an edge list");
    cmd->callback([=, &ctx, &action] {
        action = [=, &ctx] {
            const BipartiteGraph g = read_edge_list(*in_path);
            const FactorSpec spec{demand_list(*fa, g.m(), "left"), demand_list(*fb, g.n(), "right")};
            if (!spec.balanced())
                throw InfeasibleError("unbalanced", "unbalanced: sum of left demands " +
                                                        std::to_string(spec.left_total()) +
                                                        " != sum of right demands " +
                                                        std::to_string(spec.right_total()));
            const FactorResult result = find_f_factor(g, spec);
            std::optional<bool> exhaustive;
            if (*ore_ryser)
                exhaustive = ore_ryser_check(g, spec);
            if (result && !factor_out->empty())
                write_edge_list(*factor_out, *result.factor);
            if (ctx.json_output) {
                json j = {{"schema", kReportSchema},
                          {"factor_exists", result.factor.has_value()},
                          {"reason", to_string(result.reason)},
                          {"ore_ryser", exhaustive ? json(*exhaustive) : json(nullptr)}};
                if (result)
                    j["factor_edges"] = result.factor->edge_count();
                ctx.out << j.dump(2) << '\n';
            } else {
                ctx.out << (result ? "factor exists" : "no factor");
                if (result)
                    ctx.out << " (" << result.factor->edge_count() << " edges)";
                if (exhaustive)
                    ctx.out << "; ore-ryser " << (*exhaustive ? "holds" : "fails");
                ctx.out << '\n';
            }
            return kExitOk;
        };
    });
}

void add_regularity_prob(CLI::App& app, Context& ctx, std::function<int()>& action)
{
    auto* cmd = app.add_subcommand("regularity-prob", "Estimate P(G(m,n,p) is (np, mp)-regular)");
    auto m = std::make_shared<Index>(0);
    auto n = std::make_shared<Index>(0);
    auto p = std::make_shared<double>(0.0);
    auto trials = std::make_shared<std::uint64_t>(100000);
    auto seed = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--m", *m)->required();
    cmd->add_option("--n", *n)->required();
    cmd->add_option("--p", *p)->required();
    cmd->add_option("--trials", *trials);
    cmd->add_option("--seed", *seed)->required();
    cmd->callback([=, &ctx, &action] {
        action = [=, &ctx] {
            const auto report = estimate_regularity_probability(*m, *n, *p, *trials, *seed, ctx.threads);
            const auto& e = report.estimate;
            if (ctx.json_output)
                ctx.out << to_json(report).dump(2) << '\n';
            else
                ctx.out << "estimate " << fmt17(e.estimate) << " successes " << e.successes << " trials " << e.trials
                        << " wilson95 [" << fmt17(e.lo) << ", " << fmt17(e.hi) << "]\n";
            return kExitOk;
        };
    });
}

void add_factor_freq(CLI::App& app, Context& ctx, std::function<int()>& action)
{
    auto* cmd = app.add_subcommand("factor-freq", "Frequency of (dL', dR')-regular factors in G(m,n,p)");
    auto m = std::make_shared<Index>(0);
    auto n = std::make_shared<Index>(0);
    auto p = std::make_shared<double>(0.0);
    auto delta = std::make_shared<double>(0.1);
    auto trials = std::make_shared<int>(200);
    auto seed = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--m", *m)->required();
    cmd->add_option("--n", *n)->required();
    cmd->add_option("--p", *p)->required();
    cmd->add_option("--delta", *delta, "Demands dL' = floor(np (1 - delta))");
    cmd->add_option("--trials", *trials);
    cmd->add_option("--seed", *seed)->required();
    cmd->callback([=, &ctx, &action] {
        action = [=, &ctx] {
            const auto report = regular_factor_frequency(*m, *n, *p, *delta, *trials, *seed, ctx.threads);
            const auto& e = report.estimate;
            if (ctx.json_output)
                ctx.out << to_json(report).dump(2) << '\n';
            else
                ctx.out << "demands (" << report.dL_factor << ", " << report.dR_factor << ") frequency "
                        << fmt17(e.estimate) << " successes " << e.successes << " trials " << e.trials
                        << " wilson95 [" << fmt17(e.lo) << ", " << fmt17(e.hi) << "]\n";
            return kExitOk;
        };
    });
}

void add_concentration(CLI::App& app, Context& ctx, std::function<int()>& action)
{
    auto* cmd = app.add_subcommand("concentration", "Tail table of a Lipschitz trace statistic");
    auto ensemble = std::make_shared<EnsembleArgs>();
    ensemble->model = "er";
    auto function = std::make_shared<std::string>("f1");
    auto window = std::make_shared<std::string>("0.5:1.0");
    auto config = std::make_shared<ConcentrationConfig>();
    auto thresholds = std::make_shared<std::string>();
    ensemble->add_to(cmd);
    cmd->add_option("--function", *function, "f1, f2, g1, g2, identity or constant")
        ->check(CLI::IsMember({"f1", "f2", "g1", "g2", "identity", "constant"}));
    cmd->add_option("--window", *window, "Window interval lo:hi");
    cmd->add_option("--window-c", config->window_c, "Window constant C (slope C/|I|)");
    cmd->add_option("--lipschitz", config->lipschitz, "Lipschitz constant L (default from the function)");
    cmd->add_option("--T", *thresholds, "Comma list of thresholds")->required();
    cmd->add_option("--c", config->bound_constant, "Constant c of the reference bound");
    cmd->add_option("--trials", config->trials);
    cmd->add_option("--seed", config->seed)->required();
    cmd->callback([=, &ctx, &action] {
        action = [=, &ctx] {
            ConcentrationConfig cfg = *config;
            cfg.ensemble = ensemble->build();
            cfg.function = parse_trace_function(*function);
            cfg.window = parse_interval(*window);
            cfg.thresholds = parse_doubles(*thresholds);
            cfg.threads = ctx.threads;
            const auto report = concentration_tail_check(cfg);
            if (ctx.json_output) {
                ctx.out << to_json(report).dump(2) << '\n';
            } else {
                ctx.out << "T,empirical,bound\n";
                for (const auto& row : report.tails)
                    ctx.out << fmt17(row.threshold) << ',' << fmt17(row.empirical) << ',' << fmt17(row.bound) << '\n';
                ctx.out << "# mean " << fmt17(report.mean) << " stddev " << fmt17(report.stddev) << " K "
                        << fmt17(report.entry_bound) << " L " << fmt17(report.lipschitz) << " fitted_c "
                        << (report.fitted_c ? fmt17(*report.fitted_c) : "none") << '\n';
            }
            return kExitOk;
        };
    });
}

void add_rate_sweep(CLI::App& app, Context& ctx, std::function<int()>& action)
{
    auto* cmd = app.add_subcommand("rate-sweep", "Deviation of the mean interval count against n");
    auto config = std::make_shared<RateSweepConfig>();
    auto sizes = std::make_shared<std::string>("200,400,800");
    auto interval = std::make_shared<std::string>("0.5:1.0");
    cmd->add_option("--sizes", *sizes, "Comma list of n values (at least 3)");
    cmd->add_option("--alpha", config->alpha, "Aspect ratio m/n");
    cmd->add_option("--p", config->p, "Edge probability");
    cmd->add_option("--interval", *interval, "Interval lo:hi");
    cmd->add_option("--trials", config->trials);
    cmd->add_option("--seed", config->seed)->required();
    cmd->callback([=, &ctx, &action] {
        action = [=, &ctx] {
            RateSweepConfig cfg = *config;
            for (int v : parse_ints(*sizes))
                cfg.sizes.push_back(v);
            cfg.interval = parse_interval(*interval);
            cfg.threads = ctx.threads;
            const auto report = convergence_rate_sweep(cfg);
            if (ctx.json_output) {
                ctx.out << to_json(report).dump(2) << '\n';
            } else {
                ctx.out << "n,m,predicted,mean_count,std_error,abs_dev,rel_dev\n";
                for (const auto& r : report.rows)
                    ctx.out << r.n << ',' << r.m << ',' << fmt17(r.predicted) << ',' << fmt17(r.mean_count) << ','
                            << fmt17(r.std_error) << ',' << fmt17(r.abs_dev) << ',' << fmt17(r.rel_dev) << '\n';
                ctx.out << "# gamma " << (report.gamma ? fmt17(*report.gamma) : "none") << '\n';
            }
            return kExitOk;
        };
    });
}

} // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    Context ctx{out, err};
    std::function<int()> action;

    CLI::App app{"Spectra of random bipartite graphs and the bipartite Marchenko-Pastur limit law", "bipspec"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    std::optional<unsigned> threads;
    app.add_option("--threads", threads, "Worker threads, 0 = all cores (fallback: BIPSPEC_THREADS)")
        ->configurable(false);
    app.add_flag("--json", ctx.json_output, "Print JSON instead of text where supported");
    app.fallthrough();

    add_mp_eval(app, ctx, action);
    add_sample(app, ctx, action);
    add_spectrum(app, ctx, action);
    add_local_law(app, ctx, action);
    add_factor_check(app, ctx, action);
    add_regularity_prob(app, ctx, action);
    add_factor_freq(app, ctx, action);
    add_concentration(app, ctx, action);
    add_rate_sweep(app, ctx, action);

    try {
        std::vector<std::string> names;
        for (const auto* sub : app.get_subcommands({}))
            names.push_back(sub->get_name());
        args = expand_config(std::move(args), names);
        std::reverse(args.begin(), args.end());
        args.pop_back(); // program name
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitArgument;
    }

    try {
        ctx.threads = threads ? *threads : env_threads();
        return action ? action() : kExitArgument;
    } catch (const InfeasibleError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitArgument;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitArgument;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace bipspec::cli
