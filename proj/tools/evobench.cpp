// evobench - batch experimentation workbench CLI.
//
// Precedence: flags given on the command line always win; a --config file
// supplies defaults for anything not given explicitly.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evobench/assignment.hpp"
#include "evobench/bent.hpp"
#include "evobench/byzantine.hpp"
#include "evobench/csv.hpp"
#include "evobench/harness.hpp"
#include "evobench/plot.hpp"
#include "evobench/stats.hpp"
#include "evobench/ttp.hpp"

namespace {

using namespace evobench;

struct Common {
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out = "results";
    std::string config_path;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* workers_opt = nullptr;
    CLI::Option* out_opt = nullptr;

    void attach(CLI::App* app) {
        seed_opt = app->add_option("--seed", seed, "Master seed");
        workers_opt = app->add_option("--workers", workers, "Worker thread count");
        out_opt = app->add_option("--out", out, "Output directory");
        app->add_option("--config", config_path, "Config file supplying defaults");
    }

    // Folds an optional config file in underneath whatever was set explicitly.
    ExperimentConfig resolve(Experiment expected) {
        ExperimentConfig config;
        config.experiment = expected;
        switch (expected) {
            case Experiment::ap_atsp: config.params = ApAtspParams{}; break;
            case Experiment::ttp: config.params = TtpParams{}; break;
            case Experiment::bent: config.params = BentParams{}; break;
            case Experiment::byzantine: config.params = ByzantineParams{}; break;
        }
        if (!config_path.empty()) {
            config = load_config(config_path);
            if (config.experiment != expected) {
                throw std::runtime_error("config file is for experiment '" +
                                         evobench::to_string(config.experiment) +
                                         "', not '" + evobench::to_string(expected) + "'");
            }
        }
        if (seed_opt->count() || config_path.empty()) config.master_seed = seed;
        if (workers_opt->count()) config.worker_count = workers;
        if (out_opt->count() || config_path.empty()) config.output_dir = out;
        return config;
    }
};

std::filesystem::path prepare_out(const std::string& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
}

std::vector<std::uint64_t> parse_randmax(const std::string& s) {
    if (s == "paper") return paper_rand_max_ladder();
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoull(item));
    }
    if (out.empty()) throw std::runtime_error("--randmax: empty list");
    return out;
}

// "lo:hi:step" range syntax.
template <typename T>
void parse_range(const std::string& s, T& lo, T& hi, T& step) {
    std::stringstream ss(s);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c, ':')) {
        throw std::runtime_error("range '" + s + "': expected lo:hi:step");
    }
    if constexpr (std::is_integral_v<T>) {
        lo = static_cast<T>(std::stoll(a));
        hi = static_cast<T>(std::stoll(b));
        step = static_cast<T>(std::stoll(c));
    } else {
        lo = std::stod(a);
        hi = std::stod(b);
        step = std::stod(c);
    }
    if (step <= 0 || hi < lo) throw std::runtime_error("range '" + s + "': need step > 0, hi >= lo");
}

int run_ap_atsp(Common& common, CLI::Option* n_opt, CLI::Option* m_opt, CLI::Option* rm_opt,
                CLI::Option* inc_opt, int n, int matrices, const std::string& randmax,
                bool inclusive) {
    ExperimentConfig config = common.resolve(Experiment::ap_atsp);
    ApAtspParams params = std::get<ApAtspParams>(config.params);
    if (n_opt->count()) params.n = n;
    if (m_opt->count()) params.matrices = matrices;
    if (rm_opt->count()) params.rand_max_list = parse_randmax(randmax);
    if (inc_opt->count()) params.inclusive_range = inclusive;

    const auto ladder = params.rand_max_list.empty() ? paper_rand_max_ladder() : params.rand_max_list;
    const auto records = assignment::ap_atsp_ensemble(
        params.n, ladder, params.matrices, config.master_seed,
        effective_workers(config), params.inclusive_range);

    std::vector<RunRecord> rows;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::uint64_t first_unit = i * static_cast<std::uint64_t>(params.matrices);
        rows.push_back(assignment::to_record(records[i], i,
                                             derive_run_seed(config.master_seed, first_unit)));
    }
    const auto out = prepare_out(config.output_dir);
    write_records(std::move(rows), assignment::csv_header(), (out / "ap_atsp.csv").string());
    std::cout << "wrote " << (out / "ap_atsp.csv").string() << " (" << records.size()
              << " subensembles)\n";
    return 0;
}

int run_ttp(Common& common, CLI::Option* teams_opt, CLI::Option* samples_opt,
            CLI::Option* streak_opt, const std::string& teams, std::uint64_t samples,
            int streak_limit) {
    ExperimentConfig config = common.resolve(Experiment::ttp);
    TtpParams params = std::get<TtpParams>(config.params);
    if (teams_opt->count()) {
        parse_range(teams, params.teams_min, params.teams_max, params.teams_step);
    }
    if (samples_opt->count()) params.samples = samples;
    if (streak_opt->count()) params.max_streak_limit = streak_limit;

    std::vector<int> ns;
    for (int v = params.teams_min; v <= params.teams_max; v += params.teams_step) {
        if (v >= 4 && v % 2 == 0) ns.push_back(v);
    }
    if (ns.empty()) throw std::runtime_error("--teams: no even team counts >= 4 in range");

    const auto result = ttp::ttp_ensemble(ns, params.samples, config.master_seed,
                                          effective_workers(config), params.max_streak_limit);
    std::vector<RunRecord> rows;
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        rows.push_back(ttp::to_record(result.records[i], i,
                                      derive_run_seed(config.master_seed, i * params.samples)));
    }
    const auto out = prepare_out(config.output_dir);
    write_records(std::move(rows), ttp::csv_header(), (out / "ttp.csv").string());
    write_records(ttp::fit_records(result), ttp::fits_csv_header(),
                  (out / "ttp_fits.csv").string());
    std::cout << "wrote " << (out / "ttp.csv").string() << " and ttp_fits.csv ("
              << result.records.size() << " team counts)\n";
    return 0;
}

int run_bent(Common& common, const std::vector<std::pair<CLI::Option*, std::function<void(BentParams&)>>>& overrides,
             CLI::Option* runs_opt, std::uint64_t runs) {
    ExperimentConfig config = common.resolve(Experiment::bent);
    BentParams params = std::get<BentParams>(config.params);
    for (const auto& [opt, apply] : overrides) {
        if (opt->count()) apply(params);
    }
    if (runs_opt->count() || common.config_path.empty()) config.runs = runs;

    const auto result = bent::bent_experiment(params, config.runs, config.master_seed,
                                              effective_workers(config));
    const auto out = prepare_out(config.output_dir);
    write_records(bent::run_records(result, config.master_seed, config.runs),
                  bent::csv_header(), (out / "bent.csv").string());
    write_records(bent::report_records(result), bent::report_csv_header(),
                  (out / "bent_report.csv").string());
    for (const auto& s : result.summaries) {
        std::cout << bent::to_string(s.op) << ": " << s.runs - s.failures << "/" << s.runs
                  << " successful, median evals " << s.median_evals << "\n";
    }
    std::cout << "wrote " << (out / "bent.csv").string() << " and bent_report.csv\n";
    return 0;
}

int run_byzantine(Common& common,
                  const std::vector<std::pair<CLI::Option*, std::function<void(ByzantineParams&)>>>& overrides,
                  CLI::Option* runs_opt, std::uint64_t runs) {
    ExperimentConfig config = common.resolve(Experiment::byzantine);
    ByzantineParams params = std::get<ByzantineParams>(config.params);
    for (const auto& [opt, apply] : overrides) {
        if (opt->count()) apply(params);
    }
    if (runs_opt->count() || common.config_path.empty()) config.runs = runs;

    const auto cells = byzantine::byzantine_experiment(params, config.runs, config.master_seed,
                                                       effective_workers(config));
    const auto out = prepare_out(config.output_dir);
    write_records(byzantine::run_records(cells, config.master_seed, config.runs),
                  byzantine::csv_header(), (out / "byzantine.csv").string());
    std::cout << "wrote " << (out / "byzantine.csv").string() << " (" << cells.size()
              << " cells x " << config.runs << " runs)\n";
    return 0;
}

int run_fit(const std::string& in, const std::string& x_col, const std::string& y_col,
            std::size_t degree, const std::string& out_path) {
    const csv::Table table = csv::read(in);
    const std::size_t xi = table.column(x_col);
    const std::size_t yi = table.column(y_col);
    std::vector<double> xs, ys;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        xs.push_back(std::stod(table.rows[r][xi]));
        ys.push_back(std::stod(table.rows[r][yi]));
    }
    const stats::FitResult fit = stats::polyfit(xs, ys, degree);
    std::ostringstream line;
    line << "degree " << fit.degree << " fit of " << y_col << " on " << x_col << ":";
    for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
        line << " c" << (fit.degree - i) << "=" << csv::fmt(fit.coefficients[i]);
    }
    line << " rmse=" << csv::fmt(fit.rmse);
    std::cout << line.str() << "\n";
    if (!out_path.empty()) {
        csv::Table result;
        result.header = {"term", "coefficient"};
        for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
            result.rows.push_back({"c" + std::to_string(fit.degree - i),
                                   csv::fmt(fit.coefficients[i])});
        }
        result.rows.push_back({"rmse", csv::fmt(fit.rmse)});
        csv::write(out_path, result);
    }
    return 0;
}

int run_plot(const std::string& in, const std::string& kind, const std::string& x_col,
             const std::vector<std::string>& y_cols, bool log_x, bool log_y,
             const std::string& title, const std::string& x_label, const std::string& y_label,
             const std::string& out_path) {
    plot::PlotSpec spec;
    spec.kind = plot::plot_kind_from_string(kind);
    spec.x_column = x_col;
    spec.y_columns = y_cols;
    spec.log_x = log_x;
    spec.log_y = log_y;
    spec.title = title;
    spec.x_label = x_label;
    spec.y_label = y_label;
    const std::string svg = plot::emit_plot(csv::read(in), spec);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + out_path + "'");
    out << svg;
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evobench: batch evolutionary-computation experiment workbench"};
    app.require_subcommand(1);

    // ap-atsp
    auto* ap = app.add_subcommand("ap-atsp", "Assignment-solutions-as-ATSP-tours sweep");
    Common ap_common;
    ap_common.attach(ap);
    int ap_n = 100, ap_matrices = 1000;
    std::string ap_randmax = "paper";
    bool ap_inclusive = false;
    auto* ap_n_opt = ap->add_option("--n", ap_n, "Matrix size");
    auto* ap_m_opt = ap->add_option("--matrices", ap_matrices, "Matrices per subensemble");
    auto* ap_rm_opt = ap->add_option("--randmax", ap_randmax,
                                     "Comma-separated randMax list, or 'paper'");
    auto* ap_inc_opt = ap->add_flag("--inclusive", ap_inclusive,
                                    "Draw entries from {0..randMax} instead of {0..randMax-1}");

    // ttp
    auto* tp = app.add_subcommand("ttp", "TTP random-schedule violation sweep");
    Common tp_common;
    tp_common.attach(tp);
    std::string tp_teams = "4:50:2";
    std::uint64_t tp_samples = 100000;
    int tp_streak = 3;
    auto* tp_teams_opt = tp->add_option("--teams", tp_teams, "Team-count range lo:hi:step");
    auto* tp_samples_opt = tp->add_option("--samples", tp_samples, "Schedules per team count");
    auto* tp_streak_opt = tp->add_option("--streak-limit", tp_streak, "maxStreak limit");

    // bent
    auto* bt = app.add_subcommand("bent", "Bent-function GP mutation-operator comparison");
    Common bt_common;
    bt_common.attach(bt);
    BentParams bt_flags;
    std::uint64_t bt_runs = 100;
    std::vector<std::pair<CLI::Option*, std::function<void(BentParams&)>>> bt_overrides;
    bt_overrides.push_back({bt->add_option("--n", bt_flags.n_vars, "Number of variables"),
                            [&](BentParams& p) { p.n_vars = bt_flags.n_vars; }});
    bt_overrides.push_back({bt->add_option("--depth", bt_flags.depth, "Tree depth limit"),
                            [&](BentParams& p) { p.depth = bt_flags.depth; }});
    bt_overrides.push_back({bt->add_option("--lambda", bt_flags.lambda, "Offspring per generation"),
                            [&](BentParams& p) { p.lambda = bt_flags.lambda; }});
    bt_overrides.push_back({bt->add_option("--op", bt_flags.op,
                                           "uniform|point|single|semantic|all"),
                            [&](BentParams& p) { p.op = bt_flags.op; }});
    bt_overrides.push_back({bt->add_option("--mr", bt_flags.mr, "Uniform mutation rate"),
                            [&](BentParams& p) { p.mr = bt_flags.mr; }});
    bt_overrides.push_back({bt->add_option("--mc", bt_flags.mc, "Point mutation gene count"),
                            [&](BentParams& p) { p.mc = bt_flags.mc; }});
    bt_overrides.push_back({bt->add_option("--budget", bt_flags.budget, "Evaluation budget per run"),
                            [&](BentParams& p) { p.budget = bt_flags.budget; }});
    auto* bt_runs_opt = bt->add_option("--runs", bt_runs, "Runs per operator");

    // byzantine
    auto* bz = app.add_subcommand("byzantine", "Unreliable-fitness GA degradation sweep");
    Common bz_common;
    bz_common.attach(bz);
    ByzantineParams bz_flags;
    std::string bz_p = "0:0.5:0.05";
    std::uint64_t bz_runs = 50;
    std::vector<std::pair<CLI::Option*, std::function<void(ByzantineParams&)>>> bz_overrides;
    bz_overrides.push_back({bz->add_option("--problem", bz_flags.problem,
                                           "onemax|leadingones|both"),
                            [&](ByzantineParams& p) { p.problem = bz_flags.problem; }});
    bz_overrides.push_back({bz->add_option("--model", bz_flags.model,
                                           "inverter|randomizer|both"),
                            [&](ByzantineParams& p) { p.model = bz_flags.model; }});
    bz_overrides.push_back({bz->add_option("--p", bz_p, "Corruption probability range lo:hi:step"),
                            [&](ByzantineParams& p) {
                                parse_range(bz_p, p.p_min, p.p_max, p.p_step);
                            }});
    bz_overrides.push_back({bz->add_option("--mu", bz_flags.mu, "Population size"),
                            [&](ByzantineParams& p) { p.mu = bz_flags.mu; }});
    bz_overrides.push_back({bz->add_option("--len", bz_flags.len, "Genome length"),
                            [&](ByzantineParams& p) { p.len = bz_flags.len; }});
    bz_overrides.push_back({bz->add_option("--px", bz_flags.px, "Crossover probability"),
                            [&](ByzantineParams& p) { p.px = bz_flags.px; }});
    bz_overrides.push_back({bz->add_option("--budget", bz_flags.budget,
                                           "Evaluation budget per run"),
                            [&](ByzantineParams& p) { p.budget = bz_flags.budget; }});
    auto* bz_runs_opt = bz->add_option("--runs", bz_runs, "Runs per cell");

    // fit
    auto* ft = app.add_subcommand("fit", "Least-squares polynomial fit over CSV columns");
    std::string ft_in, ft_x, ft_y, ft_out;
    std::size_t ft_degree = 1;
    ft->add_option("--in", ft_in, "Input CSV")->required();
    ft->add_option("--x", ft_x, "X column name")->required();
    ft->add_option("--y", ft_y, "Y column name")->required();
    ft->add_option("--degree", ft_degree, "Polynomial degree");
    ft->add_option("--out", ft_out, "Optional CSV for the coefficients");

    // plot
    auto* pl = app.add_subcommand("plot", "Render a CSV to a standalone SVG");
    std::string pl_in, pl_kind = "line", pl_x, pl_title, pl_xlabel, pl_ylabel, pl_out;
    std::vector<std::string> pl_y;
    bool pl_logx = false, pl_logy = false;
    pl->add_option("--in", pl_in, "Input CSV")->required();
    pl->add_option("--kind", pl_kind, "line|scatter|box");
    pl->add_option("--x", pl_x, "X column (line/scatter)");
    pl->add_option("--y", pl_y, "Y columns (one series each)")->required();
    pl->add_flag("--log-x", pl_logx, "Logarithmic x axis");
    pl->add_flag("--log-y", pl_logy, "Logarithmic y axis");
    pl->add_option("--title", pl_title, "Plot title");
    pl->add_option("--xlabel", pl_xlabel, "X axis label");
    pl->add_option("--ylabel", pl_ylabel, "Y axis label");
    pl->add_option("--out", pl_out, "Output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (ap->parsed()) {
            return run_ap_atsp(ap_common, ap_n_opt, ap_m_opt, ap_rm_opt, ap_inc_opt,
                               ap_n, ap_matrices, ap_randmax, ap_inclusive);
        }
        if (tp->parsed()) {
            return run_ttp(tp_common, tp_teams_opt, tp_samples_opt, tp_streak_opt,
                           tp_teams, tp_samples, tp_streak);
        }
        if (bt->parsed()) return run_bent(bt_common, bt_overrides, bt_runs_opt, bt_runs);
        if (bz->parsed()) return run_byzantine(bz_common, bz_overrides, bz_runs_opt, bz_runs);
        if (ft->parsed()) return run_fit(ft_in, ft_x, ft_y, ft_degree, ft_out);
        if (pl->parsed()) {
            return run_plot(pl_in, pl_kind, pl_x, pl_y, pl_logx, pl_logy,
                            pl_title, pl_xlabel, pl_ylabel, pl_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "evobench: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
