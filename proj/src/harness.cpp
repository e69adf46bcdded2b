#include "evobench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "evobench/csv.hpp"

namespace evobench {

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::ap_atsp: return "ap_atsp";
        case Experiment::ttp: return "ttp";
        case Experiment::bent: return "bent";
        case Experiment::byzantine: return "byzantine";
    }
    throw std::logic_error("unreachable experiment value");
}

Experiment experiment_from_string(const std::string& s) {
    if (s == "ap_atsp") return Experiment::ap_atsp;
    if (s == "ttp") return Experiment::ttp;
    if (s == "bent") return Experiment::bent;
    if (s == "byzantine") return Experiment::byzantine;
    throw std::runtime_error("unknown experiment: " + s);
}

std::vector<std::uint64_t> paper_rand_max_ladder() {
    std::vector<std::uint64_t> out;
    out.reserve(72);
    for (std::uint64_t v = 1; v <= 10; ++v) out.push_back(v);
    for (std::uint64_t scale = 10; scale <= 10000000ULL; scale *= 10) {
        for (std::uint64_t m = 2; m <= 10; ++m) {
            const std::uint64_t v = m * scale;
            if (v > 90000000ULL) break;
            out.push_back(v);
        }
    }
    return out;
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& why) {
    throw std::runtime_error("config: key '" + key + "' has invalid value '" + value +
                             "' (" + why + ")");
}

std::uint64_t parse_u64(const std::string& key, const std::string& value,
                        std::uint64_t min_allowed = 0) {
    std::uint64_t v = 0;
    std::istringstream in(value);
    if (!(in >> v) || !in.eof()) bad_value(key, value, "expected unsigned integer");
    if (v < min_allowed) bad_value(key, value, "must be >= " + std::to_string(min_allowed));
    return v;
}

int parse_int(const std::string& key, const std::string& value, int min_allowed) {
    long long v = 0;
    std::istringstream in(value);
    if (!(in >> v) || !in.eof()) bad_value(key, value, "expected integer");
    if (v < min_allowed) bad_value(key, value, "must be >= " + std::to_string(min_allowed));
    return static_cast<int>(v);
}

double parse_double(const std::string& key, const std::string& value,
                    double lo, double hi) {
    double v = 0.0;
    std::istringstream in(value);
    if (!(in >> v) || !in.eof()) bad_value(key, value, "expected number");
    if (v < lo || v > hi) bad_value(key, value, "out of range");
    return v;
}

std::string fmt_double_key(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::vector<std::uint64_t> parse_randmax_list(const std::string& value) {
    if (value == "paper") return {};
    std::vector<std::uint64_t> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(parse_u64("randmax", item, 1));
    }
    if (out.empty()) bad_value("randmax", value, "expected 'paper' or a comma list");
    return out;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: malformed line (expected key=value): " + line);
        }
        entries.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }

    std::map<std::string, std::string> kv;
    for (auto& [k, v] : entries) {
        if (kv.count(k)) throw std::runtime_error("config: duplicate key: " + k);
        kv[k] = v;
    }

    ExperimentConfig cfg;
    auto take = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) return {};
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto has = [&](const char* key) { return kv.count(key) != 0; };

    if (!has("experiment")) throw std::runtime_error("config: missing key 'experiment'");
    cfg.experiment = experiment_from_string(take("experiment"));
    if (has("seed")) cfg.master_seed = parse_u64("seed", take("seed"));
    cfg.runs = (cfg.experiment == Experiment::byzantine) ? 50 : 100;
    if (has("runs")) cfg.runs = parse_u64("runs", take("runs"), 1);
    if (has("workers")) cfg.worker_count = parse_int("workers", take("workers"), 1);
    if (has("out")) cfg.output_dir = take("out");

    switch (cfg.experiment) {
        case Experiment::ap_atsp: {
            ApAtspParams p;
            if (has("n")) p.n = parse_int("n", take("n"), 2);
            if (has("matrices")) p.matrices = parse_int("matrices", take("matrices"), 1);
            if (has("randmax")) p.rand_max_list = parse_randmax_list(take("randmax"));
            if (has("inclusive_range"))
                p.inclusive_range = parse_int("inclusive_range", take("inclusive_range"), 0) != 0;
            cfg.params = p;
            break;
        }
        case Experiment::ttp: {
            TtpParams p;
            if (has("teams_min")) p.teams_min = parse_int("teams_min", take("teams_min"), 4);
            if (has("teams_max")) p.teams_max = parse_int("teams_max", take("teams_max"), 4);
            if (has("teams_step")) p.teams_step = parse_int("teams_step", take("teams_step"), 2);
            if (has("samples")) p.samples = parse_u64("samples", take("samples"), 1);
            if (has("max_streak")) p.max_streak_limit = parse_int("max_streak", take("max_streak"), 1);
            if (p.teams_min % 2 || p.teams_step % 2 || p.teams_max < p.teams_min) {
                throw std::runtime_error("config: invalid teams range");
            }
            cfg.params = p;
            break;
        }
        case Experiment::bent: {
            BentParams p;
            if (has("n")) p.n_vars = parse_int("n", take("n"), 2);
            if (has("depth")) p.depth = parse_int("depth", take("depth"), 1);
            if (has("lambda")) p.lambda = parse_int("lambda", take("lambda"), 1);
            if (has("mr")) p.mr = parse_double("mr", take("mr"), 0.0, 1.0);
            if (has("mc")) p.mc = parse_int("mc", take("mc"), 0);
            if (has("op")) {
                p.op = take("op");
                if (p.op != "uniform" && p.op != "point" && p.op != "single" &&
                    p.op != "semantic" && p.op != "all") {
                    bad_value("op", p.op, "expected uniform|point|single|semantic|all");
                }
            }
            if (has("budget")) p.budget = parse_u64("budget", take("budget"), 1);
            if (p.n_vars % 2) bad_value("n", std::to_string(p.n_vars), "must be even");
            cfg.params = p;
            break;
        }
        case Experiment::byzantine: {
            ByzantineParams p;
            if (has("problem")) {
                p.problem = take("problem");
                if (p.problem != "onemax" && p.problem != "leadingones" && p.problem != "both") {
                    bad_value("problem", p.problem, "expected onemax|leadingones|both");
                }
            }
            if (has("model")) {
                p.model = take("model");
                if (p.model != "inverter" && p.model != "randomizer" && p.model != "both") {
                    bad_value("model", p.model, "expected inverter|randomizer|both");
                }
            }
            if (has("p_min")) p.p_min = parse_double("p_min", take("p_min"), 0.0, 1.0);
            if (has("p_max")) p.p_max = parse_double("p_max", take("p_max"), 0.0, 1.0);
            if (has("p_step")) p.p_step = parse_double("p_step", take("p_step"), 1e-9, 1.0);
            if (has("mu")) p.mu = parse_int("mu", take("mu"), 2);
            if (has("len")) p.len = parse_int("len", take("len"), 1);
            if (has("px")) p.px = parse_double("px", take("px"), 0.0, 1.0);
            if (has("budget")) p.budget = parse_u64("budget", take("budget"), 1);
            if (p.mu % 2) bad_value("mu", std::to_string(p.mu), "must be even");
            cfg.params = p;
            break;
        }
    }

    if (!kv.empty()) {
        throw std::runtime_error("config: unknown key: " + kv.begin()->first);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string canonical_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "experiment=" << to_string(cfg.experiment) << '\n'
        << "seed=" << cfg.master_seed << '\n'
        << "runs=" << cfg.runs << '\n'
        << "workers=" << cfg.worker_count << '\n'
        << "out=" << cfg.output_dir << '\n';
    switch (cfg.experiment) {
        case Experiment::ap_atsp: {
            const auto& p = std::get<ApAtspParams>(cfg.params);
            out << "n=" << p.n << '\n' << "matrices=" << p.matrices << '\n';
            out << "randmax=";
            if (p.rand_max_list.empty()) {
                out << "paper";
            } else {
                for (std::size_t i = 0; i < p.rand_max_list.size(); ++i) {
                    if (i) out << ',';
                    out << p.rand_max_list[i];
                }
            }
            out << '\n' << "inclusive_range=" << (p.inclusive_range ? 1 : 0) << '\n';
            break;
        }
        case Experiment::ttp: {
            const auto& p = std::get<TtpParams>(cfg.params);
            out << "teams_min=" << p.teams_min << '\n'
                << "teams_max=" << p.teams_max << '\n'
                << "teams_step=" << p.teams_step << '\n'
                << "samples=" << p.samples << '\n'
                << "max_streak=" << p.max_streak_limit << '\n';
            break;
        }
        case Experiment::bent: {
            const auto& p = std::get<BentParams>(cfg.params);
            out << "n=" << p.n_vars << '\n'
                << "depth=" << p.depth << '\n'
                << "lambda=" << p.lambda << '\n'
                << "mr=" << fmt_double_key(p.mr) << '\n'
                << "mc=" << p.mc << '\n'
                << "op=" << p.op << '\n'
                << "budget=" << p.budget << '\n';
            break;
        }
        case Experiment::byzantine: {
            const auto& p = std::get<ByzantineParams>(cfg.params);
            out << "problem=" << p.problem << '\n'
                << "model=" << p.model << '\n'
                << "p_min=" << fmt_double_key(p.p_min) << '\n'
                << "p_max=" << fmt_double_key(p.p_max) << '\n'
                << "p_step=" << fmt_double_key(p.p_step) << '\n'
                << "mu=" << p.mu << '\n'
                << "len=" << p.len << '\n'
                << "px=" << fmt_double_key(p.px) << '\n'
                << "budget=" << p.budget << '\n';
            break;
        }
    }
    return out.str();
}

void save_config(const ExperimentConfig& config, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("config: cannot write " + path);
    out << canonical_config(config);
}

int effective_workers(int requested) {
    if (const char* env = std::getenv("EVOBENCH_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return requested >= 1 ? requested : 1;
}

int effective_workers(const ExperimentConfig& config) {
    return effective_workers(config.worker_count);
}

void write_records(std::vector<RunRecord> records,
                   const std::vector<std::string>& header,
                   const std::string& path) {
    for (const auto& r : records) {
        if (r.experiment_id != records.front().experiment_id) {
            throw std::runtime_error("write_records: mixed experiment ids ('" +
                                     records.front().experiment_id + "' vs '" +
                                     r.experiment_id + "')");
        }
        if (r.payload.size() != header.size()) {
            throw std::runtime_error("write_records: payload width does not match header");
        }
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const RunRecord& a, const RunRecord& b) {
                         return a.run_index < b.run_index;
                     });
    csv::Table t;
    t.header = header;
    for (auto& r : records) t.rows.push_back(std::move(r.payload));
    csv::write(path, t);
}

void run_indexed(std::uint64_t count, int workers,
                 const std::function<void(std::uint64_t)>& fn) {
    if (count == 0) return;
    const int nthreads = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)), count));
    if (nthreads == 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace evobench
