// harness.hpp - experiment configuration, per-run seeding, the worker pool,
// and CSV persistence shared by the four study engines.
//
// Config files are line-oriented plain text: one `key=value` per line, `#`
// starts a comment, blank lines ignored. `experiment` selects which
// experiment-specific keys are accepted. Saving a config always writes keys
// in a fixed canonical order, so save(load(f)) is byte-stable.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "evobench/rng.hpp"

namespace evobench {

enum class Experiment { ap_atsp, ttp, bent, byzantine };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

struct ApAtspParams {
    int n = 100;
    std::vector<std::uint64_t> rand_max_list; // empty = paper's 72-value ladder
    int matrices = 1000;
    bool inclusive_range = false; // false: entries in {0..randMax-1}; true: {0..randMax}
};

// The full 72-value randMax ladder: 1..10, then 20..100 by 10, and so on up
// to 90,000,000.
std::vector<std::uint64_t> paper_rand_max_ladder();

struct TtpParams {
    int teams_min = 4;
    int teams_max = 50;
    int teams_step = 2;
    std::uint64_t samples = 100000;
    int max_streak_limit = 3;
};

struct BentParams {
    int n_vars = 12;
    int depth = 7;
    int lambda = 4;
    double mr = 0.03;
    int mc = 4;
    std::string op = "all"; // uniform|point|single|semantic|all
    std::uint64_t budget = 1000000;
};

struct ByzantineParams {
    std::string problem = "both"; // onemax|leadingones|both
    std::string model = "both";   // inverter|randomizer|both
    double p_min = 0.0;
    double p_max = 0.5;
    double p_step = 0.05;
    int mu = 100;
    int len = 100;
    double px = 0.9;
    std::uint64_t budget = 1000000;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::bent;
    std::uint64_t master_seed = 1;
    std::uint64_t runs = 100;
    int worker_count = 1;
    std::string output_dir = "results";
    std::variant<ApAtspParams, TtpParams, BentParams, ByzantineParams> params = BentParams{};
};

// Throws std::runtime_error naming the offending key/value on unknown keys
// or out-of-range values.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& text);
std::string canonical_config(const ExperimentConfig& config);
void save_config(const ExperimentConfig& config, const std::string& path);

// worker_count after the EVOBENCH_WORKERS override, always >= 1.
int effective_workers(const ExperimentConfig& config);
int effective_workers(int requested);

// One output row. payload cells are preformatted in the experiment's fixed
// column order; run_index is the sort key.
struct RunRecord {
    std::string experiment_id;
    std::uint64_t run_index = 0;
    std::uint64_t derived_seed = 0;
    std::vector<std::string> payload;
};

// Writes header + rows sorted by run_index. All records must share one
// experiment_id.
void write_records(std::vector<RunRecord> records,
                   const std::vector<std::string>& header,
                   const std::string& path);

// Runs fn(0..count-1) across `workers` threads. Results must be stored by
// index on the caller's side; the pool only guarantees each index runs once.
void run_indexed(std::uint64_t count, int workers,
                 const std::function<void(std::uint64_t)>& fn);

} // namespace evobench
