// byzantine.hpp - unreliable-fitness study: elitist generational panmictic GA
// on OneMax / LeadingOnes with per-evaluation fitness corruption, plus the
// relative-effort and population-entropy diagnostics.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evobench/harness.hpp"
#include "evobench/rng.hpp"

namespace evobench::byzantine {

enum class Problem { onemax, leadingones };
enum class CorruptionKind { none, randomizer, inverter };

std::string to_string(Problem p);
std::string to_string(CorruptionKind k);

// Bit genomes are packed little-endian: bit i of the genome is bit (i % 64)
// of word (i / 64).
using Genome = std::vector<std::uint64_t>;

int onemax(const Genome& genome, int len);
int leading_ones(const Genome& genome, int len);

// Corruption state: running true-fitness extremes and the history of every
// true fitness computed so far (used by the randomizer).
struct CorruptionModel {
    CorruptionKind kind = CorruptionKind::none;
    double p = 0.0;
    int len = 0; // range of the objective, for the empty-history randomizer draw
    std::vector<int> history;
    int f_min = 0;
    int f_max = 0;
    bool initialized = false;
};

// Updates extremes/history with f_true first, then corrupts with probability p.
int corrupt(CorruptionModel& model, int f_true, Rng& rng);

// Mean per-locus binary Shannon entropy of the one-bit frequencies, in [0,1].
double population_entropy(const std::vector<Genome>& population, int len);

struct ByzRunRecord {
    Problem problem = Problem::onemax;
    CorruptionKind model = CorruptionKind::none;
    double p = 0.0;
    int final_best_true = 0;
    double min_entropy = 1.0;
    std::vector<std::int64_t> evals_to_quality; // per threshold; -1 = not reached
    std::vector<int> best_true_trace;           // per generation (non-decreasing)
};

inline const std::vector<double>& quality_thresholds() {
    static const std::vector<double> t{0.90, 0.95, 0.99, 1.0};
    return t;
}

ByzRunRecord evolve_byzantine_run(Problem problem, CorruptionKind kind, double p,
                                  int mu, double p_x, int len,
                                  std::uint64_t eval_budget, Rng& rng);

// Mean evals-to-quality at p over mean at p=0, using only runs that reached
// the threshold; nullopt when no run at p reached it.
std::optional<double> relative_effort(const std::vector<ByzRunRecord>& records_at_p,
                                      const std::vector<ByzRunRecord>& records_at_0,
                                      double quality);

struct ByzCell {
    Problem problem;
    CorruptionKind model;
    double p;
    std::vector<ByzRunRecord> runs;
};

std::vector<ByzCell> byzantine_experiment(const ByzantineParams& params,
                                          std::uint64_t runs, std::uint64_t master_seed,
                                          int workers);

std::vector<std::string> csv_header();
std::vector<RunRecord> run_records(const std::vector<ByzCell>& cells,
                                   std::uint64_t master_seed, std::uint64_t runs_per_cell);

} // namespace evobench::byzantine
