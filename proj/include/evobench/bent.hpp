// bent.hpp - semantic-mutation study: tree GP over {AND, XOR}, packed truth
// tables, Walsh-spectrum nonlinearity fitness, four mutation operators and
// the (1+lambda) evolution loop.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evobench/harness.hpp"
#include "evobench/rng.hpp"

namespace evobench::bent {

enum class Op : std::uint8_t { AND, XOR };
enum class MutationKind { uniform, point, single, semantic };

std::string to_string(MutationKind k);
MutationKind mutation_from_string(const std::string& s);

// Tree of (op, in1, in2) nodes. Node 0 is the root; every stored node is
// reachable. An input gene is either a child node index (>= 0) or an encoded
// variable (< 0).
struct BoolGenome {
    int n_vars = 0;
    int depth_limit = 0;

    struct Node {
        Op op;
        std::int32_t in[2];
    };
    std::vector<Node> nodes;

    static std::int32_t var_ref(int v) { return -(v + 1); }
    static bool is_var(std::int32_t gene) { return gene < 0; }
    static int var_of(std::int32_t gene) { return -(gene + 1); }

    std::size_t gene_count() const { return nodes.size() * 3; }
};

// Depth of each node, root at depth 1.
std::vector<int> node_depths(const BoolGenome& g);

// Packed truth table, bit x = f(x), 2^n bits in lexicographic input order.
using TruthTable = std::vector<std::uint64_t>;

std::size_t table_words(int n_vars);
TruthTable eval_genome(const BoolGenome& g);

struct WalshRecord {
    TruthTable truth_table;
    std::vector<std::int32_t> spectrum;
    int nl = 0;
};

int bent_bound(int n_vars); // covering radius bound 2^(n-1) - 2^(n/2-1)

WalshRecord nonlinearity(const TruthTable& table, int n_vars);

// Fitness-only fast path: FWHT of the polarity vector, no spectrum copy.
int nl_of(const TruthTable& table, int n_vars);

// Nonlinearity of every node's subfunction, indexed like g.nodes.
std::vector<int> node_nonlinearities(const BoolGenome& g);

// Single random node with two distinct random variables.
BoolGenome init_genome(int n_vars, int depth_limit, Rng& rng);

void mutate_uniform(BoolGenome& g, double mr, Rng& rng);
void mutate_point(BoolGenome& g, int mc, Rng& rng);
void mutate_single(BoolGenome& g, Rng& rng);
void mutate_semantic(BoolGenome& g, Rng& rng);

struct BentRun {
    MutationKind op = MutationKind::uniform;
    std::uint64_t evaluations_used = 0;
    bool success = false;
    int final_nl = 0;
};

BentRun evolve_bent(MutationKind op, int n_vars, int depth_limit, int lambda,
                    double mr, int mc, std::uint64_t eval_budget, Rng& rng);

struct OperatorSummary {
    MutationKind op;
    std::size_t runs = 0;
    std::size_t failures = 0;
    double median_evals = 0.0; // over successful runs only
    double q1_evals = 0.0;
    double q3_evals = 0.0;
};

struct PairwiseTest {
    MutationKind a;
    MutationKind b;
    double u = 0.0;
    double p = 1.0;
};

struct BentExperimentResult {
    std::vector<MutationKind> operators;
    std::vector<std::vector<BentRun>> runs; // per operator
    std::vector<OperatorSummary> summaries;
    std::vector<PairwiseTest> tests;
    double semantic_reduction_percent = 0.0; // vs second-best median, when semantic ran
};

BentExperimentResult bent_experiment(const BentParams& params, std::uint64_t runs,
                                     std::uint64_t master_seed, int workers);

std::vector<std::string> csv_header();
std::vector<std::string> report_csv_header();
std::vector<RunRecord> run_records(const BentExperimentResult& result,
                                   std::uint64_t master_seed, std::uint64_t runs_per_op);
std::vector<RunRecord> report_records(const BentExperimentResult& result);

} // namespace evobench::bent
