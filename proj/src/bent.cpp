#include "evobench/bent.hpp"

#include <algorithm>
#include <stdexcept>

#include "evobench/csv.hpp"
#include "evobench/kernels.hpp"
#include "evobench/stats.hpp"

namespace evobench::bent {

std::string to_string(MutationKind k) {
    switch (k) {
        case MutationKind::uniform: return "uniform";
        case MutationKind::point: return "point";
        case MutationKind::single: return "single";
        case MutationKind::semantic: return "semantic";
    }
    throw std::logic_error("unreachable mutation kind");
}

MutationKind mutation_from_string(const std::string& s) {
    if (s == "uniform") return MutationKind::uniform;
    if (s == "point") return MutationKind::point;
    if (s == "single") return MutationKind::single;
    if (s == "semantic") return MutationKind::semantic;
    throw std::runtime_error("unknown mutation operator: " + s);
}

std::vector<int> node_depths(const BoolGenome& g) {
    std::vector<int> depth(g.nodes.size(), 0);
    // Root first; children always appear deeper, walk with an explicit stack.
    std::vector<std::size_t> stack{0};
    depth[0] = 1;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::int32_t gene : g.nodes[i].in) {
            if (!BoolGenome::is_var(gene)) {
                depth[static_cast<std::size_t>(gene)] = depth[i] + 1;
                stack.push_back(static_cast<std::size_t>(gene));
            }
        }
    }
    return depth;
}

std::size_t table_words(int n_vars) {
    const std::size_t bits = std::size_t{1} << n_vars;
    return bits < 64 ? 1 : bits / 64;
}

namespace {

// Truth table of a bare variable, one word at a time.
std::uint64_t var_word(int v, std::size_t word_index) {
    if (v >= 6) return ((word_index >> (v - 6)) & 1u) ? ~std::uint64_t{0} : 0;
    std::uint64_t w = 0;
    for (int bit = 0; bit < 64; ++bit) {
        if ((bit >> v) & 1) w |= std::uint64_t{1} << bit;
    }
    return w;
}

void fill_var_table(int v, std::uint64_t* out, std::size_t words) {
    if (v < 6) {
        const std::uint64_t pattern = var_word(v, 0);
        for (std::size_t w = 0; w < words; ++w) out[w] = pattern;
    } else {
        for (std::size_t w = 0; w < words; ++w) out[w] = var_word(v, w);
    }
}

// Children-before-parents order of all nodes.
std::vector<std::size_t> postorder(const BoolGenome& g) {
    std::vector<std::size_t> order;
    order.reserve(g.nodes.size());
    std::vector<std::size_t> stack{0};
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        order.push_back(i);
        for (std::int32_t gene : g.nodes[i].in) {
            if (!BoolGenome::is_var(gene)) stack.push_back(static_cast<std::size_t>(gene));
        }
    }
    std::reverse(order.begin(), order.end());
    return order;
}

// Per-node truth tables, indexed like g.nodes.
std::vector<TruthTable> eval_all_nodes(const BoolGenome& g) {
    const std::size_t words = table_words(g.n_vars);
    std::vector<TruthTable> tables(g.nodes.size());
    TruthTable lhs(words), rhs(words);
    for (std::size_t i : postorder(g)) {
        const BoolGenome::Node& node = g.nodes[i];
        auto input_table = [&](std::int32_t gene, TruthTable& scratch) -> const std::uint64_t* {
            if (BoolGenome::is_var(gene)) {
                fill_var_table(BoolGenome::var_of(gene), scratch.data(), words);
                return scratch.data();
            }
            return tables[static_cast<std::size_t>(gene)].data();
        };
        const std::uint64_t* a = input_table(node.in[0], lhs);
        const std::uint64_t* b = input_table(node.in[1], rhs);
        TruthTable& out = tables[i];
        out.resize(words);
        if (node.op == Op::AND) {
            for (std::size_t w = 0; w < words; ++w) out[w] = a[w] & b[w];
        } else {
            for (std::size_t w = 0; w < words; ++w) out[w] = a[w] ^ b[w];
        }
    }
    return tables;
}

} // namespace

TruthTable eval_genome(const BoolGenome& g) {
    return eval_all_nodes(g)[0];
}

int bent_bound(int n_vars) {
    return (1 << (n_vars - 1)) - (1 << (n_vars / 2 - 1));
}

int nl_of(const TruthTable& table, int n_vars) {
    const std::size_t bits = std::size_t{1} << n_vars;
    thread_local std::vector<std::int32_t> polarity;
    polarity.resize(bits);
    kernels::bits_to_polarity(table.data(), polarity.data(), bits);
    kernels::fwht(polarity.data(), bits);
    const std::int32_t peak = kernels::max_abs(polarity.data(), bits);
    return (1 << (n_vars - 1)) - peak / 2;
}

WalshRecord nonlinearity(const TruthTable& table, int n_vars) {
    const std::size_t bits = std::size_t{1} << n_vars;
    if (table.size() != table_words(n_vars)) {
        throw std::invalid_argument("nonlinearity: table length is not 2^n bits");
    }
    WalshRecord rec;
    rec.truth_table = table;
    rec.spectrum.resize(bits);
    kernels::bits_to_polarity(table.data(), rec.spectrum.data(), bits);
    kernels::fwht(rec.spectrum.data(), bits);
    const std::int32_t peak = kernels::max_abs(rec.spectrum.data(), bits);
    rec.nl = (1 << (n_vars - 1)) - peak / 2;
    return rec;
}

std::vector<int> node_nonlinearities(const BoolGenome& g) {
    const auto tables = eval_all_nodes(g);
    std::vector<int> nls(tables.size());
    for (std::size_t i = 0; i < tables.size(); ++i) nls[i] = nl_of(tables[i], g.n_vars);
    return nls;
}

BoolGenome init_genome(int n_vars, int depth_limit, Rng& rng) {
    if (n_vars < 2 || depth_limit < 1) {
        throw std::invalid_argument("init_genome: need n_vars >= 2 and depth_limit >= 1");
    }
    BoolGenome g;
    g.n_vars = n_vars;
    g.depth_limit = depth_limit;
    const int v1 = static_cast<int>(rng.uniform_below(n_vars));
    int v2 = static_cast<int>(rng.uniform_below(n_vars - 1));
    if (v2 >= v1) ++v2;
    g.nodes.push_back({rng.coin() ? Op::AND : Op::XOR,
                       {BoolGenome::var_ref(v1), BoolGenome::var_ref(v2)}});
    return g;
}

namespace {

// Shared mutation machinery. Subtree discards only detach nodes; compact()
// renumbers and drops the dead ones at the end of an operator application.
struct Mutator {
    BoolGenome& g;
    Rng& rng;
    std::vector<int> depth;
    std::vector<char> dead;

    Mutator(BoolGenome& genome, Rng& r) : g(genome), rng(r), depth(node_depths(genome)),
                                          dead(genome.nodes.size(), 0) {}

    void mark_dead(std::int32_t gene) {
        if (BoolGenome::is_var(gene)) return;
        const auto i = static_cast<std::size_t>(gene);
        dead[i] = 1;
        for (std::int32_t child : g.nodes[i].in) mark_dead(child);
    }

    std::int32_t spawn_node(int node_depth) {
        BoolGenome::Node fresh;
        fresh.op = rng.coin() ? Op::AND : Op::XOR;
        fresh.in[0] = BoolGenome::var_ref(static_cast<int>(rng.uniform_below(g.n_vars)));
        fresh.in[1] = BoolGenome::var_ref(static_cast<int>(rng.uniform_below(g.n_vars)));
        g.nodes.push_back(fresh);
        depth.push_back(node_depth);
        dead.push_back(0);
        return static_cast<std::int32_t>(g.nodes.size() - 1);
    }

    // Change one gene to a different valid value.
    void mutate_gene(std::size_t node, int slot) {
        if (slot == 0) {
            g.nodes[node].op = g.nodes[node].op == Op::AND ? Op::XOR : Op::AND;
            return;
        }
        // Note: spawn_node() may reallocate g.nodes, so never hold a
        // reference into it across a spawn; reindex for the final write.
        const std::int32_t gene = g.nodes[node].in[slot - 1];
        const bool can_spawn = depth[node] < g.depth_limit;
        std::int32_t replacement;
        // Domain: the n variables, plus "spawn a fresh node" when depth
        // permits, minus the current value.
        if (BoolGenome::is_var(gene)) {
            const int cur = BoolGenome::var_of(gene);
            const std::uint64_t options = static_cast<std::uint64_t>(g.n_vars) - 1 + (can_spawn ? 1 : 0);
            const std::uint64_t pick = rng.uniform_below(options);
            if (can_spawn && pick == options - 1) {
                replacement = spawn_node(depth[node] + 1);
            } else {
                int v = static_cast<int>(pick);
                if (v >= cur) ++v;
                replacement = BoolGenome::var_ref(v);
            }
        } else {
            const std::uint64_t options = static_cast<std::uint64_t>(g.n_vars) + (can_spawn ? 1 : 0);
            const std::uint64_t pick = rng.uniform_below(options);
            mark_dead(gene);
            if (can_spawn && pick == options - 1) {
                replacement = spawn_node(depth[node] + 1);
            } else {
                replacement = BoolGenome::var_ref(static_cast<int>(pick));
            }
        }
        g.nodes[node].in[slot - 1] = replacement;
    }

    void compact() {
        std::vector<std::int32_t> remap(g.nodes.size(), -1);
        std::vector<BoolGenome::Node> kept;
        kept.reserve(g.nodes.size());
        // Walk from the root so the new node 0 is still the root.
        std::vector<std::size_t> stack{0};
        remap[0] = 0;
        kept.push_back(g.nodes[0]);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            for (std::int32_t gene : g.nodes[i].in) {
                if (BoolGenome::is_var(gene)) continue;
                const auto child = static_cast<std::size_t>(gene);
                remap[child] = static_cast<std::int32_t>(kept.size());
                kept.push_back(g.nodes[child]);
                stack.push_back(child);
            }
        }
        for (auto& node : kept) {
            for (auto& gene : node.in) {
                if (!BoolGenome::is_var(gene)) gene = remap[static_cast<std::size_t>(gene)];
            }
        }
        g.nodes = std::move(kept);
    }
};

} // namespace

void mutate_uniform(BoolGenome& g, double mr, Rng& rng) {
    if (mr < 0.0 || mr > 1.0) throw std::invalid_argument("mutate_uniform: mr out of range");
    Mutator m(g, rng);
    const std::size_t original = g.nodes.size();
    for (std::size_t i = 0; i < original; ++i) {
        for (int slot = 0; slot < 3; ++slot) {
            if (m.dead[i]) break;
            if (rng.bernoulli(mr)) m.mutate_gene(i, slot);
        }
    }
    m.compact();
}

void mutate_point(BoolGenome& g, int mc, Rng& rng) {
    if (mc < 0) throw std::invalid_argument("mutate_point: mc must be >= 0");
    Mutator m(g, rng);
    const std::size_t genes = g.gene_count();
    const std::size_t picks = std::min<std::size_t>(static_cast<std::size_t>(mc), genes);
    // Partial Fisher-Yates: distinct genes, uniform without replacement.
    std::vector<std::size_t> ids(genes);
    for (std::size_t i = 0; i < genes; ++i) ids[i] = i;
    for (std::size_t k = 0; k < picks; ++k) {
        const std::size_t j = k + rng.uniform_below(genes - k);
        std::swap(ids[k], ids[j]);
        const std::size_t node = ids[k] / 3;
        if (m.dead[node]) continue; // discarded by an earlier pick
        m.mutate_gene(node, static_cast<int>(ids[k] % 3));
    }
    m.compact();
}

void mutate_single(BoolGenome& g, Rng& rng) {
    Mutator m(g, rng);
    const std::size_t node = rng.uniform_below(g.nodes.size());
    for (int slot = 0; slot < 3; ++slot) {
        if (m.dead[node]) break;
        m.mutate_gene(node, slot);
    }
    m.compact();
}

namespace {

bool semantic_activate(Mutator& m) {
    // Var input genes on nodes that still have depth headroom.
    std::vector<std::pair<std::size_t, int>> eligible;
    for (std::size_t i = 0; i < m.g.nodes.size(); ++i) {
        if (m.depth[i] >= m.g.depth_limit) continue;
        for (int s = 0; s < 2; ++s) {
            if (BoolGenome::is_var(m.g.nodes[i].in[s])) eligible.emplace_back(i, s);
        }
    }
    if (eligible.empty()) return false;
    const auto [node, slot] = eligible[m.rng.uniform_below(eligible.size())];
    m.g.nodes[node].in[slot] = m.spawn_node(m.depth[node] + 1);
    return true;
}

bool semantic_deactivate(Mutator& m) {
    const std::size_t count = m.g.nodes.size();
    if (count <= 1) return false; // the root is never removed
    const auto victim = static_cast<std::int32_t>(1 + m.rng.uniform_below(count - 1));
    for (auto& node : m.g.nodes) {
        for (auto& gene : node.in) {
            if (gene == victim) {
                m.mark_dead(gene);
                gene = BoolGenome::var_ref(static_cast<int>(m.rng.uniform_below(m.g.n_vars)));
                m.compact();
                return true;
            }
        }
    }
    return false;
}

void semantic_shuffle_variables(Mutator& m) {
    std::vector<int> uses(m.g.n_vars, 0);
    for (const auto& node : m.g.nodes) {
        for (std::int32_t gene : node.in) {
            if (BoolGenome::is_var(gene)) ++uses[BoolGenome::var_of(gene)];
        }
    }
    for (auto& node : m.g.nodes) {
        for (auto& gene : node.in) {
            if (!BoolGenome::is_var(gene)) continue;
            --uses[BoolGenome::var_of(gene)];
            const int u_max = *std::max_element(uses.begin(), uses.end());
            std::uint64_t total = 0;
            for (int u : uses) total += static_cast<std::uint64_t>(u_max - u + 1);
            std::uint64_t ticket = m.rng.uniform_below(total);
            int chosen = 0;
            for (int v = 0; v < m.g.n_vars; ++v) {
                const auto w = static_cast<std::uint64_t>(u_max - uses[v] + 1);
                if (ticket < w) {
                    chosen = v;
                    break;
                }
                ticket -= w;
            }
            gene = BoolGenome::var_ref(chosen);
            ++uses[chosen];
        }
    }
}

void semantic_shuffle_operators(Mutator& m) {
    const std::vector<int> nls = node_nonlinearities(m.g);
    const double bound = static_cast<double>(bent_bound(m.g.n_vars));
    for (std::size_t i = 0; i < m.g.nodes.size(); ++i) {
        double p = 1.0 - static_cast<double>(nls[i]) / bound;
        p = std::clamp(p, 0.0, 1.0);
        if (m.rng.bernoulli(p)) {
            m.g.nodes[i].op = m.g.nodes[i].op == Op::AND ? Op::XOR : Op::AND;
        }
    }
}

} // namespace

void mutate_semantic(BoolGenome& g, Rng& rng) {
    Mutator m(g, rng);
    const bool structure = rng.coin();
    if (structure) {
        if (rng.coin()) {
            if (!semantic_activate(m)) semantic_deactivate(m);
        } else {
            if (!semantic_deactivate(m)) semantic_activate(m);
        }
    } else {
        if (rng.coin()) {
            semantic_shuffle_variables(m);
        } else {
            semantic_shuffle_operators(m);
        }
    }
}

BentRun evolve_bent(MutationKind op, int n_vars, int depth_limit, int lambda,
                    double mr, int mc, std::uint64_t eval_budget, Rng& rng) {
    if (lambda < 1 || eval_budget < 1) {
        throw std::invalid_argument("evolve_bent: lambda and eval_budget must be >= 1");
    }
    const int bound = bent_bound(n_vars);

    BentRun result;
    result.op = op;

    BoolGenome parent = init_genome(n_vars, depth_limit, rng);
    int parent_nl = nl_of(eval_genome(parent), n_vars);
    std::uint64_t evals = 1;
    if (parent_nl == bound) {
        result.evaluations_used = evals;
        result.success = true;
        result.final_nl = parent_nl;
        return result;
    }

    while (evals < eval_budget) {
        BoolGenome best_child;
        int best_child_nl = -1;
        for (int j = 0; j < lambda && evals < eval_budget; ++j) {
            BoolGenome child = parent;
            switch (op) {
                case MutationKind::uniform: mutate_uniform(child, mr, rng); break;
                case MutationKind::point: mutate_point(child, mc, rng); break;
                case MutationKind::single: mutate_single(child, rng); break;
                case MutationKind::semantic: mutate_semantic(child, rng); break;
            }
            const int child_nl = nl_of(eval_genome(child), n_vars);
            ++evals;
            if (child_nl == bound) {
                result.evaluations_used = evals;
                result.success = true;
                result.final_nl = child_nl;
                return result;
            }
            if (child_nl >= best_child_nl) { // ties resolved toward the newest
                best_child_nl = child_nl;
                best_child = std::move(child);
            }
        }
        if (best_child_nl >= parent_nl) {
            parent = std::move(best_child);
            parent_nl = best_child_nl;
        }
    }

    result.evaluations_used = evals;
    result.success = false;
    result.final_nl = parent_nl;
    return result;
}

BentExperimentResult bent_experiment(const BentParams& params, std::uint64_t runs,
                                     std::uint64_t master_seed, int workers) {
    if (runs < 2) throw std::invalid_argument("bent_experiment: need at least 2 runs per operator");
    BentExperimentResult result;
    if (params.op == "all") {
        result.operators = {MutationKind::uniform, MutationKind::point,
                            MutationKind::single, MutationKind::semantic};
    } else {
        result.operators = {mutation_from_string(params.op)};
    }

    result.runs.assign(result.operators.size(), std::vector<BentRun>(runs));
    const std::uint64_t total = result.operators.size() * runs;
    run_indexed(total, workers, [&](std::uint64_t idx) {
        const std::size_t op_idx = idx / runs;
        const std::uint64_t run = idx % runs;
        Rng rng(derive_run_seed(master_seed, idx));
        result.runs[op_idx][run] =
            evolve_bent(result.operators[op_idx], params.n_vars, params.depth,
                        params.lambda, params.mr, params.mc, params.budget, rng);
    });

    std::vector<std::vector<double>> success_evals(result.operators.size());
    for (std::size_t i = 0; i < result.operators.size(); ++i) {
        OperatorSummary summary;
        summary.op = result.operators[i];
        summary.runs = runs;
        for (const BentRun& r : result.runs[i]) {
            if (r.success) {
                success_evals[i].push_back(static_cast<double>(r.evaluations_used));
            } else {
                ++summary.failures;
            }
        }
        if (!success_evals[i].empty()) {
            const auto s = stats::descriptive_summary(success_evals[i]);
            summary.median_evals = s.median;
            summary.q1_evals = s.q1;
            summary.q3_evals = s.q3;
        }
        result.summaries.push_back(summary);
    }

    for (std::size_t i = 0; i < result.operators.size(); ++i) {
        for (std::size_t j = i + 1; j < result.operators.size(); ++j) {
            if (success_evals[i].empty() || success_evals[j].empty()) continue;
            const auto mw = stats::mann_whitney_u(success_evals[i], success_evals[j]);
            result.tests.push_back({result.operators[i], result.operators[j], mw.u, mw.p_two_sided});
        }
    }

    // Median reduction of semantic against the best non-semantic operator.
    double semantic_median = -1.0;
    double second_best = -1.0;
    for (const auto& s : result.summaries) {
        if (s.median_evals <= 0.0) continue;
        if (s.op == MutationKind::semantic) {
            semantic_median = s.median_evals;
        } else if (second_best < 0.0 || s.median_evals < second_best) {
            second_best = s.median_evals;
        }
    }
    if (semantic_median > 0.0 && second_best > 0.0) {
        result.semantic_reduction_percent = 100.0 * (1.0 - semantic_median / second_best);
    }
    return result;
}

std::vector<std::string> csv_header() {
    return {"operator", "run_index", "seed", "evaluations_used", "success", "final_nl"};
}

std::vector<std::string> report_csv_header() {
    return {"operator_a", "operator_b", "u", "p"};
}

std::vector<RunRecord> run_records(const BentExperimentResult& result,
                                   std::uint64_t master_seed, std::uint64_t runs_per_op) {
    std::vector<RunRecord> out;
    for (std::size_t i = 0; i < result.operators.size(); ++i) {
        for (std::uint64_t run = 0; run < result.runs[i].size(); ++run) {
            const BentRun& r = result.runs[i][run];
            const std::uint64_t idx = i * runs_per_op + run;
            RunRecord rec;
            rec.experiment_id = "bent";
            rec.run_index = idx;
            rec.derived_seed = derive_run_seed(master_seed, idx);
            rec.payload = {to_string(r.op), csv::fmt(run), csv::fmt(rec.derived_seed),
                           csv::fmt(r.evaluations_used),
                           csv::fmt(static_cast<std::int64_t>(r.success ? 1 : 0)),
                           csv::fmt(static_cast<std::int64_t>(r.final_nl))};
            out.push_back(std::move(rec));
        }
    }
    return out;
}

std::vector<RunRecord> report_records(const BentExperimentResult& result) {
    std::vector<RunRecord> out;
    std::uint64_t idx = 0;
    for (const auto& t : result.tests) {
        RunRecord rec;
        rec.experiment_id = "bent";
        rec.run_index = idx++;
        rec.payload = {to_string(t.a), to_string(t.b), csv::fmt(t.u), csv::fmt(t.p)};
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace evobench::bent
