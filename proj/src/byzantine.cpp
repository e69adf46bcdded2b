#include "evobench/byzantine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "evobench/csv.hpp"
#include "evobench/kernels.hpp"

namespace evobench::byzantine {

std::string to_string(Problem p) {
    return p == Problem::onemax ? "onemax" : "leadingones";
}

std::string to_string(CorruptionKind k) {
    switch (k) {
        case CorruptionKind::none: return "none";
        case CorruptionKind::randomizer: return "randomizer";
        case CorruptionKind::inverter: return "inverter";
    }
    throw std::logic_error("unreachable corruption kind");
}

int onemax(const Genome& genome, int len) {
    (void)len; // bits beyond len are kept zero
    return static_cast<int>(kernels::popcount_words(genome.data(), genome.size()));
}

int leading_ones(const Genome& genome, int len) {
    int count = 0;
    for (std::size_t w = 0; w < genome.size(); ++w) {
        const int ones = std::countr_one(genome[w]);
        count += ones;
        if (ones < 64) break;
    }
    return std::min(count, len);
}

int corrupt(CorruptionModel& model, int f_true, Rng& rng) {
    const std::size_t history_before = model.history.size();
    model.history.push_back(f_true);
    if (!model.initialized) {
        model.f_min = model.f_max = f_true;
        model.initialized = true;
    } else {
        model.f_min = std::min(model.f_min, f_true);
        model.f_max = std::max(model.f_max, f_true);
    }

    if (model.kind == CorruptionKind::none || !rng.bernoulli(model.p)) return f_true;
    if (model.kind == CorruptionKind::inverter) {
        return model.f_max - (f_true - model.f_min);
    }
    // randomizer: a previously computed true fitness, excluding the entry
    // just added; uniform in [0, len] when there was no history yet.
    if (history_before == 0) {
        return static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(model.len) + 1));
    }
    return model.history[rng.uniform_below(history_before)];
}

double population_entropy(const std::vector<Genome>& population, int len) {
    if (population.empty()) throw std::invalid_argument("population_entropy: empty population");
    std::vector<int> counts(len, 0);
    for (const Genome& g : population) {
        for (std::size_t w = 0; w < g.size(); ++w) {
            std::uint64_t bits = g[w];
            while (bits) {
                const int b = std::countr_zero(bits);
                bits &= bits - 1;
                const int locus = static_cast<int>(w) * 64 + b;
                if (locus < len) ++counts[locus];
            }
        }
    }
    const double mu = static_cast<double>(population.size());
    double total = 0.0;
    for (int c : counts) {
        const double q = c / mu;
        if (q > 0.0 && q < 1.0) {
            total += -(q * std::log2(q) + (1.0 - q) * std::log2(1.0 - q));
        }
    }
    return total / len;
}

namespace {

struct Evaluator {
    Problem problem;
    CorruptionModel model;
    int len;
    std::uint64_t evals = 0;
    int best_true = -1;
    std::vector<std::int64_t> evals_to_quality;

    explicit Evaluator(Problem prob, CorruptionKind kind, double p, int l)
        : problem(prob), len(l) {
        model.kind = kind;
        model.p = p;
        model.len = l;
        evals_to_quality.assign(quality_thresholds().size(), -1);
    }

    int evaluate(const Genome& g, Rng& rng) {
        const int f_true = problem == Problem::onemax ? onemax(g, len) : leading_ones(g, len);
        ++evals;
        if (f_true > best_true) {
            best_true = f_true;
            const auto& qs = quality_thresholds();
            for (std::size_t i = 0; i < qs.size(); ++i) {
                if (evals_to_quality[i] < 0 && f_true >= qs[i] * len - 1e-9) {
                    evals_to_quality[i] = static_cast<std::int64_t>(evals);
                }
            }
        }
        return corrupt(model, f_true, rng);
    }
};

// Per-locus entropy table indexed by one-bit count, to keep the per
// generation diagnostic cheap.
std::vector<double> entropy_table(int mu) {
    std::vector<double> table(mu + 1, 0.0);
    for (int c = 1; c < mu; ++c) {
        const double q = static_cast<double>(c) / mu;
        table[c] = -(q * std::log2(q) + (1.0 - q) * std::log2(1.0 - q));
    }
    return table;
}

double fast_entropy(const std::vector<Genome>& pop, int len, const std::vector<double>& table,
                    std::vector<int>& counts) {
    counts.assign(len, 0);
    for (const Genome& g : pop) {
        for (std::size_t w = 0; w < g.size(); ++w) {
            std::uint64_t bits = g[w];
            while (bits) {
                counts[static_cast<int>(w) * 64 + std::countr_zero(bits)]++;
                bits &= bits - 1;
            }
        }
    }
    double total = 0.0;
    for (int c : counts) total += table[c];
    return total / len;
}

} // namespace

ByzRunRecord evolve_byzantine_run(Problem problem, CorruptionKind kind, double p,
                                  int mu, double p_x, int len,
                                  std::uint64_t eval_budget, Rng& rng) {
    if (mu < 2 || mu % 2 != 0) throw std::invalid_argument("evolve_byzantine_run: mu must be even and >= 2");
    if (eval_budget < static_cast<std::uint64_t>(mu)) {
        throw std::invalid_argument("evolve_byzantine_run: eval_budget must cover the initial population");
    }

    const std::size_t words = static_cast<std::size_t>(len + 63) / 64;
    const std::uint64_t tail_mask =
        (len % 64) ? ((std::uint64_t{1} << (len % 64)) - 1) : ~std::uint64_t{0};

    Evaluator eval(problem, kind, p, len);
    const double mutation_rate = 1.0 / len;
    const double log1m = std::log1p(-mutation_rate);

    auto random_genome = [&] {
        Genome g(words);
        for (std::size_t w = 0; w < words; ++w) g[w] = rng.next_u64();
        g.back() &= tail_mask;
        return g;
    };
    auto flip_bits = [&](Genome& g) {
        // Geometric skips between flips, rate 1/len per bit.
        double pos = std::floor(std::log(1.0 - rng.uniform01()) / log1m);
        while (pos < static_cast<double>(len)) {
            const int i = static_cast<int>(pos);
            g[i / 64] ^= std::uint64_t{1} << (i % 64);
            pos += 1.0 + std::floor(std::log(1.0 - rng.uniform01()) / log1m);
        }
    };
    auto crossover = [&](const Genome& a, const Genome& b, Genome& c1, Genome& c2) {
        const int cut = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(len - 1)));
        for (std::size_t w = 0; w < words; ++w) {
            const int bit0 = static_cast<int>(w) * 64;
            std::uint64_t keep_a; // mask of bits taken from the first parent
            if (cut <= bit0) {
                keep_a = 0;
            } else if (cut >= bit0 + 64) {
                keep_a = ~std::uint64_t{0};
            } else {
                keep_a = (std::uint64_t{1} << (cut - bit0)) - 1;
            }
            c1[w] = (a[w] & keep_a) | (b[w] & ~keep_a);
            c2[w] = (b[w] & keep_a) | (a[w] & ~keep_a);
        }
    };

    std::vector<Genome> pop(mu);
    std::vector<int> fitness(mu); // unreliable fitness: the only value selection sees
    for (int i = 0; i < mu; ++i) {
        pop[i] = random_genome();
        fitness[i] = eval.evaluate(pop[i], rng);
    }

    auto tournament = [&] {
        const int i = static_cast<int>(rng.uniform_below(mu));
        const int j = static_cast<int>(rng.uniform_below(mu));
        if (fitness[i] != fitness[j]) return fitness[i] > fitness[j] ? i : j;
        return rng.coin() ? i : j;
    };

    const std::vector<double> etable = entropy_table(mu);
    std::vector<int> locus_counts;
    ByzRunRecord rec;
    rec.problem = problem;
    rec.model = kind;
    rec.p = p;
    rec.min_entropy = fast_entropy(pop, len, etable, locus_counts);
    rec.best_true_trace.push_back(eval.best_true);

    std::vector<Genome> offspring(mu, Genome(words));
    std::vector<int> off_fitness(mu);

    while (eval.evals + static_cast<std::uint64_t>(mu) <= eval_budget) {
        for (int k = 0; k < mu; k += 2) {
            const int a = tournament();
            const int b = tournament();
            if (rng.bernoulli(p_x)) {
                crossover(pop[a], pop[b], offspring[k], offspring[k + 1]);
            } else {
                offspring[k] = pop[a];
                offspring[k + 1] = pop[b];
            }
            flip_bits(offspring[k]);
            flip_bits(offspring[k + 1]);
        }
        for (int k = 0; k < mu; ++k) off_fitness[k] = eval.evaluate(offspring[k], rng);

        // Elitism of 1: the best-by-unreliable survivor replaces the worst
        // offspring; no re-evaluation, its unreliable fitness travels along.
        int best_parent = 0;
        for (int i = 1; i < mu; ++i) {
            if (fitness[i] > fitness[best_parent]) best_parent = i;
        }
        int worst_child = 0;
        for (int k = 1; k < mu; ++k) {
            if (off_fitness[k] < off_fitness[worst_child]) worst_child = k;
        }
        offspring[worst_child] = pop[best_parent];
        off_fitness[worst_child] = fitness[best_parent];

        pop.swap(offspring);
        fitness.swap(off_fitness);

        rec.min_entropy = std::min(rec.min_entropy, fast_entropy(pop, len, etable, locus_counts));
        rec.best_true_trace.push_back(eval.best_true);
    }

    rec.final_best_true = eval.best_true;
    rec.evals_to_quality = eval.evals_to_quality;
    return rec;
}

std::optional<double> relative_effort(const std::vector<ByzRunRecord>& records_at_p,
                                      const std::vector<ByzRunRecord>& records_at_0,
                                      double quality) {
    if (quality <= 0.0 || quality > 1.0) {
        throw std::invalid_argument("relative_effort: quality must lie in (0, 1]");
    }
    if (records_at_p.empty() || records_at_0.empty()) {
        throw std::invalid_argument("relative_effort: empty record set");
    }
    const auto& qs = quality_thresholds();
    std::size_t q_idx = qs.size();
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (std::abs(qs[i] - quality) < 1e-9) q_idx = i;
    }
    if (q_idx == qs.size()) {
        throw std::invalid_argument("relative_effort: quality threshold was not recorded");
    }

    auto mean_evals = [&](const std::vector<ByzRunRecord>& records) -> std::optional<double> {
        double sum = 0.0;
        std::size_t reached = 0;
        for (const auto& r : records) {
            if (r.evals_to_quality[q_idx] >= 0) {
                sum += static_cast<double>(r.evals_to_quality[q_idx]);
                ++reached;
            }
        }
        if (reached == 0) return std::nullopt;
        return sum / static_cast<double>(reached);
    };

    const auto at_p = mean_evals(records_at_p);
    if (!at_p) return std::nullopt;
    const auto at_0 = mean_evals(records_at_0);
    if (!at_0) return std::nullopt;
    return *at_p / *at_0;
}

std::vector<ByzCell> byzantine_experiment(const ByzantineParams& params,
                                          std::uint64_t runs, std::uint64_t master_seed,
                                          int workers) {
    std::vector<Problem> problems;
    if (params.problem == "onemax" || params.problem == "both") problems.push_back(Problem::onemax);
    if (params.problem == "leadingones" || params.problem == "both") problems.push_back(Problem::leadingones);
    std::vector<CorruptionKind> models;
    if (params.model == "inverter" || params.model == "both") models.push_back(CorruptionKind::inverter);
    if (params.model == "randomizer" || params.model == "both") models.push_back(CorruptionKind::randomizer);

    std::vector<double> ps;
    for (double p = params.p_min; p <= params.p_max + 1e-9; p += params.p_step) ps.push_back(p);
    if (ps.empty()) throw std::invalid_argument("byzantine_experiment: empty p grid");

    std::vector<ByzCell> cells;
    for (Problem prob : problems) {
        for (CorruptionKind model : models) {
            for (double p : ps) {
                cells.push_back({prob, model, p, std::vector<ByzRunRecord>(runs)});
            }
        }
    }

    const std::uint64_t total = cells.size() * runs;
    run_indexed(total, workers, [&](std::uint64_t idx) {
        const std::size_t cell = idx / runs;
        const std::uint64_t run = idx % runs;
        Rng rng(derive_run_seed(master_seed, idx));
        cells[cell].runs[run] =
            evolve_byzantine_run(cells[cell].problem, cells[cell].model, cells[cell].p,
                                 params.mu, params.px, params.len, params.budget, rng);
    });
    return cells;
}

std::vector<std::string> csv_header() {
    return {"problem", "model", "p", "run_index", "seed", "final_best_true",
            "evals_to_q90", "evals_to_q95", "evals_to_q99", "evals_to_q100", "min_entropy"};
}

std::vector<RunRecord> run_records(const std::vector<ByzCell>& cells,
                                   std::uint64_t master_seed, std::uint64_t runs_per_cell) {
    std::vector<RunRecord> out;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::uint64_t run = 0; run < cells[c].runs.size(); ++run) {
            const ByzRunRecord& r = cells[c].runs[run];
            const std::uint64_t idx = c * runs_per_cell + run;
            RunRecord rec;
            rec.experiment_id = "byzantine";
            rec.run_index = idx;
            rec.derived_seed = derive_run_seed(master_seed, idx);
            rec.payload = {to_string(r.problem), to_string(r.model), csv::fmt(r.p),
                           csv::fmt(run), csv::fmt(rec.derived_seed),
                           csv::fmt(static_cast<std::int64_t>(r.final_best_true)),
                           csv::fmt(r.evals_to_quality[0]), csv::fmt(r.evals_to_quality[1]),
                           csv::fmt(r.evals_to_quality[2]), csv::fmt(r.evals_to_quality[3]),
                           csv::fmt(r.min_entropy)};
            out.push_back(std::move(rec));
        }
    }
    return out;
}

} // namespace evobench::byzantine
