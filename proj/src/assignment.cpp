#include "evobench/assignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "evobench/csv.hpp"
#include "evobench/stats.hpp"

namespace evobench::assignment {

CostMatrix gen_cost_matrix(int n, std::uint64_t rand_max, Rng& rng, bool inclusive) {
    if (n < 2) throw std::invalid_argument("gen_cost_matrix: n must be >= 2");
    if (rand_max < 1) throw std::invalid_argument("gen_cost_matrix: rand_max must be >= 1");
    const std::uint64_t domain = inclusive ? rand_max + 1 : rand_max;
    CostMatrix m;
    m.n = n;
    m.entries.resize(static_cast<std::size_t>(n) * n);
    for (auto& e : m.entries) e = static_cast<std::int64_t>(rng.uniform_below(domain));
    return m;
}

ApSolution hungarian_solve(const CostMatrix& m) {
    const int n = m.n;
    if (n <= 0 || m.entries.size() != static_cast<std::size_t>(n) * n) {
        throw std::invalid_argument("hungarian_solve: non-square or empty matrix");
    }
    for (std::int64_t e : m.entries) {
        if (e < 0) throw std::invalid_argument("hungarian_solve: negative entry");
    }

    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    // 1-based shortest augmenting path formulation; column 0 is the root.
    std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            std::int64_t delta = kInf;
            const std::int64_t* row = m.entries.data() + static_cast<std::size_t>(i0 - 1) * n;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const std::int64_t cur = row[j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    ApSolution sol;
    sol.assignment.assign(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j]) sol.assignment[p[j] - 1] = j - 1;
    }
    sol.cost = 0;
    for (int i = 0; i < n; ++i) sol.cost += m.at(i, sol.assignment[i]);
    return sol;
}

std::vector<int> cycle_decompose(std::span<const int> assignment) {
    const int n = static_cast<int>(assignment.size());
    std::vector<char> seen_col(n, 0);
    for (int a : assignment) {
        if (a < 0 || a >= n || seen_col[a]) {
            throw std::invalid_argument("cycle_decompose: input is not a bijection");
        }
        seen_col[a] = 1;
    }
    std::vector<int> lengths;
    std::vector<char> visited(n, 0);
    for (int start = 0; start < n; ++start) {
        if (visited[start]) continue;
        int len = 0;
        int cur = start;
        do {
            visited[cur] = 1;
            cur = assignment[cur];
            ++len;
        } while (cur != start);
        lengths.push_back(len);
    }
    std::sort(lengths.begin(), lengths.end());
    return lengths;
}

std::vector<SubensembleRecord> ap_atsp_ensemble(int n,
                                                std::span<const std::uint64_t> rand_max_list,
                                                int matrices_per_subensemble,
                                                std::uint64_t master_seed,
                                                int workers,
                                                bool inclusive) {
    if (matrices_per_subensemble < 1) {
        throw std::invalid_argument("ap_atsp_ensemble: matrices_per_subensemble must be >= 1");
    }
    struct PerMatrix {
        int subtours = 0;
        std::vector<int> lengths;
        bool zero_cost = false;
    };

    const std::uint64_t total =
        rand_max_list.size() * static_cast<std::uint64_t>(matrices_per_subensemble);
    std::vector<PerMatrix> results(total);

    // One matrix per work unit; the seed depends only on the global index, so
    // worker count cannot change any draw.
    run_indexed(total, workers, [&](std::uint64_t idx) {
        const std::uint64_t sub = idx / matrices_per_subensemble;
        Rng rng(derive_run_seed(master_seed, idx));
        const CostMatrix m = gen_cost_matrix(n, rand_max_list[sub], rng, inclusive);
        ApSolution sol = hungarian_solve(m);
        PerMatrix& out = results[idx];
        out.lengths = cycle_decompose(sol.assignment);
        out.subtours = static_cast<int>(out.lengths.size());
        out.zero_cost = sol.cost == 0;
    });

    std::vector<SubensembleRecord> records;
    for (std::size_t s = 0; s < rand_max_list.size(); ++s) {
        SubensembleRecord rec;
        rec.rand_max = rand_max_list[s];
        rec.n = n;
        rec.matrices = matrices_per_subensemble;

        std::vector<double> counts;
        std::vector<double> pooled_lengths;
        int tours = 0;
        bool all_zero_cost = true;
        for (int k = 0; k < matrices_per_subensemble; ++k) {
            const PerMatrix& pm = results[s * matrices_per_subensemble + k];
            counts.push_back(static_cast<double>(pm.subtours));
            for (int len : pm.lengths) pooled_lengths.push_back(static_cast<double>(len));
            if (pm.subtours == 1) ++tours;
            all_zero_cost = all_zero_cost && pm.zero_cost;
        }
        const auto count_summary = stats::descriptive_summary(counts);
        rec.tour_fraction = static_cast<double>(tours) / matrices_per_subensemble;
        rec.mean_subtours = count_summary.mean;
        rec.max_subtours = static_cast<int>(count_summary.max);
        if (counts.size() >= 2) {
            std::tie(rec.q1_subtours, rec.q3_subtours) = stats::half_means(counts);
        } else {
            rec.q1_subtours = rec.q3_subtours = count_summary.mean;
        }
        rec.mean_subtour_len =
            static_cast<double>(n) * matrices_per_subensemble / static_cast<double>(pooled_lengths.size());
        if (pooled_lengths.size() >= 2) {
            std::tie(rec.q1_len, rec.q3_len) = stats::half_means(pooled_lengths);
        } else {
            rec.q1_len = rec.q3_len = rec.mean_subtour_len;
        }
        rec.degenerate = all_zero_cost;
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<std::string> csv_header() {
    return {"rand_max", "n", "matrices", "tour_fraction", "mean_subtours", "max_subtours",
            "q1_subtours", "q3_subtours", "mean_subtour_len", "q1_len", "q3_len"};
}

RunRecord to_record(const SubensembleRecord& r, std::uint64_t run_index,
                    std::uint64_t derived_seed) {
    RunRecord rec;
    rec.experiment_id = "ap_atsp";
    rec.run_index = run_index;
    rec.derived_seed = derived_seed;
    rec.payload = {csv::fmt(r.rand_max),
                   csv::fmt(static_cast<std::int64_t>(r.n)),
                   csv::fmt(static_cast<std::int64_t>(r.matrices)),
                   csv::fmt(r.tour_fraction),
                   csv::fmt(r.mean_subtours),
                   csv::fmt(static_cast<std::int64_t>(r.max_subtours)),
                   csv::fmt(r.q1_subtours),
                   csv::fmt(r.q3_subtours),
                   csv::fmt(r.mean_subtour_len),
                   csv::fmt(r.q1_len),
                   csv::fmt(r.q3_len)};
    return rec;
}

} // namespace evobench::assignment
