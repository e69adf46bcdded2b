// assignment.hpp - the AP->ATSP study: random asymmetric cost matrices,
// optimal assignment via the Hungarian method, cycle decomposition of the
// resulting permutation, and the randMax subensemble sweep.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evobench/harness.hpp"
#include "evobench/rng.hpp"

namespace evobench::assignment {

struct CostMatrix {
    int n = 0;
    std::vector<std::int64_t> entries; // row-major, n*n

    std::int64_t& at(int row, int col) { return entries[static_cast<std::size_t>(row) * n + col]; }
    std::int64_t at(int row, int col) const { return entries[static_cast<std::size_t>(row) * n + col]; }
};

struct ApSolution {
    std::vector<int> assignment; // assignment[row] = chosen column, a bijection
    std::int64_t cost = 0;
    std::vector<int> subtour_lengths; // sorted ascending; empty until decomposed
};

// All n^2 entries (diagonal included) drawn uniformly from {0..rand_max-1},
// or {0..rand_max} when inclusive.
CostMatrix gen_cost_matrix(int n, std::uint64_t rand_max, Rng& rng, bool inclusive = false);

// Exact minimum-cost assignment in O(n^3) (Jonker-Volgenant style shortest
// augmenting paths with integer potentials). subtour_lengths left empty.
ApSolution hungarian_solve(const CostMatrix& m);

// Cycle lengths of a permutation, sorted ascending. Throws on non-bijections.
std::vector<int> cycle_decompose(std::span<const int> assignment);

struct SubensembleRecord {
    std::uint64_t rand_max = 0;
    int n = 0;
    int matrices = 0;
    double tour_fraction = 0.0;  // share of solutions with exactly one subtour
    double mean_subtours = 0.0;
    int max_subtours = 0;
    double q1_subtours = 0.0;
    double q3_subtours = 0.0;
    double mean_subtour_len = 0.0; // pooled: n / mean_subtours
    double q1_len = 0.0;
    double q3_len = 0.0;
    bool degenerate = false; // all matrices had cost 0 (rand_max = 1 regime)
};

std::vector<SubensembleRecord> ap_atsp_ensemble(int n,
                                                std::span<const std::uint64_t> rand_max_list,
                                                int matrices_per_subensemble,
                                                std::uint64_t master_seed,
                                                int workers = 1,
                                                bool inclusive = false);

std::vector<std::string> csv_header();
RunRecord to_record(const SubensembleRecord& r, std::uint64_t run_index,
                    std::uint64_t derived_seed);

} // namespace evobench::assignment
