// ttp.hpp - the traveling tournament feasibility-density study: random
// round-structured schedules, violation counting for the three constraints,
// and growth-curve fits over the number of teams.
//
// The pairwise rules (double round-robin, noRepeat) are counted per ordered
// pair, i.e. once from each team's perspective, so every unordered-pair
// violation tallies twice. maxStreak is counted per team.
#pragma once

#include <cstdint>
#include <vector>

#include "evobench/harness.hpp"
#include "evobench/rng.hpp"
#include "evobench/stats.hpp"

namespace evobench::ttp {

struct Schedule {
    int n_teams = 0;
    int rounds = 0; // 2 * (n_teams - 1)

    // Round-major grids. opponent[r * n_teams + t] is t's opponent in round r;
    // home[...] is 1 when t hosts that game.
    std::vector<std::int16_t> opponent;
    std::vector<std::uint8_t> home;

    int opp(int round, int team) const { return opponent[static_cast<std::size_t>(round) * n_teams + team]; }
    bool is_home(int round, int team) const { return home[static_cast<std::size_t>(round) * n_teams + team] != 0; }
};

struct ViolationCounts {
    std::int64_t drr = 0;
    std::int64_t max_streak = 0;
    std::int64_t no_repeat = 0;

    std::int64_t total() const { return drr + max_streak + no_repeat; }
};

// Per round: teams in ascending index; each not-yet-placed team picks an
// opponent uniformly among the remaining unplaced, then a fair coin picks the
// host. Constraints are deliberately not enforced.
Schedule gen_schedule(int n_teams, Rng& rng);

ViolationCounts count_violations(const Schedule& s, int max_streak_limit = 3);

// Circle-method single round robin, second half mirrored (reverse round
// order) with venues flipped. drr = 0 by construction; the seam contributes
// exactly n_teams noRepeat counts (n_teams/2 pairs, counted per ordered pair).
Schedule oracle_valid_drr_schedule(int n_teams);

struct TtpRecord {
    int n_teams = 0;
    std::uint64_t samples = 0;
    std::int64_t drr_min = 0, streak_min = 0, norep_min = 0;
    double drr_mean = 0.0, streak_mean = 0.0, norep_mean = 0.0;
    std::int64_t drr_max = 0, streak_max = 0, norep_max = 0;
    std::int64_t min_total = 0; // minimum of (drr + streak + norep) over samples
};

struct TtpEnsembleResult {
    std::vector<TtpRecord> records;
    stats::FitResult drr_fit;    // degree 2 on drr_mean vs n_teams
    stats::FitResult streak_fit; // degree 2 on streak_mean vs n_teams
    stats::FitResult norep_fit;  // degree 1 on norep_mean vs n_teams
};

TtpEnsembleResult ttp_ensemble(const std::vector<int>& n_teams_list,
                               std::uint64_t samples_per_n,
                               std::uint64_t master_seed,
                               int workers = 1,
                               int max_streak_limit = 3);

std::vector<std::string> csv_header();
RunRecord to_record(const TtpRecord& r, std::uint64_t run_index, std::uint64_t derived_seed);
std::vector<std::string> fits_csv_header();
std::vector<RunRecord> fit_records(const TtpEnsembleResult& result);

} // namespace evobench::ttp
