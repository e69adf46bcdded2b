#include "evobench/ttp.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "evobench/csv.hpp"

namespace evobench::ttp {

Schedule gen_schedule(int n_teams, Rng& rng) {
    if (n_teams < 4 || n_teams % 2 != 0) {
        throw std::invalid_argument("gen_schedule: n_teams must be even and >= 4");
    }
    Schedule s;
    s.n_teams = n_teams;
    s.rounds = 2 * (n_teams - 1);
    s.opponent.resize(static_cast<std::size_t>(s.rounds) * n_teams);
    s.home.resize(s.opponent.size());

    std::vector<std::int16_t> pool;
    for (int r = 0; r < s.rounds; ++r) {
        pool.resize(static_cast<std::size_t>(n_teams));
        for (int t = 0; t < n_teams; ++t) pool[t] = static_cast<std::int16_t>(t);
        std::int16_t* opp = s.opponent.data() + static_cast<std::size_t>(r) * n_teams;
        std::uint8_t* home = s.home.data() + static_cast<std::size_t>(r) * n_teams;
        while (!pool.empty()) {
            // pool stays ascending, so the front is the lowest unplaced team.
            const int t = pool.front();
            pool.erase(pool.begin());
            const std::size_t pick = rng.uniform_below(pool.size());
            const int u = pool[pick];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
            const bool t_home = rng.coin();
            opp[t] = static_cast<std::int16_t>(u);
            opp[u] = static_cast<std::int16_t>(t);
            home[t] = t_home ? 1 : 0;
            home[u] = t_home ? 0 : 1;
        }
    }
    return s;
}

ViolationCounts count_violations(const Schedule& s, int max_streak_limit) {
    const int n = s.n_teams;
    const int rounds = s.rounds;
    if (n < 2 || s.opponent.size() != static_cast<std::size_t>(rounds) * n) {
        throw std::invalid_argument("count_violations: malformed schedule");
    }
    for (int r = 0; r < rounds; ++r) {
        for (int t = 0; t < n; ++t) {
            const int u = s.opp(r, t);
            if (u < 0 || u >= n || u == t || s.opp(r, u) != t ||
                s.is_home(r, t) == s.is_home(r, u)) {
                throw std::invalid_argument("count_violations: matching invariant broken");
            }
        }
    }

    thread_local std::vector<std::int32_t> meetings;
    thread_local std::vector<std::int32_t> first_home; // counted for the lower team index
    meetings.assign(static_cast<std::size_t>(n) * n, 0);
    first_home.assign(static_cast<std::size_t>(n) * n, 0);

    std::int64_t norep_adjacent = 0;
    for (int r = 0; r < rounds; ++r) {
        for (int t = 0; t < n; ++t) {
            const int u = s.opp(r, t);
            if (u < t) continue;
            const std::size_t pair = static_cast<std::size_t>(t) * n + u;
            ++meetings[pair];
            if (s.is_home(r, t)) ++first_home[pair];
            if (r + 1 < rounds && s.opp(r + 1, t) == u) ++norep_adjacent;
        }
    }

    std::int64_t drr_unordered = 0;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const std::size_t pair = static_cast<std::size_t>(a) * n + b;
            const std::int32_t c = meetings[pair];
            if (c > 2) {
                drr_unordered += c - 2;
            } else if (c == 1) {
                drr_unordered += 1;
            } else if (c == 0) {
                drr_unordered += 2;
            } else if (first_home[pair] != 1) {
                drr_unordered += 1; // met twice but not once at each venue
            }
        }
    }

    std::int64_t streak = 0;
    for (int t = 0; t < n; ++t) {
        int run = 1;
        for (int r = 1; r < rounds; ++r) {
            if (s.is_home(r, t) == s.is_home(r - 1, t)) {
                if (++run > max_streak_limit) ++streak;
            } else {
                run = 1;
            }
        }
    }

    ViolationCounts counts;
    counts.drr = 2 * drr_unordered; // pairwise rules tally once per ordered pair
    counts.no_repeat = 2 * norep_adjacent;
    counts.max_streak = streak;
    return counts;
}

Schedule oracle_valid_drr_schedule(int n_teams) {
    if (n_teams < 4 || n_teams % 2 != 0) {
        throw std::invalid_argument("oracle_valid_drr_schedule: n_teams must be even and >= 4");
    }
    const int half = n_teams - 1;
    Schedule s;
    s.n_teams = n_teams;
    s.rounds = 2 * half;
    s.opponent.resize(static_cast<std::size_t>(s.rounds) * n_teams);
    s.home.resize(s.opponent.size());

    auto set_game = [&](int round, int a, int b, bool a_home) {
        const std::size_t base = static_cast<std::size_t>(round) * n_teams;
        s.opponent[base + a] = static_cast<std::int16_t>(b);
        s.opponent[base + b] = static_cast<std::int16_t>(a);
        s.home[base + a] = a_home ? 1 : 0;
        s.home[base + b] = a_home ? 0 : 1;
    };

    for (int r = 0; r < half; ++r) {
        // Circle method: team n-1 is fixed, teams 0..n-2 rotate.
        set_game(r, n_teams - 1, r, r % 2 == 0);
        for (int k = 1; k <= n_teams / 2 - 1; ++k) {
            const int a = (r + k) % half;
            const int b = (r - k + half) % half;
            set_game(r, a, b, true);
        }
        // Mirror: round half + j repeats round half-1-j with venues flipped.
        const int mirrored = 2 * half - 1 - r;
        const std::size_t src = static_cast<std::size_t>(r) * n_teams;
        const std::size_t dst = static_cast<std::size_t>(mirrored) * n_teams;
        for (int t = 0; t < n_teams; ++t) {
            s.opponent[dst + t] = s.opponent[src + t];
            s.home[dst + t] = s.home[src + t] ? 0 : 1;
        }
    }
    return s;
}

TtpEnsembleResult ttp_ensemble(const std::vector<int>& n_teams_list,
                               std::uint64_t samples_per_n,
                               std::uint64_t master_seed,
                               int workers,
                               int max_streak_limit) {
    if (samples_per_n < 1) throw std::invalid_argument("ttp_ensemble: samples_per_n must be >= 1");

    struct Partial {
        std::int64_t drr_min = std::numeric_limits<std::int64_t>::max(), drr_max = 0, drr_sum = 0;
        std::int64_t streak_min = std::numeric_limits<std::int64_t>::max(), streak_max = 0, streak_sum = 0;
        std::int64_t norep_min = std::numeric_limits<std::int64_t>::max(), norep_max = 0, norep_sum = 0;
        std::int64_t total_min = std::numeric_limits<std::int64_t>::max();
    };

    constexpr std::uint64_t kBlock = 4096;
    const std::uint64_t blocks_per_n = (samples_per_n + kBlock - 1) / kBlock;
    const std::uint64_t total_blocks = blocks_per_n * n_teams_list.size();
    std::vector<Partial> partials(total_blocks);

    run_indexed(total_blocks, workers, [&](std::uint64_t unit) {
        const std::uint64_t n_idx = unit / blocks_per_n;
        const std::uint64_t block = unit % blocks_per_n;
        const int n_teams = n_teams_list[n_idx];
        const std::uint64_t lo = block * kBlock;
        const std::uint64_t hi = std::min(lo + kBlock, samples_per_n);
        Partial& acc = partials[unit];
        for (std::uint64_t k = lo; k < hi; ++k) {
            Rng rng(derive_run_seed(master_seed, n_idx * samples_per_n + k));
            const Schedule sched = gen_schedule(n_teams, rng);
            const ViolationCounts v = count_violations(sched, max_streak_limit);
            acc.drr_min = std::min(acc.drr_min, v.drr);
            acc.drr_max = std::max(acc.drr_max, v.drr);
            acc.drr_sum += v.drr;
            acc.streak_min = std::min(acc.streak_min, v.max_streak);
            acc.streak_max = std::max(acc.streak_max, v.max_streak);
            acc.streak_sum += v.max_streak;
            acc.norep_min = std::min(acc.norep_min, v.no_repeat);
            acc.norep_max = std::max(acc.norep_max, v.no_repeat);
            acc.norep_sum += v.no_repeat;
            acc.total_min = std::min(acc.total_min, v.total());
        }
    });

    TtpEnsembleResult result;
    std::vector<double> xs, drr_means, streak_means, norep_means;
    for (std::size_t i = 0; i < n_teams_list.size(); ++i) {
        TtpRecord rec;
        rec.n_teams = n_teams_list[i];
        rec.samples = samples_per_n;
        Partial fold;
        for (std::uint64_t b = 0; b < blocks_per_n; ++b) {
            const Partial& p = partials[i * blocks_per_n + b];
            fold.drr_min = std::min(fold.drr_min, p.drr_min);
            fold.drr_max = std::max(fold.drr_max, p.drr_max);
            fold.drr_sum += p.drr_sum;
            fold.streak_min = std::min(fold.streak_min, p.streak_min);
            fold.streak_max = std::max(fold.streak_max, p.streak_max);
            fold.streak_sum += p.streak_sum;
            fold.norep_min = std::min(fold.norep_min, p.norep_min);
            fold.norep_max = std::max(fold.norep_max, p.norep_max);
            fold.norep_sum += p.norep_sum;
            fold.total_min = std::min(fold.total_min, p.total_min);
        }
        const double inv = 1.0 / static_cast<double>(samples_per_n);
        rec.drr_min = fold.drr_min;
        rec.drr_max = fold.drr_max;
        rec.drr_mean = static_cast<double>(fold.drr_sum) * inv;
        rec.streak_min = fold.streak_min;
        rec.streak_max = fold.streak_max;
        rec.streak_mean = static_cast<double>(fold.streak_sum) * inv;
        rec.norep_min = fold.norep_min;
        rec.norep_max = fold.norep_max;
        rec.norep_mean = static_cast<double>(fold.norep_sum) * inv;
        rec.min_total = fold.total_min;

        xs.push_back(static_cast<double>(rec.n_teams));
        drr_means.push_back(rec.drr_mean);
        streak_means.push_back(rec.streak_mean);
        norep_means.push_back(rec.norep_mean);
        result.records.push_back(rec);
    }

    if (xs.size() >= 3) {
        result.drr_fit = stats::polyfit(xs, drr_means, 2);
        result.streak_fit = stats::polyfit(xs, streak_means, 2);
    }
    if (xs.size() >= 2) {
        result.norep_fit = stats::polyfit(xs, norep_means, 1);
    }
    return result;
}

std::vector<std::string> csv_header() {
    return {"n_teams", "samples", "drr_min", "drr_mean", "drr_max",
            "streak_min", "streak_mean", "streak_max",
            "norep_min", "norep_mean", "norep_max"};
}

RunRecord to_record(const TtpRecord& r, std::uint64_t run_index, std::uint64_t derived_seed) {
    RunRecord rec;
    rec.experiment_id = "ttp";
    rec.run_index = run_index;
    rec.derived_seed = derived_seed;
    rec.payload = {csv::fmt(static_cast<std::int64_t>(r.n_teams)),
                   csv::fmt(r.samples),
                   csv::fmt(r.drr_min), csv::fmt(r.drr_mean), csv::fmt(r.drr_max),
                   csv::fmt(r.streak_min), csv::fmt(r.streak_mean), csv::fmt(r.streak_max),
                   csv::fmt(r.norep_min), csv::fmt(r.norep_mean), csv::fmt(r.norep_max)};
    return rec;
}

std::vector<std::string> fits_csv_header() {
    return {"constraint", "degree", "c2", "c1", "c0", "rmse"};
}

std::vector<RunRecord> fit_records(const TtpEnsembleResult& result) {
    auto make = [](const char* name, std::uint64_t idx, const stats::FitResult& fit) {
        RunRecord rec;
        rec.experiment_id = "ttp";
        rec.run_index = idx;
        const double c2 = fit.degree == 2 ? fit.coefficients[0] : 0.0;
        const double c1 = fit.coefficients[fit.degree == 2 ? 1 : 0];
        const double c0 = fit.coefficients.back();
        rec.payload = {name, csv::fmt(static_cast<std::int64_t>(fit.degree)),
                       csv::fmt(c2), csv::fmt(c1), csv::fmt(c0), csv::fmt(fit.rmse)};
        return rec;
    };
    std::vector<RunRecord> out;
    if (!result.drr_fit.coefficients.empty()) out.push_back(make("drr", 0, result.drr_fit));
    if (!result.streak_fit.coefficients.empty()) out.push_back(make("max_streak", 1, result.streak_fit));
    if (!result.norep_fit.coefficients.empty()) out.push_back(make("no_repeat", 2, result.norep_fit));
    return out;
}

} // namespace evobench::ttp
