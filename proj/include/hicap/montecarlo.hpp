#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hicap/bounds.hpp"
#include "hicap/config.hpp"
#include "hicap/detect.hpp"
#include "hicap/operators.hpp"

namespace hicap {

enum class SweepAxis { none, n, snr_db, slots, load };

struct ExperimentSpec {
    SystemConfig base;                // dimensions may be underived; resolved per point
    SweepAxis axis = SweepAxis::none;
    std::vector<double> values;       // axis values; ignored for axis == none
    std::vector<double> snr_grid;     // inner SNR grid for the n axis (inf = noise-free)
    int trials = 100;
    int workers = 0;                  // 0 = auto (hardware), capped by HICAP_THREADS
};

struct PointResult {
    SystemConfig config;  // fully derived configuration of this point
    int trials = 0;
    double mean_supported = 0.0, std_supported = 0.0;
    double mean_pmd = 0.0, std_pmd = 0.0;
    double mean_pfa = 0.0, std_pfa = 0.0;
    double mean_ser = 0.0, std_ser = 0.0;
    long long total_noncollided = 0;
    long long total_missed = 0;
    double detected_fraction = 0.0;     // pooled over trials
    double mean_signal_entry_energy = 0.0;
    double empirical_snr_db = 0.0;      // inf when noise-free
    double wall_seconds = 0.0;
};

struct AggregateResult {
    std::vector<PointResult> points;
};

// Number of workers actually used: `requested` (or hardware concurrency when
// 0), capped by the HICAP_THREADS environment variable.
int resolve_workers(int requested);

struct TrialOutcome {
    TrialMetrics metrics;
    double signal_energy = 0.0;  // sum over sub-channels, slots, entries
};

// One full trial: per-slot partitions, per-sub-channel activity, channels,
// data, uplink, detection and scoring. Deterministic in (cfg.seed, trial).
TrialOutcome run_trial(const SystemConfig& cfg, uint64_t trial,
                       const std::shared_ptr<const DftContext>& ctx);

// Runs every sweep point; trials are dispatched to a worker pool and reduced
// in index order, so results do not depend on the worker count.
AggregateResult run_experiment(const ExperimentSpec& spec);

// Fig-1 style sweep over n with the inner SNR grid (defaults to
// {inf, 10, 0, -10} dB when the spec leaves it empty).
AggregateResult sweep_supported_users(ExperimentSpec spec);

struct ConcentrationRow {
    int m = 0, t = 0;
    double eps = 0.0;
    double empirical = 0.0;
    double bound_raw = 0.0;
    double bound_clamped = 0.0;
    int trials = 0;
};

// Empirical tail of |t^-1 sum_i ||A D_i x||^2 - ||x||^2| > eps ||x||^2 for a
// fixed hierarchically sparse x, over fresh operator rows and unit-modulus
// block modulations per draw (D_0 = I), next to the multi-slot analytic
// bound. The operator stays fixed across the slots of one draw.
std::vector<ConcentrationRow> empirical_concentration(const SystemConfig& cfg, int trials,
                                                      std::span<const double> eps_grid);

struct LoadTailRow {
    int x = 0;
    double empirical = 0.0;
    double bound_raw = 0.0;
    double bound_clamped = 0.0;
};

struct LoadTailTable {
    std::vector<LoadTailRow> rows;
    double mean_load = 0.0;
    int trials = 0;
};

// Binomial-load tail: k_u users pick one of c = n/m sub-channels uniformly;
// empirical P(load of sub-channel 0 >= x) next to the capture bound.
LoadTailTable empirical_load_distribution(int n, int m, int k_u, int trials, uint64_t seed);
LoadTailTable empirical_load_distribution(int n, int m, int k_u, int trials, uint64_t seed,
                                          std::span<const int> x_grid);

}  // namespace hicap
