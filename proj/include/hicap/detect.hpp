#pragma once

#include <span>
#include <vector>

#include "hicap/config.hpp"
#include "hicap/operators.hpp"
#include "hicap/scenario.hpp"

namespace hicap {

struct DetectParams {
    int u = 0, s = 0, k_u = 0, k_s = 0;
    int iterations = 1;
    DetectorMode mode = DetectorMode::topk;
    double xi = 0.0;

    static DetectParams from_config(const SystemConfig& cfg) {
        return DetectParams{cfg.u, cfg.s, cfg.kbar_u, cfg.k_s,
                            cfg.iterations, cfg.detector_mode, cfg.xi};
    }
};

struct BlockSupport {
    int block = 0;
    std::vector<int> taps;  // ascending, size k_s
    double score = 0.0;     // slot-averaged captured energy
};

struct SupportEstimate {
    std::vector<BlockSupport> blocks;  // ascending by block index
    bool degenerate = false;           // pure tie-break output (zero captured energy)

    std::vector<int> flat_support(int s) const;
    std::vector<int> block_indices() const;
    bool same_support(const SupportEstimate& other) const;
};

// Slot-averaged squared magnitude per coordinate:
// g_l = (1/t) sum_i |images[i][l]|^2.
std::vector<double> block_scores(const std::vector<std::vector<cplx>>& images, int u, int s);

// Hierarchical hard thresholding: per block keep the k_s largest entries
// (ties to the lowest index), score blocks by the kept sum, keep the k_u
// best-scoring blocks (ties to the lowest block index). This is the support
// of the best (k_u, k_s)-sparse approximation under the given energies.
SupportEstimate hier_threshold(std::span<const double> g, int u, int s, int k_u, int k_s);

// Exhaustive oracle: enumerates every (k_u, k_s)-hierarchical support and
// returns the energy maximizer, with the same tie-breaking as
// hier_threshold. Guarded by C(u,k_u) * C(s,k_s)^{k_u} <= 1e6.
SupportEstimate brute_force_threshold(std::span<const double> g, int u, int s, int k_u, int k_s);

// TopK mode: every selected block is declared active. Threshold mode: a block
// is active iff its slot-summed captured energy reaches t*xi (equivalently
// its slot-averaged score reaches xi) and is positive.
std::vector<int> activity_decision(const SupportEstimate& support, DetectorMode mode, double xi);

struct SparseVec {
    std::vector<int> index;
    std::vector<cplx> value;
    bool ridge_applied = false;
};

// Least squares restricted to the support columns of A (pilot slot).
// Throws when |support| > m; a numerically singular system falls back to a
// 1e-12 ridge with ridge_applied set.
SparseVec estimate_channel(const SubsampledDftOperator& A, std::span<const cplx> y0,
                           std::span<const int> support);

struct DataDecisions {
    std::vector<int> blocks;                     // decided blocks, ascending
    std::vector<std::vector<int>> symbol_index;  // per block, t-1 entries; -1 = erased
    int index_of_block(int block) const;
};

// Per-slot least squares on the support, then block-wise matched filter
// against the channel estimate and nearest-QPSK decision.
DataDecisions estimate_data(const OperatorGrid& grid, int j, const SubchannelObservation& y,
                            std::span<const int> active_blocks, const SparseVec& channel,
                            const DetectParams& params);

// Hierarchical IHT. Iteration 1 thresholds the slot-averaged correlation
// energies. Later iterations estimate the channel on the current support,
// demodulate per-slot symbols, re-encode, and re-threshold the residual
// images added back onto the estimate; stops early once the support is
// unchanged.
SupportEstimate hiiht_iterate(const OperatorGrid& grid, int j, const SubchannelObservation& y,
                              const DetectParams& params, int* iterations_used = nullptr);

struct DetectionResult {
    SupportEstimate support;
    std::vector<int> active_blocks;
    SparseVec channel;
    DataDecisions data;
    int iterations_used = 1;
    bool estimation_skipped = false;  // |support| > m, no channel/data estimates
};

DetectionResult detect_subchannel(const OperatorGrid& grid, int j,
                                  const SubchannelObservation& y, const DetectParams& params);

struct TrialMetrics {
    long long missed = 0;
    long long noncollided = 0;
    long long false_alarms = 0;
    long long inactive_blocks = 0;
    long long symbol_errors = 0;
    long long symbol_slots = 0;
    long long supported = 0;
    long long collided_users = 0;

    double pmd() const { return noncollided ? static_cast<double>(missed) / noncollided : 0.0; }
    double pfa() const {
        return inactive_blocks ? static_cast<double>(false_alarms) / inactive_blocks : 0.0;
    }
    double ser() const {
        return symbol_slots ? static_cast<double>(symbol_errors) / symbol_slots : 0.0;
    }
};

// Scores one sub-channel's detection against the ground truth and adds the
// counts onto `acc`. Collided users are excluded from both the missed and
// supported tallies; erased symbols count as symbol errors.
void accumulate_subchannel_metrics(TrialMetrics& acc, const SystemConfig& cfg,
                                   const SubchannelActivity& activity, const DataSymbols& data,
                                   const DetectionResult& result);

TrialMetrics evaluate_trial(const SystemConfig& cfg, const ActivityPattern& activity,
                            const std::vector<DataSymbols>& data,
                            const std::vector<DetectionResult>& results);

}  // namespace hicap
