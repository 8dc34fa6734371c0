#pragma once

#include <utility>
#include <vector>

#include "hicap/config.hpp"
#include "hicap/rng.hpp"

namespace hicap {

struct UserPlacement {
    int user_id = 0;
    int block = 0;            // chosen resource block in [0, u)
    std::vector<int> taps;    // in-block support, ascending, |taps| = k_s
};

struct SubchannelActivity {
    std::vector<UserPlacement> users;
    std::vector<int> collided_blocks;  // blocks chosen by >= 2 users, ascending
    int load() const { return static_cast<int>(users.size()); }
    bool is_collided(int block) const;
    // blocks chosen by >= 1 user, ascending
    std::vector<int> active_blocks() const;
};

// Ground truth for one trial: users, block choices and in-block supports for
// every sub-channel. A user appears in exactly one sub-channel.
struct ActivityPattern {
    std::vector<SubchannelActivity> subchannels;
    int total_users() const;
    int total_collided_users() const;
};

// Length-n complex vector, zero outside u blocks of length s with
// hierarchical support.
struct HierSparseSignal {
    int n = 0;
    int s = 0;
    std::vector<cplx> values;                    // dense, length n
    std::vector<int> block_support;              // ascending
    std::vector<std::vector<int>> inblock_support;  // parallel to block_support

    std::vector<int> flat_support() const;       // global coordinates, ascending
    double energy() const;
    double block_energy(int block) const;
};

// One QPSK symbol per active block per data slot (slots 1..t-1); the pilot
// slot carries no data. Symbols are stored as alphabet indices.
struct DataSymbols {
    int t = 1;
    std::vector<int> blocks;                     // active blocks, ascending
    std::vector<std::vector<int>> symbol_index;  // per block, t-1 entries
    // Per-block symbol value for a slot; blocks without data (or the pilot
    // slot) modulate by 1.
    cplx symbol(int block, int slot) const;
    int index_of_block(int block) const;         // -1 if absent
};

// Per-sub-channel draws. `load` users are placed with ids first_user_id,
// first_user_id+1, ...; each picks a block uniformly (with replacement) and a
// uniform k_s-subset of [0, s) as its in-block support.
SubchannelActivity draw_subchannel_activity(const SystemConfig& cfg, int load,
                                            int first_user_id, RngStream& rng);

// Per-sub-channel user counts. Deterministic mode: kbar_u everywhere.
// Binomial mode: total_users users pick a sub-channel uniformly (drawn from
// the trial's `assign` stream).
std::vector<int> draw_loads(const SystemConfig& cfg, const TrialRng& trng);

ActivityPattern draw_activity(const SystemConfig& cfg, const TrialRng& trng);

// Each user's taps are i.i.d. CN(0, 1/k_s), so E||h_user||^2 = 1 (power
// control). Colliding users add up on the shared block (effective channel).
HierSparseSignal draw_subchannel_channels(const SystemConfig& cfg,
                                          const SubchannelActivity& activity, RngStream& rng);

std::vector<HierSparseSignal> draw_channels(const SystemConfig& cfg,
                                            const ActivityPattern& pattern, const TrialRng& trng);

DataSymbols draw_subchannel_data(const SystemConfig& cfg, const SubchannelActivity& activity,
                                 RngStream& rng);

std::vector<DataSymbols> draw_data(const SystemConfig& cfg, const ActivityPattern& pattern,
                                   const TrialRng& trng);

}  // namespace hicap
