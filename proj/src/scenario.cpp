#include "hicap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hicap {

bool SubchannelActivity::is_collided(int block) const {
    return std::binary_search(collided_blocks.begin(), collided_blocks.end(), block);
}

std::vector<int> SubchannelActivity::active_blocks() const {
    std::vector<int> blocks;
    blocks.reserve(users.size());
    for (const auto& usr : users) blocks.push_back(usr.block);
    std::sort(blocks.begin(), blocks.end());
    blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
    return blocks;
}

int ActivityPattern::total_users() const {
    int n = 0;
    for (const auto& sc : subchannels) n += sc.load();
    return n;
}

int ActivityPattern::total_collided_users() const {
    int n = 0;
    for (const auto& sc : subchannels)
        for (const auto& usr : sc.users)
            if (sc.is_collided(usr.block)) ++n;
    return n;
}

std::vector<int> HierSparseSignal::flat_support() const {
    std::vector<int> out;
    for (size_t b = 0; b < block_support.size(); ++b)
        for (int tap : inblock_support[b]) out.push_back(block_support[b] * s + tap);
    return out;
}

double HierSparseSignal::energy() const {
    double e = 0.0;
    for (const cplx& v : values) e += std::norm(v);
    return e;
}

double HierSparseSignal::block_energy(int block) const {
    double e = 0.0;
    for (int i = block * s; i < (block + 1) * s; ++i) e += std::norm(values[i]);
    return e;
}

cplx DataSymbols::symbol(int block, int slot) const {
    if (slot == 0) return cplx(1.0, 0.0);
    const int pos = index_of_block(block);
    if (pos < 0) return cplx(1.0, 0.0);
    return qpsk_alphabet()[static_cast<size_t>(symbol_index[pos][slot - 1])];
}

int DataSymbols::index_of_block(int block) const {
    auto it = std::lower_bound(blocks.begin(), blocks.end(), block);
    if (it == blocks.end() || *it != block) return -1;
    return static_cast<int>(it - blocks.begin());
}

SubchannelActivity draw_subchannel_activity(const SystemConfig& cfg, int load,
                                            int first_user_id, RngStream& rng) {
    SubchannelActivity act;
    act.users.reserve(load);
    std::map<int, int> multiplicity;
    for (int i = 0; i < load; ++i) {
        UserPlacement usr;
        usr.user_id = first_user_id + i;
        usr.block = static_cast<int>(rng.uniform_below(static_cast<uint64_t>(cfg.u)));
        usr.taps = random_subset_sorted(cfg.s, cfg.k_s, rng);
        ++multiplicity[usr.block];
        act.users.push_back(std::move(usr));
    }
    for (const auto& [block, count] : multiplicity)
        if (count >= 2) act.collided_blocks.push_back(block);
    return act;
}

std::vector<int> draw_loads(const SystemConfig& cfg, const TrialRng& trng) {
    std::vector<int> loads(cfg.c, 0);
    if (cfg.load_mode == LoadMode::deterministic) {
        std::fill(loads.begin(), loads.end(), cfg.kbar_u);
    } else {
        RngStream rng = trng.stream(Stream::assign);
        for (int k = 0; k < cfg.total_users; ++k)
            ++loads[rng.uniform_below(static_cast<uint64_t>(cfg.c))];
    }
    return loads;
}

ActivityPattern draw_activity(const SystemConfig& cfg, const TrialRng& trng) {
    ActivityPattern pattern;
    pattern.subchannels.reserve(cfg.c);
    const std::vector<int> loads = draw_loads(cfg, trng);
    int next_user = 0;
    for (int j = 0; j < cfg.c; ++j) {
        RngStream rng = trng.stream(Stream::activity, static_cast<uint64_t>(j));
        pattern.subchannels.push_back(draw_subchannel_activity(cfg, loads[j], next_user, rng));
        next_user += loads[j];
    }
    return pattern;
}

HierSparseSignal draw_subchannel_channels(const SystemConfig& cfg,
                                          const SubchannelActivity& activity, RngStream& rng) {
    HierSparseSignal sig;
    sig.n = cfg.n;
    sig.s = cfg.s;
    sig.values.assign(static_cast<size_t>(cfg.n), cplx(0.0, 0.0));
    const double tap_variance = 1.0 / cfg.k_s;

    std::map<int, std::vector<int>> support_union;
    for (const auto& usr : activity.users) {
        auto& coords = support_union[usr.block];
        for (int tap : usr.taps) {
            sig.values[static_cast<size_t>(usr.block * cfg.s + tap)] +=
                rng.complex_gaussian(tap_variance);
            coords.push_back(tap);
        }
    }
    for (auto& [block, taps] : support_union) {
        std::sort(taps.begin(), taps.end());
        taps.erase(std::unique(taps.begin(), taps.end()), taps.end());
        sig.block_support.push_back(block);
        sig.inblock_support.push_back(taps);
    }
    return sig;
}

std::vector<HierSparseSignal> draw_channels(const SystemConfig& cfg,
                                            const ActivityPattern& pattern,
                                            const TrialRng& trng) {
    std::vector<HierSparseSignal> out;
    out.reserve(pattern.subchannels.size());
    for (size_t j = 0; j < pattern.subchannels.size(); ++j) {
        RngStream rng = trng.stream(Stream::channel, j);
        out.push_back(draw_subchannel_channels(cfg, pattern.subchannels[j], rng));
    }
    return out;
}

DataSymbols draw_subchannel_data(const SystemConfig& cfg, const SubchannelActivity& activity,
                                 RngStream& rng) {
    DataSymbols data;
    data.t = cfg.t;
    data.blocks = activity.active_blocks();
    data.symbol_index.resize(data.blocks.size());
    for (auto& syms : data.symbol_index) {
        syms.resize(static_cast<size_t>(cfg.t - 1));
        for (int i = 0; i < cfg.t - 1; ++i) syms[static_cast<size_t>(i)] = rng.qpsk_index();
    }
    return data;
}

std::vector<DataSymbols> draw_data(const SystemConfig& cfg, const ActivityPattern& pattern,
                                   const TrialRng& trng) {
    std::vector<DataSymbols> out;
    out.reserve(pattern.subchannels.size());
    for (size_t j = 0; j < pattern.subchannels.size(); ++j) {
        RngStream rng = trng.stream(Stream::data, j);
        out.push_back(draw_subchannel_data(cfg, pattern.subchannels[j], rng));
    }
    return out;
}

}  // namespace hicap
