#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace hicap {

// Invalid scenario parameters. The CLI maps this to exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

enum class DetectorMode { topk, threshold };

// Pool used by the birthday sizing rule: the per-sub-channel block count u
// (default) or the full signal dimension n.
enum class BirthdayPool { per_subchannel_blocks, signal_dim };

// Deterministic: exactly kbar_u users in every sub-channel. Binomial:
// total_users users each pick a sub-channel uniformly at random.
enum class LoadMode { deterministic, binomial };

struct SystemConfig {
    int n = 1024;      // signal dimension, power of two
    int s = 8;         // block length (CIR length)
    int u = 0;         // derived: resource blocks per sub-channel, n/s
    int k_s = 4;       // nonzero CIR taps per user
    int t = 100;       // slots (1 pilot + t-1 data)
    double p_u = 0.1;  // collision probability budget
    int kbar_u = 0;    // users per sub-channel; 0 = derive via birthday rule
    int m = 0;         // measurements per sub-channel; 0 = derive
    int c = 0;         // derived: sub-channel count, floor(n/m)

    double snr_db = std::numeric_limits<double>::infinity();  // SNR = 1/sigma^2
    bool noise_free = true;

    uint64_t seed = 1;
    DetectorMode detector_mode = DetectorMode::topk;
    double xi = 0.0;     // activity threshold (threshold mode)
    int iterations = 1;  // Hi-IHT iterations, >= 1
    BirthdayPool birthday_pool = BirthdayPool::per_subchannel_blocks;

    LoadMode load_mode = LoadMode::deterministic;
    int total_users = 0;  // binomial mode; 0 = kbar_u * c

    double sigma2() const { return noise_free ? 0.0 : std::pow(10.0, -snr_db / 10.0); }
    int birthday_pool_size() const {
        return birthday_pool == BirthdayPool::per_subchannel_blocks ? u : n;
    }
};

// Largest k such that prod_{i=1}^{k} (1 - i/pool_size) >= 1 - p_u.
int select_ku(int pool_size, double p_u);

// Exact probability that kbar_u users picking blocks uniformly out of `pool`
// are pairwise distinct: prod_{i=1}^{kbar_u-1} (1 - i/pool).
double birthday_unique_probability(int pool, int kbar_u);

// Fill u, kbar_u, m, c (where zero) from (n, s, k_s, p_u, birthday_pool) and
// validate the result. kbar_u and m may be pre-set to override derivation.
SystemConfig derive_dimensions(SystemConfig cfg);

// Throws config_error on any violated invariant.
void validate(const SystemConfig& cfg);

bool is_power_of_two(int v);

}  // namespace hicap
