#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace hicap {

using cplx = std::complex<double>;

// QPSK alphabet, indexed by quadrant: 0:(+,+) 1:(-,+) 2:(-,-) 3:(+,-).
inline const std::array<cplx, 4>& qpsk_alphabet() {
    static const std::array<cplx, 4> pts = {
        cplx(std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2),
        cplx(-std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2),
        cplx(-std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2),
        cplx(std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2),
    };
    return pts;
}

inline int nearest_qpsk_index(cplx z) {
    if (z.real() >= 0.0) return z.imag() >= 0.0 ? 0 : 3;
    return z.imag() >= 0.0 ? 1 : 2;
}

constexpr uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Named substreams so every random draw has a fixed (seed, trial, stream,
// index) address, independent of evaluation order and worker count.
enum class Stream : uint64_t {
    partition = 1,
    activity = 2,
    channel = 3,
    data = 4,
    noise = 5,
    assign = 6,
    misc = 7,
};

// One independent random stream. Sampling routines are hand-rolled on top of
// the (fully specified) mt19937_64 engine so that outputs are bit-identical
// across standard library implementations.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // [0, bound), unbiased via rejection
    uint64_t uniform_below(uint64_t bound) {
        const uint64_t limit = bound * (UINT64_MAX / bound);
        uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % bound;
    }

    // Circular complex Gaussian CN(0, variance): each component has
    // variance/2. Magnitude-phase form of Box-Muller.
    cplx complex_gaussian(double variance) {
        const double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform();
        const double mag = std::sqrt(-variance * std::log(u1));
        return std::polar(mag, 2.0 * std::numbers::pi * u2);
    }

    int qpsk_index() { return static_cast<int>(next() & 3); }

private:
    std::mt19937_64 eng_;
};

// Fisher-Yates permutation of {0, ..., n-1}.
inline std::vector<int> random_permutation(int n, RngStream& rng) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_below(static_cast<uint64_t>(i) + 1));
        std::swap(p[i], p[j]);
    }
    return p;
}

// Uniform k-subset of {0, ..., n-1}, ascending.
inline std::vector<int> random_subset_sorted(int n, int k, RngStream& rng) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.uniform_below(static_cast<uint64_t>(n - i)));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// Substream factory for one Monte-Carlo trial. Streams derived from
// (master seed, trial, stream kind, sub-channel index) are independent, so
// trials and sub-channels can be processed in any order on any worker.
class TrialRng {
public:
    TrialRng(uint64_t master_seed, uint64_t trial) : master_(master_seed), trial_(trial) {}

    RngStream stream(Stream kind, uint64_t index = 0) const {
        uint64_t h = splitmix64(master_ ^ 0x6a09e667f3bcc909ULL);
        h = splitmix64(h ^ trial_);
        h = splitmix64(h ^ (static_cast<uint64_t>(kind) << 32));
        h = splitmix64(h ^ index);
        return RngStream(h);
    }

    uint64_t trial() const { return trial_; }

private:
    uint64_t master_;
    uint64_t trial_;
};

}  // namespace hicap
