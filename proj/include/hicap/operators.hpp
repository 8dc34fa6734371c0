#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hicap/config.hpp"
#include "hicap/rng.hpp"
#include "hicap/scenario.hpp"

namespace hicap {

// Iterative radix-2 FFT; n must be a power of two. Both directions are
// unnormalized: forward computes sum_k x_k e^{-i2*pi*qk/n}, inverse computes
// sum_q y_q e^{+i2*pi*qk/n}.
class Fft {
public:
    explicit Fft(int n);
    int size() const { return n_; }
    void forward(std::vector<cplx>& a) const { transform(a, false); }
    void inverse(std::vector<cplx>& a) const { transform(a, true); }

private:
    void transform(std::vector<cplx>& a, bool invert) const;
    int n_;
    std::vector<int> bitrev_;
    std::vector<cplx> twiddle_fwd_;  // e^{-i2*pi*k/n}, k < n/2
    std::vector<cplx> twiddle_inv_;  // conjugates
};

// Shared immutable tables for one ambient dimension n: the FFT plan and the
// full root table roots[k] = e^{-i2*pi*k/n}. Non-power-of-two n is allowed
// (partitions and direct evaluation work); only the FFT fast path needs a
// power of two.
struct DftContext {
    explicit DftContext(int n);
    int n;
    std::unique_ptr<const Fft> fft;  // null when n is not a power of two
    std::vector<cplx> roots;
};

std::shared_ptr<const DftContext> make_dft_context(int n);

// m rows of the n-point DFT scaled by 1/sqrt(m):
//   (Ax)_q = (1/sqrt(m)) sum_k x_k e^{-i2*pi*rows[q]*k/n}
// Rows are stored ascending. Immutable and shareable across workers.
class SubsampledDftOperator {
public:
    SubsampledDftOperator(std::shared_ptr<const DftContext> ctx, std::vector<int> rows);

    int n() const { return ctx_->n; }
    int m() const { return static_cast<int>(rows_.size()); }
    double scale() const { return scale_; }
    const std::vector<int>& rows() const { return rows_; }

    cplx entry(int q, int k) const {
        const auto idx = (static_cast<size_t>(rows_[static_cast<size_t>(q)]) *
                          static_cast<size_t>(k)) % static_cast<size_t>(ctx_->n);
        return scale_ * ctx_->roots[idx];
    }

    // Dense path: full n-point FFT, then row selection.
    std::vector<cplx> apply_dense(std::span<const cplx> x) const;

    // Sparse path: direct evaluation over the given support.
    std::vector<cplx> apply_sparse(std::span<const int> support,
                                   std::span<const cplx> values) const;
    std::vector<cplx> apply(const HierSparseSignal& x) const;

    // Exact conjugate-transpose action, length n.
    std::vector<cplx> adjoint(std::span<const cplx> y) const;

private:
    std::shared_ptr<const DftContext> ctx_;
    std::vector<int> rows_;
    double scale_;
};

// One uniformly random permutation of [n] cut into c = floor(n/m) chunks of
// size m; the n mod m leftover indices are discarded.
std::vector<SubsampledDftOperator> make_partition(std::shared_ptr<const DftContext> ctx, int m,
                                                  RngStream& rng);
std::vector<SubsampledDftOperator> make_partition(int n, int m, RngStream& rng);

// Per-slot partitions: slot i gets its own fresh partition, so sub-channels
// stay disjoint within every slot while the row sets hop across slots.
struct OperatorGrid {
    int t = 0;
    int c = 0;
    std::vector<SubsampledDftOperator> ops;  // slot-major: ops[i*c + j]
    const SubsampledDftOperator& at(int slot, int subchannel) const {
        return ops[static_cast<size_t>(slot) * static_cast<size_t>(c) +
                   static_cast<size_t>(subchannel)];
    }
};

OperatorGrid make_slot_partitions(std::shared_ptr<const DftContext> ctx, int m, int t,
                                  RngStream& rng);

// Multiply every entry of block k by block_symbols[k]; support is unchanged.
std::vector<cplx> modulate(std::span<const cplx> x, std::span<const cplx> block_symbols, int s);
std::vector<cplx> modulate(const HierSparseSignal& x, std::span<const cplx> block_symbols);

// Adds i.i.d. CN(0, sigma2/n) noise per entry; no-op when sigma2 == 0.
void add_noise(std::span<cplx> y, double sigma2, int n, RngStream& rng);

struct MeasurementTensor {
    int c = 0, t = 0, m = 0;
    std::vector<cplx> data;  // indexed [j][i][q]
    std::span<cplx> at(int j, int i) {
        return std::span<cplx>(data).subspan(
            (static_cast<size_t>(j) * t + static_cast<size_t>(i)) * m, static_cast<size_t>(m));
    }
    std::span<const cplx> at(int j, int i) const {
        return std::span<const cplx>(data).subspan(
            (static_cast<size_t>(j) * t + static_cast<size_t>(i)) * m, static_cast<size_t>(m));
    }
};

struct SubchannelObservation {
    std::vector<cplx> y;         // t*m, slot-major
    double signal_energy = 0.0;  // sum of ||A D_i h||^2 before noise
    std::span<const cplx> slot(int i, int m) const {
        return std::span<const cplx>(y).subspan(static_cast<size_t>(i) * m,
                                                static_cast<size_t>(m));
    }
};

// y_i = A_{i,j} (D_i h) + z_i for all slots of sub-channel j; the pilot slot
// uses D_0 = I.
SubchannelObservation simulate_subchannel(const OperatorGrid& grid, int j,
                                          const HierSparseSignal& channel,
                                          const DataSymbols& data, const SystemConfig& cfg,
                                          RngStream& noise_rng);

// Full uplink synthesis for one trial; returns the c x t x m observation
// tensor together with the operators for reuse by the detector.
std::pair<MeasurementTensor, OperatorGrid> simulate_uplink(
    const SystemConfig& cfg, const ActivityPattern& activity,
    const std::vector<HierSparseSignal>& channels, const std::vector<DataSymbols>& data,
    const TrialRng& trng);

}  // namespace hicap
