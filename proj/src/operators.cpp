#include "hicap/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hicap {

Fft::Fft(int n) : n_(n) {
    if (!is_power_of_two(n)) throw config_error("Fft: size must be a power of two");
    bitrev_.assign(static_cast<size_t>(n), 0);
    int log2n = 0;
    while ((1 << log2n) < n) ++log2n;
    for (int i = 0; i < n; ++i) {
        int r = 0;
        for (int b = 0; b < log2n; ++b)
            if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
        bitrev_[static_cast<size_t>(i)] = r;
    }
    twiddle_fwd_.resize(static_cast<size_t>(std::max(1, n / 2)));
    twiddle_inv_.resize(twiddle_fwd_.size());
    twiddle_fwd_[0] = twiddle_inv_[0] = cplx(1.0, 0.0);
    for (int k = 1; k < n / 2; ++k) {
        twiddle_fwd_[static_cast<size_t>(k)] =
            std::polar(1.0, -2.0 * std::numbers::pi * k / static_cast<double>(n));
        twiddle_inv_[static_cast<size_t>(k)] = std::conj(twiddle_fwd_[static_cast<size_t>(k)]);
    }
}

void Fft::transform(std::vector<cplx>& a, bool invert) const {
    if (static_cast<int>(a.size()) != n_) throw std::invalid_argument("Fft: size mismatch");
    const std::vector<cplx>& twiddle = invert ? twiddle_inv_ : twiddle_fwd_;
    for (int i = 0; i < n_; ++i) {
        const int r = bitrev_[static_cast<size_t>(i)];
        if (i < r) std::swap(a[static_cast<size_t>(i)], a[static_cast<size_t>(r)]);
    }
    for (int len = 2; len <= n_; len <<= 1) {
        const int half = len >> 1;
        const int step = n_ / len;
        for (int start = 0; start < n_; start += len) {
            for (int k = 0; k < half; ++k) {
                const cplx w = twiddle[static_cast<size_t>(k * step)];
                cplx& lo = a[static_cast<size_t>(start + k)];
                cplx& hi = a[static_cast<size_t>(start + k + half)];
                const cplx v = hi * w;
                hi = lo - v;
                lo += v;
            }
        }
    }
}

DftContext::DftContext(int n_in) : n(n_in) {
    if (n < 1) throw config_error("DftContext: n must be >= 1");
    if (is_power_of_two(n)) fft = std::make_unique<const Fft>(n);
    roots.resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        roots[static_cast<size_t>(k)] =
            std::polar(1.0, -2.0 * std::numbers::pi * k / static_cast<double>(n));
}

std::shared_ptr<const DftContext> make_dft_context(int n) {
    return std::make_shared<const DftContext>(n);
}

SubsampledDftOperator::SubsampledDftOperator(std::shared_ptr<const DftContext> ctx,
                                             std::vector<int> rows)
    : ctx_(std::move(ctx)), rows_(std::move(rows)) {
    if (rows_.empty()) throw config_error("operator needs at least one row");
    std::sort(rows_.begin(), rows_.end());
    if (std::adjacent_find(rows_.begin(), rows_.end()) != rows_.end())
        throw config_error("operator rows must be distinct");
    if (rows_.front() < 0 || rows_.back() >= ctx_->n)
        throw config_error("operator rows out of range");
    scale_ = 1.0 / std::sqrt(static_cast<double>(rows_.size()));
}

std::vector<cplx> SubsampledDftOperator::apply_dense(std::span<const cplx> x) const {
    if (static_cast<int>(x.size()) != ctx_->n)
        throw std::invalid_argument("apply_dense: dimension mismatch");
    const size_t n = static_cast<size_t>(ctx_->n);
    std::vector<cplx> out(rows_.size());
    if (ctx_->fft) {
        std::vector<cplx> buf(x.begin(), x.end());
        ctx_->fft->forward(buf);
        for (size_t q = 0; q < rows_.size(); ++q)
            out[q] = scale_ * buf[static_cast<size_t>(rows_[q])];
        return out;
    }
    for (size_t q = 0; q < rows_.size(); ++q) {
        const size_t r = static_cast<size_t>(rows_[q]);
        cplx acc(0.0, 0.0);
        for (size_t k = 0; k < n; ++k) acc += x[k] * ctx_->roots[(r * k) % n];
        out[q] = scale_ * acc;
    }
    return out;
}

std::vector<cplx> SubsampledDftOperator::apply_sparse(std::span<const int> support,
                                                      std::span<const cplx> values) const {
    if (support.size() != values.size())
        throw std::invalid_argument("apply_sparse: support/value size mismatch");
    const size_t n = static_cast<size_t>(ctx_->n);
    std::vector<cplx> out(rows_.size(), cplx(0.0, 0.0));
    for (size_t q = 0; q < rows_.size(); ++q) {
        const size_t r = static_cast<size_t>(rows_[q]);
        cplx acc(0.0, 0.0);
        for (size_t i = 0; i < support.size(); ++i) {
            const size_t idx = (r * static_cast<size_t>(support[i])) % n;
            acc += values[i] * ctx_->roots[idx];
        }
        out[q] = scale_ * acc;
    }
    return out;
}

std::vector<cplx> SubsampledDftOperator::apply(const HierSparseSignal& x) const {
    const std::vector<int> support = x.flat_support();
    std::vector<cplx> vals(support.size());
    for (size_t i = 0; i < support.size(); ++i)
        vals[i] = x.values[static_cast<size_t>(support[i])];
    return apply_sparse(support, vals);
}

std::vector<cplx> SubsampledDftOperator::adjoint(std::span<const cplx> y) const {
    if (y.size() != rows_.size()) throw std::invalid_argument("adjoint: dimension mismatch");
    const size_t n = static_cast<size_t>(ctx_->n);
    std::vector<cplx> buf(n, cplx(0.0, 0.0));
    if (ctx_->fft) {
        for (size_t q = 0; q < rows_.size(); ++q) buf[static_cast<size_t>(rows_[q])] = y[q];
        ctx_->fft->inverse(buf);
        for (cplx& v : buf) v *= scale_;
        return buf;
    }
    for (size_t l = 0; l < n; ++l) {
        cplx acc(0.0, 0.0);
        for (size_t q = 0; q < rows_.size(); ++q) {
            const size_t r = static_cast<size_t>(rows_[q]);
            acc += y[q] * std::conj(ctx_->roots[(r * l) % n]);
        }
        buf[l] = scale_ * acc;
    }
    return buf;
}

std::vector<SubsampledDftOperator> make_partition(std::shared_ptr<const DftContext> ctx, int m,
                                                  RngStream& rng) {
    const int n = ctx->n;
    if (m < 1 || m > n) throw config_error("make_partition: m must be in [1, n]");
    const std::vector<int> perm = random_permutation(n, rng);
    const int c = n / m;
    std::vector<SubsampledDftOperator> ops;
    ops.reserve(static_cast<size_t>(c));
    for (int j = 0; j < c; ++j) {
        std::vector<int> rows(perm.begin() + static_cast<ptrdiff_t>(j) * m,
                              perm.begin() + static_cast<ptrdiff_t>(j + 1) * m);
        ops.emplace_back(ctx, std::move(rows));
    }
    return ops;
}

std::vector<SubsampledDftOperator> make_partition(int n, int m, RngStream& rng) {
    return make_partition(make_dft_context(n), m, rng);
}

OperatorGrid make_slot_partitions(std::shared_ptr<const DftContext> ctx, int m, int t,
                                  RngStream& rng) {
    OperatorGrid grid;
    grid.t = t;
    grid.c = ctx->n / m;
    grid.ops.reserve(static_cast<size_t>(t) * static_cast<size_t>(grid.c));
    for (int i = 0; i < t; ++i) {
        auto slot_ops = make_partition(ctx, m, rng);
        for (auto& op : slot_ops) grid.ops.push_back(std::move(op));
    }
    return grid;
}

std::vector<cplx> modulate(std::span<const cplx> x, std::span<const cplx> block_symbols, int s) {
    std::vector<cplx> out(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        out[i] = x[i] * block_symbols[i / static_cast<size_t>(s)];
    return out;
}

std::vector<cplx> modulate(const HierSparseSignal& x, std::span<const cplx> block_symbols) {
    return modulate(std::span<const cplx>(x.values), block_symbols, x.s);
}

void add_noise(std::span<cplx> y, double sigma2, int n, RngStream& rng) {
    if (sigma2 < 0.0) throw config_error("add_noise: sigma2 must be >= 0");
    if (sigma2 == 0.0) return;
    const double var = sigma2 / static_cast<double>(n);
    for (cplx& v : y) v += rng.complex_gaussian(var);
}

SubchannelObservation simulate_subchannel(const OperatorGrid& grid, int j,
                                          const HierSparseSignal& channel,
                                          const DataSymbols& data, const SystemConfig& cfg,
                                          RngStream& noise_rng) {
    const std::vector<int> support = channel.flat_support();
    std::vector<cplx> base_vals(support.size());
    for (size_t i = 0; i < support.size(); ++i)
        base_vals[i] = channel.values[static_cast<size_t>(support[i])];

    SubchannelObservation obs;
    obs.y.assign(static_cast<size_t>(cfg.t) * static_cast<size_t>(cfg.m), cplx(0.0, 0.0));
    std::vector<cplx> vals(support.size());
    for (int i = 0; i < cfg.t; ++i) {
        for (size_t k = 0; k < support.size(); ++k)
            vals[k] = base_vals[k] * data.symbol(support[k] / cfg.s, i);
        std::vector<cplx> yi = grid.at(i, j).apply_sparse(support, vals);
        for (const cplx& v : yi) obs.signal_energy += std::norm(v);
        std::copy(yi.begin(), yi.end(),
                  obs.y.begin() + static_cast<ptrdiff_t>(i) * cfg.m);
    }
    add_noise(std::span<cplx>(obs.y), cfg.sigma2(), cfg.n, noise_rng);
    return obs;
}

std::pair<MeasurementTensor, OperatorGrid> simulate_uplink(
    const SystemConfig& cfg, const ActivityPattern& activity,
    const std::vector<HierSparseSignal>& channels, const std::vector<DataSymbols>& data,
    const TrialRng& trng) {
    if (static_cast<int>(activity.subchannels.size()) != cfg.c ||
        static_cast<int>(channels.size()) != cfg.c || static_cast<int>(data.size()) != cfg.c)
        throw std::invalid_argument("simulate_uplink: inconsistent scenario objects");

    RngStream part_rng = trng.stream(Stream::partition);
    OperatorGrid grid = make_slot_partitions(make_dft_context(cfg.n), cfg.m, cfg.t, part_rng);

    MeasurementTensor tensor;
    tensor.c = cfg.c;
    tensor.t = cfg.t;
    tensor.m = cfg.m;
    tensor.data.assign(static_cast<size_t>(cfg.c) * cfg.t * cfg.m, cplx(0.0, 0.0));
    for (int j = 0; j < cfg.c; ++j) {
        RngStream noise_rng = trng.stream(Stream::noise, static_cast<uint64_t>(j));
        SubchannelObservation obs =
            simulate_subchannel(grid, j, channels[static_cast<size_t>(j)],
                                data[static_cast<size_t>(j)], cfg, noise_rng);
        for (int i = 0; i < cfg.t; ++i) {
            auto dst = tensor.at(j, i);
            auto src = obs.slot(i, cfg.m);
            std::copy(src.begin(), src.end(), dst.begin());
        }
    }
    return {std::move(tensor), std::move(grid)};
}

}  // namespace hicap
