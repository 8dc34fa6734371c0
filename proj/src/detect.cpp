#include "hicap/detect.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hicap {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Restriction of the operator to support columns, (m x K).
MatrixXcd restricted_matrix(const SubsampledDftOperator& A, std::span<const int> support) {
    MatrixXcd M(A.m(), static_cast<Eigen::Index>(support.size()));
    for (Eigen::Index k = 0; k < M.cols(); ++k)
        for (Eigen::Index q = 0; q < M.rows(); ++q)
            M(q, k) = A.entry(static_cast<int>(q), support[static_cast<size_t>(k)]);
    return M;
}

VectorXcd to_eigen(std::span<const cplx> v) {
    VectorXcd out(static_cast<Eigen::Index>(v.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = v[static_cast<size_t>(i)];
    return out;
}

// Ridge-regularized LS used inside the iteration, well defined for any
// support size.
VectorXcd ridge_solve(const MatrixXcd& A, const VectorXcd& y, double lambda) {
    const MatrixXcd G =
        A.adjoint() * A + lambda * MatrixXcd::Identity(A.cols(), A.cols());
    return G.ldlt().solve(A.adjoint() * y);
}

struct Combinations {
    // All k-subsets of {0..n-1} in lexicographic order.
    Combinations(int n, int k) : n_(n), k_(k), idx_(static_cast<size_t>(k)), done_(k > n) {
        std::iota(idx_.begin(), idx_.end(), 0);
    }
    bool done() const { return done_; }
    const std::vector<int>& get() const { return idx_; }
    void next() {
        int i = k_ - 1;
        while (i >= 0 && idx_[static_cast<size_t>(i)] == n_ - k_ + i) --i;
        if (i < 0) {
            done_ = true;
            return;
        }
        ++idx_[static_cast<size_t>(i)];
        for (int j = i + 1; j < k_; ++j)
            idx_[static_cast<size_t>(j)] = idx_[static_cast<size_t>(j - 1)] + 1;
    }
    int n_, k_;
    std::vector<int> idx_;
    bool done_;
};

double binomial_coeff(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / i;
    return v;
}

}  // namespace

std::vector<int> SupportEstimate::flat_support(int s) const {
    std::vector<int> out;
    for (const auto& b : blocks)
        for (int tap : b.taps) out.push_back(b.block * s + tap);
    return out;
}

std::vector<int> SupportEstimate::block_indices() const {
    std::vector<int> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) out.push_back(b.block);
    return out;
}

bool SupportEstimate::same_support(const SupportEstimate& other) const {
    if (blocks.size() != other.blocks.size()) return false;
    for (size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].block != other.blocks[i].block || blocks[i].taps != other.blocks[i].taps)
            return false;
    return true;
}

std::vector<double> block_scores(const std::vector<std::vector<cplx>>& images, int u, int s) {
    const size_t n = static_cast<size_t>(u) * static_cast<size_t>(s);
    if (images.empty()) throw std::invalid_argument("block_scores: need at least one image");
    std::vector<double> g(n, 0.0);
    for (const auto& img : images) {
        if (img.size() != n) throw std::invalid_argument("block_scores: image length mismatch");
        for (size_t l = 0; l < n; ++l) g[l] += std::norm(img[l]);
    }
    const double inv_t = 1.0 / static_cast<double>(images.size());
    for (double& v : g) v *= inv_t;
    return g;
}

SupportEstimate hier_threshold(std::span<const double> g, int u, int s, int k_u, int k_s) {
    if (k_s > s || k_u > u || k_s < 1 || k_u < 1)
        throw config_error("hier_threshold: k_u/k_s out of range");
    if (g.size() != static_cast<size_t>(u) * static_cast<size_t>(s))
        throw std::invalid_argument("hier_threshold: g length != u*s");

    struct Entry {
        double value;
        int idx;
    };
    std::vector<Entry> entries(static_cast<size_t>(s));
    std::vector<std::vector<int>> taps(static_cast<size_t>(u));
    std::vector<double> scores(static_cast<size_t>(u), 0.0);
    for (int b = 0; b < u; ++b) {
        for (int i = 0; i < s; ++i)
            entries[static_cast<size_t>(i)] = {g[static_cast<size_t>(b * s + i)], i};
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& c) {
            return a.value > c.value || (a.value == c.value && a.idx < c.idx);
        });
        auto& sel = taps[static_cast<size_t>(b)];
        sel.resize(static_cast<size_t>(k_s));
        double sum = 0.0;
        for (int i = 0; i < k_s; ++i) {
            sel[static_cast<size_t>(i)] = entries[static_cast<size_t>(i)].idx;
            sum += entries[static_cast<size_t>(i)].value;
        }
        std::sort(sel.begin(), sel.end());
        scores[static_cast<size_t>(b)] = sum;
    }

    std::vector<int> order(static_cast<size_t>(u));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return scores[static_cast<size_t>(a)] > scores[static_cast<size_t>(b)] ||
               (scores[static_cast<size_t>(a)] == scores[static_cast<size_t>(b)] && a < b);
    });

    SupportEstimate est;
    std::vector<int> chosen(order.begin(), order.begin() + k_u);
    std::sort(chosen.begin(), chosen.end());
    double captured = 0.0;
    for (int b : chosen) {
        BlockSupport bs;
        bs.block = b;
        bs.taps = taps[static_cast<size_t>(b)];
        bs.score = scores[static_cast<size_t>(b)];
        captured += bs.score;
        est.blocks.push_back(std::move(bs));
    }
    est.degenerate = captured == 0.0;
    return est;
}

SupportEstimate brute_force_threshold(std::span<const double> g, int u, int s, int k_u,
                                      int k_s) {
    if (k_s > s || k_u > u || k_s < 1 || k_u < 1)
        throw config_error("brute_force_threshold: k_u/k_s out of range");
    const double work =
        binomial_coeff(u, k_u) * std::pow(binomial_coeff(s, k_s), k_u);
    if (!(work <= 1e6))
        throw std::invalid_argument("brute_force_threshold: instance too large");

    // Per-block candidate subsets in lexicographic order, with their sums.
    std::vector<std::vector<std::vector<int>>> subsets(static_cast<size_t>(u));
    std::vector<std::vector<double>> sums(static_cast<size_t>(u));
    for (int b = 0; b < u; ++b) {
        for (Combinations comb(s, k_s); !comb.done(); comb.next()) {
            double sum = 0.0;
            for (int i : comb.get()) sum += g[static_cast<size_t>(b * s + i)];
            subsets[static_cast<size_t>(b)].push_back(comb.get());
            sums[static_cast<size_t>(b)].push_back(sum);
        }
    }

    bool have_best = false;
    double best_energy = 0.0;
    std::vector<int> best_blocks;
    std::vector<size_t> best_choice;

    for (Combinations blocks(u, k_u); !blocks.done(); blocks.next()) {
        const auto& blk = blocks.get();
        // Odometer over the per-block subset choices (lexicographic order),
        // so the first maximizer found is the lexicographically smallest.
        std::vector<size_t> choice(static_cast<size_t>(k_u), 0);
        while (true) {
            double energy = 0.0;
            for (int i = 0; i < k_u; ++i)
                energy += sums[static_cast<size_t>(blk[static_cast<size_t>(i)])]
                              [choice[static_cast<size_t>(i)]];
            if (!have_best || energy > best_energy) {
                have_best = true;
                best_energy = energy;
                best_blocks = blk;
                best_choice = choice;
            }
            int pos = k_u - 1;
            while (pos >= 0) {
                const size_t limit =
                    subsets[static_cast<size_t>(blk[static_cast<size_t>(pos)])].size();
                if (++choice[static_cast<size_t>(pos)] < limit) break;
                choice[static_cast<size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }

    SupportEstimate est;
    for (int i = 0; i < k_u; ++i) {
        BlockSupport bs;
        bs.block = best_blocks[static_cast<size_t>(i)];
        bs.taps = subsets[static_cast<size_t>(bs.block)][best_choice[static_cast<size_t>(i)]];
        bs.score = sums[static_cast<size_t>(bs.block)][best_choice[static_cast<size_t>(i)]];
        est.blocks.push_back(std::move(bs));
    }
    est.degenerate = best_energy == 0.0;
    return est;
}

std::vector<int> activity_decision(const SupportEstimate& support, DetectorMode mode,
                                   double xi) {
    if (xi < 0.0) throw config_error("activity_decision: xi must be >= 0");
    std::vector<int> active;
    for (const auto& b : support.blocks) {
        if (mode == DetectorMode::topk) {
            active.push_back(b.block);
        } else if (b.score >= xi && b.score > 0.0) {
            active.push_back(b.block);
        }
    }
    return active;
}

SparseVec estimate_channel(const SubsampledDftOperator& A, std::span<const cplx> y0,
                           std::span<const int> support) {
    if (static_cast<int>(support.size()) > A.m())
        throw std::runtime_error("estimate_channel: support larger than m (rank deficient)");
    SparseVec out;
    out.index.assign(support.begin(), support.end());
    if (support.empty()) return out;

    const MatrixXcd M = restricted_matrix(A, support);
    const VectorXcd y = to_eigen(y0);
    Eigen::ColPivHouseholderQR<MatrixXcd> qr(M);
    VectorXcd h;
    if (qr.rank() == M.cols()) {
        h = qr.solve(y);
    } else {
        out.ridge_applied = true;
        const MatrixXcd G =
            M.adjoint() * M + 1e-12 * MatrixXcd::Identity(M.cols(), M.cols());
        h = G.ldlt().solve(M.adjoint() * y);
    }
    out.value.resize(support.size());
    for (size_t i = 0; i < support.size(); ++i) out.value[i] = h(static_cast<Eigen::Index>(i));
    return out;
}

int DataDecisions::index_of_block(int block) const {
    auto it = std::lower_bound(blocks.begin(), blocks.end(), block);
    if (it == blocks.end() || *it != block) return -1;
    return static_cast<int>(it - blocks.begin());
}

DataDecisions estimate_data(const OperatorGrid& grid, int j, const SubchannelObservation& y,
                            std::span<const int> active_blocks, const SparseVec& channel,
                            const DetectParams& params) {
    DataDecisions out;
    out.blocks.assign(active_blocks.begin(), active_blocks.end());
    std::sort(out.blocks.begin(), out.blocks.end());
    out.symbol_index.assign(out.blocks.size(), std::vector<int>());
    const int t = grid.t;
    for (auto& v : out.symbol_index) v.assign(static_cast<size_t>(t - 1), -1);
    if (out.blocks.empty() || channel.index.empty()) return out;

    // Positions of each decided block's coordinates inside the support.
    std::vector<std::vector<size_t>> positions(out.blocks.size());
    std::vector<double> block_norm(out.blocks.size(), 0.0);
    for (size_t p = 0; p < channel.index.size(); ++p) {
        const int b = channel.index[p] / params.s;
        const int pos = out.index_of_block(b);
        if (pos >= 0) {
            positions[static_cast<size_t>(pos)].push_back(p);
            block_norm[static_cast<size_t>(pos)] += std::norm(channel.value[p]);
        }
    }

    const VectorXcd h = to_eigen(channel.value);
    for (int i = 1; i < t; ++i) {
        const MatrixXcd M = restricted_matrix(grid.at(i, j), channel.index);
        const VectorXcd v = ridge_solve(M, to_eigen(y.slot(i, grid.at(i, j).m())), 1e-12);
        for (size_t bi = 0; bi < out.blocks.size(); ++bi) {
            if (block_norm[bi] <= 0.0) continue;  // erased
            cplx z(0.0, 0.0);
            for (size_t p : positions[bi]) {
                z += std::conj(h(static_cast<Eigen::Index>(p))) * v(static_cast<Eigen::Index>(p));
            }
            z /= block_norm[bi];
            out.symbol_index[bi][static_cast<size_t>(i - 1)] = nearest_qpsk_index(z);
        }
    }
    return out;
}

SupportEstimate hiiht_iterate(const OperatorGrid& grid, int j, const SubchannelObservation& y,
                              const DetectParams& params, int* iterations_used) {
    if (params.iterations < 1) throw config_error("hiiht_iterate: iterations must be >= 1");
    const int t = grid.t;
    const int m = grid.at(0, j).m();

    std::vector<std::vector<cplx>> images(static_cast<size_t>(t));
    for (int i = 0; i < t; ++i) images[static_cast<size_t>(i)] = grid.at(i, j).adjoint(y.slot(i, m));
    std::vector<double> g = block_scores(images, params.u, params.s);
    SupportEstimate support = hier_threshold(g, params.u, params.s, params.k_u, params.k_s);
    int used = 1;

    for (int it = 2; it <= params.iterations; ++it) {
        const std::vector<int> flat = support.flat_support(params.s);
        const Eigen::Index K = static_cast<Eigen::Index>(flat.size());

        // Per-slot restricted operators, pilot channel estimate, per-slot
        // coefficient estimates and symbol decisions.
        std::vector<MatrixXcd> ops(static_cast<size_t>(t));
        for (int i = 0; i < t; ++i) ops[static_cast<size_t>(i)] = restricted_matrix(grid.at(i, j), flat);
        const VectorXcd h0 = ridge_solve(ops[0], to_eigen(y.slot(0, m)), 1e-9);

        std::vector<Eigen::Index> block_of(flat.size());
        for (size_t p = 0; p < flat.size(); ++p)
            block_of[p] = static_cast<Eigen::Index>(flat[p] / params.s);

        MatrixXcd joint_gram = MatrixXcd::Zero(K, K);
        VectorXcd joint_rhs = VectorXcd::Zero(K);
        std::vector<VectorXcd> slot_symbols(static_cast<size_t>(t), VectorXcd::Ones(K));
        for (int i = 0; i < t; ++i) {
            const MatrixXcd& Mi = ops[static_cast<size_t>(i)];
            const VectorXcd yi = to_eigen(y.slot(i, m));
            VectorXcd& d = slot_symbols[static_cast<size_t>(i)];
            if (i > 0) {
                const VectorXcd v = ridge_solve(Mi, yi, 1e-9);
                // matched-filter decision per selected block
                for (const auto& b : support.blocks) {
                    cplx num(0.0, 0.0);
                    double den = 0.0;
                    for (size_t p = 0; p < flat.size(); ++p) {
                        if (block_of[p] != b.block) continue;
                        num += std::conj(h0(static_cast<Eigen::Index>(p))) *
                               v(static_cast<Eigen::Index>(p));
                        den += std::norm(h0(static_cast<Eigen::Index>(p)));
                    }
                    const cplx sym = den > 0.0
                                         ? qpsk_alphabet()[static_cast<size_t>(
                                               nearest_qpsk_index(num / den))]
                                         : cplx(1.0, 0.0);
                    for (size_t p = 0; p < flat.size(); ++p)
                        if (block_of[p] == b.block) d(static_cast<Eigen::Index>(p)) = sym;
                }
            }
            const MatrixXcd Mid = Mi * d.asDiagonal();
            joint_gram.noalias() += Mid.adjoint() * Mid;
            joint_rhs.noalias() += Mid.adjoint() * yi;
        }
        joint_gram += 1e-9 * MatrixXcd::Identity(K, K);
        const VectorXcd h = joint_gram.ldlt().solve(joint_rhs);

        // Re-encode, take residual images, add the estimate back on its
        // support, and re-threshold.
        for (int i = 0; i < t; ++i) {
            const VectorXcd x_hat =
                slot_symbols[static_cast<size_t>(i)].cwiseProduct(h);
            const VectorXcd r = to_eigen(y.slot(i, m)) - ops[static_cast<size_t>(i)] * x_hat;
            std::vector<cplx> rv(static_cast<size_t>(m));
            for (int q = 0; q < m; ++q) rv[static_cast<size_t>(q)] = r(q);
            std::vector<cplx> img = grid.at(i, j).adjoint(rv);
            for (size_t p = 0; p < flat.size(); ++p)
                img[static_cast<size_t>(flat[p])] += x_hat(static_cast<Eigen::Index>(p));
            images[static_cast<size_t>(i)] = std::move(img);
        }
        g = block_scores(images, params.u, params.s);
        SupportEstimate next = hier_threshold(g, params.u, params.s, params.k_u, params.k_s);
        used = it;
        if (next.same_support(support)) {
            support = std::move(next);
            break;
        }
        support = std::move(next);
    }
    if (iterations_used) *iterations_used = used;
    return support;
}

DetectionResult detect_subchannel(const OperatorGrid& grid, int j,
                                  const SubchannelObservation& y, const DetectParams& params) {
    DetectionResult res;
    res.support = hiiht_iterate(grid, j, y, params, &res.iterations_used);
    res.active_blocks = activity_decision(res.support, params.mode, params.xi);

    const std::vector<int> flat = res.support.flat_support(params.s);
    const int m = grid.at(0, j).m();
    if (static_cast<int>(flat.size()) > m) {
        res.estimation_skipped = true;
        return res;
    }
    res.channel = estimate_channel(grid.at(0, j), y.slot(0, m), flat);
    res.data = estimate_data(grid, j, y, res.active_blocks, res.channel, params);
    return res;
}

void accumulate_subchannel_metrics(TrialMetrics& acc, const SystemConfig& cfg,
                                   const SubchannelActivity& activity, const DataSymbols& data,
                                   const DetectionResult& result) {
    std::vector<int> detected = result.active_blocks;
    std::sort(detected.begin(), detected.end());
    const auto is_detected = [&](int block) {
        return std::binary_search(detected.begin(), detected.end(), block);
    };

    const std::vector<int> truth_active = activity.active_blocks();
    acc.inactive_blocks += cfg.u - static_cast<int>(truth_active.size());
    for (int b : detected)
        if (!std::binary_search(truth_active.begin(), truth_active.end(), b)) ++acc.false_alarms;

    for (const auto& usr : activity.users) {
        if (activity.is_collided(usr.block)) {
            ++acc.collided_users;
            continue;
        }
        ++acc.noncollided;
        if (!is_detected(usr.block)) {
            ++acc.missed;
            continue;
        }
        ++acc.supported;
        // symbol accounting over the user's t-1 data slots
        acc.symbol_slots += cfg.t - 1;
        const int truth_pos = data.index_of_block(usr.block);
        const int dec_pos =
            result.estimation_skipped ? -1 : result.data.index_of_block(usr.block);
        for (int i = 0; i < cfg.t - 1; ++i) {
            const int truth_sym =
                truth_pos >= 0 ? data.symbol_index[static_cast<size_t>(truth_pos)]
                                                  [static_cast<size_t>(i)]
                               : 0;
            const int dec_sym =
                dec_pos >= 0
                    ? result.data.symbol_index[static_cast<size_t>(dec_pos)]
                                              [static_cast<size_t>(i)]
                    : -1;
            if (dec_sym != truth_sym) ++acc.symbol_errors;
        }
    }
}

TrialMetrics evaluate_trial(const SystemConfig& cfg, const ActivityPattern& activity,
                            const std::vector<DataSymbols>& data,
                            const std::vector<DetectionResult>& results) {
    if (activity.subchannels.size() != results.size() || data.size() != results.size())
        throw std::invalid_argument("evaluate_trial: scenario size mismatch");
    TrialMetrics acc;
    for (size_t j = 0; j < results.size(); ++j)
        accumulate_subchannel_metrics(acc, cfg, activity.subchannels[j], data[j], results[j]);
    return acc;
}

}  // namespace hicap
