#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "hicap/operators.hpp"

using namespace hicap;

namespace {

// O(n^2) reference DFT, the oracle for the FFT fast path.
std::vector<cplx> direct_dft(const std::vector<cplx>& x) {
    const size_t n = x.size();
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (size_t q = 0; q < n; ++q)
        for (size_t k = 0; k < n; ++k)
            out[q] += x[k] * std::polar(1.0, -2.0 * std::numbers::pi *
                                                 static_cast<double>(q * k % n) / n);
    return out;
}

std::vector<cplx> random_vector(int n, RngStream& rng, double variance) {
    std::vector<cplx> x(static_cast<size_t>(n));
    for (auto& v : x) v = rng.complex_gaussian(variance);
    return x;
}

double norm2(std::span<const cplx> v) {
    double e = 0.0;
    for (const auto& z : v) e += std::norm(z);
    return e;
}

}  // namespace

TEST_CASE("fft agrees with the direct DFT") {
    RngStream rng(42);
    for (int n : {1, 2, 16, 64}) {
        std::vector<cplx> x = random_vector(n, rng, 1.0);
        const std::vector<cplx> ref = direct_dft(x);
        std::vector<cplx> fast = x;
        Fft fft(n);
        fft.forward(fast);
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(fast[static_cast<size_t>(k)] - ref[static_cast<size_t>(k)]) <= 1e-10);
        // unnormalized inverse of forward = n * identity
        fft.inverse(fast);
        for (int k = 0; k < n; ++k)
            CHECK(std::abs(fast[static_cast<size_t>(k)] / static_cast<double>(n) -
                           x[static_cast<size_t>(k)]) <= 1e-12);
    }
}

TEST_CASE("make_partition covers the space in disjoint chunks") {
    RngStream rng(7);
    auto one = make_partition(8, 8, rng);
    REQUIRE(one.size() == 1);
    std::vector<int> rows = one[0].rows();
    std::sort(rows.begin(), rows.end());
    for (int i = 0; i < 8; ++i) CHECK(rows[static_cast<size_t>(i)] == i);

    auto many = make_partition(1024, 16, rng);
    REQUIRE(many.size() == 64);
    std::set<int> all;
    for (const auto& op : many) {
        CHECK(op.m() == 16);
        for (int r : op.rows()) CHECK(all.insert(r).second);
    }
    CHECK(all.size() == 1024);

    // floor behavior: leftover indices are discarded
    auto leftover = make_partition(10, 4, rng);
    REQUIRE(leftover.size() == 2);
    std::set<int> used;
    for (const auto& op : leftover)
        for (int r : op.rows()) CHECK(used.insert(r).second);
    CHECK(used.size() == 8);
}

TEST_CASE("slot partitions are disjoint within every slot") {
    RngStream rng(9);
    const OperatorGrid grid = make_slot_partitions(make_dft_context(64), 8, 5, rng);
    CHECK(grid.t == 5);
    CHECK(grid.c == 8);
    for (int i = 0; i < grid.t; ++i) {
        std::set<int> slot_rows;
        for (int j = 0; j < grid.c; ++j)
            for (int r : grid.at(i, j).rows()) CHECK(slot_rows.insert(r).second);
        CHECK(slot_rows.size() == 64);
    }
}

TEST_CASE("apply maps zero to zero and the delta to a flat response") {
    RngStream rng(3);
    auto ops = make_partition(64, 16, rng);
    const auto& A = ops[0];
    std::vector<cplx> zero(64, cplx(0.0, 0.0));
    for (const auto& v : A.apply_dense(zero)) CHECK(std::abs(v) == 0.0);

    std::vector<cplx> delta(64, cplx(0.0, 0.0));
    delta[0] = cplx(1.0, 0.0);
    const double expect = 1.0 / std::sqrt(16.0);
    for (const auto& v : A.apply_dense(delta)) CHECK(std::abs(v - cplx(expect, 0.0)) <= 1e-12);
}

TEST_CASE("operator is an isometry in expectation over uniform row draws") {
    const int n = 256, m = 16, draws = 10000;
    auto ctx = make_dft_context(n);
    RngStream rng(101);
    std::vector<cplx> x = random_vector(n, rng, 1.0 / n);
    const double inv = 1.0 / std::sqrt(norm2(x));
    for (auto& v : x) v *= inv;
    double acc = 0.0;
    for (int i = 0; i < draws; ++i) {
        SubsampledDftOperator A(ctx, random_subset_sorted(n, m, rng));
        acc += norm2(A.apply_dense(x));
    }
    CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("adjoint satisfies the inner-product identity") {
    const int n = 256, m = 16;
    auto ctx = make_dft_context(n);
    RngStream rng(55);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        SubsampledDftOperator A(ctx, random_subset_sorted(n, m, rng));
        const auto x = random_vector(n, rng, 1.0 / n);
        const auto y = random_vector(m, rng, 1.0 / m);
        const auto Ax = A.apply_dense(x);
        const auto Ahy = A.adjoint(y);
        cplx lhs(0.0, 0.0), rhs(0.0, 0.0);
        for (int q = 0; q < m; ++q) lhs += Ax[static_cast<size_t>(q)] * std::conj(y[static_cast<size_t>(q)]);
        for (int l = 0; l < n; ++l) rhs += x[static_cast<size_t>(l)] * std::conj(Ahy[static_cast<size_t>(l)]);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    CHECK(worst <= 1e-9);

    SubsampledDftOperator A(ctx, random_subset_sorted(n, m, rng));
    const std::vector<cplx> zero(m, cplx(0.0, 0.0));
    for (const auto& v : A.adjoint(zero)) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("full-row operator is unitary: adjoint(apply(x)) == x") {
    const int n = 16;
    auto ctx = make_dft_context(n);
    std::vector<int> all_rows(n);
    for (int i = 0; i < n; ++i) all_rows[static_cast<size_t>(i)] = i;
    SubsampledDftOperator A(ctx, all_rows);
    RngStream rng(77);
    for (int rep = 0; rep < 20; ++rep) {
        const auto x = random_vector(n, rng, 1.0);
        const auto back = A.adjoint(A.apply_dense(x));
        for (int l = 0; l < n; ++l)
            CHECK(std::abs(back[static_cast<size_t>(l)] - x[static_cast<size_t>(l)]) <= 1e-9);
    }
}

TEST_CASE("sparse and dense application paths agree") {
    SystemConfig cfg;
    cfg.n = 256;
    cfg.s = 8;
    cfg.k_s = 3;
    cfg = derive_dimensions(cfg);
    auto ctx = make_dft_context(cfg.n);
    RngStream rng(31);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        SubsampledDftOperator A(ctx, random_subset_sorted(cfg.n, 16, rng));
        const SubchannelActivity act = draw_subchannel_activity(cfg, 3, 0, rng);
        const HierSparseSignal sig = draw_subchannel_channels(cfg, act, rng);
        const auto sparse = A.apply(sig);
        const auto dense = A.apply_dense(sig.values);
        double diff = 0.0;
        for (size_t q = 0; q < sparse.size(); ++q) diff += std::norm(sparse[q] - dense[q]);
        const double ref = norm2(dense);
        if (ref > 0.0) worst = std::max(worst, std::sqrt(diff / ref));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("modulate preserves norms and support, and rotates blocks") {
    const int u = 4, s = 4, n = u * s;
    RngStream rng(21);
    std::vector<cplx> x = random_vector(n, rng, 1.0);
    x[3] = cplx(0.0, 0.0);

    std::vector<cplx> ones(static_cast<size_t>(u), cplx(1.0, 0.0));
    CHECK(modulate(x, ones, s) == x);

    std::vector<cplx> syms(static_cast<size_t>(u));
    for (auto& v : syms) v = qpsk_alphabet()[static_cast<size_t>(rng.qpsk_index())];
    const auto y = modulate(x, syms, s);
    CHECK(std::abs(std::sqrt(norm2(y)) - std::sqrt(norm2(x))) <= 1e-12 * std::sqrt(norm2(x)));
    CHECK(y[3] == cplx(0.0, 0.0));  // zeros stay exactly zero

    // rotating one block by i leaves the others untouched
    std::vector<cplx> rot(static_cast<size_t>(u), cplx(1.0, 0.0));
    rot[2] = cplx(0.0, 1.0);
    const auto z = modulate(x, rot, s);
    for (int l = 0; l < n; ++l) {
        if (l / s == 2)
            CHECK(std::abs(z[static_cast<size_t>(l)] - x[static_cast<size_t>(l)] * cplx(0.0, 1.0)) == 0.0);
        else
            CHECK(z[static_cast<size_t>(l)] == x[static_cast<size_t>(l)]);
    }
}

TEST_CASE("add_noise matches the variance convention") {
    const int n = 1024;
    std::vector<cplx> y(100000, cplx(0.0, 0.0));
    RngStream rng(5);
    SUBCASE("zero variance is a no-op") {
        std::vector<cplx> orig = y;
        add_noise(y, 0.0, n, rng);
        CHECK(y == orig);
    }
    SUBCASE("per-entry variance is sigma2/n, split evenly per component") {
        const double sigma2 = 1.024;  // sigma2/n = 1e-3
        add_noise(y, sigma2, n, rng);
        double re2 = 0.0, im2 = 0.0;
        for (const auto& v : y) {
            re2 += v.real() * v.real();
            im2 += v.imag() * v.imag();
        }
        const double per_entry = (re2 + im2) / static_cast<double>(y.size());
        CHECK(per_entry == doctest::Approx(1e-3).epsilon(0.02));
        CHECK(re2 / static_cast<double>(y.size()) == doctest::Approx(5e-4).epsilon(0.03));
        CHECK(im2 / static_cast<double>(y.size()) == doctest::Approx(5e-4).epsilon(0.03));
    }
}

TEST_CASE("simulate_uplink composes the proxy model") {
    SystemConfig cfg;
    cfg.n = 64;
    cfg.s = 4;
    cfg.k_s = 2;
    cfg.kbar_u = 1;
    cfg.m = 8;
    cfg.t = 3;
    cfg.seed = 17;
    cfg = derive_dimensions(cfg);
    const TrialRng trng(cfg.seed, 0);

    SUBCASE("zero channels, noise-free: all-zero tensor") {
        ActivityPattern empty;
        empty.subchannels.resize(static_cast<size_t>(cfg.c));
        std::vector<HierSparseSignal> channels(static_cast<size_t>(cfg.c));
        for (auto& sig : channels) {
            sig.n = cfg.n;
            sig.s = cfg.s;
            sig.values.assign(static_cast<size_t>(cfg.n), cplx(0.0, 0.0));
        }
        std::vector<DataSymbols> data(static_cast<size_t>(cfg.c));
        const auto [tensor, grid] = simulate_uplink(cfg, empty, channels, data, trng);
        CHECK(tensor.c == cfg.c);
        for (const auto& v : tensor.data) CHECK(std::abs(v) == 0.0);
        CHECK(grid.t == cfg.t);
    }

    SUBCASE("pilot slot of a one-user sub-channel equals the operator action") {
        const ActivityPattern pattern = draw_activity(cfg, trng);
        const auto channels = draw_channels(cfg, pattern, trng);
        const auto data = draw_data(cfg, pattern, trng);
        const auto [tensor, grid] = simulate_uplink(cfg, pattern, channels, data, trng);
        for (int j = 0; j < cfg.c; ++j) {
            const auto expect = grid.at(0, j).apply(channels[static_cast<size_t>(j)]);
            const auto got = tensor.at(j, 0);
            for (int q = 0; q < cfg.m; ++q)
                CHECK(std::abs(got[static_cast<size_t>(q)] - expect[static_cast<size_t>(q)]) <= 1e-12);
        }
    }
}

TEST_CASE("reference scenario produces the 64x100x16 tensor") {
    SystemConfig cfg;
    cfg.n = 1024;
    cfg.s = 8;
    cfg.k_s = 4;
    cfg.t = 100;
    cfg.seed = 23;
    cfg = derive_dimensions(cfg);
    const TrialRng trng(cfg.seed, 0);
    const ActivityPattern pattern = draw_activity(cfg, trng);
    const auto channels = draw_channels(cfg, pattern, trng);
    const auto data = draw_data(cfg, pattern, trng);
    const auto [tensor, grid] = simulate_uplink(cfg, pattern, channels, data, trng);
    CHECK(tensor.c == 64);
    CHECK(tensor.t == 100);
    CHECK(tensor.m == 16);
    CHECK(tensor.data.size() == 64u * 100u * 16u);
}
