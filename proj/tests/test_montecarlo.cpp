#include <doctest.h>

#include <cmath>
#include <limits>

#include "hicap/io.hpp"
#include "hicap/montecarlo.hpp"

using namespace hicap;

namespace {

SystemConfig tiny_config() {
    SystemConfig cfg;
    cfg.n = 256;
    cfg.s = 8;
    cfg.k_s = 2;
    cfg.kbar_u = 2;
    cfg.m = 16;
    cfg.t = 8;
    cfg.seed = 77;
    return derive_dimensions(cfg);
}

}  // namespace

TEST_CASE("run_experiment is bit-deterministic across reruns and worker counts") {
    ExperimentSpec spec;
    spec.base = tiny_config();
    spec.trials = 4;
    spec.workers = 1;
    const std::string a = metrics_csv(run_experiment(spec));
    const std::string b = metrics_csv(run_experiment(spec));
    CHECK(a == b);
    spec.workers = 3;
    const std::string c = metrics_csv(run_experiment(spec));
    CHECK(a == c);
}

TEST_CASE("aggregates stay within metric ranges and conserve trial counts") {
    ExperimentSpec spec;
    spec.base = tiny_config();
    spec.base.snr_db = 0.0;
    spec.base.noise_free = false;
    spec.trials = 6;
    spec.workers = 2;
    const AggregateResult res = run_experiment(spec);
    REQUIRE(res.points.size() == 1);
    const PointResult& p = res.points.front();
    CHECK(p.trials == 6);
    CHECK(p.mean_pmd >= 0.0);
    CHECK(p.mean_pmd <= 1.0);
    CHECK(p.mean_pfa >= 0.0);
    CHECK(p.mean_pfa <= 1.0);
    CHECK(p.mean_ser >= 0.0);
    CHECK(p.mean_ser <= 1.0);
    CHECK(p.std_supported >= 0.0);
    CHECK(p.mean_supported <= static_cast<double>(p.config.kbar_u * p.config.c));
    CHECK(p.wall_seconds > 0.0);
    // measured per-entry signal energy tracks E||h||^2 / m
    const double expect = p.config.kbar_u / static_cast<double>(p.config.m);
    CHECK(p.mean_signal_entry_energy == doctest::Approx(expect).epsilon(0.1));
}

TEST_CASE("small noise-free scenario detects nearly everything") {
    ExperimentSpec spec;
    spec.base = tiny_config();
    spec.base.k_s = 4;  // lighter fading tail than k_s = 2
    spec.base.t = 16;
    spec.base = derive_dimensions(spec.base);
    spec.trials = 10;
    spec.workers = 2;
    const AggregateResult res = run_experiment(spec);
    CHECK(res.points.front().detected_fraction >= 0.99);
}

TEST_CASE("noise at -10 dB barely moves the supported-user mean") {
    ExperimentSpec spec;
    spec.base = tiny_config();
    spec.trials = 8;
    spec.workers = 2;
    const double clean = run_experiment(spec).points.front().mean_supported;
    spec.base.snr_db = -10.0;
    spec.base.noise_free = false;
    const double noisy = run_experiment(spec).points.front().mean_supported;
    CHECK(std::abs(noisy - clean) <= 0.05 * clean);
}

TEST_CASE("n-axis sweep is increasing and covers the snr grid") {
    ExperimentSpec spec;
    spec.base = tiny_config();
    spec.base.kbar_u = 0;  // re-derive per n
    spec.base.m = 0;
    spec.base.c = 0;
    spec.base.total_users = 0;
    spec.trials = 3;
    spec.workers = 2;
    spec.values = {256.0, 512.0};
    spec.snr_grid = {std::numeric_limits<double>::infinity(), 0.0};
    const AggregateResult res = sweep_supported_users(spec);
    REQUIRE(res.points.size() == 4);
    CHECK(res.points[0].config.n == 256);
    CHECK(res.points[0].config.noise_free);
    CHECK(res.points[1].config.n == 256);
    CHECK_FALSE(res.points[1].config.noise_free);
    // supported users grow with n at each SNR
    CHECK(res.points[2].mean_supported > res.points[0].mean_supported);
    CHECK(res.points[3].mean_supported > res.points[1].mean_supported);
}

TEST_CASE("load axis forces kbar_u") {
    ExperimentSpec spec;
    spec.base = tiny_config();
    spec.base.kbar_u = 0;
    spec.base.m = 0;
    spec.base.c = 0;
    spec.base.total_users = 0;
    spec.axis = SweepAxis::load;
    spec.values = {1.0, 3.0};
    spec.trials = 2;
    spec.workers = 1;
    const AggregateResult res = run_experiment(spec);
    REQUIRE(res.points.size() == 2);
    CHECK(res.points[0].config.kbar_u == 1);
    CHECK(res.points[1].config.kbar_u == 3);
}

TEST_CASE("empirical concentration: unitary case has zero deviation") {
    SystemConfig cfg;
    cfg.n = 64;
    cfg.s = 8;
    cfg.k_s = 2;
    cfg.kbar_u = 2;
    cfg.m = 64;
    cfg.t = 4;
    cfg.seed = 3;
    const std::vector<double> eps = {0.01, 0.25};
    const auto rows = empirical_concentration(cfg, 200, eps);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) CHECK(r.empirical == 0.0);
}

TEST_CASE("empirical concentration tails respect the analytic bound") {
    SystemConfig cfg;
    cfg.n = 256;
    cfg.s = 8;
    cfg.k_s = 4;
    cfg.kbar_u = 4;
    cfg.m = 16;
    cfg.seed = 7;
    const std::vector<double> eps = {0.25, 0.5, 1.0};
    for (int t : {1, 10, 100}) {
        cfg.t = t;
        const auto rows = empirical_concentration(cfg, 400, eps);
        for (const auto& r : rows) CHECK(r.empirical <= r.bound_clamped);
    }
}

TEST_CASE("slot averaging shrinks the empirical concentration tail") {
    SystemConfig cfg;
    cfg.n = 256;
    cfg.s = 8;
    cfg.k_s = 4;
    cfg.kbar_u = 4;
    cfg.m = 16;
    cfg.seed = 11;
    const std::vector<double> eps = {0.25, 0.5};
    cfg.t = 1;
    const auto t1 = empirical_concentration(cfg, 400, eps);
    cfg.t = 100;
    const auto t100 = empirical_concentration(cfg, 400, eps);
    for (size_t e = 0; e < eps.size(); ++e) {
        // within 3 sigma of the binomial sampling error
        const double sigma =
            std::sqrt(std::max(t1[e].empirical * (1 - t1[e].empirical), 1e-4) / 400.0);
        CHECK(t100[e].empirical <= t1[e].empirical + 3.0 * sigma);
    }
}

TEST_CASE("load distribution: step tail at c = 1 and binomial mean") {
    const LoadTailTable one = empirical_load_distribution(64, 64, 8, 500, 3);
    CHECK(one.mean_load == 8.0);  // every user lands in the single sub-channel
    for (const auto& r : one.rows) CHECK(r.empirical == 1.0);

    const LoadTailTable tbl = empirical_load_distribution(1024, 16, 256, 20000, 5);
    const double mean = 256.0 / 64.0;
    const double sigma = std::sqrt(256.0 * (1.0 / 64.0) * (63.0 / 64.0) / 20000.0);
    CHECK(std::abs(tbl.mean_load - mean) <= 3.0 * sigma);
    for (const auto& r : tbl.rows) CHECK(r.empirical <= r.bound_clamped);
}

TEST_CASE("load tail at x = 3 k_u / c stays under 1e-3 and under the bound") {
    // exact binomial tail P(Bin(256, 1/64) >= 12) = 8.134e-4
    const std::vector<int> grid = {12};
    const LoadTailTable tbl = empirical_load_distribution(1024, 16, 256, 100000, 17, grid);
    REQUIRE(tbl.rows.size() == 1);
    CHECK(tbl.rows[0].empirical < 1e-3);
    CHECK(tbl.rows[0].empirical <= tbl.rows[0].bound_clamped);
    CHECK(tbl.rows[0].empirical == doctest::Approx(8.134323e-4).epsilon(0.35));
}

TEST_CASE("resolve_workers respects the environment cap") {
    setenv("HICAP_THREADS", "1", 1);
    CHECK(resolve_workers(8) == 1);
    unsetenv("HICAP_THREADS");
    CHECK(resolve_workers(3) == 3);
}
