#include "hicap/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace hicap {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

SystemConfig point_config(const ExperimentSpec& spec, SweepAxis axis, double value) {
    SystemConfig cfg = spec.base;
    switch (axis) {
        case SweepAxis::none:
            break;
        case SweepAxis::n:
            cfg.n = static_cast<int>(value);
            cfg.m = 0;       // re-derive for the new dimension
            cfg.kbar_u = 0;
            cfg.c = 0;
            cfg.total_users = 0;
            break;
        case SweepAxis::snr_db:
            cfg.snr_db = value;
            cfg.noise_free = std::isinf(value);
            break;
        case SweepAxis::slots:
            cfg.t = static_cast<int>(value);
            break;
        case SweepAxis::load:
            cfg.kbar_u = static_cast<int>(value);
            cfg.m = 0;
            cfg.c = 0;
            cfg.total_users = 0;
            break;
    }
    return derive_dimensions(cfg);
}

PointResult run_point(const SystemConfig& cfg, int trials, int workers) {
    const auto start = std::chrono::steady_clock::now();
    auto ctx = make_dft_context(cfg.n);
    std::vector<TrialOutcome> outcomes(static_cast<size_t>(trials));

    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        while (true) {
            const int idx = next.fetch_add(1);
            if (idx >= trials || failed.load()) break;
            try {
                outcomes[static_cast<size_t>(idx)] =
                    run_trial(cfg, static_cast<uint64_t>(idx), ctx);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                failure = e.what();
            }
        }
    };
    const int nw = std::max(1, std::min(workers, trials));
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(nw));
        for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw std::runtime_error("trial failed: " + failure);

    PointResult pr;
    pr.config = cfg;
    pr.trials = trials;
    std::vector<double> supported, pmd, pfa, ser;
    supported.reserve(outcomes.size());
    double signal_energy = 0.0;
    for (const auto& out : outcomes) {
        supported.push_back(static_cast<double>(out.metrics.supported));
        pmd.push_back(out.metrics.pmd());
        pfa.push_back(out.metrics.pfa());
        ser.push_back(out.metrics.ser());
        pr.total_noncollided += out.metrics.noncollided;
        pr.total_missed += out.metrics.missed;
        signal_energy += out.signal_energy;
    }
    pr.mean_supported = mean_of(supported);
    pr.std_supported = std_of(supported, pr.mean_supported);
    pr.mean_pmd = mean_of(pmd);
    pr.std_pmd = std_of(pmd, pr.mean_pmd);
    pr.mean_pfa = mean_of(pfa);
    pr.std_pfa = std_of(pfa, pr.mean_pfa);
    pr.mean_ser = mean_of(ser);
    pr.std_ser = std_of(ser, pr.mean_ser);
    pr.detected_fraction =
        pr.total_noncollided
            ? 1.0 - static_cast<double>(pr.total_missed) / static_cast<double>(pr.total_noncollided)
            : 0.0;
    const double entries = static_cast<double>(trials) * cfg.c * cfg.t * cfg.m;
    pr.mean_signal_entry_energy = entries > 0 ? signal_energy / entries : 0.0;
    pr.empirical_snr_db =
        cfg.sigma2() > 0.0
            ? 10.0 * std::log10(pr.mean_signal_entry_energy / (cfg.sigma2() / cfg.n))
            : std::numeric_limits<double>::infinity();
    pr.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return pr;
}

}  // namespace

int resolve_workers(int requested) {
    int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (w < 1) w = 1;
    if (const char* cap = std::getenv("HICAP_THREADS")) {
        const int limit = std::atoi(cap);
        if (limit >= 1) w = std::min(w, limit);
    }
    return w;
}

TrialOutcome run_trial(const SystemConfig& cfg, uint64_t trial,
                       const std::shared_ptr<const DftContext>& ctx) {
    TrialRng trng(cfg.seed, trial);
    RngStream part_rng = trng.stream(Stream::partition);
    const OperatorGrid grid = make_slot_partitions(ctx, cfg.m, cfg.t, part_rng);
    const std::vector<int> loads = draw_loads(cfg, trng);
    const DetectParams params = DetectParams::from_config(cfg);

    TrialOutcome out;
    int next_user = 0;
    for (int j = 0; j < cfg.c; ++j) {
        RngStream act_rng = trng.stream(Stream::activity, static_cast<uint64_t>(j));
        const SubchannelActivity activity =
            draw_subchannel_activity(cfg, loads[static_cast<size_t>(j)], next_user, act_rng);
        next_user += loads[static_cast<size_t>(j)];

        RngStream ch_rng = trng.stream(Stream::channel, static_cast<uint64_t>(j));
        const HierSparseSignal channel = draw_subchannel_channels(cfg, activity, ch_rng);

        RngStream d_rng = trng.stream(Stream::data, static_cast<uint64_t>(j));
        const DataSymbols data = draw_subchannel_data(cfg, activity, d_rng);

        RngStream noise_rng = trng.stream(Stream::noise, static_cast<uint64_t>(j));
        const SubchannelObservation obs =
            simulate_subchannel(grid, j, channel, data, cfg, noise_rng);
        out.signal_energy += obs.signal_energy;

        const DetectionResult det = detect_subchannel(grid, j, obs, params);
        accumulate_subchannel_metrics(out.metrics, cfg, activity, data, det);
    }
    return out;
}

AggregateResult run_experiment(const ExperimentSpec& spec) {
    if (spec.trials < 1) throw config_error("trials must be >= 1");
    const int workers = resolve_workers(spec.workers);

    std::vector<SystemConfig> configs;
    if (spec.axis == SweepAxis::none) {
        configs.push_back(point_config(spec, SweepAxis::none, 0.0));
    } else if (spec.axis == SweepAxis::n) {
        std::vector<double> snrs = spec.snr_grid;
        if (snrs.empty()) snrs.push_back(spec.base.snr_db);
        for (double nval : spec.values) {
            SystemConfig at_n = point_config(spec, SweepAxis::n, nval);
            for (double snr : snrs) {
                SystemConfig cfg = at_n;
                cfg.snr_db = snr;
                cfg.noise_free = std::isinf(snr);
                configs.push_back(cfg);
            }
        }
    } else {
        for (double v : spec.values) configs.push_back(point_config(spec, spec.axis, v));
    }
    if (configs.empty()) throw config_error("sweep has no points");

    AggregateResult result;
    result.points.reserve(configs.size());
    for (const auto& cfg : configs) result.points.push_back(run_point(cfg, spec.trials, workers));
    return result;
}

AggregateResult sweep_supported_users(ExperimentSpec spec) {
    spec.axis = SweepAxis::n;
    if (spec.snr_grid.empty())
        spec.snr_grid = {std::numeric_limits<double>::infinity(), 10.0, 0.0, -10.0};
    return run_experiment(spec);
}

std::vector<ConcentrationRow> empirical_concentration(const SystemConfig& cfg, int trials,
                                                      std::span<const double> eps_grid) {
    if (trials < 1) throw config_error("empirical_concentration: trials must be >= 1");
    const SystemConfig c = derive_dimensions(cfg);
    TrialRng trng(c.seed, 0);

    // Fixed (k_u * k_s)-hierarchically-sparse x, unit norm.
    RngStream xrng = trng.stream(Stream::misc);
    std::vector<int> blocks = random_subset_sorted(c.u, c.kbar_u, xrng);
    std::vector<int> support;
    std::vector<cplx> values;
    for (int b : blocks) {
        for (int tap : random_subset_sorted(c.s, c.k_s, xrng)) {
            support.push_back(b * c.s + tap);
            values.push_back(xrng.complex_gaussian(1.0 / c.k_s));
        }
    }
    double norm2 = 0.0;
    for (const auto& v : values) norm2 += std::norm(v);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& v : values) v *= inv;

    auto ctx = make_dft_context(c.n);
    std::vector<int> exceed(eps_grid.size(), 0);
    for (int trial = 0; trial < trials; ++trial) {
        TrialRng draw(c.seed, static_cast<uint64_t>(trial) + 1);
        RngStream rng = draw.stream(Stream::partition);
        std::vector<int> rows = random_subset_sorted(c.n, c.m, rng);
        const SubsampledDftOperator A(ctx, std::move(rows));

        RngStream drng = draw.stream(Stream::data);
        double stat = 0.0;
        std::vector<cplx> modulated(values.size());
        for (int i = 0; i < c.t; ++i) {
            if (i == 0) {
                modulated = values;
            } else {
                // one unit-modulus symbol per block, constant inside a block
                cplx sym(1.0, 0.0);
                int prev_block = -1;
                for (size_t p = 0; p < support.size(); ++p) {
                    const int b = support[p] / c.s;
                    if (b != prev_block) {
                        sym = qpsk_alphabet()[static_cast<size_t>(drng.qpsk_index())];
                        prev_block = b;
                    }
                    modulated[p] = values[p] * sym;
                }
            }
            const std::vector<cplx> y = A.apply_sparse(support, modulated);
            for (const auto& v : y) stat += std::norm(v);
        }
        stat /= static_cast<double>(c.t);
        const double dev = std::abs(stat - 1.0);
        for (size_t e = 0; e < eps_grid.size(); ++e)
            if (dev > eps_grid[e]) ++exceed[e];
    }

    std::vector<ConcentrationRow> rows_out;
    rows_out.reserve(eps_grid.size());
    for (size_t e = 0; e < eps_grid.size(); ++e) {
        ConcentrationRow row;
        row.m = c.m;
        row.t = c.t;
        row.eps = eps_grid[e];
        row.trials = trials;
        row.empirical = static_cast<double>(exceed[e]) / trials;
        const BoundValue b = conc_bound_multislot(c.m, c.k_s, c.kbar_u, c.t, eps_grid[e]);
        row.bound_raw = b.raw;
        row.bound_clamped = b.clamped;
        rows_out.push_back(row);
    }
    return rows_out;
}

LoadTailTable empirical_load_distribution(int n, int m, int k_u, int trials, uint64_t seed) {
    const int c = n / m;
    std::set<int> xs;
    xs.insert(std::max(1, m / 2));
    xs.insert(m);
    xs.insert(std::max(1, 3 * k_u / c));
    xs.insert(2 * m);
    xs.insert(4 * m);
    xs.insert(6 * m);
    std::vector<int> grid;
    for (int x : xs)
        if (x >= 1 && x < k_u) grid.push_back(x);
    return empirical_load_distribution(n, m, k_u, trials, seed, grid);
}

LoadTailTable empirical_load_distribution(int n, int m, int k_u, int trials, uint64_t seed,
                                          std::span<const int> x_grid) {
    if (trials < 1) throw config_error("empirical_load_distribution: trials must be >= 1");
    if (m < 1 || m > n) throw config_error("empirical_load_distribution: bad m");
    const int c = n / m;
    TrialRng trng(seed, 0);
    RngStream rng = trng.stream(Stream::assign);

    std::vector<long long> load_count(static_cast<size_t>(k_u) + 1, 0);
    long long load_sum = 0;
    for (int trial = 0; trial < trials; ++trial) {
        int load = 0;
        for (int k = 0; k < k_u; ++k)
            if (rng.uniform_below(static_cast<uint64_t>(c)) == 0) ++load;
        ++load_count[static_cast<size_t>(load)];
        load_sum += load;
    }

    LoadTailTable table;
    table.trials = trials;
    table.mean_load = static_cast<double>(load_sum) / trials;
    for (int x : x_grid) {
        long long ge = 0;
        for (int v = x; v <= k_u; ++v) ge += load_count[static_cast<size_t>(v)];
        LoadTailRow row;
        row.x = x;
        row.empirical = static_cast<double>(ge) / trials;
        const BoundValue b = capture_bound(n, k_u, x);
        row.bound_raw = b.raw;
        row.bound_clamped = b.clamped;
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace hicap
