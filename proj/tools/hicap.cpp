// hicap - compressive massive random access link simulator.
//
// Commands: simulate (single configuration), sweep (axis sweep), bounds
// (analytic expressions on a grid), validate (self-check suite).
// Exit codes: 0 success, 1 runtime failure, 2 configuration error,
// 3 validation check failure.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include "hicap/bounds.hpp"
#include "hicap/config.hpp"
#include "hicap/detect.hpp"
#include "hicap/io.hpp"
#include "hicap/montecarlo.hpp"
#include "hicap/operators.hpp"

namespace {

using namespace hicap;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_double(item));
    }
    if (out.empty()) throw config_error("empty value list: " + text);
    return out;
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::string snr_db;
    std::string mode;
    std::string birthday_pool;
    std::string xi;
    uint64_t seed = 0;
    int trials = -1;
    int n = 0;
    int iterations = 0;
    int workers = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value config file or run manifest (.json)");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--trials", trials, "Monte-Carlo trials per point");
        cmd->add_option("--snr-db", snr_db, "SNR in dB (1/sigma^2); 'inf' = noise-free");
        cmd->add_option("--n", n, "signal dimension (power of two)");
        cmd->add_option("--out-dir", out_dir, "output directory");
        cmd->add_option("--mode", mode, "detector mode: topk|threshold");
        cmd->add_option("--xi", xi, "activity threshold (threshold mode)");
        cmd->add_option("--iterations", iterations, "Hi-IHT iterations (>= 1)");
        cmd->add_option("--birthday-pool", birthday_pool, "birthday sizing pool: u|n");
        cmd->add_option("--workers", workers, "worker threads (also capped by HICAP_THREADS)");
    }

    // CLI flags override config file values only when given.
    ParsedConfig resolve(const CLI::App* cmd) const {
        ParsedConfig parsed;
        if (!config_path.empty()) parsed = config_from_keys(read_config_file(config_path));
        if (cmd->count("--seed")) parsed.sys.seed = seed;
        if (cmd->count("--trials")) parsed.trials = trials;
        if (cmd->count("--n")) {
            parsed.sys.n = n;
            parsed.sys.kbar_u = 0;
            parsed.sys.m = 0;
            parsed.sys.c = 0;
            parsed.sys.total_users = 0;
        }
        if (cmd->count("--snr-db")) {
            parsed.sys.snr_db = parse_double(snr_db);
            parsed.sys.noise_free = std::isinf(parsed.sys.snr_db) && parsed.sys.snr_db > 0;
        }
        if (cmd->count("--mode")) {
            if (mode == "topk") parsed.sys.detector_mode = DetectorMode::topk;
            else if (mode == "threshold") parsed.sys.detector_mode = DetectorMode::threshold;
            else throw config_error("--mode must be topk or threshold");
        }
        if (cmd->count("--xi")) parsed.sys.xi = parse_double(xi);
        if (cmd->count("--iterations")) parsed.sys.iterations = iterations;
        if (cmd->count("--birthday-pool")) {
            if (birthday_pool == "u")
                parsed.sys.birthday_pool = BirthdayPool::per_subchannel_blocks;
            else if (birthday_pool == "n")
                parsed.sys.birthday_pool = BirthdayPool::signal_dim;
            else
                throw config_error("--birthday-pool must be u or n");
        }
        if (parsed.trials < 1) throw config_error("trials must be >= 1");
        return parsed;
    }
};

void print_point_summary(const PointResult& p, std::ostream& out) {
    const double snr =
        p.config.noise_free ? std::numeric_limits<double>::infinity() : p.config.snr_db;
    out << "n=" << p.config.n << " m=" << p.config.m << " c=" << p.config.c
        << " kbar_u=" << p.config.kbar_u << " snr_db=" << format_double(snr)
        << " trials=" << p.trials << ": supported " << format_double(p.mean_supported) << " +- "
        << format_double(p.std_supported) << ", p_md " << format_double(p.mean_pmd) << ", p_fa "
        << format_double(p.mean_pfa) << ", ser " << format_double(p.mean_ser) << "\n";
    out << "  nominal snr_db=" << format_double(snr)
        << ", empirical per-measurement snr_db=" << format_double(p.empirical_snr_db)
        << " (signal energy per entry " << format_double(p.mean_signal_entry_energy) << ")\n";
    // frame = t slots of one OFDM symbol each at 60 kHz subcarrier spacing
    const double frames_per_second = 60000.0 / p.config.t;
    out << "  at 60 kHz spacing: " << format_double(p.mean_supported * frames_per_second)
        << " users/second\n";
}

void write_outputs(const std::string& command, const ParsedConfig& parsed,
                   const AggregateResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string metrics_path = out_dir + "/metrics.csv";
    const std::string manifest_path = out_dir + "/manifest.json";
    write_text_file(metrics_path, metrics_csv(result));
    ManifestInfo info;
    info.command = command;
    info.tool_version = tool_version();
    info.timestamp = iso8601_utc_now();
    info.seed = parsed.sys.seed;
    info.outputs = {"metrics.csv"};
    // manifests embed the first resolved point so a re-run reproduces it
    const SystemConfig& resolved =
        result.points.empty() ? parsed.sys : result.points.front().config;
    write_text_file(manifest_path, manifest_json(info, resolved, parsed.trials));
    std::cout << "wrote " << metrics_path << " and " << manifest_path << "\n";
}

int cmd_simulate(const CommonFlags& flags, const CLI::App* cmd) {
    ParsedConfig parsed = flags.resolve(cmd);
    ExperimentSpec spec;
    spec.base = parsed.sys;
    spec.trials = parsed.trials;
    spec.workers = flags.workers;
    const AggregateResult result = run_experiment(spec);
    for (const auto& p : result.points) print_point_summary(p, std::cout);
    write_outputs("simulate", parsed, result, flags.out_dir);
    return kExitOk;
}

int cmd_sweep(const CommonFlags& flags, const CLI::App* cmd, const std::string& axis,
              const std::string& values, const std::string& snr_grid) {
    ParsedConfig parsed = flags.resolve(cmd);
    ExperimentSpec spec;
    spec.base = parsed.sys;
    spec.trials = parsed.trials;
    spec.workers = flags.workers;
    if (axis == "n") spec.axis = SweepAxis::n;
    else if (axis == "snr") spec.axis = SweepAxis::snr_db;
    else if (axis == "t") spec.axis = SweepAxis::slots;
    else if (axis == "load") spec.axis = SweepAxis::load;
    else throw config_error("--axis must be one of n|snr|t|load");
    spec.values = parse_double_list(values);
    if (!snr_grid.empty()) spec.snr_grid = parse_double_list(snr_grid);

    AggregateResult result;
    if (spec.axis == SweepAxis::n) {
        if (spec.snr_grid.empty())
            spec.snr_grid = {std::numeric_limits<double>::infinity(), 10.0, 0.0, -10.0};
        result = sweep_supported_users(spec);
    } else {
        result = run_experiment(spec);
    }
    for (const auto& p : result.points) print_point_summary(p, std::cout);
    write_outputs("sweep", parsed, result, flags.out_dir);
    return kExitOk;
}

struct BoundsFlags {
    double k = 4, k_s = 4, k_u = 4, m = 16, n = 1024, t = 100, c = 64, u = 128, s = 8;
    double c1 = 1.0, c2 = 1.0;
    std::string eps = "0.5";
    std::string x = "4";
    std::string xi = "0.5";
    std::string snr_db = "inf";
    int fz_trials = 10000;
    uint64_t seed = 1;
    std::string out_dir = ".";
};

int cmd_bounds(const BoundsFlags& bf) {
    const std::vector<double> eps_list = parse_double_list(bf.eps);
    const std::vector<double> x_list = parse_double_list(bf.x);
    const std::vector<double> xi_list = parse_double_list(bf.xi);
    for (double e : eps_list)
        if (e <= 0) throw config_error("eps values must be > 0");

    BoundInputs in;
    in.k_s = bf.k_s;
    in.k_u = bf.k_u;
    in.m = bf.m;
    in.n = bf.n;
    in.t = bf.t;
    in.c = bf.c;
    in.u = bf.u;
    in.s = bf.s;
    in.C1 = bf.c1;
    in.C2 = bf.c2;
    in.fz_trials = bf.fz_trials;
    in.seed = bf.seed;
    const double snr_db = parse_double(bf.snr_db);
    in.sigma2 = std::isinf(snr_db) ? 0.0 : std::pow(10.0, -snr_db / 10.0);

    if (bf.k > bf.m)
        std::cerr << "warning: conc_bound_standard with k > m is outside its useful regime\n";

    std::string csv = bounds_csv_header();
    auto row = [&](const std::string& name, double k, double x, double eps, double xi,
                   const BoundValue& v) {
        csv += name + ',' + format_double(k) + ',' + format_double(bf.k_s) + ',' +
               format_double(bf.k_u) + ',' + format_double(bf.m) + ',' + format_double(bf.n) +
               ',' + format_double(bf.t) + ',' + format_double(bf.c) + ',' + format_double(x) +
               ',' + format_double(eps) + ',' + format_double(xi) + ',' +
               format_double(snr_db) + ',' + format_double(v.raw) + ',' +
               format_double(v.clamped) + '\n';
    };

    for (double eps : eps_list) {
        row("conc_standard", bf.k, 0, eps, 0, conc_bound_standard(bf.k, bf.m, eps));
        row("conc_multislot", 0, 0, eps, 0,
            conc_bound_multislot(bf.m, bf.k_s, bf.k_u, bf.t, eps));
        for (double x : x_list) {
            for (double xi : xi_list) row("pmd", 0, x, eps, xi, pmd_bound(xi, x, eps, in));
        }
    }
    for (double x : x_list) {
        const BoundValue cb = capture_bound(bf.n, bf.k_u, x);
        if (cb.raw <= 0)
            std::cerr << "note: capture_bound prefactor nonpositive at x=" << format_double(x)
                      << " (x >= k_u), reporting 0\n";
        row("capture", 0, x, 0, 0, cb);
    }
    const double enc = expected_noncollided(bf.k_u, bf.k_s, bf.c, bf.n);
    row("expected_noncollided", 0, 0, 0, 0, BoundValue{enc, enc});

    std::filesystem::create_directories(bf.out_dir);
    write_text_file(bf.out_dir + "/bounds.csv", csv);
    ManifestInfo info;
    info.command = "bounds";
    info.tool_version = tool_version();
    info.timestamp = iso8601_utc_now();
    info.seed = bf.seed;
    info.outputs = {"bounds.csv"};
    info.args = {{"k", format_double(bf.k)},        {"k_s", format_double(bf.k_s)},
                 {"k_u", format_double(bf.k_u)},    {"m", format_double(bf.m)},
                 {"n", format_double(bf.n)},        {"t", format_double(bf.t)},
                 {"c", format_double(bf.c)},        {"u", format_double(bf.u)},
                 {"s", format_double(bf.s)},        {"eps", bf.eps},
                 {"x", bf.x},                       {"xi", bf.xi},
                 {"snr_db", bf.snr_db},             {"c1", format_double(bf.c1)},
                 {"c2", format_double(bf.c2)},
                 {"fz_trials", std::to_string(bf.fz_trials)}};
    write_text_file(bf.out_dir + "/manifest.json", manifest_json(info));
    std::cout << "wrote " << bf.out_dir << "/bounds.csv and manifest.json\n";
    return kExitOk;
}

struct ValidateCheck {
    std::string name;
    std::string parameters;
    double empirical = 0.0;
    double bound = 0.0;
    bool pass = false;
};

int cmd_validate(const CommonFlags& flags, const CLI::App* cmd, bool inject_scale_fault) {
    ParsedConfig parsed = flags.resolve(cmd);
    if (cmd->count("--trials") && flags.trials < 1) throw config_error("trials must be >= 1");
    const uint64_t seed = parsed.sys.seed;
    std::vector<ValidateCheck> checks;

    // operator adjoint identity
    {
        auto ctx = make_dft_context(256);
        TrialRng trng(seed, 1001);
        RngStream rng = trng.stream(Stream::misc);
        double worst = 0.0;
        for (int rep = 0; rep < 100; ++rep) {
            SubsampledDftOperator A(ctx, random_subset_sorted(256, 16, rng));
            std::vector<cplx> x(256), y(16);
            for (auto& v : x) v = rng.complex_gaussian(1.0 / 256);
            for (auto& v : y) v = rng.complex_gaussian(1.0 / 16);
            const auto Ax = A.apply_dense(x);
            const auto Ahy = A.adjoint(y);
            cplx lhs(0, 0), rhs(0, 0);
            for (int q = 0; q < 16; ++q) lhs += Ax[static_cast<size_t>(q)] * std::conj(y[static_cast<size_t>(q)]);
            for (int l = 0; l < 256; ++l) rhs += x[static_cast<size_t>(l)] * std::conj(Ahy[static_cast<size_t>(l)]);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        checks.push_back({"operator_adjoint", "n=256 m=16 pairs=100", worst, 1e-9, worst <= 1e-9});
    }

    // isometry in expectation (scale-fault injection hook multiplies y)
    {
        auto ctx = make_dft_context(256);
        TrialRng trng(seed, 1002);
        RngStream rng = trng.stream(Stream::misc);
        std::vector<cplx> x(256);
        for (auto& v : x) v = rng.complex_gaussian(1.0 / 256);
        double norm2 = 0.0;
        for (const auto& v : x) norm2 += std::norm(v);
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& v : x) v *= inv;
        const double fault = inject_scale_fault ? std::sqrt(16.0) : 1.0;
        double acc = 0.0;
        const int draws = 10000;
        for (int rep = 0; rep < draws; ++rep) {
            SubsampledDftOperator A(ctx, random_subset_sorted(256, 16, rng));
            for (const auto& v : A.apply_dense(x)) acc += std::norm(v * fault);
        }
        const double mean = acc / draws;
        checks.push_back({"operator_isometry", "n=256 m=16 draws=10000", mean, 1.0,
                          std::abs(mean - 1.0) <= 0.02});
    }

    // sparse path vs dense path
    {
        SystemConfig cfg;
        cfg.n = 256;
        cfg.s = 8;
        cfg.k_s = 4;
        cfg.kbar_u = 2;
        cfg.seed = seed;
        cfg = derive_dimensions(cfg);
        auto ctx = make_dft_context(cfg.n);
        double worst = 0.0;
        for (int rep = 0; rep < 100; ++rep) {
            TrialRng trng(seed, 2000 + static_cast<uint64_t>(rep));
            RngStream rng = trng.stream(Stream::misc);
            SubsampledDftOperator A(ctx, random_subset_sorted(cfg.n, 16, rng));
            RngStream arng = trng.stream(Stream::activity);
            const auto act = draw_subchannel_activity(cfg, 2, 0, arng);
            RngStream crng = trng.stream(Stream::channel);
            const auto sig = draw_subchannel_channels(cfg, act, crng);
            const auto sparse = A.apply(sig);
            const auto dense = A.apply_dense(sig.values);
            double diff2 = 0.0, ref2 = 0.0;
            for (size_t q = 0; q < sparse.size(); ++q) {
                diff2 += std::norm(sparse[q] - dense[q]);
                ref2 += std::norm(dense[q]);
            }
            if (ref2 > 0) worst = std::max(worst, std::sqrt(diff2 / ref2));
        }
        checks.push_back({"operator_paths", "n=256 m=16 draws=100", worst, 1e-9, worst <= 1e-9});
    }

    // hierarchical threshold vs exhaustive oracle
    {
        TrialRng trng(seed, 1003);
        RngStream rng = trng.stream(Stream::misc);
        int mismatches = 0;
        int instances = 0;
        for (int u = 1; u <= 4; ++u)
            for (int s = 1; s <= 4; ++s)
                for (int k_u = 1; k_u <= std::min(2, u); ++k_u)
                    for (int k_s = 1; k_s <= std::min(2, s); ++k_s)
                        for (int rep = 0; rep < 50; ++rep) {
                            std::vector<double> g(static_cast<size_t>(u) * s);
                            for (auto& v : g) v = rng.uniform();
                            const auto a = hier_threshold(g, u, s, k_u, k_s);
                            const auto b = brute_force_threshold(g, u, s, k_u, k_s);
                            if (!a.same_support(b)) ++mismatches;
                            ++instances;
                        }
        checks.push_back({"threshold_oracle", "u,s<=4 k<=2 instances=" + std::to_string(instances),
                          static_cast<double>(mismatches), 0.0, mismatches == 0});
    }

    // multi-slot concentration dominance on a small grid
    {
        bool ok = true;
        double worst_margin = 0.0;
        const std::vector<double> eps_grid = {0.5, 1.0};
        for (int t : {1, 25}) {
            SystemConfig cfg;
            cfg.n = 256;
            cfg.s = 8;
            cfg.k_s = 4;
            cfg.kbar_u = 4;
            cfg.m = 16;
            cfg.t = t;
            cfg.seed = seed + static_cast<uint64_t>(t);
            const auto rows = empirical_concentration(cfg, 500, eps_grid);
            for (const auto& r : rows) {
                if (r.empirical > r.bound_clamped) ok = false;
                worst_margin = std::max(worst_margin, r.empirical - r.bound_clamped);
            }
        }
        checks.push_back({"thm1_dominance", "n=256 m=16 t={1,25} eps={0.5,1} trials=500",
                          worst_margin, 0.0, ok});
    }

    // sparsity capture dominance
    {
        const auto table = empirical_load_distribution(1024, 16, 128, 20000, seed + 7);
        bool ok = true;
        double worst = 0.0;
        for (const auto& r : table.rows) {
            if (r.empirical > r.bound_clamped) ok = false;
            worst = std::max(worst, r.empirical - r.bound_clamped);
        }
        checks.push_back({"thm3_dominance", "n=1024 m=16 k_u=128 trials=20000", worst, 0.0, ok});
    }

    // expected non-collided lower bound (k_s = s regime, binomial loads)
    {
        bool ok = true;
        std::ostringstream params;
        params << "n=1024 s=8 k_s=8 m=16 k_u={16,64} trials=1000";
        for (int k_u : {16, 64}) {
            SystemConfig cfg;
            cfg.n = 1024;
            cfg.s = 8;
            cfg.k_s = 8;
            cfg.kbar_u = 1;
            cfg.m = 16;
            cfg.t = 1;
            cfg.seed = seed + static_cast<uint64_t>(k_u);
            cfg.load_mode = LoadMode::binomial;
            cfg.total_users = k_u;
            cfg = derive_dimensions(cfg);
            double sum = 0.0, sum2 = 0.0;
            const int trials = 1000;
            for (int trial = 0; trial < trials; ++trial) {
                TrialRng trng(cfg.seed, static_cast<uint64_t>(trial));
                const auto pattern = draw_activity(cfg, trng);
                const double nc =
                    static_cast<double>(pattern.total_users() - pattern.total_collided_users());
                sum += nc;
                sum2 += nc * nc;
            }
            const double mean = sum / trials;
            const double var = std::max(0.0, sum2 / trials - mean * mean);
            const double sigma_mc = std::sqrt(var / trials);
            const double bound = expected_noncollided(k_u, cfg.k_s, cfg.c, cfg.n);
            if (mean < bound - 3.0 * sigma_mc) ok = false;
        }
        checks.push_back({"enc_lower_bound", params.str(), 0.0, 0.0, ok});
    }

    // byte-identical re-run of a small experiment
    {
        ExperimentSpec spec;
        spec.base.n = 256;
        spec.base.s = 8;
        spec.base.k_s = 2;
        spec.base.t = 8;
        spec.base.seed = seed;
        spec.trials = std::min(parsed.trials, 3);
        spec.workers = 1;
        const std::string a = metrics_csv(run_experiment(spec));
        spec.workers = 2;
        const std::string b = metrics_csv(run_experiment(spec));
        checks.push_back({"determinism", "n=256 trials=" + std::to_string(spec.trials),
                          a == b ? 1.0 : 0.0, 1.0, a == b});
    }

    std::string csv = validation_csv_header();
    bool all_pass = true;
    for (const auto& chk : checks) {
        csv += chk.name + ',' + chk.parameters + ',' + format_double(chk.empirical) + ',' +
               format_double(chk.bound) + ',' + (chk.pass ? "true" : "false") + '\n';
        std::cout << (chk.pass ? "[PASS] " : "[FAIL] ") << chk.name << " (" << chk.parameters
                  << ")\n";
        all_pass = all_pass && chk.pass;
    }
    std::filesystem::create_directories(flags.out_dir);
    write_text_file(flags.out_dir + "/validation.csv", csv);
    ManifestInfo info;
    info.command = "validate";
    info.tool_version = tool_version();
    info.timestamp = iso8601_utc_now();
    info.seed = parsed.sys.seed;
    info.outputs = {"validation.csv"};
    write_text_file(flags.out_dir + "/manifest.json",
                    manifest_json(info, parsed.sys, parsed.trials));
    std::cout << "wrote " << flags.out_dir << "/validation.csv and manifest.json\n";
    return all_pass ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compressive massive random access simulator"};
    app.require_subcommand(1);

    CommonFlags sim_flags;
    CLI::App* sim = app.add_subcommand("simulate", "run one configuration");
    sim_flags.attach(sim);

    CommonFlags sweep_flags;
    std::string axis = "n", values = "1024,2048,4096,8192", snr_grid;
    CLI::App* sweep = app.add_subcommand("sweep", "sweep one axis");
    sweep_flags.attach(sweep);
    sweep->add_option("--axis", axis, "sweep axis: n|snr|t|load");
    sweep->add_option("--values", values, "comma-separated axis values");
    sweep->add_option("--snr-grid", snr_grid, "SNR grid for the n axis (default inf,10,0,-10)");

    BoundsFlags bounds_flags;
    CLI::App* bounds = app.add_subcommand("bounds", "tabulate analytic bounds");
    bounds->add_option("--k", bounds_flags.k, "sparsity for the standard bound");
    bounds->add_option("--k-s", bounds_flags.k_s, "in-block sparsity");
    bounds->add_option("--k-u", bounds_flags.k_u, "block sparsity / load");
    bounds->add_option("--m", bounds_flags.m, "measurements per sub-channel");
    bounds->add_option("--n", bounds_flags.n, "signal dimension");
    bounds->add_option("--t", bounds_flags.t, "slots");
    bounds->add_option("--c", bounds_flags.c, "sub-channel count");
    bounds->add_option("--u", bounds_flags.u, "blocks per sub-channel");
    bounds->add_option("--s", bounds_flags.s, "block length");
    bounds->add_option("--eps", bounds_flags.eps, "comma-separated deviations");
    bounds->add_option("--x", bounds_flags.x, "comma-separated sub-channel loads");
    bounds->add_option("--xi", bounds_flags.xi, "comma-separated activity thresholds");
    bounds->add_option("--snr-db", bounds_flags.snr_db, "SNR in dB; 'inf' = noise-free");
    bounds->add_option("--c1", bounds_flags.c1, "theorem constant C1");
    bounds->add_option("--c2", bounds_flags.c2, "theorem constant C2");
    bounds->add_option("--fz-trials", bounds_flags.fz_trials, "Monte-Carlo draws for F^z");
    bounds->add_option("--seed", bounds_flags.seed, "seed for the F^z estimator");
    bounds->add_option("--out-dir", bounds_flags.out_dir, "output directory");

    CommonFlags val_flags;
    bool inject_scale_fault = false;
    CLI::App* validate = app.add_subcommand("validate", "run the self-check suite");
    val_flags.attach(validate);
    validate->add_flag("--inject-scale-fault", inject_scale_fault,
                       "testing aid: mis-scale the operator so the isometry check fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_flags, sim);
        if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep, axis, values, snr_grid);
        if (bounds->parsed()) return cmd_bounds(bounds_flags);
        if (validate->parsed()) return cmd_validate(val_flags, validate, inject_scale_fault);
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
