#include "hicap/config.hpp"

#include <cmath>

namespace hicap {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

int select_ku(int pool_size, double p_u) {
    if (pool_size < 2) throw config_error("select_ku: pool_size must be >= 2");
    if (!(p_u > 0.0 && p_u < 1.0)) throw config_error("select_ku: p_u must be in (0, 1)");
    const double floor_p = 1.0 - p_u;
    double prod = 1.0;
    int k = 0;
    while (k < pool_size) {
        const double next = prod * (1.0 - static_cast<double>(k + 1) / pool_size);
        if (next < floor_p) break;
        prod = next;
        ++k;
    }
    return k;
}

double birthday_unique_probability(int pool, int kbar_u) {
    double p = 1.0;
    for (int i = 1; i < kbar_u; ++i) p *= 1.0 - static_cast<double>(i) / pool;
    return p;
}

SystemConfig derive_dimensions(SystemConfig cfg) {
    if (cfg.n <= 0 || !is_power_of_two(cfg.n))
        throw config_error("n must be a positive power of two, got " + std::to_string(cfg.n));
    if (cfg.s <= 0 || cfg.n % cfg.s != 0)
        throw config_error("s must divide n");
    cfg.u = cfg.n / cfg.s;
    if (cfg.kbar_u == 0)
        cfg.kbar_u = select_ku(cfg.birthday_pool_size(), cfg.p_u);
    if (cfg.kbar_u < 1)
        throw config_error("derived kbar_u < 1: p_u too small for the pool");
    if (cfg.m == 0) {
        const int prod = cfg.kbar_u * cfg.k_s;
        cfg.m = 1 << static_cast<int>(std::floor(std::log2(static_cast<double>(prod))));
    }
    if (cfg.m > cfg.n)
        throw config_error("derived m exceeds n");
    cfg.c = cfg.n / cfg.m;
    if (cfg.total_users == 0) cfg.total_users = cfg.kbar_u * cfg.c;
    validate(cfg);
    return cfg;
}

void validate(const SystemConfig& cfg) {
    if (cfg.n <= 0 || !is_power_of_two(cfg.n)) throw config_error("n must be a positive power of two");
    if (cfg.s < 1 || cfg.u < 1 || cfg.n != cfg.u * cfg.s) throw config_error("n = u*s violated");
    if (cfg.k_s < 1 || cfg.k_s > cfg.s) throw config_error("k_s must be in [1, s]");
    if (cfg.kbar_u < 1 || cfg.kbar_u > cfg.u) throw config_error("kbar_u must be in [1, u]");
    if (cfg.t < 1) throw config_error("t must be >= 1");
    if (!(cfg.p_u > 0.0 && cfg.p_u < 1.0)) throw config_error("p_u must be in (0, 1)");
    if (cfg.m < 1 || cfg.m > cfg.n) throw config_error("m must be in [1, n]");
    if (cfg.c < 1 || cfg.c != cfg.n / cfg.m) throw config_error("c = floor(n/m) violated");
    if (!cfg.noise_free && !(cfg.snr_db == cfg.snr_db)) throw config_error("snr_db is NaN");
    if (cfg.xi < 0.0) throw config_error("xi must be >= 0");
    if (cfg.iterations < 1) throw config_error("iterations must be >= 1");
    if (cfg.load_mode == LoadMode::binomial && cfg.total_users < 1)
        throw config_error("binomial load mode requires total_users >= 1");
}

}  // namespace hicap
