#include "hicap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "hicap/config.hpp"

namespace hicap {

BoundValue clamp_bound(double raw) {
    return BoundValue{raw, std::min(1.0, std::max(0.0, raw))};
}

BoundValue conc_bound_standard(double k, double m, double eps) {
    if (k <= 0 || m <= 0 || eps <= 0) throw config_error("conc_bound_standard: nonpositive input");
    const double exponent = (eps * eps * m / (2.0 * k)) / (1.0 + 2.0 * std::sqrt(k / m) + eps / 3.0);
    return clamp_bound(2.0 * std::exp(-exponent));
}

BoundValue conc_bound_multislot(double m, double k_s, double k_u, double t, double eps) {
    if (m <= 0 || k_s <= 0 || k_u <= 0 || t <= 0 || eps <= 0)
        throw config_error("conc_bound_multislot: nonpositive input");
    const double raw = (32.0 * std::log(2.0 * m * k_s * k_s * k_u * k_u) + 1.0) / (eps * eps * t * m);
    return clamp_bound(raw);
}

double fz_estimate(double xi, double h_min, const BoundInputs& in, RngStream& rng) {
    const int k_s = static_cast<int>(in.k_s);
    const double tap_var = 1.0 / in.k_s;
    const double noise_var = in.sigma2 / in.n;
    // Noise-free, the slot average is exactly ||h||^2. With noise the
    // residual averaging error beyond ~1e4 slots is far below Monte-Carlo
    // resolution, so the simulated slot count is capped there.
    const int t = noise_var > 0.0
                      ? std::min(std::max(1, static_cast<int>(in.t)), 10000)
                      : 1;
    int below = 0;
    for (int trial = 0; trial < in.fz_trials; ++trial) {
        std::vector<cplx> taps(static_cast<size_t>(k_s));
        double h2 = 0.0;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            h2 = 0.0;
            for (auto& h : taps) {
                h = rng.complex_gaussian(tap_var);
                h2 += std::norm(h);
            }
            if (h2 >= h_min) break;
        }
        double energy = 0.0;
        if (noise_var == 0.0) {
            energy = h2;
        } else {
            for (int i = 0; i < t; ++i)
                for (const auto& h : taps) energy += std::norm(h + rng.complex_gaussian(noise_var));
            energy /= static_cast<double>(t);
        }
        if (energy <= xi) ++below;
    }
    return static_cast<double>(below) / in.fz_trials;
}

BoundValue pmd_bound(double xi, double x, double eps, const BoundInputs& in) {
    if (eps <= 0 || x < 1) throw config_error("pmd_bound: need eps > 0 and x >= 1");
    if (in.C1 < 0 || in.C2 < 0) throw config_error("pmd_bound: invalid constants");
    RngStream rng(splitmix64(in.seed ^ 0x715ec7e1dULL));
    const double h_min = in.h_min > 0.0 ? in.h_min : 1.0 / x;
    const double fz = fz_estimate(xi + eps, h_min, in, rng);

    const double middle = in.C1 * in.u * std::pow(std::numbers::e * in.s / in.k_s, in.k_s) *
                          (in.k_s * in.k_s * std::log(2.0 * in.m * in.k_s * in.k_s * x * x) + 1.0) /
                          (eps * eps * in.t * in.m);

    // (SNR/n)^(-k_s x) in log space; noise-free means SNR = inf and the term
    // vanishes.
    double tail = 0.0;
    if (in.sigma2 > 0.0) {
        const double snr = 1.0 / in.sigma2;
        const double log_term = -in.k_s * x * std::log(snr / in.n);
        tail = log_term > 700.0 ? std::numeric_limits<double>::infinity()
                                : in.C2 * std::exp(log_term);
    }
    return clamp_bound(fz + middle + tail);
}

BoundValue capture_bound(double n, double k_u, double x) {
    if (n <= 0 || k_u <= 0 || x < 1) throw config_error("capture_bound: invalid inputs");
    const double prefactor = n * (k_u - x) / (x * std::sqrt(2.0 * std::numbers::pi * x));
    if (prefactor <= 0.0) return BoundValue{prefactor, 0.0};  // x >= k_u
    const double frac = 1.0 - k_u / n;
    const double raw = prefactor * std::exp(-frac * frac * x);
    return clamp_bound(raw);
}

double expected_noncollided(double k_u, double k_s, double c, double n) {
    if (k_u <= 0 || k_s <= 0 || c <= 0 || n <= 0)
        throw config_error("expected_noncollided: nonpositive input");
    return k_u - k_u * (k_u * k_s) / (c * n);
}

double supported_users(double p_u, double kbar_u, double c, double p_md) {
    if (p_u < 0 || p_u > 1 || p_md < 0 || p_md > 1)
        throw config_error("supported_users: probabilities must lie in [0, 1]");
    return (1.0 - p_u) * kbar_u * c * (1.0 - p_md);
}

}  // namespace hicap
