#pragma once

#include <cstdint>

#include "hicap/rng.hpp"

namespace hicap {

struct BoundValue {
    double raw = 0.0;      // as evaluated, may leave [0, 1]
    double clamped = 0.0;  // min(1, max(0, raw))
};

BoundValue clamp_bound(double raw);

// Inputs shared by the analytic expressions. C1, C2 are the unspecified
// theorem constants (default 1); h_min defaults to 1/x when left at 0.
struct BoundInputs {
    double k_s = 4;
    double k_u = 4;
    double m = 16;
    double n = 1024;
    double t = 100;
    double c = 64;
    double u = 128;
    double s = 8;
    double p_u = 0.1;
    double sigma2 = 0.0;  // noise variance, SNR = 1/sigma2
    double C1 = 1.0;
    double C2 = 1.0;
    double h_min = 0.0;
    int fz_trials = 10000;
    uint64_t seed = 1;
};

// Standard sparse-vector concentration tail for a k-sparse vector under m
// subsampled FFT rows: 2 exp(-(eps^2 m / 2k) / (1 + 2 sqrt(k/m) + eps/3)).
BoundValue conc_bound_standard(double k, double m, double eps);

// Multi-slot concentration tail: (32 log(2 m k_s^2 k_u^2) + 1) / (eps^2 t m),
// natural logarithm.
BoundValue conc_bound_multislot(double m, double k_s, double k_u, double t, double eps);

// Monte-Carlo estimate of F^z(xi | x): probability that the slot-averaged
// energy of one user's k_s support coordinates, observed through
// per-coordinate CN(0, sigma2/n) correlation noise, falls at or below xi.
// Channels are drawn conditioned on ||h||^2 >= h_min (the analysis assumes a
// minimum channel energy).
double fz_estimate(double xi, double h_min, const BoundInputs& in, RngStream& rng);

// Missed-detection tail at sub-channel load x:
//   F^z(xi+eps | x) + C1 u (e s / k_s)^{k_s} (k_s^2 log(2 m k_s^2 x^2) + 1)
//   / (eps^2 t m) + C2 (SNR / n)^{-k_s x}.
BoundValue pmd_bound(double xi, double x, double eps, const BoundInputs& in);

// Sparsity-capture tail for the load of one sub-channel:
//   n (k_u - x) / (x sqrt(2 pi x)) * exp(-(1 - k_u/n)^2 x);
// returns 0 for x >= k_u (nonpositive prefactor).
BoundValue capture_bound(double n, double k_u, double x);

// Lower bound on the expected number of non-collided users:
// k_u - k_u * (k_u k_s) / (c n).
double expected_noncollided(double k_u, double k_s, double c, double n);

// Expected served users per frame: (1 - p_u) * kbar_u * c * (1 - P_md).
double supported_users(double p_u, double kbar_u, double c, double p_md);

}  // namespace hicap
