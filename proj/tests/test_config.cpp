#include <doctest.h>

#include "hicap/config.hpp"

using namespace hicap;

namespace {

// Independent oracle: brute-force product evaluation, <= 20 terms.
int select_ku_oracle(int pool, double p_u) {
    double prod = 1.0;
    for (int k = 1; k <= 20; ++k) {
        prod *= 1.0 - static_cast<double>(k) / pool;
        if (prod < 1.0 - p_u) return k - 1;
    }
    return 20;
}

}  // namespace

TEST_CASE("select_ku matches the brute-force product oracle") {
    CHECK(select_ku(128, 0.1) == 4);
    CHECK(select_ku(128, 0.1) == select_ku_oracle(128, 0.1));
    CHECK(select_ku(2, 0.6) == 1);
    // frozen via the same oracle before implementation
    CHECK(select_ku(1024, 0.1) == 14);
    CHECK(select_ku(1024, 0.1) == select_ku_oracle(1024, 0.1));
    CHECK(select_ku(256, 0.1) == 6);
    CHECK(select_ku(512, 0.1) == 9);
    CHECK(select_ku(2, 0.1) == 0);  // even one pair violates the budget
}

TEST_CASE("select_ku is monotone in pool size and budget") {
    int prev = 0;
    for (int pool : {2, 8, 32, 128, 512, 2048, 8192}) {
        const int k = select_ku(pool, 0.1);
        CHECK(k >= prev);
        prev = k;
    }
    prev = 0;
    for (double p : {0.01, 0.05, 0.1, 0.3, 0.6, 0.9}) {
        const int k = select_ku(128, p);
        CHECK(k >= prev);
        prev = k;
    }
}

TEST_CASE("select_ku rejects invalid arguments") {
    CHECK_THROWS_AS(select_ku(1, 0.1), config_error);
    CHECK_THROWS_AS(select_ku(128, 0.0), config_error);
    CHECK_THROWS_AS(select_ku(128, 1.0), config_error);
}

TEST_CASE("derive_dimensions reproduces the reference pipeline") {
    SystemConfig cfg;
    cfg.n = 1024;
    cfg.s = 8;
    cfg.k_s = 4;
    cfg.p_u = 0.1;
    cfg = derive_dimensions(cfg);
    CHECK(cfg.u == 128);
    CHECK(cfg.kbar_u == 4);
    CHECK(cfg.m == 16);
    CHECK(cfg.c == 64);

    SystemConfig forced;
    forced.n = 1024;
    forced.s = 8;
    forced.k_s = 4;
    forced.kbar_u = 1;
    forced = derive_dimensions(forced);
    CHECK(forced.m == 4);
    CHECK(forced.c == 256);

    SystemConfig big;
    big.n = 8192;
    big.s = 8;
    big.k_s = 4;
    big = derive_dimensions(big);
    CHECK(big.kbar_u == select_ku_oracle(1024, 0.1));
    CHECK(big.m == 32);
    CHECK(big.c == 256);
}

TEST_CASE("derive_dimensions honors the birthday pool selection") {
    SystemConfig cfg;
    cfg.n = 1024;
    cfg.s = 8;
    cfg.k_s = 4;
    cfg.birthday_pool = BirthdayPool::signal_dim;
    cfg = derive_dimensions(cfg);
    CHECK(cfg.kbar_u == 14);  // select_ku(1024, 0.1)
    CHECK(cfg.m == 32);
}

TEST_CASE("derive_dimensions rejects broken geometry") {
    SystemConfig cfg;
    cfg.n = 1000;  // not a power of two
    CHECK_THROWS_AS(derive_dimensions(cfg), config_error);

    SystemConfig odd;
    odd.n = 1024;
    odd.s = 3;
    CHECK_THROWS_AS(derive_dimensions(odd), config_error);

    SystemConfig too_big;
    too_big.n = 8;
    too_big.s = 4;
    too_big.k_s = 4;
    too_big.kbar_u = 2;
    too_big.m = 16;  // exceeds n
    CHECK_THROWS_AS(derive_dimensions(too_big), config_error);
}

TEST_CASE("validate enforces scalar ranges") {
    SystemConfig cfg;
    cfg.n = 256;
    cfg.s = 8;
    cfg.k_s = 2;
    cfg = derive_dimensions(cfg);

    SystemConfig bad = cfg;
    bad.t = 0;
    CHECK_THROWS_AS(validate(bad), config_error);
    bad = cfg;
    bad.k_s = 9;
    CHECK_THROWS_AS(validate(bad), config_error);
    bad = cfg;
    bad.iterations = 0;
    CHECK_THROWS_AS(validate(bad), config_error);
    bad = cfg;
    bad.xi = -1.0;
    CHECK_THROWS_AS(validate(bad), config_error);
}

TEST_CASE("birthday_unique_probability matches the direct product") {
    CHECK(birthday_unique_probability(128, 4) ==
          doctest::Approx(0.9537935256958008).epsilon(1e-12));
    CHECK(birthday_unique_probability(128, 1) == 1.0);
}
