#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "taxisim/diagnostics.hpp"
#include "taxisim/errors.hpp"

using namespace taxisim;
using namespace taxisim::testing;

TEST_CASE("mass: constants, gaussians, zero") {
    const Grid g = build_grid(DomainSpec::box2d(0, 1, 0, 1), {10, 10, 1});
    CHECK(mass(g, init_field(g, InitialData::constant(2.0))) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(mass(g, init_field(g, InitialData::constant(0.0))) == 0.0);

    // integral of 20 exp(-30 r^2) over the plane is 20 pi/30; tails beyond
    // [-1,1]^2 are ~1e-14 of it
    const Grid fine = build_grid(DomainSpec::box2d(-1, 1, -1, 1), {256, 256, 1});
    const double analytic = 20.0 * M_PI / 30.0;
    CHECK(mass(fine, init_field(fine, InitialData::gaussian(20.0, 30.0))) ==
          doctest::Approx(analytic).epsilon(1e-3));
}

TEST_CASE("lk_norm basics") {
    const Grid g = build_grid(DomainSpec::box2d(0, 1, 0, 1), {8, 8, 1});
    const ScalarField c = init_field(g, InitialData::constant(3.0));
    // constant c on volume 1: c * 1^(1/k)
    CHECK(lk_norm(g, c, 2.5) == doctest::Approx(3.0).epsilon(1e-12));

    const ScalarField f = init_field(g, InitialData::gaussian(4.0, 7.0, {0.5, 0.5, 0}));
    CHECK(lk_norm(g, f, 1.0) == doctest::Approx(mass(g, f)).epsilon(1e-13));

    // two cells with V=0.5 each, values (1,2), k=2 -> sqrt(0.5 + 2)
    const Grid pair = build_grid(DomainSpec::box2d(0, 1, 0, 1), {2, 1, 1});
    ScalarField two(2);
    two[0] = 1.0;
    two[1] = 2.0;
    CHECK(lk_norm(pair, two, 2.0) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-13));

    ScalarField neg(2);
    neg[0] = -1.0;
    CHECK_THROWS_AS(lk_norm(pair, neg, 2.0), ConfigError);
    CHECK_THROWS_AS(lk_norm(pair, two, 0.5), ConfigError);
}

TEST_CASE("default lyapunov config: epsilon budget and thresholds") {
    ModelParams p;
    p.variant = ModelVariant::AttractionRepulsion;
    p.chi = 1e-3;
    p.xi = 1e-3;
    const double k = 2.0;
    const LyapunovConfig cfg = default_lyapunov_config(p, 2, 1.0, 1.0, k);
    CHECK(cfg.eps1_sq == doctest::Approx(0.2475).epsilon(1e-14));  // 0.99 (k-1)/4
    CHECK(cfg.eps3_sq == doctest::Approx(0.2475).epsilon(1e-14));
    CHECK(cfg.eps2_sq == doctest::Approx(0.99 / (2.0 * p.chi)).epsilon(1e-14));

    // strict membership in the admissible set
    const double budget = cfg.eps1_sq + p.chi * (k - 1) / 2 * cfg.eps2_sq + cfg.eps3_sq +
                          p.xi * (k - 1) / 2 * cfg.eps4_sq;
    CHECK(budget < k - 1);
    CHECK(cfg.beta_sq == doctest::Approx(cfg.eps1_sq / (10 * k)).epsilon(1e-14));

    // chi at or above 1/(10 k sup v0) must be rejected, naming the threshold
    ModelParams bad = p;
    bad.chi = 1.0 / (10.0 * k * 1.0);
    try {
        default_lyapunov_config(bad, 2, 1.0, 1.0, k);
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("chi") != std::string::npos);
        CHECK(std::string(e.what()).find("10 k") != std::string::npos);
    }
}

TEST_CASE("attraction-only lyapunov config drops the repulsion terms") {
    ModelParams p;
    p.variant = ModelVariant::AttractionOnly;
    p.chi = 1e-2;
    const LyapunovConfig cfg = default_lyapunov_config(p, 2, 2.0, 0.0, 1.5);
    CHECK(cfg.eps3_sq == 0.0);
    CHECK(cfg.eps4_sq == 0.0);
    CHECK(cfg.gamma_sq == 0.0);
    CHECK_FALSE(cfg.has_repulsion);
}

TEST_CASE("lyapunov functional values") {
    const Grid g = build_grid(DomainSpec::box2d(0, 2, 0, 1), {8, 4, 1});  // |Omega| = 2
    SimState s;
    s.u = init_field(g, InitialData::constant(1.0));
    s.v = init_field(g, InitialData::constant(0.0));
    s.has_w = false;

    LyapunovConfig cfg;
    cfg.k = 2.0;
    cfg.beta_sq = 0.01;
    cfg.gamma_sq = 0.0;
    cfg.has_repulsion = false;
    cfg.v_sup0 = 1.0;

    CHECK(lyapunov(g, s, cfg) == doctest::Approx(2.0).epsilon(1e-13));

    const double c = 0.7;
    s.v = init_field(g, InitialData::constant(c));
    CHECK(lyapunov(g, s, cfg) ==
          doctest::Approx(2.0 * std::exp(cfg.beta_sq * c * c)).epsilon(1e-13));

    // oversized exponent must be rejected
    LyapunovConfig hot = cfg;
    hot.beta_sq = 2000.0;
    CHECK_THROWS_AS(lyapunov(g, s, hot), ConfigError);
}

TEST_CASE("lyapunov sandwich: int u^k <= E_k <= b int u^k") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const Grid g = random_small_grid(rng, 8);
        SimState s;
        s.u = random_field(g, rng, 0.0, 5.0);
        s.v = random_field(g, rng, 0.0, 2.0);
        s.w = random_field(g, rng, 0.0, 1.5);
        s.has_w = true;
        s.v_sup0 = 2.0;
        s.w_sup0 = 1.5;

        LyapunovConfig cfg;
        cfg.k = 1.5;
        cfg.beta_sq = 0.04;
        cfg.gamma_sq = 0.06;
        cfg.has_repulsion = true;
        cfg.v_sup0 = 2.0;
        cfg.w_sup0 = 1.5;

        const double e = lyapunov(g, s, cfg);
        const double uk = std::pow(lk_norm(g, s.u, cfg.k), cfg.k);
        const double b = cfg.phi_upper_bound();
        CHECK(e >= uk * (1.0 - 1e-12));
        CHECK(e <= b * uk * (1.0 + 1e-12));
    }
}

TEST_CASE("threshold formulas against the published reference values") {
    const ThresholdReport r = thresholds(3, 20.0, 20.0);
    CHECK(r.chi_max_theorem == doctest::Approx(1.0 / 300.0).epsilon(1e-14));
    CHECK(r.xi_max_theorem == doctest::Approx(1.0 / 300.0).epsilon(1e-14));
    CHECK(r.chi_max_theorem == doctest::Approx(0.0033).epsilon(1e-2));
    CHECK(r.reference_baghaei == doctest::Approx(M_PI / (20.0 * std::sqrt(8.0))).epsilon(1e-14));
    CHECK(std::abs(r.reference_baghaei - 0.055536) < 5e-7);  // 4+ significant digits
    CHECK(r.reference_taoboun == doctest::Approx(1.0 / 480.0).epsilon(1e-14));  // 1/(6*4*20)
    CHECK(r.k == doctest::Approx(2.0));  // n/2 + 0.5

    const ThresholdReport r2 = thresholds(2, 1.0);
    CHECK(r2.chi_interval_attraction_only == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r2.xi_max_theorem == 0.0);  // no w data supplied

    CHECK(thresholds(3, 20.0, 20.0, 2.5).chi_max_lemma_k ==
          doctest::Approx(1.0 / (10.0 * 2.5 * 20.0)).epsilon(1e-14));
}

TEST_CASE("threshold interval ordering holds for n in {2,3,4}") {
    std::mt19937_64 rng(345);
    std::uniform_real_distribution<double> sup(0.01, 100.0);
    for (int n : {2, 3, 4}) {
        for (int trial = 0; trial < 20; ++trial) {
            const double v = sup(rng);
            const ThresholdReport r = thresholds(n, v, sup(rng));
            CHECK(r.chi_max_theorem > 0.0);
            CHECK(r.chi_max_theorem < r.chi_sup_limit_attr_rep);
            CHECK(r.chi_sup_limit_attr_rep < r.chi_interval_attraction_only);
        }
    }
}

TEST_CASE("diagnostics record csv round trip") {
    DiagnosticsRecord rec;
    rec.t = 1.25e-4;
    rec.mass_u = 2.0943951023931953;
    rec.min_u = -3e-15;
    rec.max_u = 41.5;
    rec.min_v = 0.0;
    rec.max_v = 19.99;
    rec.min_w = std::numeric_limits<double>::quiet_NaN();
    rec.max_w = std::numeric_limits<double>::quiet_NaN();
    rec.lk_u = 7.25;
    rec.lyapunov = std::numeric_limits<double>::quiet_NaN();
    rec.flags = {"cfl_clamped"};

    const DiagnosticsRecord back = parse_csv_row(to_csv_row(rec));
    CHECK(back.t == rec.t);
    CHECK(back.mass_u == rec.mass_u);
    CHECK(back.min_u == rec.min_u);
    CHECK(std::isnan(back.min_w));
    CHECK(std::isnan(back.lyapunov));
    REQUIRE(back.flags.size() == 1);
    CHECK(back.flags[0] == "cfl_clamped");

    CHECK_THROWS_AS(parse_csv_row("1,2,3"), ConfigError);
    CHECK_THROWS_AS(parse_csv_row("a,b,c,d,e,f,g,h,i,j,k"), ConfigError);
}

TEST_CASE("collect_record wires extrema, mass and flags together") {
    const Grid g = build_grid(DomainSpec::box2d(0, 1, 0, 1), {6, 6, 1});
    const SimState s = make_state(g, InitialData::constant(2.0), InitialData::constant(1.0));
    const DiagnosticsRecord rec = collect_record(g, s, nullptr, nullptr, default_k(2));
    CHECK(rec.mass_u == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(rec.min_u == 2.0);
    CHECK(rec.max_u == 2.0);
    CHECK(std::isnan(rec.min_w));
    CHECK(std::isnan(rec.lyapunov));
    CHECK(rec.lk_u == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rec.flags.empty());
}
