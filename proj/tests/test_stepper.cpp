#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "taxisim/diagnostics.hpp"
#include "taxisim/errors.hpp"
#include "taxisim/operators.hpp"
#include "taxisim/stepper.hpp"

using namespace taxisim;
using namespace taxisim::testing;

namespace {

ModelParams basic_params(ModelVariant variant, double chi, double xi, double dt, double t_end) {
    ModelParams p;
    p.variant = variant;
    p.chi = chi;
    p.xi = xi;
    p.dt = dt;
    p.t_end = t_end;
    return p;
}

}  // namespace

TEST_CASE("spatially uniform state: u fixed, v follows the scalar recurrence") {
    const Grid g = build_grid(DomainSpec::box2d(0, 1, 0, 1), {6, 6, 1});
    const double u0 = 3.0, v0 = 2.0, dt = 0.05;
    const SimState s = make_state(g, InitialData::constant(u0), InitialData::constant(v0));
    const ModelParams p = basic_params(ModelVariant::AttractionOnly, 1.5, 0.0, dt, 10 * dt);

    const StepOutcome out = step(s, p, g);
    CHECK_FALSE(out.cfl_clamped);
    CHECK_FALSE(out.bound_violation);
    // (1 + dt*u0) v1 = v0 cell by cell (laplacian of a constant vanishes)
    const double v1 = v0 / (1.0 + dt * u0);
    for (int i = 0; i < g.num_active(); ++i) {
        CHECK(out.state.u[i] == doctest::Approx(u0).epsilon(1e-12));
        CHECK(out.state.v[i] == doctest::Approx(v1).epsilon(1e-12));
    }
}

TEST_CASE("zero cell density: u stays zero, v obeys the heat maximum principle") {
    const Grid g = build_grid(DomainSpec::disk(0, 0, 1.0, 1.0), {20, 20, 1});
    SimState s = make_state(g, InitialData::constant(0.0), InitialData::gaussian(5.0, 10.0));
    const ModelParams p = basic_params(ModelVariant::AttractionOnly, 20.0, 0.0, 1e-3, 1e-3);

    double prev_max = field_extrema(s.v).second;
    for (int k = 0; k < 10; ++k) {
        const StepOutcome out = step(s, p, g);
        s = out.state;
        const auto [v_lo, v_hi] = field_extrema(s.v);
        CHECK(v_hi <= prev_max + 1e-9);
        CHECK(v_lo >= -1e-12);
        for (int i = 0; i < g.num_active(); ++i) CHECK(std::abs(s.u[i]) <= 1e-12);
        prev_max = v_hi;
    }
}

TEST_CASE("chi=xi with identical v0=w0 reduces to pure diffusion") {
    const Grid g = build_grid(DomainSpec::disk(0, 0, 1.0, 1.0), {16, 16, 1});
    const InitialData u0 = InitialData::gaussian(10.0, 20.0);
    const InitialData vw0 = InitialData::gaussian(8.0, 15.0);

    SimState s_pair = make_state(g, u0, vw0, &vw0);
    SimState s_zero = make_state(g, u0, vw0, &vw0);
    const ModelParams p_pair =
        basic_params(ModelVariant::AttractionRepulsion, 7.0, 7.0, 2e-4, 1e-3);
    const ModelParams p_zero =
        basic_params(ModelVariant::AttractionRepulsion, 0.0, 0.0, 2e-4, 1e-3);

    for (int k = 0; k < 5; ++k) {
        const StepOutcome a = step(s_pair, p_pair, g);
        const StepOutcome b = step(s_zero, p_zero, g);
        CHECK_FALSE(a.cfl_clamped);  // velocities cancel exactly
        s_pair = a.state;
        s_zero = b.state;
        CHECK(max_abs_diff(s_pair.u.values, s_zero.u.values) <= 1e-12);
    }
}

TEST_CASE("run takes exactly three steps when t_end = 3 dt") {
    const Grid g = build_grid(DomainSpec::box2d(0, 1, 0, 1), {5, 5, 1});
    const SimState s = make_state(g, InitialData::constant(1.0), InitialData::constant(1.0));
    const ModelParams p = basic_params(ModelVariant::AttractionOnly, 0.0, 0.0, 1e-5, 3e-5);
    const RunResult res = run(s, p, g);
    CHECK(res.steps == 3);
    CHECK(res.state.t == doctest::Approx(3e-5).epsilon(1e-12));
    CHECK_FALSE(res.halted);
}

TEST_CASE("mass of u is conserved across steps") {
    const Grid g = build_grid(DomainSpec::disk(0, 0, 1.0, 1.0), {24, 24, 1});
    const SimState s =
        make_state(g, InitialData::gaussian(20.0, 30.0), InitialData::gaussian(20.0, 30.0));
    const double m0 = mass(g, s.u);
    const ModelParams p = basic_params(ModelVariant::AttractionOnly, 20.0, 0.0, 1e-5, 4e-4);

    std::vector<double> masses;
    RunHooks hooks;
    hooks.record_every = 1;
    hooks.on_record = [&](const SimState& st, const StepOutcome*) {
        masses.push_back(mass(g, st.u));
    };
    const RunResult res = run(s, p, g);
    (void)res;
    for (double m : masses) CHECK(std::abs(m - m0) <= 1e-9 * m0);
}

TEST_CASE("one step matches the dense oracle on random small instances") {
    std::mt19937_64 rng(424242);
    for (int trial = 0; trial < 12; ++trial) {
        const Grid g = random_small_grid(rng, 8);
        std::uniform_real_distribution<double> amp(0.5, 6.0);
        const bool rep = trial % 2 == 0;
        const InitialData u0 = InitialData::gaussian(amp(rng), 8.0);
        const InitialData v0 = InitialData::gaussian(amp(rng), 5.0);
        const InitialData w0 = InitialData::gaussian(amp(rng), 6.0);
        const SimState s = make_state(g, u0, v0, rep ? &w0 : nullptr);

        ModelParams p = basic_params(
            rep ? ModelVariant::AttractionRepulsion : ModelVariant::AttractionOnly, 1.2,
            rep ? 0.7 : 0.0, 0.0, 1.0);
        // keep the step inside the CFL bound so the oracle and step() advance
        // the same dt
        const double bound = cfl_max_dt(g, s.v, rep ? &s.w : nullptr, p.chi, p.xi);
        p.dt = std::isfinite(bound) ? 0.25 * bound : 1e-3;

        const StepOutcome out = step(s, p, g);
        REQUIRE_FALSE(out.cfl_clamped);
        const SimState oracle = dense_step_oracle(g, s, p);

        CHECK(max_abs_diff(out.state.u.values, oracle.u.values) <= 1e-8);
        CHECK(max_abs_diff(out.state.v.values, oracle.v.values) <= 1e-8);
        if (rep) CHECK(max_abs_diff(out.state.w.values, oracle.w.values) <= 1e-8);
    }
}

TEST_CASE("cfl clamping reduces dt, flags, and preserves positivity") {
    const Grid g = build_grid(DomainSpec::disk(0, 0, 1.0, 1.0), {32, 32, 1});
    const SimState s =
        make_state(g, InitialData::gaussian(20.0, 30.0), InitialData::gaussian(20.0, 30.0));
    const ModelParams p = basic_params(ModelVariant::AttractionOnly, 20.0, 0.0, 1e-3, 1e-2);

    const StepOutcome out = step(s, p, g);
    CHECK(out.cfl_clamped);
    CHECK(out.dt_used < p.dt);
    CHECK(out.dt_used > 0.0);
    CHECK(field_extrema(out.state.u).first >= -1e-12);
    CHECK_FALSE(out.bound_violation);
}

TEST_CASE("positivity and maximum principle on randomized runs") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 10; ++trial) {
        const Grid g = random_small_grid(rng, 7);
        std::uniform_real_distribution<double> amp(1.0, 20.0);
        std::uniform_real_distribution<double> strength(0.0, 25.0);
        const InitialData u0 = InitialData::gaussian(amp(rng), 10.0);
        const InitialData v0 = InitialData::gaussian(amp(rng), 12.0);
        const InitialData w0 = InitialData::gaussian(amp(rng), 9.0);
        SimState s = make_state(g, u0, v0, &w0);
        const ModelParams p = basic_params(ModelVariant::AttractionRepulsion, strength(rng),
                                           strength(rng), 5e-4, 5e-3);
        const double v_cap = s.v_sup0;
        const double w_cap = s.w_sup0;
        for (int k = 0; k < 8; ++k) {
            const StepOutcome out = step(s, p, g);
            s = out.state;
            CHECK(field_extrema(s.u).first >= -1e-12);
            CHECK(field_extrema(s.v).first >= -1e-12);
            CHECK(field_extrema(s.v).second <= v_cap + 1e-9);
            CHECK(field_extrema(s.w).first >= -1e-12);
            CHECK(field_extrema(s.w).second <= w_cap + 1e-9);
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(basic_params(ModelVariant::AttractionOnly, 1.0, 0.5, 1e-5, 1.0).validate(),
                    ConfigError);
    CHECK_THROWS_AS(basic_params(ModelVariant::AttractionOnly, 1.0, 0.0, -1e-5, 1.0).validate(),
                    ConfigError);
    CHECK_THROWS_AS(basic_params(ModelVariant::AttractionOnly, 1.0, 0.0, 1e-5, 0.0).validate(),
                    ConfigError);
    ModelParams p = basic_params(ModelVariant::AttractionRepulsion, 1.0, 1.0, 1e-5, 1.0);
    p.cfl_safety = 1.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);

    // missing w field for the attraction-repulsion variant
    const Grid g = build_grid(DomainSpec::box2d(0, 1, 0, 1), {4, 4, 1});
    const SimState s = make_state(g, InitialData::constant(1.0), InitialData::constant(1.0));
    CHECK_THROWS_AS(
        step(s, basic_params(ModelVariant::AttractionRepulsion, 1.0, 1.0, 1e-4, 1.0), g),
        ConfigError);
}
