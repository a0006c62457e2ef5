#include "taxisim/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "taxisim/errors.hpp"
#include "taxisim/operators.hpp"

namespace taxisim {

namespace {

constexpr double kViolationSlack = 1e-9;  // absolute slack before a bound breach is flagged

// Componentwise solver-noise floor. ||A^-1||_inf <= 1 for these operators, so
// the solution error is bounded by the residual inf-norm; keeping it at this
// level keeps positivity/maximum-principle slack at the 1e-12 scale without
// demanding residuals below what double precision can reach.
double inf_floor(const ScalarField& b) {
    double m = 0.0;
    for (double x : b.values) m = std::max(m, std::abs(x));
    return std::max(5e-14, 5e-15 * m);
}

std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) {
        if (!s.empty()) s += ";";
        s += p;
    }
    return s;
}

}  // namespace

void ModelParams::validate() const {
    if (!(dt > 0.0)) throw ConfigError("model: dt must be > 0");
    if (!(t_end > 0.0)) throw ConfigError("model: t_end must be > 0");
    if (chi < 0.0) throw ConfigError("model: chi must be >= 0");
    if (xi < 0.0) throw ConfigError("model: xi must be >= 0");
    if (variant == ModelVariant::AttractionOnly && xi != 0.0)
        throw ConfigError("model: attraction_only forbids xi != 0");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0))
        throw ConfigError("model: cfl_safety must lie in (0,1]");
}

StepOutcome step(const SimState& state, const ModelParams& params, const Grid& grid) {
    params.validate();
    const int n = grid.num_active();
    if (state.u.size() != n || state.v.size() != n)
        throw ConfigError("step: state fields do not match grid");
    const bool has_w = params.variant == ModelVariant::AttractionRepulsion;
    if (has_w && (!state.has_w || state.w.size() != n))
        throw ConfigError("step: attraction_repulsion needs a w field on the state grid");

    // Absorption rate for the consumption solves; u^n carries at most
    // O(1e-13) round-off below zero, clamp so the stage-1 matrix stays an
    // M-matrix.
    ScalarField absorb = state.u;
    for (double& a : absorb.values) a = std::max(a, 0.0);

    const double dt_req = params.dt;
    FaceValues vel(grid.num_faces());
    face_velocities_into(grid, state.v.data(), has_w ? state.w.data() : nullptr, params.chi,
                         params.xi, vel.data());
    double dt_try =
        std::min(dt_req, params.cfl_safety * cfl_max_dt_from_velocities(grid, vel));

    StepOutcome out;
    ScalarField v_new, w_new;

    // Stage 1 with a CFL predictor from the current chemical fields; the bound
    // is re-checked against the fresh gradients and the stage re-solved with a
    // smaller dt when the predictor was too optimistic (rare).
    SolveOptions vopts = params.solve;
    if (vopts.abs_inf_tol <= 0.0) vopts.abs_inf_tol = inf_floor(state.v);
    SolveOptions wopts = params.solve;
    if (has_w && wopts.abs_inf_tol <= 0.0) wopts.abs_inf_tol = inf_floor(state.w);

    for (int attempt = 0; attempt < 6; ++attempt) {
        HelmholtzOperator stage1(grid, dt_try, &absorb);
        std::tie(v_new, out.v_solve) = solve_spd(stage1, state.v, vopts);
        if (has_w) std::tie(w_new, out.w_solve) = solve_spd(stage1, state.w, wopts);
        face_velocities_into(grid, v_new.data(), has_w ? w_new.data() : nullptr, params.chi,
                             params.xi, vel.data());
        const double bound = params.cfl_safety * cfl_max_dt_from_velocities(grid, vel);
        if (dt_try <= bound) break;
        dt_try = bound;
    }

    // Stage 2: explicit donor-cell taxis with the fresh gradients, then
    // implicit diffusion.
    ScalarField u_star(n);
    taxis_divergence_into(grid, state.u.data(), vel.data(), u_star.data());
    for (int i = 0; i < n; ++i) u_star[i] = state.u[i] + dt_try * u_star[i];

    HelmholtzOperator diffusion(grid, dt_try, nullptr);
    SolveOptions uopts = params.solve;
    if (uopts.abs_inf_tol <= 0.0) uopts.abs_inf_tol = inf_floor(u_star);
    if (uopts.sum_abs_tol <= 0.0) {
        double s = 0.0;
        for (double x : u_star.values) s += std::abs(x);
        uopts.sum_abs_tol = 1e-13 * s;
    }
    ScalarField u_new;
    std::tie(u_new, out.u_solve) = solve_spd(diffusion, u_star, uopts);

    out.dt_used = dt_try;
    out.cfl_clamped = dt_try < dt_req;

    const auto [u_lo, u_hi] = field_extrema(u_new);
    (void)u_hi;
    if (u_lo < -kViolationSlack) out.violations.push_back("u_negative");
    const double v_prev_max = field_extrema(state.v).second;
    const auto [v_lo, v_hi] = field_extrema(v_new);
    if (v_lo < -kViolationSlack || v_hi > v_prev_max + kViolationSlack)
        out.violations.push_back("v_bounds");
    if (has_w) {
        const double w_prev_max = field_extrema(state.w).second;
        const auto [w_lo, w_hi] = field_extrema(w_new);
        if (w_lo < -kViolationSlack || w_hi > w_prev_max + kViolationSlack)
            out.violations.push_back("w_bounds");
    }
    out.bound_violation = !out.violations.empty();

    out.state.u = std::move(u_new);
    out.state.v = std::move(v_new);
    if (has_w) out.state.w = std::move(w_new);
    out.state.has_w = has_w;
    out.state.t = state.t + dt_try;
    out.state.step = state.step + 1;
    out.state.v_sup0 = state.v_sup0;
    out.state.w_sup0 = state.w_sup0;
    return out;
}

RunResult run(SimState initial, const ModelParams& params, const Grid& grid,
              const RunHooks& hooks) {
    params.validate();
    if (hooks.record_every < 1) throw ConfigError("run: record_every must be >= 1");

    RunResult res;
    res.state = std::move(initial);
    if (hooks.on_record) hooks.on_record(res.state, nullptr);
    res.peak_max_u = field_extrema(res.state.u).second;
    res.peak_time = res.state.t;

    const double t_end = params.t_end;
    long since_record = 0;
    while (res.state.t < t_end * (1.0 - 1e-12)) {
        ModelParams step_params = params;
        step_params.dt = std::min(params.dt, t_end - res.state.t);

        StepOutcome out;
        try {
            out = step(res.state, step_params, grid);
        } catch (const SolveFailure& e) {
            throw SolveFailure("step " + std::to_string(res.state.step + 1) +
                                   " (t=" + std::to_string(res.state.t) + "): " + e.what(),
                               e.report);
        }

        res.state = std::move(out.state);
        ++res.steps;
        res.any_cfl_clamped = res.any_cfl_clamped || out.cfl_clamped;

        const double max_u = field_extrema(res.state.u).second;
        if (max_u > res.peak_max_u) {
            res.peak_max_u = max_u;
            res.peak_time = res.state.t;
        }

        ++since_record;
        const bool last = res.state.t >= t_end * (1.0 - 1e-12);
        if (since_record >= hooks.record_every || last || out.bound_violation) {
            since_record = 0;
            if (hooks.on_record) hooks.on_record(res.state, &out);
        }

        if (out.bound_violation && hooks.halt_policy == HaltPolicy::Halt) {
            res.halted = true;
            res.halt_reason = join(out.violations);
            break;
        }
    }
    return res;
}

}  // namespace taxisim
