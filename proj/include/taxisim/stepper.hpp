#pragma once

#include <functional>
#include <string>
#include <vector>

#include "taxisim/fields.hpp"
#include "taxisim/geometry.hpp"
#include "taxisim/linsolve.hpp"

namespace taxisim {

enum class ModelVariant { AttractionOnly, AttractionRepulsion };

struct ModelParams {
    ModelVariant variant = ModelVariant::AttractionOnly;
    double chi = 0.0;
    double xi = 0.0;  // must stay 0 for AttractionOnly
    double dt = 1e-5;
    double t_end = 1e-3;
    double cfl_safety = 0.9;

    SolveOptions solve;  // defaults: rel 1e-10; the stepper adds an inf floor

    void validate() const;  // throws ConfigError
};

struct StepOutcome {
    SimState state;
    double dt_used = 0.0;
    SolveReport v_solve;
    SolveReport w_solve;  // untouched for AttractionOnly
    SolveReport u_solve;
    bool cfl_clamped = false;
    bool bound_violation = false;
    std::vector<std::string> violations;
};

/// Advances one time step:
///   stage 1: (I + dt*diag(u^n) - dt*L) v^{n+1} = v^n   (and w, uncoupled)
///   stage 2: u* = u^n + dt * taxis_divergence(u^n, v^{n+1}, w^{n+1});
///            (I - dt*L) u^{n+1} = u*
/// dt is clamped to cfl_safety * cfl_max_dt of the fresh chemical gradients
/// when that bound is smaller than the requested dt (stage 1 re-solved with
/// the clamped value so both stages advance the same interval).
StepOutcome step(const SimState& state, const ModelParams& params, const Grid& grid);

enum class HaltPolicy { Halt, Warn };

struct RunHooks {
    int record_every = 1;  // steps between diagnostic records (>= 1)
    HaltPolicy halt_policy = HaltPolicy::Halt;
    // Called after each recorded step (and at t=0); see diagnostics for the record layout.
    std::function<void(const SimState&, const StepOutcome*)> on_record;
};

struct RunResult {
    SimState state;
    long steps = 0;
    bool halted = false;             // halt policy fired before t_end
    std::string halt_reason;
    bool any_cfl_clamped = false;
    double peak_max_u = 0.0;         // tracked every step, not only recorded ones
    double peak_time = 0.0;
};

/// Runs step() until t >= t_end (or halt). Deterministic for fixed inputs.
/// Solver failures propagate as SolveFailure with step index and time
/// prepended to the message.
RunResult run(SimState initial, const ModelParams& params, const Grid& grid,
              const RunHooks& hooks = {});

}  // namespace taxisim
