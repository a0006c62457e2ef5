#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "taxisim/fields.hpp"
#include "taxisim/geometry.hpp"

namespace taxisim {

/// Matrix-free action x -> x + dt*a.*x - dt*(L x) for the implicit Euler
/// consumption/diffusion solves. Symmetric positive definite whenever a >= 0
/// and dt >= 0 (diagonally dominant M-matrix); dt == 0 is the identity.
class HelmholtzOperator {
public:
    HelmholtzOperator(const Grid& grid, double dt, const ScalarField* absorption);

    void apply(const double* x, double* y) const;
    const std::vector<double>& diagonal() const { return diag_; }
    const Grid& grid() const { return *grid_; }
    int size() const { return grid_->num_active(); }

private:
    const Grid* grid_;
    double dt_;
    const double* absorption_;  // may be null (zero absorption)
    std::vector<double> diag_;
};

struct SolveOptions {
    double rel_tol = 1e-10;   // on ||b - A x||_2 relative to ||b||_2
    double abs_inf_tol = 0.0; // additional absolute floor on ||b - A x||_inf; 0 disables
    double sum_abs_tol = 0.0; // additional bound on |sum_i r_i|; 0 disables.
                              // For operators with unit row sums, sum_i r_i is exactly the
                              // conserved-total error of the solution, so this pins mass drift.
    int max_iter = 0;         // 0 = 10 * n^(1/dim), floor 500
    bool record_history = false;
};

struct SolveReport {
    int iterations = 0;
    double final_rel_residual = 0.0;  // 2-norm, from the true residual
    double final_inf_residual = 0.0;
    bool converged = false;
    int restarts = 0;
    std::vector<double> history;  // preconditioned residual norm per iteration
};

/// Non-convergence within the iteration budget. Never silent: callers either
/// handle this or it propagates.
struct SolveFailure : std::runtime_error {
    SolveReport report;
    SolveFailure(const std::string& msg, SolveReport r)
        : std::runtime_error(msg), report(std::move(r)) {}
};

/// Jacobi-preconditioned conjugate residual iteration. The preconditioned
/// residual norm is minimized at every step, hence non-increasing. Returns the
/// solution and a report; throws SolveFailure if the tolerance is not reached.
std::pair<ScalarField, SolveReport> solve_spd(const HelmholtzOperator& op, const ScalarField& b,
                                              const SolveOptions& opts = {});

int default_max_iter(int n_active, int dim);

}  // namespace taxisim
