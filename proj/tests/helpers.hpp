#pragma once

// Test-side oracles, deliberately independent of the library's solve path:
// dense matrix assembly + Gaussian elimination stand in for the matrix-free
// iteration, and a literal re-derivation of the split step checks step().

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "taxisim/fields.hpp"
#include "taxisim/geometry.hpp"
#include "taxisim/stepper.hpp"

namespace taxisim::testing {

using DenseMatrix = std::vector<std::vector<double>>;

inline DenseMatrix dense_laplacian(const Grid& g) {
    const int n = g.num_active();
    DenseMatrix L(n, std::vector<double>(n, 0.0));
    for (const Face& f : g.faces) {
        const double c = g.face_area[f.axis] / (g.spacing[f.axis] * g.cell_volume);
        L[f.a][f.a] -= c;
        L[f.a][f.b] += c;
        L[f.b][f.b] -= c;
        L[f.b][f.a] += c;
    }
    return L;
}

// I + dt*diag(a) - dt*L
inline DenseMatrix dense_helmholtz(const Grid& g, double dt, const ScalarField* absorption) {
    const int n = g.num_active();
    DenseMatrix A = dense_laplacian(g);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A[i][j] *= -dt;
    for (int i = 0; i < n; ++i) {
        A[i][i] += 1.0;
        if (absorption != nullptr) A[i][i] += dt * (*absorption)[i];
    }
    return A;
}

// Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(DenseMatrix A, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (A[piv][col] == 0.0) throw std::runtime_error("gauss_solve: singular matrix");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            const double m = A[r][col] / A[col][col];
            if (m == 0.0) continue;
            for (int c = col; c < n; ++c) A[r][c] -= m * A[col][c];
            b[r] -= m * b[col];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}

// One full split step via dense direct solves; mirrors the step() contract for
// steps where the CFL clamp stays inactive.
inline SimState dense_step_oracle(const Grid& g, const SimState& s, const ModelParams& p) {
    const int n = g.num_active();
    const bool has_w = p.variant == ModelVariant::AttractionRepulsion;
    ScalarField absorb = s.u;
    for (double& a : absorb.values) a = std::max(a, 0.0);

    const DenseMatrix stage1 = dense_helmholtz(g, p.dt, &absorb);
    SimState out;
    out.v.values = gauss_solve(stage1, s.v.values);
    if (has_w) out.w.values = gauss_solve(stage1, s.w.values);

    std::vector<double> div(n, 0.0);
    for (const Face& f : g.faces) {
        const double inv_h = 1.0 / g.spacing[f.axis];
        double vel = p.chi * (out.v[f.b] - out.v[f.a]) * inv_h;
        if (has_w) vel -= p.xi * (out.w[f.b] - out.w[f.a]) * inv_h;
        const double donor = vel > 0.0 ? s.u[f.a] : s.u[f.b];
        const double flux = donor * vel * g.face_area[f.axis] / g.cell_volume;
        div[f.a] -= flux;
        div[f.b] += flux;
    }
    std::vector<double> u_star(n);
    for (int i = 0; i < n; ++i) u_star[i] = s.u[i] + p.dt * div[i];

    const DenseMatrix stage2 = dense_helmholtz(g, p.dt, nullptr);
    out.u.values = gauss_solve(stage2, u_star);

    out.has_w = has_w;
    out.t = s.t + p.dt;
    out.step = s.step + 1;
    out.v_sup0 = s.v_sup0;
    out.w_sup0 = s.w_sup0;
    return out;
}

// Brute-force face census: counts unordered pairs of adjacent active cells.
inline long count_adjacent_active_pairs(const Grid& g) {
    long count = 0;
    for (int a = 0; a < g.num_active(); ++a) {
        const auto c = g.cell_coords(a);
        for (int d = 0; d < g.dim; ++d) {
            const int32_t nb =
                g.active_at(c[0] + (d == 0), c[1] + (d == 1), c[2] + (d == 2));
            if (nb >= 0) ++count;
        }
    }
    return count;
}

inline ScalarField random_field(const Grid& g, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField f(g.num_active());
    for (auto& x : f.values) x = dist(rng);
    return f;
}

inline Grid random_small_grid(std::mt19937_64& rng, int max_cells = 8, bool allow_3d = true) {
    std::uniform_int_distribution<int> cells_dist(2, max_cells);
    std::uniform_int_distribution<int> kind_dist(0, 2);
    const int dim = allow_3d && (rng() % 2 == 0) ? 3 : 2;
    const int kind = kind_dist(rng);
    DomainSpec spec;
    if (kind == 0 || (dim == 2 && kind == 2) || (dim == 3 && kind == 1)) {
        spec = dim == 2 ? DomainSpec::box2d(0.0, 1.0, 0.0, 1.0)
                        : DomainSpec::box3d(0.0, 1.0, 0.0, 1.0, 0.0, 1.0);
    } else if (dim == 2) {
        spec = DomainSpec::disk(0.0, 0.0, 1.0, 1.0);
    } else {
        spec = DomainSpec::ball(0.0, 0.0, 0.0, 1.0, 1.0);
    }
    std::array<int, 3> cells{1, 1, 1};
    for (int d = 0; d < dim; ++d) cells[d] = cells_dist(rng);
    // Masked domains need enough resolution for at least one interior center.
    if (spec.kind != DomainKind::Box)
        for (int d = 0; d < dim; ++d) cells[d] = std::max(cells[d], 3);
    return build_grid(spec, cells);
}

inline double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace taxisim::testing
