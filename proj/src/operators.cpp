#include "taxisim/operators.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "taxisim/errors.hpp"

namespace taxisim {

namespace {

void require_size(const Grid& grid, const ScalarField& f, const char* what) {
    if (f.size() != grid.num_active())
        throw ConfigError(std::string(what) + ": field size does not match grid");
}

}  // namespace

void laplacian_apply_into(const Grid& grid, const double* f, double* out) {
    const int n = grid.num_active();
    std::memset(out, 0, sizeof(double) * static_cast<size_t>(n));
    const double inv_v = 1.0 / grid.cell_volume;
    for (const Face& face : grid.faces) {
        const double coef = grid.face_area[face.axis] / grid.spacing[face.axis] * inv_v;
        const double d = coef * (f[face.b] - f[face.a]);
        out[face.a] += d;
        out[face.b] -= d;
    }
}

ScalarField laplacian_apply(const Grid& grid, const ScalarField& f) {
    require_size(grid, f, "laplacian_apply");
    ScalarField out(grid.num_active());
    laplacian_apply_into(grid, f.data(), out.data());
    return out;
}

void grad_on_faces_into(const Grid& grid, const double* f, double* out) {
    const size_t nf = grid.faces.size();
    for (size_t i = 0; i < nf; ++i) {
        const Face& face = grid.faces[i];
        out[i] = (f[face.b] - f[face.a]) / grid.spacing[face.axis];
    }
}

FaceValues grad_on_faces(const Grid& grid, const ScalarField& f) {
    require_size(grid, f, "grad_on_faces");
    FaceValues out(grid.faces.size());
    grad_on_faces_into(grid, f.data(), out.data());
    return out;
}

void face_velocities_into(const Grid& grid, const double* v, const double* w, double chi,
                          double xi, double* out) {
    const size_t nf = grid.faces.size();
    for (size_t i = 0; i < nf; ++i) {
        const Face& face = grid.faces[i];
        const double inv_h = 1.0 / grid.spacing[face.axis];
        double vel = chi * (v[face.b] - v[face.a]) * inv_h;
        if (w != nullptr) vel -= xi * (w[face.b] - w[face.a]) * inv_h;
        out[i] = vel;
    }
}

FaceValues face_velocities(const Grid& grid, const ScalarField& v, const ScalarField* w,
                           double chi, double xi) {
    require_size(grid, v, "face_velocities");
    if (w != nullptr) require_size(grid, *w, "face_velocities");
    FaceValues out(grid.faces.size());
    face_velocities_into(grid, v.data(), w != nullptr ? w->data() : nullptr, chi, xi,
                         out.data());
    return out;
}

void taxis_divergence_into(const Grid& grid, const double* u, const double* vel_faces,
                           double* out) {
    const int n = grid.num_active();
    std::memset(out, 0, sizeof(double) * static_cast<size_t>(n));
    const double inv_v = 1.0 / grid.cell_volume;
    const size_t nf = grid.faces.size();
    for (size_t i = 0; i < nf; ++i) {
        const Face& face = grid.faces[i];
        const double vel = vel_faces[i];
        const double donor = vel > 0.0 ? u[face.a] : u[face.b];
        const double flux = donor * vel * grid.face_area[face.axis] * inv_v;
        out[face.a] -= flux;
        out[face.b] += flux;
    }
}

ScalarField taxis_divergence(const Grid& grid, const ScalarField& u, const ScalarField& v,
                             const ScalarField* w, double chi, double xi) {
    require_size(grid, u, "taxis_divergence");
    if (chi < 0.0 || xi < 0.0) throw ConfigError("taxis_divergence: chi and xi must be >= 0");
    const FaceValues vel = face_velocities(grid, v, w, chi, xi);
    ScalarField out(grid.num_active());
    taxis_divergence_into(grid, u.data(), vel.data(), out.data());
    return out;
}

double cfl_max_dt_from_velocities(const Grid& grid, const FaceValues& vel) {
    double vmax = 0.0;
    for (double s : vel) vmax = std::max(vmax, std::abs(s));
    if (vmax == 0.0) return std::numeric_limits<double>::infinity();
    return grid.min_spacing() / (2.0 * grid.dim * vmax);
}

double cfl_max_dt(const Grid& grid, const ScalarField& v, const ScalarField* w, double chi,
                  double xi) {
    return cfl_max_dt_from_velocities(grid, face_velocities(grid, v, w, chi, xi));
}

}  // namespace taxisim
