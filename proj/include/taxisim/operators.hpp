#pragma once

#include <vector>

#include "taxisim/fields.hpp"
#include "taxisim/geometry.hpp"

namespace taxisim {

/// One value per interior face, oriented from face.a to face.b.
using FaceValues = std::vector<double>;

/// Conservative 2nd-order Neumann Laplacian:
/// (L f)_c = (1/V_c) * sum_faces A_f * (f_nb - f_c) / h_f.
/// Faces to masked/exterior cells are absent, so the zero-flux boundary
/// condition is built in.
ScalarField laplacian_apply(const Grid& grid, const ScalarField& f);
void laplacian_apply_into(const Grid& grid, const double* f, double* out);

/// Two-point face gradient (f_b - f_a) / h along the face axis.
FaceValues grad_on_faces(const Grid& grid, const ScalarField& f);
void grad_on_faces_into(const Grid& grid, const double* f, double* out);

/// Face velocity chi*grad(v) - xi*grad(w); the w term is omitted when w is null.
FaceValues face_velocities(const Grid& grid, const ScalarField& v, const ScalarField* w,
                           double chi, double xi);
void face_velocities_into(const Grid& grid, const double* v, const double* w, double chi,
                          double xi, double* out);

/// Donor-cell divergence of the chemotactic flux: per cell, -div(u * vel) with
/// u taken from the upwind cell of each face. In flux form each face
/// contributes +/- the same amount to its two cells, so the volume-weighted
/// sum over all cells is zero.
ScalarField taxis_divergence(const Grid& grid, const ScalarField& u, const ScalarField& v,
                             const ScalarField* w, double chi, double xi);
void taxis_divergence_into(const Grid& grid, const double* u, const double* vel_faces,
                           double* out);

/// Largest stable explicit step for the donor-cell update:
/// h_min / (2 * dim * max_f |vel_f|), +inf when all face velocities vanish.
double cfl_max_dt(const Grid& grid, const ScalarField& v, const ScalarField* w, double chi,
                  double xi);
double cfl_max_dt_from_velocities(const Grid& grid, const FaceValues& vel);

}  // namespace taxisim
