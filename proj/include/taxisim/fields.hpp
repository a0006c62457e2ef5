#pragma once

#include <array>
#include <utility>
#include <vector>

#include "taxisim/geometry.hpp"

namespace taxisim {

/// Round-off slack for nonnegativity checks.
inline constexpr double kNonnegSlack = 1e-12;

/// One real value per active cell.
struct ScalarField {
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(int n, double fill = 0.0) : values(static_cast<size_t>(n), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    double* data() { return values.data(); }
    const double* data() const { return values.data(); }
};

enum class InitialKind { Constant, Gaussian, Table };

/// Initial profile for one unknown: a constant, a Gaussian bell
/// A*exp(-s*|x-center|^2), or an explicit per-cell table.
struct InitialData {
    InitialKind kind = InitialKind::Constant;
    double value = 0.0;                    // Constant
    double amplitude = 0.0;                // Gaussian
    double sharpness = 1.0;                // Gaussian
    std::array<double, 3> center{0, 0, 0}; // Gaussian
    std::vector<double> table;             // Table

    static InitialData constant(double v);
    static InitialData gaussian(double amplitude, double sharpness,
                                std::array<double, 3> center = {0, 0, 0});
    static InitialData table_of(std::vector<double> values);

    void validate() const;  // throws ConfigError
};

/// Simulation state: cell density u, chemoattractant v, optional chemorepellent w.
/// v_sup0/w_sup0 are the initial maxima, recorded once and never updated; they
/// are the reference bounds the consumption equations must stay below.
struct SimState {
    ScalarField u;
    ScalarField v;
    ScalarField w;  // empty unless has_w
    bool has_w = false;
    double t = 0.0;
    long step = 0;
    double v_sup0 = 0.0;
    double w_sup0 = 0.0;
};

/// Samples `data` at cell centers.
ScalarField init_field(const Grid& grid, const InitialData& data);

/// Exact (min, max) over active cells. Field must be nonempty.
std::pair<double, double> field_extrema(const ScalarField& f);

/// Assembles a SimState at t=0 and records the sup bounds. All initial fields
/// must be nonnegative (within round-off slack).
SimState make_state(const Grid& grid, const InitialData& u0, const InitialData& v0,
                    const InitialData* w0 = nullptr);

}  // namespace taxisim
