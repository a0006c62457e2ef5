#include "taxisim/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "taxisim/errors.hpp"

namespace taxisim {

InitialData InitialData::constant(double v) {
    InitialData d;
    d.kind = InitialKind::Constant;
    d.value = v;
    return d;
}

InitialData InitialData::gaussian(double amplitude, double sharpness,
                                  std::array<double, 3> center) {
    InitialData d;
    d.kind = InitialKind::Gaussian;
    d.amplitude = amplitude;
    d.sharpness = sharpness;
    d.center = center;
    return d;
}

InitialData InitialData::table_of(std::vector<double> values) {
    InitialData d;
    d.kind = InitialKind::Table;
    d.table = std::move(values);
    return d;
}

void InitialData::validate() const {
    if (kind == InitialKind::Gaussian) {
        if (amplitude < 0.0) throw ConfigError("initial data: gaussian amplitude must be >= 0");
        if (!(sharpness > 0.0)) throw ConfigError("initial data: gaussian sharpness must be > 0");
    }
}

ScalarField init_field(const Grid& grid, const InitialData& data) {
    data.validate();
    const int n = grid.num_active();
    ScalarField f(n);
    switch (data.kind) {
        case InitialKind::Constant:
            std::fill(f.values.begin(), f.values.end(), data.value);
            break;
        case InitialKind::Gaussian:
            for (int i = 0; i < n; ++i) {
                const auto x = grid.cell_center(i);
                double r2 = 0.0;
                for (int d = 0; d < grid.dim; ++d) {
                    const double dx = x[d] - data.center[d];
                    r2 += dx * dx;
                }
                f[i] = data.amplitude * std::exp(-data.sharpness * r2);
            }
            break;
        case InitialKind::Table:
            if (static_cast<int>(data.table.size()) != n)
                throw ConfigError("initial data: table has " + std::to_string(data.table.size()) +
                                  " entries, grid has " + std::to_string(n) + " active cells");
            f.values = data.table;
            break;
    }
    return f;
}

std::pair<double, double> field_extrema(const ScalarField& f) {
    if (f.values.empty()) throw ConfigError("field_extrema: empty field");
    auto [lo, hi] = std::minmax_element(f.values.begin(), f.values.end());
    return {*lo, *hi};
}

SimState make_state(const Grid& grid, const InitialData& u0, const InitialData& v0,
                    const InitialData* w0) {
    SimState s;
    s.u = init_field(grid, u0);
    s.v = init_field(grid, v0);
    auto check_nonneg = [](const ScalarField& f, const char* name) {
        const double lo = field_extrema(f).first;
        if (lo < -kNonnegSlack)
            throw ConfigError(std::string("initial data: ") + name + " has negative values (min " +
                              std::to_string(lo) + ")");
    };
    check_nonneg(s.u, "u0");
    check_nonneg(s.v, "v0");
    s.v_sup0 = field_extrema(s.v).second;
    if (w0 != nullptr) {
        s.w = init_field(grid, *w0);
        check_nonneg(s.w, "w0");
        s.has_w = true;
        s.w_sup0 = field_extrema(s.w).second;
    }
    return s;
}

}  // namespace taxisim
