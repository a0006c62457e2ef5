#include "taxisim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "taxisim/errors.hpp"

namespace taxisim {

DomainSpec DomainSpec::box2d(double x0, double x1, double y0, double y1) {
    DomainSpec s;
    s.kind = DomainKind::Box;
    s.dim = 2;
    s.lo = {x0, y0, 0.0};
    s.hi = {x1, y1, 1.0};
    return s;
}

DomainSpec DomainSpec::box3d(double x0, double x1, double y0, double y1, double z0, double z1) {
    DomainSpec s;
    s.kind = DomainKind::Box;
    s.dim = 3;
    s.lo = {x0, y0, z0};
    s.hi = {x1, y1, z1};
    return s;
}

DomainSpec DomainSpec::disk(double cx, double cy, double radius, double half_extent) {
    DomainSpec s;
    s.kind = DomainKind::Disk;
    s.dim = 2;
    s.center = {cx, cy, 0.0};
    s.radius = radius;
    s.lo = {cx - half_extent, cy - half_extent, 0.0};
    s.hi = {cx + half_extent, cy + half_extent, 1.0};
    return s;
}

DomainSpec DomainSpec::ball(double cx, double cy, double cz, double radius, double half_extent) {
    DomainSpec s;
    s.kind = DomainKind::Ball;
    s.dim = 3;
    s.center = {cx, cy, cz};
    s.radius = radius;
    s.lo = {cx - half_extent, cy - half_extent, cz - half_extent};
    s.hi = {cx + half_extent, cy + half_extent, cz + half_extent};
    return s;
}

void DomainSpec::validate() const {
    if (dim != 2 && dim != 3)
        throw ConfigError("domain: dimension must be 2 or 3, got " + std::to_string(dim));
    for (int d = 0; d < dim; ++d) {
        if (!(lo[d] < hi[d]))
            throw ConfigError("domain: extents must be strictly ordered on axis " +
                              std::to_string(d));
    }
    if (kind == DomainKind::Disk && dim != 2)
        throw ConfigError("domain: disk requires dimension 2");
    if (kind == DomainKind::Ball && dim != 3)
        throw ConfigError("domain: ball requires dimension 3");
    if (kind != DomainKind::Box && !(radius > 0.0))
        throw ConfigError("domain: radius must be positive");
}

std::array<int, 3> Grid::cell_coords(int active_index) const {
    const int cart = cart_of_active[active_index];
    const int i = cart % cells[0];
    const int j = (cart / cells[0]) % cells[1];
    const int k = cart / (cells[0] * cells[1]);
    return {i, j, k};
}

std::array<double, 3> Grid::cell_center(int active_index) const {
    const auto c = cell_coords(active_index);
    return {origin[0] + (c[0] + 0.5) * spacing[0],
            origin[1] + (c[1] + 0.5) * spacing[1],
            origin[2] + (c[2] + 0.5) * spacing[2]};
}

int32_t Grid::active_at(int i, int j, int k) const {
    if (i < 0 || i >= cells[0] || j < 0 || j >= cells[1] || k < 0 || k >= cells[2]) return -1;
    return active_of_cart[static_cast<size_t>(i) + cells[0] * (j + static_cast<size_t>(cells[1]) * k)];
}

double Grid::min_spacing() const {
    double h = spacing[0];
    for (int d = 1; d < dim; ++d) h = std::min(h, spacing[d]);
    return h;
}

Grid build_grid(const DomainSpec& spec, const std::array<int, 3>& cells_per_axis) {
    spec.validate();

    Grid g;
    g.dim = spec.dim;
    for (int d = 0; d < spec.dim; ++d) {
        if (cells_per_axis[d] < 1)
            throw ConfigError("grid: cells_per_axis must be >= 1 on axis " + std::to_string(d));
        g.cells[d] = cells_per_axis[d];
        g.origin[d] = spec.lo[d];
        g.spacing[d] = (spec.hi[d] - spec.lo[d]) / cells_per_axis[d];
    }
    if (spec.dim == 2) {
        g.cells[2] = 1;
        g.origin[2] = 0.0;
        g.spacing[2] = 1.0;
    }

    g.cell_volume = 1.0;
    for (int d = 0; d < spec.dim; ++d) g.cell_volume *= g.spacing[d];

    // Face cross sections: product of the spacings on the other axes.
    for (int d = 0; d < spec.dim; ++d) {
        double a = 1.0;
        for (int e = 0; e < spec.dim; ++e)
            if (e != d) a *= g.spacing[e];
        g.face_area[d] = a;
    }

    const long total = static_cast<long>(g.cells[0]) * g.cells[1] * g.cells[2];
    g.active_of_cart.assign(total, -1);

    const double r2 = spec.radius * spec.radius;
    for (long cart = 0; cart < total; ++cart) {
        const int i = static_cast<int>(cart % g.cells[0]);
        const int j = static_cast<int>((cart / g.cells[0]) % g.cells[1]);
        const int k = static_cast<int>(cart / (g.cells[0] * g.cells[1]));
        bool active = true;
        if (spec.kind != DomainKind::Box) {
            const double x = g.origin[0] + (i + 0.5) * g.spacing[0] - spec.center[0];
            const double y = g.origin[1] + (j + 0.5) * g.spacing[1] - spec.center[1];
            double d2 = x * x + y * y;
            if (spec.dim == 3) {
                const double z = g.origin[2] + (k + 0.5) * g.spacing[2] - spec.center[2];
                d2 += z * z;
            }
            active = d2 < r2;
        }
        if (active) {
            g.active_of_cart[cart] = static_cast<int32_t>(g.cart_of_active.size());
            g.cart_of_active.push_back(static_cast<int32_t>(cart));
        }
    }

    if (g.cart_of_active.empty())
        throw ConfigError("grid: no cell center lies inside the domain (total active volume is zero)");

    // Faces grouped by axis; within an axis, lexicographic cell order.
    const std::array<long, 3> stride = {1, g.cells[0],
                                        static_cast<long>(g.cells[0]) * g.cells[1]};
    for (int d = 0; d < spec.dim; ++d) {
        for (int a = 0; a < g.num_active(); ++a) {
            const auto c = g.cell_coords(a);
            std::array<int, 3> n = c;
            n[d] += 1;
            if (n[d] >= g.cells[d]) continue;
            const int32_t nb = g.active_of_cart[g.cart_of_active[a] + stride[d]];
            if (nb < 0) continue;
            g.faces.push_back(Face{static_cast<int32_t>(a), nb, static_cast<int8_t>(d)});
        }
    }

    return g;
}

double active_volume(const Grid& grid) {
    return grid.cell_volume * grid.num_active();
}

}  // namespace taxisim
