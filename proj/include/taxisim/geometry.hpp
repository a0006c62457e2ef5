#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace taxisim {

enum class DomainKind { Box, Disk, Ball };

/// Axis-aligned bounding box with an optional disk/ball mask.
/// Disk requires dim == 2, ball requires dim == 3.
struct DomainSpec {
    DomainKind kind = DomainKind::Box;
    int dim = 2;
    std::array<double, 3> lo{0.0, 0.0, 0.0};
    std::array<double, 3> hi{1.0, 1.0, 1.0};
    std::array<double, 3> center{0.0, 0.0, 0.0};  // disk/ball only
    double radius = 1.0;                          // disk/ball only

    static DomainSpec box2d(double x0, double x1, double y0, double y1);
    static DomainSpec box3d(double x0, double x1, double y0, double y1, double z0, double z1);
    static DomainSpec disk(double cx, double cy, double radius, double half_extent);
    static DomainSpec ball(double cx, double cy, double cz, double radius, double half_extent);

    void validate() const;  // throws ConfigError
};

/// Interior face between two active cells. `a` and `b` are compact active-cell
/// indices with b the +axis neighbor of a; oriented quantities (gradients,
/// fluxes) are positive from a to b.
struct Face {
    int32_t a;
    int32_t b;
    int8_t axis;
};

/// Cell-centered structured grid. Only faces joining two active cells are
/// stored, so a zero normal derivative on the staircase boundary needs no
/// special casing: absent faces carry no flux.
class Grid {
public:
    int dim = 2;
    std::array<int, 3> cells{1, 1, 1};        // per-axis cell counts (z == 1 in 2D)
    std::array<double, 3> spacing{1, 1, 1};   // uniform per axis
    std::array<double, 3> origin{0, 0, 0};    // lower corner of the bounding box
    double cell_volume = 1.0;                 // product of spacings, same for all cells

    std::vector<int32_t> active_of_cart;  // cartesian index -> compact index, -1 if masked out
    std::vector<int32_t> cart_of_active;  // compact index -> cartesian index
    std::vector<Face> faces;              // grouped by axis, lexicographic within each axis
    std::array<double, 3> face_area{1, 1, 1};  // cross-section area per face axis

    int num_active() const { return static_cast<int>(cart_of_active.size()); }
    int num_faces() const { return static_cast<int>(faces.size()); }

    std::array<double, 3> cell_center(int active_index) const;
    std::array<int, 3> cell_coords(int active_index) const;

    /// Compact index of the cell at integer coords, or -1 if masked/out of range.
    int32_t active_at(int i, int j, int k = 0) const;

    double min_spacing() const;
};

/// Builds the grid for `spec` with the given per-axis resolution. Active cells
/// are those whose centers satisfy the domain predicate (all cells for a box).
Grid build_grid(const DomainSpec& spec, const std::array<int, 3>& cells_per_axis);

/// Sum of cell volumes over active cells.
double active_volume(const Grid& grid);

}  // namespace taxisim
