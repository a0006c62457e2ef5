#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "taxisim/diagnostics.hpp"
#include "taxisim/fields.hpp"
#include "taxisim/geometry.hpp"

namespace taxisim {

/// Legacy-ASCII VTK STRUCTURED_POINTS snapshot of one or more fields sampled
/// at cell centers. Inactive cells carry the sentinel -1e30. 15 significant
/// digits.
void write_vtk(const std::string& path, const Grid& grid,
               const std::vector<std::pair<std::string, const ScalarField*>>& fields,
               long step, double t);

/// Flat per-field CSV: cell index, x, y[, z], value.
void write_field_csv(const std::string& path, const Grid& grid, const ScalarField& f);

inline constexpr double kInactiveSentinel = -1e30;

/// Streaming series.csv writer. Layout:
///   line 1: "# generated=<ISO8601>"   (the only non-deterministic line)
///   line 2: "# meta k1=v1 k2=v2 ..."  (deterministic metadata)
///   line 3: column header
///   then one row per record.
class SeriesWriter {
public:
    SeriesWriter(const std::string& path, const std::string& meta);
    ~SeriesWriter();
    void append(const DiagnosticsRecord& rec);
    void close();

private:
    struct Impl;
    Impl* impl_;
};

struct SeriesFile {
    std::map<std::string, std::string> meta;
    std::vector<DiagnosticsRecord> records;
};

SeriesFile read_series_csv(const std::string& path);

}  // namespace taxisim
