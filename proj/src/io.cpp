#include "taxisim/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "taxisim/errors.hpp"

namespace taxisim {

namespace {

std::string fmt15(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

void write_vtk(const std::string& path, const Grid& grid,
               const std::vector<std::pair<std::string, const ScalarField*>>& fields,
               long step, double t) {
    std::ofstream out = open_out(path);
    const int nx = grid.cells[0], ny = grid.cells[1], nz = grid.dim == 3 ? grid.cells[2] : 1;
    out << "# vtk DataFile Version 3.0\n";
    out << "taxisim step=" << step << " t=" << fmt15(t) << "\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << nx << " " << ny << " " << nz << "\n";
    out << "ORIGIN " << fmt15(grid.origin[0] + 0.5 * grid.spacing[0]) << " "
        << fmt15(grid.origin[1] + 0.5 * grid.spacing[1]) << " "
        << fmt15(grid.dim == 3 ? grid.origin[2] + 0.5 * grid.spacing[2] : 0.0) << "\n";
    out << "SPACING " << fmt15(grid.spacing[0]) << " " << fmt15(grid.spacing[1]) << " "
        << fmt15(grid.dim == 3 ? grid.spacing[2] : 1.0) << "\n";
    out << "POINT_DATA " << static_cast<long>(nx) * ny * nz << "\n";
    for (const auto& [name, field] : fields) {
        if (field->size() != grid.num_active())
            throw ConfigError("write_vtk: field '" + name + "' does not match grid");
        out << "SCALARS " << name << " double 1\n";
        out << "LOOKUP_TABLE default\n";
        const long total = static_cast<long>(nx) * ny * nz;
        for (long cart = 0; cart < total; ++cart) {
            const int32_t a = grid.active_of_cart[cart];
            out << (a >= 0 ? fmt15((*field)[a]) : fmt15(kInactiveSentinel)) << "\n";
        }
    }
    if (!out) throw ConfigError("write_vtk: write to '" + path + "' failed");
}

void write_field_csv(const std::string& path, const Grid& grid, const ScalarField& f) {
    if (f.size() != grid.num_active())
        throw ConfigError("write_field_csv: field does not match grid");
    std::ofstream out = open_out(path);
    out << (grid.dim == 3 ? "cell,x,y,z,value\n" : "cell,x,y,value\n");
    for (int i = 0; i < grid.num_active(); ++i) {
        const auto c = grid.cell_center(i);
        out << i << ',' << fmt15(c[0]) << ',' << fmt15(c[1]);
        if (grid.dim == 3) out << ',' << fmt15(c[2]);
        out << ',' << fmt15(f[i]) << "\n";
    }
    if (!out) throw ConfigError("write_field_csv: write to '" + path + "' failed");
}

struct SeriesWriter::Impl {
    std::ofstream out;
    std::string path;
};

SeriesWriter::SeriesWriter(const std::string& path, const std::string& meta)
    : impl_(new Impl{open_out(path), path}) {
    impl_->out << "# generated=" << utc_now() << "\n";
    if (!meta.empty()) impl_->out << "# meta " << meta << "\n";
    impl_->out << csv_header() << "\n";
}

SeriesWriter::~SeriesWriter() {
    close();
    delete impl_;
}

void SeriesWriter::append(const DiagnosticsRecord& rec) {
    impl_->out << to_csv_row(rec) << "\n";
    if (!impl_->out) throw ConfigError("series write to '" + impl_->path + "' failed");
}

void SeriesWriter::close() {
    if (impl_->out.is_open()) impl_->out.close();
}

SeriesFile read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open series file '" + path + "'");
    SeriesFile sf;
    std::string line;
    bool header_seen = false;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.rfind("# meta ", 0) == 0) {
            std::stringstream ss(line.substr(7));
            std::string kv;
            while (ss >> kv) {
                const auto eq = kv.find('=');
                if (eq != std::string::npos) sf.meta[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
            continue;
        }
        if (line[0] == '#') continue;
        if (!header_seen) {
            if (line != csv_header())
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": unexpected column header '" + line + "'");
            header_seen = true;
            continue;
        }
        try {
            sf.records.push_back(parse_csv_row(line));
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!header_seen) throw ConfigError(path + ": no column header found");
    return sf;
}

}  // namespace taxisim
