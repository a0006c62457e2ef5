#include "taxisim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "taxisim/errors.hpp"
#include "taxisim/io.hpp"

namespace taxisim {

using nlohmann::json;

namespace {

std::string fmt_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return buf;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// ---- strict JSON helpers ---------------------------------------------------

void require_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
}

void reject_unknown_keys(const json& obj, const std::string& ctx,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (item.key() == a) ok = true;
        if (!ok) throw ConfigError(ctx + ": unknown key '" + item.key() + "'");
    }
}

const json& require_key(const json& obj, const std::string& ctx, const char* key) {
    if (!obj.contains(key)) throw ConfigError(ctx + ": missing required key '" + key + "'");
    return obj.at(key);
}

double as_number(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw ConfigError(ctx + ": expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& ctx) {
    if (!j.is_number_integer()) throw ConfigError(ctx + ": expected an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& ctx) {
    if (!j.is_string()) throw ConfigError(ctx + ": expected a string");
    return j.get<std::string>();
}

std::array<double, 3> as_point(const json& j, const std::string& ctx) {
    if (!j.is_array() || (j.size() != 2 && j.size() != 3))
        throw ConfigError(ctx + ": expected an array of 2 or 3 numbers");
    std::array<double, 3> p{0, 0, 0};
    for (size_t i = 0; i < j.size(); ++i) p[i] = as_number(j[i], ctx);
    return p;
}

// ---- scenario <-> JSON ------------------------------------------------------

DomainSpec domain_from_json(const json& j) {
    require_object(j, "domain");
    reject_unknown_keys(j, "domain", {"kind", "extents", "center", "radius"});
    const std::string kind = as_string(require_key(j, "domain", "kind"), "domain.kind");

    const json& ext = require_key(j, "domain", "extents");
    if (!ext.is_array() || (ext.size() != 2 && ext.size() != 3))
        throw ConfigError("domain.extents: expected 2 or 3 [lo,hi] pairs");
    DomainSpec spec;
    spec.dim = static_cast<int>(ext.size());
    for (size_t d = 0; d < ext.size(); ++d) {
        const json& pair = ext[d];
        if (!pair.is_array() || pair.size() != 2)
            throw ConfigError("domain.extents[" + std::to_string(d) + "]: expected [lo,hi]");
        spec.lo[d] = as_number(pair[0], "domain.extents");
        spec.hi[d] = as_number(pair[1], "domain.extents");
    }

    if (kind == "box") {
        spec.kind = DomainKind::Box;
        if (j.contains("center") || j.contains("radius"))
            throw ConfigError("domain: center/radius only apply to disk or ball");
    } else if (kind == "disk" || kind == "ball") {
        spec.kind = kind == "disk" ? DomainKind::Disk : DomainKind::Ball;
        spec.center = as_point(require_key(j, "domain", "center"), "domain.center");
        spec.radius = as_number(require_key(j, "domain", "radius"), "domain.radius");
    } else {
        throw ConfigError("domain.kind: expected box, disk or ball, got '" + kind + "'");
    }
    spec.validate();
    return spec;
}

json domain_to_json(const DomainSpec& s) {
    json j;
    j["kind"] = s.kind == DomainKind::Box ? "box" : (s.kind == DomainKind::Disk ? "disk" : "ball");
    json ext = json::array();
    for (int d = 0; d < s.dim; ++d) ext.push_back({s.lo[d], s.hi[d]});
    j["extents"] = ext;
    if (s.kind != DomainKind::Box) {
        json c = json::array();
        for (int d = 0; d < s.dim; ++d) c.push_back(s.center[d]);
        j["center"] = c;
        j["radius"] = s.radius;
    }
    return j;
}

InitialData initial_from_json(const json& j, const std::string& ctx) {
    require_object(j, ctx);
    const std::string kind = as_string(require_key(j, ctx, "kind"), ctx + ".kind");
    InitialData d;
    if (kind == "constant") {
        reject_unknown_keys(j, ctx, {"kind", "value"});
        d = InitialData::constant(as_number(require_key(j, ctx, "value"), ctx + ".value"));
    } else if (kind == "gaussian") {
        reject_unknown_keys(j, ctx, {"kind", "amplitude", "sharpness", "center"});
        std::array<double, 3> center{0, 0, 0};
        if (j.contains("center")) center = as_point(j.at("center"), ctx + ".center");
        d = InitialData::gaussian(as_number(require_key(j, ctx, "amplitude"), ctx + ".amplitude"),
                                  as_number(require_key(j, ctx, "sharpness"), ctx + ".sharpness"),
                                  center);
    } else if (kind == "table") {
        reject_unknown_keys(j, ctx, {"kind", "values"});
        const json& vals = require_key(j, ctx, "values");
        if (!vals.is_array()) throw ConfigError(ctx + ".values: expected an array");
        std::vector<double> v;
        v.reserve(vals.size());
        for (const auto& x : vals) v.push_back(as_number(x, ctx + ".values"));
        d = InitialData::table_of(std::move(v));
    } else {
        throw ConfigError(ctx + ".kind: expected constant, gaussian or table, got '" + kind + "'");
    }
    d.validate();
    return d;
}

json initial_to_json(const InitialData& d, int dim) {
    json j;
    switch (d.kind) {
        case InitialKind::Constant:
            j["kind"] = "constant";
            j["value"] = d.value;
            break;
        case InitialKind::Gaussian: {
            j["kind"] = "gaussian";
            j["amplitude"] = d.amplitude;
            j["sharpness"] = d.sharpness;
            json c = json::array();
            for (int k = 0; k < dim; ++k) c.push_back(d.center[k]);
            j["center"] = c;
            break;
        }
        case InitialKind::Table:
            j["kind"] = "table";
            j["values"] = d.table;
            break;
    }
    return j;
}

ModelParams model_from_json(const json& j) {
    require_object(j, "model");
    reject_unknown_keys(j, "model", {"variant", "chi", "xi", "dt", "t_end", "cfl_safety"});
    ModelParams m;
    const std::string variant = as_string(require_key(j, "model", "variant"), "model.variant");
    if (variant == "attraction_only")
        m.variant = ModelVariant::AttractionOnly;
    else if (variant == "attraction_repulsion")
        m.variant = ModelVariant::AttractionRepulsion;
    else
        throw ConfigError("model.variant: expected attraction_only or attraction_repulsion");
    m.chi = as_number(require_key(j, "model", "chi"), "model.chi");
    if (j.contains("xi")) m.xi = as_number(j.at("xi"), "model.xi");
    m.dt = as_number(require_key(j, "model", "dt"), "model.dt");
    m.t_end = as_number(require_key(j, "model", "t_end"), "model.t_end");
    if (j.contains("cfl_safety")) m.cfl_safety = as_number(j.at("cfl_safety"), "model.cfl_safety");
    m.validate();
    return m;
}

OutputConfig output_from_json(const json& j) {
    require_object(j, "output");
    reject_unknown_keys(j, "output", {"every", "directory", "fields", "fields_every"});
    OutputConfig o;
    if (j.contains("every")) o.every = as_int(j.at("every"), "output.every");
    if (j.contains("directory")) o.directory = as_string(j.at("directory"), "output.directory");
    if (j.contains("fields")) {
        const std::string f = as_string(j.at("fields"), "output.fields");
        if (f == "none")
            o.fields = FieldsFormat::None;
        else if (f == "vtk")
            o.fields = FieldsFormat::Vtk;
        else if (f == "csv")
            o.fields = FieldsFormat::Csv;
        else
            throw ConfigError("output.fields: expected none, vtk or csv, got '" + f + "'");
    }
    if (j.contains("fields_every")) o.fields_every = as_int(j.at("fields_every"), "output.fields_every");
    return o;
}

Scenario scenario_from_json(const json& j, const std::string& origin) {
    require_object(j, origin);
    reject_unknown_keys(j, origin,
                        {"name", "domain", "cells_per_axis", "model", "initial", "output",
                         "halt_policy", "lyapunov"});
    Scenario s;
    s.name = as_string(require_key(j, origin, "name"), "name");
    s.domain = domain_from_json(require_key(j, origin, "domain"));

    const json& cells = require_key(j, origin, "cells_per_axis");
    if (!cells.is_array() || static_cast<int>(cells.size()) != s.domain.dim)
        throw ConfigError("cells_per_axis: expected " + std::to_string(s.domain.dim) +
                          " integers");
    s.cells_per_axis = {1, 1, 1};
    for (int d = 0; d < s.domain.dim; ++d)
        s.cells_per_axis[d] = as_int(cells[d], "cells_per_axis");

    s.model = model_from_json(require_key(j, origin, "model"));

    const json& init = require_key(j, origin, "initial");
    require_object(init, "initial");
    reject_unknown_keys(init, "initial", {"u", "v", "w"});
    s.u0 = initial_from_json(require_key(init, "initial", "u"), "initial.u");
    s.v0 = initial_from_json(require_key(init, "initial", "v"), "initial.v");
    if (init.contains("w")) s.w0 = initial_from_json(init.at("w"), "initial.w");

    if (j.contains("output")) s.output = output_from_json(j.at("output"));
    if (j.contains("halt_policy")) {
        const std::string hp = as_string(j.at("halt_policy"), "halt_policy");
        if (hp == "halt")
            s.halt_policy = HaltPolicy::Halt;
        else if (hp == "warn")
            s.halt_policy = HaltPolicy::Warn;
        else
            throw ConfigError("halt_policy: expected halt or warn, got '" + hp + "'");
    }
    if (j.contains("lyapunov")) {
        const json& ly = j.at("lyapunov");
        require_object(ly, "lyapunov");
        reject_unknown_keys(ly, "lyapunov", {"k"});
        s.lyapunov_k = as_number(require_key(ly, "lyapunov", "k"), "lyapunov.k");
    }
    s.validate();
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

std::string initial_signature_one(const InitialData& d) {
    switch (d.kind) {
        case InitialKind::Constant:
            return "const(" + fmt_g(d.value) + ")";
        case InitialKind::Gaussian:
            return "gaussian(a=" + fmt_g(d.amplitude) + ",s=" + fmt_g(d.sharpness) + ")";
        case InitialKind::Table:
            return "table(n=" + std::to_string(d.table.size()) + ")";
    }
    return "?";
}

std::string initial_signature(const Scenario& s) {
    std::string sig = "u=" + initial_signature_one(s.u0) + ";v=" + initial_signature_one(s.v0);
    if (s.w0) sig += ";w=" + initial_signature_one(*s.w0);
    return sig;
}

}  // namespace

void Scenario::validate() const {
    if (name.empty()) throw ConfigError("scenario: name must not be empty");
    domain.validate();
    model.validate();
    u0.validate();
    v0.validate();
    if (model.variant == ModelVariant::AttractionRepulsion) {
        if (!w0) throw ConfigError("scenario: attraction_repulsion requires initial.w");
        w0->validate();
    } else if (w0) {
        throw ConfigError("scenario: attraction_only does not take initial.w");
    }
    if (output.every < 1) throw ConfigError("scenario: output.every must be >= 1");
    if (output.fields_every < 0) throw ConfigError("scenario: output.fields_every must be >= 0");
    if (lyapunov_k && !(*lyapunov_k > 1.0))
        throw ConfigError("scenario: lyapunov.k must be > 1");
}

void SweepSpec::validate() const {
    if (parameter != "xi")
        throw ConfigError("sweep: unsupported parameter '" + parameter + "' (only xi)");
    if (values.empty()) throw ConfigError("sweep: values must not be empty");
    for (double v : values)
        if (v < 0.0) throw ConfigError("sweep: values must be >= 0");
    if (base.model.variant != ModelVariant::AttractionRepulsion)
        throw ConfigError("sweep: base scenario must use the attraction_repulsion variant");
    base.validate();
}

Scenario scenario_from_json_text(const std::string& text, const std::string& origin) {
    return scenario_from_json(parse_json(text, origin), origin);
}

Scenario load_scenario(const std::string& path) {
    if (is_preset(path)) return preset_scenario(path);
    return scenario_from_json_text(read_file(path), path);
}

SweepSpec sweep_from_json_text(const std::string& text, const std::string& origin) {
    const json j = parse_json(text, origin);
    require_object(j, origin);
    reject_unknown_keys(j, origin, {"base", "base_preset", "parameter", "values"});
    SweepSpec spec;
    if (j.contains("base") == j.contains("base_preset"))
        throw ConfigError(origin + ": exactly one of 'base' or 'base_preset' is required");
    if (j.contains("base"))
        spec.base = scenario_from_json(j.at("base"), origin + ".base");
    else
        spec.base = preset_scenario(as_string(j.at("base_preset"), "base_preset"));
    if (j.contains("parameter")) spec.parameter = as_string(j.at("parameter"), "parameter");
    const json& vals = require_key(j, origin, "values");
    if (!vals.is_array()) throw ConfigError("values: expected an array");
    for (const auto& v : vals) spec.values.push_back(as_number(v, "values"));
    spec.validate();
    return spec;
}

SweepSpec load_sweep(const std::string& path) {
    if (is_sweep_preset(path)) return preset_sweep(path);
    return sweep_from_json_text(read_file(path), path);
}

std::string scenario_to_json_text(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["domain"] = domain_to_json(s.domain);
    json cells = json::array();
    for (int d = 0; d < s.domain.dim; ++d) cells.push_back(s.cells_per_axis[d]);
    j["cells_per_axis"] = cells;
    json m;
    m["variant"] = s.model.variant == ModelVariant::AttractionOnly ? "attraction_only"
                                                                   : "attraction_repulsion";
    m["chi"] = s.model.chi;
    m["xi"] = s.model.xi;
    m["dt"] = s.model.dt;
    m["t_end"] = s.model.t_end;
    m["cfl_safety"] = s.model.cfl_safety;
    j["model"] = m;
    json init;
    init["u"] = initial_to_json(s.u0, s.domain.dim);
    init["v"] = initial_to_json(s.v0, s.domain.dim);
    if (s.w0) init["w"] = initial_to_json(*s.w0, s.domain.dim);
    j["initial"] = init;
    json o;
    o["every"] = s.output.every;
    if (!s.output.directory.empty()) o["directory"] = s.output.directory;
    o["fields"] = s.output.fields == FieldsFormat::None
                      ? "none"
                      : (s.output.fields == FieldsFormat::Vtk ? "vtk" : "csv");
    if (s.output.fields_every > 0) o["fields_every"] = s.output.fields_every;
    j["output"] = o;
    j["halt_policy"] = s.halt_policy == HaltPolicy::Halt ? "halt" : "warn";
    if (s.lyapunov_k) j["lyapunov"] = {{"k", *s.lyapunov_k}};
    return j.dump(2) + "\n";
}

// ---- presets ----------------------------------------------------------------

namespace {

Scenario make_circle2d() {
    Scenario s;
    s.name = "circle2d";
    s.domain = DomainSpec::disk(0.0, 0.0, 1.0, 1.0);
    s.cells_per_axis = {128, 128, 1};
    s.model.variant = ModelVariant::AttractionOnly;
    s.model.chi = 20.0;
    s.model.dt = 1e-5;
    s.model.t_end = 5e-3;
    s.u0 = InitialData::gaussian(20.0, 30.0);
    s.v0 = InitialData::gaussian(20.0, 30.0);
    s.output.every = 5;
    s.output.directory = "out/circle2d";
    return s;
}

Scenario make_sphere3d() {
    Scenario s;
    s.name = "sphere3d";
    s.domain = DomainSpec::ball(0.0, 0.0, 0.0, 1.0, 1.0);
    s.cells_per_axis = {64, 64, 64};
    s.model.variant = ModelVariant::AttractionOnly;
    s.model.chi = 20.0;
    s.model.dt = 1e-5;
    s.model.t_end = 2e-2;
    s.u0 = InitialData::gaussian(20.0, 30.0);
    s.v0 = InitialData::gaussian(20.0, 30.0);
    s.output.every = 10;
    s.output.directory = "out/sphere3d";
    return s;
}

Scenario make_lyapunov2d() {
    Scenario s;
    s.name = "lyapunov2d";
    s.domain = DomainSpec::disk(0.0, 0.0, 1.0, 1.0);
    s.cells_per_axis = {64, 64, 1};
    s.model.variant = ModelVariant::AttractionRepulsion;
    const double k = default_k(2);  // 1.5
    s.model.chi = 0.5 / (10.0 * k * 1.0);
    s.model.xi = s.model.chi;
    s.model.dt = 1e-5;
    s.model.t_end = 6e-3;  // 600 steps, no CFL clamping at these strengths
    s.u0 = InitialData::gaussian(20.0, 30.0);
    s.v0 = InitialData::gaussian(1.0, 30.0, {0.25, 0.0, 0.0});
    s.w0 = InitialData::gaussian(1.0, 30.0, {-0.25, 0.0, 0.0});
    s.lyapunov_k = k;
    s.output.every = 1;
    s.output.directory = "out/lyapunov2d";
    return s;
}

SweepSpec make_xisweep3d() {
    SweepSpec spec;
    Scenario s;
    s.name = "xisweep3d";
    s.domain = DomainSpec::ball(0.0, 0.0, 0.0, 1.0, 1.0);
    s.cells_per_axis = {32, 32, 32};
    s.model.variant = ModelVariant::AttractionRepulsion;
    s.model.chi = 20.0;
    s.model.xi = 0.0;
    s.model.dt = 1e-5;
    s.model.t_end = 1.5e-2;
    s.u0 = InitialData::gaussian(20.0, 30.0);
    s.v0 = InitialData::gaussian(20.0, 30.0);
    s.w0 = InitialData::gaussian(20.0, 30.0);
    s.output.every = 1;
    s.output.directory = "out/xisweep3d";
    spec.base = s;
    spec.parameter = "xi";
    spec.values = {0.0, 5.0, 10.0, 20.0};
    return spec;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"circle2d", "sphere3d", "lyapunov2d", "xisweep3d"};
}

std::string preset_description(const std::string& name) {
    if (name == "circle2d")
        return "unit disk, attraction-only, chi=20, Gaussian u0=v0 (128^2 cells)";
    if (name == "sphere3d")
        return "unit ball, attraction-only, chi=20, Gaussian u0=v0 (64^3 cells)";
    if (name == "lyapunov2d")
        return "unit disk, attraction-repulsion in the admissible range, E_k monitoring (64^2)";
    if (name == "xisweep3d")
        return "[sweep] unit ball, chi=20, xi in {0,5,10,20}, Gaussian u0=v0=w0 (32^3)";
    throw ConfigError("unknown preset '" + name + "'");
}

bool is_preset(const std::string& name) {
    return name == "circle2d" || name == "sphere3d" || name == "lyapunov2d";
}

bool is_sweep_preset(const std::string& name) { return name == "xisweep3d"; }

Scenario preset_scenario(const std::string& name) {
    if (name == "circle2d") return make_circle2d();
    if (name == "sphere3d") return make_sphere3d();
    if (name == "lyapunov2d") return make_lyapunov2d();
    if (is_sweep_preset(name))
        throw ConfigError("'" + name + "' is a sweep preset; use the sweep command");
    throw ConfigError("unknown preset or missing scenario file '" + name + "'");
}

SweepSpec preset_sweep(const std::string& name) {
    if (name == "xisweep3d") return make_xisweep3d();
    throw ConfigError("unknown sweep preset or missing sweep file '" + name + "'");
}

// ---- runners ----------------------------------------------------------------

ScenarioSummary run_scenario(const Scenario& s) {
    s.validate();
    const Grid grid = build_grid(s.domain, s.cells_per_axis);
    SimState state = make_state(grid, s.u0, s.v0, s.w0 ? &*s.w0 : nullptr);

    std::optional<LyapunovConfig> lcfg;
    if (s.lyapunov_k)
        lcfg = default_lyapunov_config(s.model, grid.dim, state.v_sup0, state.w_sup0,
                                       *s.lyapunov_k);
    const double lk_k = lcfg ? lcfg->k : default_k(grid.dim);

    ScenarioSummary sum;
    sum.name = s.name;
    sum.dim = grid.dim;
    sum.chi = s.model.chi;
    sum.xi = s.model.xi;
    sum.initial_signature = initial_signature(s);
    sum.out_dir = s.output.directory;

    const bool writing = !s.output.directory.empty();
    std::optional<SeriesWriter> writer;
    if (writing) {
        std::string meta = "name=" + s.name + " dim=" + std::to_string(grid.dim) +
                           " chi=" + fmt_g(s.model.chi) + " xi=" + fmt_g(s.model.xi) +
                           " lk_k=" + fmt_g(lk_k);
        if (lcfg) meta += " lyap_b=" + fmt17(lcfg->phi_upper_bound());
        const std::string path = s.output.directory + "/series.csv";
        writer.emplace(path, meta);
        sum.outputs.push_back(path);
    }

    const int fields_every = s.output.fields_every > 0 ? s.output.fields_every : s.output.every;
    auto snapshot = [&](const SimState& st) {
        if (!writing || s.output.fields == FieldsFormat::None) return;
        if (s.output.fields == FieldsFormat::Vtk) {
            std::vector<std::pair<std::string, const ScalarField*>> fields{{"u", &st.u},
                                                                           {"v", &st.v}};
            if (st.has_w) fields.emplace_back("w", &st.w);
            const std::string path =
                s.output.directory + "/fields_" + std::to_string(st.step) + ".vtk";
            write_vtk(path, grid, fields, st.step, st.t);
            sum.outputs.push_back(path);
        } else {
            const std::string base = s.output.directory + "/fields_" + std::to_string(st.step);
            write_field_csv(base + "_u.csv", grid, st.u);
            sum.outputs.push_back(base + "_u.csv");
            write_field_csv(base + "_v.csv", grid, st.v);
            sum.outputs.push_back(base + "_v.csv");
            if (st.has_w) {
                write_field_csv(base + "_w.csv", grid, st.w);
                sum.outputs.push_back(base + "_w.csv");
            }
        }
    };

    long last_snapshot_step = -1;
    RunHooks hooks;
    hooks.record_every = s.output.every;
    hooks.halt_policy = s.halt_policy;
    hooks.on_record = [&](const SimState& st, const StepOutcome* out) {
        const DiagnosticsRecord rec =
            collect_record(grid, st, out, lcfg ? &*lcfg : nullptr, lk_k);
        sum.series.push_back(rec);
        if (writer) writer->append(rec);
        if (st.step % fields_every == 0 && st.step != last_snapshot_step) {
            snapshot(st);
            last_snapshot_step = st.step;
        }
    };

    RunResult res = run(std::move(state), s.model, grid, hooks);

    sum.steps = res.steps;
    sum.halted = res.halted;
    sum.halt_reason = res.halt_reason;
    sum.any_cfl_clamped = res.any_cfl_clamped;
    sum.peak_max_u = res.peak_max_u;
    sum.peak_time = res.peak_time;
    if (!sum.series.empty()) sum.final_record = sum.series.back();
    if (res.state.step != last_snapshot_step) snapshot(res.state);

    if (writing) {
        writer->close();
        json j;
        j["name"] = sum.name;
        j["dim"] = sum.dim;
        j["chi"] = sum.chi;
        j["xi"] = sum.xi;
        j["initial_signature"] = sum.initial_signature;
        j["peak_max_u"] = sum.peak_max_u;
        j["peak_time"] = sum.peak_time;
        j["steps"] = sum.steps;
        j["halted"] = sum.halted;
        j["halt_reason"] = sum.halt_reason;
        j["cfl_clamped"] = sum.any_cfl_clamped;
        json fin;
        fin["t"] = sum.final_record.t;
        fin["mass_u"] = sum.final_record.mass_u;
        fin["max_u"] = sum.final_record.max_u;
        fin["min_u"] = sum.final_record.min_u;
        fin["max_v"] = sum.final_record.max_v;
        j["final"] = fin;
        const std::string spath = s.output.directory + "/summary.json";
        std::ofstream out(spath);
        if (!out) throw ConfigError("cannot open '" + spath + "' for writing");
        out << j.dump(2) << "\n";
        sum.outputs.push_back(spath);
    }
    return sum;
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult res;
    res.out_dir = spec.base.output.directory;

    for (double value : spec.values) {
        Scenario m = spec.base;
        m.model.xi = value;
        m.name = spec.base.name + "_xi" + fmt_g(value);
        if (!res.out_dir.empty()) m.output.directory = res.out_dir + "/xi_" + fmt_g(value);

        SweepMemberResult mr;
        mr.value = value;
        try {
            mr.summary = run_scenario(m);
        } catch (const std::exception& e) {
            mr.failed = true;
            mr.error = e.what();
        }
        res.members.push_back(std::move(mr));
    }

    if (!res.out_dir.empty()) {
        // Combined max-u table on shared time marks. Members may run on
        // different CFL-clamped time grids, so each contributes its first
        // record at or past the mark.
        const double t_end = spec.base.model.t_end;
        const int n_marks = 200;
        std::ofstream out;
        const std::string cpath = res.out_dir + "/combined_max_u.csv";
        std::filesystem::create_directories(res.out_dir);
        out.open(cpath);
        if (!out) throw ConfigError("cannot open '" + cpath + "' for writing");
        out << "t";
        for (const auto& m : res.members)
            if (!m.failed) out << ",max_u_xi_" << fmt_g(m.value);
        out << "\n";
        std::vector<size_t> cursor(res.members.size(), 0);
        for (int k = 0; k <= n_marks; ++k) {
            const double mark = t_end * k / n_marks;
            std::vector<double> row;
            bool complete = true;
            for (size_t i = 0; i < res.members.size(); ++i) {
                if (res.members[i].failed) continue;
                const auto& series = res.members[i].summary.series;
                size_t& c = cursor[i];
                while (c < series.size() && series[c].t < mark * (1.0 - 1e-12)) ++c;
                if (c >= series.size()) {
                    complete = false;
                    break;
                }
                row.push_back(series[c].max_u);
            }
            if (!complete) break;
            out << fmt17(mark);
            for (double v : row) out << ',' << fmt17(v);
            out << "\n";
        }
        out.close();
        res.outputs.push_back(cpath);

        json j = json::array();
        for (const auto& m : res.members) {
            json e;
            e["xi"] = m.value;
            e["failed"] = m.failed;
            if (m.failed) {
                e["error"] = m.error;
            } else {
                e["peak_max_u"] = m.summary.peak_max_u;
                e["peak_time"] = m.summary.peak_time;
                e["steps"] = m.summary.steps;
                e["halted"] = m.summary.halted;
                e["directory"] = m.summary.out_dir;
            }
            j.push_back(e);
        }
        const std::string spath = res.out_dir + "/sweep_summary.json";
        std::ofstream sout(spath);
        if (!sout) throw ConfigError("cannot open '" + spath + "' for writing");
        sout << j.dump(2) << "\n";
        res.outputs.push_back(spath);
    }
    return res;
}

Comparison2d3d compare_2d_3d(const ScenarioSummary& a, const ScenarioSummary& b) {
    const ScenarioSummary* s2 = nullptr;
    const ScenarioSummary* s3 = nullptr;
    for (const ScenarioSummary* s : {&a, &b}) {
        if (s->dim == 2) s2 = s;
        if (s->dim == 3) s3 = s;
    }
    if (s2 == nullptr || s3 == nullptr)
        throw ConfigError("compare_2d_3d: need one 2D and one 3D summary (got dims " +
                          std::to_string(a.dim) + " and " + std::to_string(b.dim) + ")");
    if (s2->chi != s3->chi)
        throw ConfigError("compare_2d_3d: chi differs (" + fmt_g(s2->chi) + " vs " +
                          fmt_g(s3->chi) + ")");
    if (s2->initial_signature != s3->initial_signature)
        throw ConfigError("compare_2d_3d: initial data differ (" + s2->initial_signature +
                          " vs " + s3->initial_signature + ")");

    Comparison2d3d c;
    c.peak_time_2d = s2->peak_time;
    c.peak_value_2d = s2->peak_max_u;
    c.peak_time_3d = s3->peak_time;
    c.peak_value_3d = s3->peak_max_u;
    c.peak_earlier_in_2d = c.peak_time_2d < c.peak_time_3d;
    c.peak_larger_in_3d = c.peak_value_3d > c.peak_value_2d;
    c.conclusive = c.peak_earlier_in_2d && c.peak_larger_in_3d;
    return c;
}

std::string Comparison2d3d::table() const {
    std::ostringstream ss;
    ss << "            peak time      peak max u\n";
    ss << "  2d        " << fmt_g(peak_time_2d) << "\t" << fmt_g(peak_value_2d) << "\n";
    ss << "  3d        " << fmt_g(peak_time_3d) << "\t" << fmt_g(peak_value_3d) << "\n";
    ss << "  2d peaks earlier:  " << (peak_earlier_in_2d ? "yes" : "NO") << "\n";
    ss << "  3d peak is larger: " << (peak_larger_in_3d ? "yes" : "NO") << "\n";
    if (!conclusive) ss << "  orderings inconclusive\n";
    return ss.str();
}

std::vector<std::string> check_series_file(const std::string& path) {
    const SeriesFile sf = read_series_csv(path);
    std::vector<std::string> problems;
    auto bad = [&](size_t row, const std::string& msg) {
        problems.push_back("row " + std::to_string(row) + " (t=" +
                           fmt_g(sf.records.empty() ? 0.0 : sf.records[row].t) + "): " + msg);
    };
    if (sf.records.empty()) return {"series has no data rows"};

    const DiagnosticsRecord& first = sf.records.front();
    if (!(first.mass_u > 0.0)) return {"initial mass is not positive"};
    double k = 0.0, b = 0.0;
    const bool have_lyap_meta =
        sf.meta.count("lk_k") > 0 && sf.meta.count("lyap_b") > 0;
    if (have_lyap_meta) {
        k = std::stod(sf.meta.at("lk_k"));
        b = std::stod(sf.meta.at("lyap_b"));
    }

    double prev_t = -std::numeric_limits<double>::infinity();
    double prev_max_v = first.max_v;
    double prev_max_w = first.max_w;
    for (size_t i = 0; i < sf.records.size(); ++i) {
        const DiagnosticsRecord& r = sf.records[i];
        if (!(r.t > prev_t) && i > 0) bad(i, "time does not increase");
        prev_t = r.t;

        if (std::abs(r.mass_u - first.mass_u) > 1e-8 * first.mass_u)
            bad(i, "mass drift exceeds 1e-8 relative");
        if (r.min_u > r.max_u) bad(i, "min_u > max_u");
        if (r.min_v > r.max_v) bad(i, "min_v > max_v");
        if (r.min_u < -1e-12) bad(i, "u dips below -1e-12");
        if (r.min_v < -1e-12) bad(i, "v dips below -1e-12");
        if (r.max_v > first.max_v + 1e-9) bad(i, "max_v exceeds its initial value");
        if (i > 0 && r.max_v > prev_max_v + 1e-9) bad(i, "max_v increased");
        prev_max_v = r.max_v;
        const bool has_w = !std::isnan(r.min_w);
        if (has_w != !std::isnan(first.min_w)) bad(i, "w columns appear and disappear");
        if (has_w) {
            if (r.min_w > r.max_w) bad(i, "min_w > max_w");
            if (r.min_w < -1e-12) bad(i, "w dips below -1e-12");
            if (r.max_w > first.max_w + 1e-9) bad(i, "max_w exceeds its initial value");
            if (i > 0 && r.max_w > prev_max_w + 1e-9) bad(i, "max_w increased");
            prev_max_w = r.max_w;
        }
        if (!std::isfinite(r.lk_u) || r.lk_u < 0.0) bad(i, "lk_u is not a finite nonnegative value");
        if (!std::isnan(r.lyapunov) && have_lyap_meta) {
            const double uk = std::pow(r.lk_u, k);
            if (r.lyapunov < uk * (1.0 - 1e-9) || r.lyapunov > b * uk * (1.0 + 1e-9))
                bad(i, "lyapunov value outside [int u^k, b int u^k]");
        }
    }
    return problems;
}

}  // namespace taxisim
