#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taxisim/diagnostics.hpp"
#include "taxisim/fields.hpp"
#include "taxisim/geometry.hpp"
#include "taxisim/stepper.hpp"

namespace taxisim {

enum class FieldsFormat { None, Vtk, Csv };

struct OutputConfig {
    int every = 1;               // record cadence in steps
    std::string directory;       // empty: keep everything in memory, write nothing
    FieldsFormat fields = FieldsFormat::None;
    int fields_every = 0;        // snapshot cadence in steps; 0 = follow `every`
};

/// A fully specified run: domain, resolution, model, initial data, outputs.
struct Scenario {
    std::string name;
    DomainSpec domain;
    std::array<int, 3> cells_per_axis{8, 8, 8};
    ModelParams model;
    InitialData u0;
    InitialData v0;
    std::optional<InitialData> w0;  // required for attraction_repulsion
    OutputConfig output;
    HaltPolicy halt_policy = HaltPolicy::Halt;
    std::optional<double> lyapunov_k;  // attach the E_k column when set

    void validate() const;  // throws ConfigError
};

struct ScenarioSummary {
    std::string name;
    int dim = 0;
    double chi = 0.0;
    double xi = 0.0;
    std::string initial_signature;  // dimension-free digest of the initial profiles
    double peak_max_u = 0.0;
    double peak_time = 0.0;
    long steps = 0;
    bool halted = false;
    std::string halt_reason;
    bool any_cfl_clamped = false;
    DiagnosticsRecord final_record;
    std::vector<DiagnosticsRecord> series;  // at record cadence, t=0 first
    std::string out_dir;                    // empty if nothing was written
    std::vector<std::string> outputs;       // files written
};

struct SweepSpec {
    Scenario base;
    std::string parameter = "xi";  // only "xi" is supported
    std::vector<double> values;

    void validate() const;
};

struct SweepMemberResult {
    double value = 0.0;
    bool failed = false;
    std::string error;
    ScenarioSummary summary;  // valid when !failed
};

struct SweepResult {
    std::vector<SweepMemberResult> members;
    std::string out_dir;
    std::vector<std::string> outputs;
};

struct Comparison2d3d {
    double peak_time_2d = 0.0, peak_value_2d = 0.0;
    double peak_time_3d = 0.0, peak_value_3d = 0.0;
    bool peak_earlier_in_2d = false;  // 2D argmax time < 3D argmax time
    bool peak_larger_in_3d = false;   // 3D peak value > 2D peak value
    bool conclusive = false;          // both orderings strict
    std::string table() const;
};

/// Strict JSON loaders: unknown keys are errors, messages carry the offending
/// field (or parse position).
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text, const std::string& origin);
SweepSpec load_sweep(const std::string& path);
SweepSpec sweep_from_json_text(const std::string& text, const std::string& origin);

/// Built-in presets.
std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
bool is_preset(const std::string& name);
Scenario preset_scenario(const std::string& name);   // throws ConfigError if unknown/not a scenario
bool is_sweep_preset(const std::string& name);
SweepSpec preset_sweep(const std::string& name);

/// Executes a scenario: builds grid and state, runs, writes series/snapshots/
/// summary under output.directory (when set), and returns the summary.
ScenarioSummary run_scenario(const Scenario& s);

/// Independent member runs (failures recorded per member, sweep continues),
/// plus a combined max-u table on shared time marks.
SweepResult run_sweep(const SweepSpec& spec);

/// Peak-ordering comparison between one 2D and one 3D run of the same model.
Comparison2d3d compare_2d_3d(const ScenarioSummary& a, const ScenarioSummary& b);

/// Re-validates an emitted series.csv. Returns human-readable problems
/// (empty vector = all invariants hold).
std::vector<std::string> check_series_file(const std::string& path);

std::string scenario_to_json_text(const Scenario& s);  // round-trip aid

}  // namespace taxisim
