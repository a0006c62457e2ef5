#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "taxisim/diagnostics.hpp"
#include "taxisim/errors.hpp"
#include "taxisim/experiments.hpp"
#include "taxisim/linsolve.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInvariantHalt = 3;
constexpr int kExitSolverFailure = 4;

void print_summary(const taxisim::ScenarioSummary& sum) {
    std::printf("run %s: %ld steps, peak max_u %.6g at t=%.6g%s\n", sum.name.c_str(), sum.steps,
                sum.peak_max_u, sum.peak_time, sum.any_cfl_clamped ? " (cfl clamped)" : "");
    std::printf("  final: t=%.6g mass_u=%.9g max_u=%.6g max_v=%.6g\n", sum.final_record.t,
                sum.final_record.mass_u, sum.final_record.max_u, sum.final_record.max_v);
    for (const auto& p : sum.outputs) std::printf("  wrote %s\n", p.c_str());
}

int cmd_run(const std::string& target, const std::string& out_dir, int cells) {
    taxisim::Scenario s = taxisim::load_scenario(target);
    if (!out_dir.empty()) s.output.directory = out_dir;
    if (cells > 0)
        for (int d = 0; d < s.domain.dim; ++d) s.cells_per_axis[d] = cells;
    const taxisim::ScenarioSummary sum = taxisim::run_scenario(s);
    print_summary(sum);
    if (sum.halted) {
        std::fprintf(stderr, "halted: invariant violation (%s) at step %ld\n",
                     sum.halt_reason.c_str(), sum.steps);
        return kExitInvariantHalt;
    }
    return kExitOk;
}

int cmd_sweep(const std::string& target, const std::string& out_dir) {
    taxisim::SweepSpec spec = taxisim::load_sweep(target);
    if (!out_dir.empty()) spec.base.output.directory = out_dir;
    const taxisim::SweepResult res = taxisim::run_sweep(spec);
    bool any_failed = false;
    bool any_halted = false;
    for (const auto& m : res.members) {
        if (m.failed) {
            std::printf("xi=%-8g FAILED: %s\n", m.value, m.error.c_str());
            any_failed = true;
        } else {
            std::printf("xi=%-8g peak max_u %.6g at t=%.6g (%ld steps)%s\n", m.value,
                        m.summary.peak_max_u, m.summary.peak_time, m.summary.steps,
                        m.summary.halted ? " [halted]" : "");
            any_halted = any_halted || m.summary.halted;
        }
    }
    for (const auto& p : res.outputs) std::printf("wrote %s\n", p.c_str());
    if (any_failed) return kExitSolverFailure;
    if (any_halted) return kExitInvariantHalt;
    return kExitOk;
}

int cmd_thresholds(int n, double vsup, double wsup, double k, bool as_json) {
    const taxisim::ThresholdReport r =
        taxisim::thresholds(n, vsup, wsup, k > 0 ? std::optional<double>(k) : std::nullopt);
    if (as_json) {
        nlohmann::json j;
        j["n"] = r.n;
        j["v_sup0"] = r.v_sup0;
        j["w_sup0"] = r.w_sup0;
        j["k"] = r.k;
        j["chi_max_theorem"] = r.chi_max_theorem;
        j["xi_max_theorem"] = r.xi_max_theorem;
        j["chi_max_lemma_k"] = r.chi_max_lemma_k;
        j["xi_max_lemma_k"] = r.xi_max_lemma_k;
        j["chi_interval_attraction_only"] = r.chi_interval_attraction_only;
        j["chi_sup_limit_attr_rep"] = r.chi_sup_limit_attr_rep;
        j["reference_taoboun"] = r.reference_taoboun;
        j["reference_baghaei"] = r.reference_baghaei;
        std::printf("%s\n", j.dump(2).c_str());
        return kExitOk;
    }
    std::string wsup_note;
    if (r.w_sup0 > 0) wsup_note = ", sup w0=" + std::to_string(r.w_sup0);
    std::printf("admissible chemotaxis strengths (n=%d, sup v0=%g%s, k=%g)\n", r.n, r.v_sup0,
                wsup_note.c_str(), r.k);
    std::printf("  chi_max_theorem               = %.10g   [1/(5 n sup v0)]\n", r.chi_max_theorem);
    if (r.w_sup0 > 0)
        std::printf("  xi_max_theorem                = %.10g   [1/(5 n sup w0)]\n",
                    r.xi_max_theorem);
    std::printf("  chi_max_lemma(k)              = %.10g   [1/(10 k sup v0)]\n", r.chi_max_lemma_k);
    if (r.w_sup0 > 0)
        std::printf("  xi_max_lemma(k)               = %.10g   [1/(10 k sup w0)]\n",
                    r.xi_max_lemma_k);
    std::printf("  chi_interval_attraction_only  = %.10g   [2/(3 n sup v0)]\n",
                r.chi_interval_attraction_only);
    std::printf("  chi_sup_limit_attr_rep        = %.10g   [2/(5 n sup v0)]\n",
                r.chi_sup_limit_attr_rep);
    std::printf("  reference_taoboun             = %.10g   [1/(6 (n+1) sup v0)]\n",
                r.reference_taoboun);
    std::printf("  reference_baghaei             = %.10g   [pi/(sup v0 sqrt(2(n+1)))]\n",
                r.reference_baghaei);
    return kExitOk;
}

int cmd_check(const std::string& path) {
    const auto problems = taxisim::check_series_file(path);
    if (problems.empty()) {
        std::printf("%s: all invariants hold\n", path.c_str());
        return kExitOk;
    }
    for (const auto& p : problems) std::fprintf(stderr, "%s: %s\n", path.c_str(), p.c_str());
    return kExitInvariantHalt;
}

int cmd_presets() {
    for (const auto& name : taxisim::preset_names())
        std::printf("%-12s %s\n", name.c_str(), taxisim::preset_description(name).c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-volume simulator for chemotaxis systems with consumed signals"};
    app.require_subcommand(1);

    std::string run_target, run_out;
    int run_cells = 0;
    auto* run_cmd = app.add_subcommand("run", "run a scenario file or preset");
    run_cmd->add_option("scenario", run_target, "scenario JSON file or preset name")->required();
    run_cmd->add_option("--out", run_out, "override the output directory");
    run_cmd->add_option("--cells", run_cells, "override cells per axis (all axes)");

    std::string sweep_target, sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep file or preset");
    sweep_cmd->add_option("sweep", sweep_target, "sweep JSON file or preset name")->required();
    sweep_cmd->add_option("--out", sweep_out, "override the output directory");

    int th_n = 0;
    double th_vsup = 0.0, th_wsup = 0.0, th_k = 0.0;
    bool th_json = false;
    auto* th_cmd = app.add_subcommand("thresholds", "admissible chi/xi thresholds");
    th_cmd->add_option("--n", th_n, "space dimension")->required();
    th_cmd->add_option("--vsup", th_vsup, "sup of the initial chemoattractant")->required();
    th_cmd->add_option("--wsup", th_wsup, "sup of the initial chemorepellent");
    th_cmd->add_option("--k", th_k, "functional exponent (default n/2 + 0.5)");
    th_cmd->add_flag("--json", th_json, "emit JSON");

    std::string check_path;
    auto* check_cmd = app.add_subcommand("check", "re-validate an emitted series.csv");
    check_cmd->add_option("csv", check_path, "series.csv path")->required();

    auto* presets_cmd = app.add_subcommand("presets", "list built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_target, run_out, run_cells);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_target, sweep_out);
        if (th_cmd->parsed()) return cmd_thresholds(th_n, th_vsup, th_wsup, th_k, th_json);
        if (check_cmd->parsed()) return cmd_check(check_path);
        if (presets_cmd->parsed()) return cmd_presets();
    } catch (const taxisim::SolveFailure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kExitSolverFailure;
    } catch (const taxisim::InvariantViolation& e) {
        std::fprintf(stderr, "invariant violation: %s\n", e.what());
        return kExitInvariantHalt;
    } catch (const taxisim::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitOk;
}
