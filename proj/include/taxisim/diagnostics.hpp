#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taxisim/fields.hpp"
#include "taxisim/geometry.hpp"
#include "taxisim/stepper.hpp"

namespace taxisim {

/// Volume-weighted total: sum_c V_c f_c.
double mass(const Grid& grid, const ScalarField& f);

/// (sum_c V_c f_c^k)^(1/k). Requires f >= 0 (within round-off slack) and k >= 1.
double lk_norm(const Grid& grid, const ScalarField& f, double k);

/// Parameters of the weighted energy functional
///   E_k(u,v,w) = sum_c V_c u_c^k exp(beta2 v_c^2 + gamma2 w_c^2).
/// Its decay along trajectories is what the boundedness theory rests on, so
/// it is monitored (with tolerance) rather than enforced.
struct LyapunovConfig {
    double k = 2.0;
    double eps1_sq = 0.0;
    double eps2_sq = 0.0;
    double eps3_sq = 0.0;  // 0 when repulsion absent
    double eps4_sq = 0.0;
    double beta_sq = 0.0;
    double gamma_sq = 0.0;  // 0 when repulsion absent
    bool has_repulsion = false;
    double v_sup0 = 0.0;
    double w_sup0 = 0.0;

    /// exp bound b with 1 <= phi <= b over the admissible (v,w) box.
    double phi_upper_bound() const;
};

/// Builds the canonical epsilon/beta/gamma choice for exponent k, splitting the
/// admissible budget evenly (with a 0.99 margin) across the four epsilon terms.
/// Errors if chi (or xi, when repulsion is on) is outside the admissible range
/// 1/(10 k sup) for this k.
LyapunovConfig default_lyapunov_config(const ModelParams& params, int dim, double v_sup0,
                                       double w_sup0, double k);

/// E_k for the given state. Errors if the exponent argument exceeds 700
/// (sign of misconfigured beta2/gamma2; exp would overflow).
double lyapunov(const Grid& grid, const SimState& state, const LyapunovConfig& cfg);

/// Admissible chemotaxis-strength thresholds implied by the boundedness theory
/// and the conditions quoted from earlier work, all scaled by the initial
/// chemical suprema.
struct ThresholdReport {
    int n = 2;
    double v_sup0 = 0.0;
    double w_sup0 = 0.0;
    double k = 0.0;

    double chi_max_theorem = 0.0;              // 1/(5 n v_sup0)
    double xi_max_theorem = 0.0;               // 1/(5 n w_sup0)
    double chi_max_lemma_k = 0.0;              // 1/(10 k v_sup0)
    double xi_max_lemma_k = 0.0;               // 1/(10 k w_sup0)
    double chi_interval_attraction_only = 0.0; // 2/(3 n v_sup0)
    double chi_sup_limit_attr_rep = 0.0;       // 2/(5 n v_sup0)
    double reference_taoboun = 0.0;            // 1/(6 (n+1) v_sup0)
    double reference_baghaei = 0.0;            // pi/(v_sup0 sqrt(2(n+1)))
};

/// k defaults to n/2 + 0.5 when not given. w_sup0 <= 0 leaves the xi entries at 0.
ThresholdReport thresholds(int n, double v_sup0, double w_sup0 = 0.0,
                           std::optional<double> k = std::nullopt);

/// Default functional exponent: just above n/2.
inline double default_k(int dim) { return dim / 2.0 + 0.5; }

/// One per-step diagnostics row. CSV column order is fixed:
/// t, mass_u, min_u, max_u, min_v, max_v, min_w, max_w, lk_u, lyapunov, flags.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_u = 0.0;
    double min_u = 0.0, max_u = 0.0;
    double min_v = 0.0, max_v = 0.0;
    double min_w = 0.0, max_w = 0.0;  // NaN when the run has no w
    double lk_u = 0.0;
    double lyapunov = 0.0;  // NaN when no valid config is attached
    std::vector<std::string> flags;
};

/// Computes a record from a state; `outcome` (may be null) contributes flags,
/// `cfg` (may be null) the E_k column.
DiagnosticsRecord collect_record(const Grid& grid, const SimState& state,
                                 const StepOutcome* outcome, const LyapunovConfig* cfg,
                                 double lk_exponent);

std::string csv_header();
std::string to_csv_row(const DiagnosticsRecord& rec);
DiagnosticsRecord parse_csv_row(const std::string& line);  // throws ConfigError on bad rows

}  // namespace taxisim
