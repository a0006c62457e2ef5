#include "taxisim/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>

#include "taxisim/errors.hpp"

namespace taxisim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

double mass(const Grid& grid, const ScalarField& f) {
    if (f.size() != grid.num_active()) throw ConfigError("mass: field size does not match grid");
    double s = 0.0;
    for (double x : f.values) s += x;
    return s * grid.cell_volume;
}

double lk_norm(const Grid& grid, const ScalarField& f, double k) {
    if (f.size() != grid.num_active())
        throw ConfigError("lk_norm: field size does not match grid");
    if (!(k >= 1.0)) throw ConfigError("lk_norm: k must be >= 1");
    double s = 0.0;
    for (double x : f.values) {
        if (x < -kNonnegSlack)
            throw ConfigError("lk_norm: field has negative values (min entry " + fmt(x) + ")");
        s += std::pow(std::max(x, 0.0), k);
    }
    return std::pow(s * grid.cell_volume, 1.0 / k);
}

double LyapunovConfig::phi_upper_bound() const {
    return std::exp(beta_sq * v_sup0 * v_sup0 + gamma_sq * w_sup0 * w_sup0);
}

LyapunovConfig default_lyapunov_config(const ModelParams& params, int dim, double v_sup0,
                                       double w_sup0, double k) {
    if (!(k > 1.0)) throw ConfigError("lyapunov config: k must be > 1");
    if (!(v_sup0 > 0.0)) throw ConfigError("lyapunov config: v_sup0 must be > 0");
    (void)dim;

    LyapunovConfig cfg;
    cfg.k = k;
    cfg.has_repulsion = params.variant == ModelVariant::AttractionRepulsion;
    cfg.v_sup0 = v_sup0;
    cfg.w_sup0 = cfg.has_repulsion ? w_sup0 : 0.0;

    const double chi_max = 1.0 / (10.0 * k * v_sup0);
    if (!(params.chi > 0.0 && params.chi < chi_max))
        throw ConfigError("lyapunov config: chi=" + fmt(params.chi) +
                          " outside the admissible range (0, 1/(10 k sup v0)) = (0, " +
                          fmt(chi_max) + ")");
    if (cfg.has_repulsion) {
        if (!(w_sup0 > 0.0)) throw ConfigError("lyapunov config: w_sup0 must be > 0");
        const double xi_max = 1.0 / (10.0 * k * w_sup0);
        if (!(params.xi > 0.0 && params.xi < xi_max))
            throw ConfigError("lyapunov config: xi=" + fmt(params.xi) +
                              " outside the admissible range (0, 1/(10 k sup w0)) = (0, " +
                              fmt(xi_max) + ")");
    }

    // Split the budget of the admissible set
    //   eps1^2 + chi (k-1)/2 eps2^2 + eps3^2 + xi (k-1)/2 eps4^2 < k-1
    // evenly across the active terms, shrunk by 0.99 to stay strictly inside.
    cfg.eps1_sq = 0.99 * (k - 1.0) / 4.0;
    cfg.eps2_sq = 0.99 / (2.0 * params.chi);
    if (cfg.has_repulsion) {
        cfg.eps3_sq = 0.99 * (k - 1.0) / 4.0;
        cfg.eps4_sq = 0.99 / (2.0 * params.xi);
    }

    cfg.beta_sq = cfg.eps1_sq / (10.0 * k * v_sup0 * v_sup0);
    cfg.gamma_sq =
        cfg.has_repulsion ? cfg.eps3_sq / (10.0 * k * cfg.w_sup0 * cfg.w_sup0) : 0.0;

    const double budget = cfg.eps1_sq + params.chi * (k - 1.0) / 2.0 * cfg.eps2_sq +
                          cfg.eps3_sq + params.xi * (k - 1.0) / 2.0 * cfg.eps4_sq;
    if (!(budget < k - 1.0))
        throw ConfigError("lyapunov config: epsilon tuple left the admissible set (" +
                          fmt(budget) + " >= " + fmt(k - 1.0) + ")");
    return cfg;
}

double lyapunov(const Grid& grid, const SimState& state, const LyapunovConfig& cfg) {
    if (state.u.size() != grid.num_active())
        throw ConfigError("lyapunov: state does not match grid");
    const bool use_w = cfg.has_repulsion && state.has_w;
    double s = 0.0;
    for (int i = 0; i < state.u.size(); ++i) {
        double arg = cfg.beta_sq * state.v[i] * state.v[i];
        if (use_w) arg += cfg.gamma_sq * state.w[i] * state.w[i];
        if (arg > 700.0)
            throw ConfigError("lyapunov: exponent argument " + fmt(arg) +
                              " exceeds 700; beta2/gamma2 are misconfigured");
        const double u = state.u[i];
        if (u < -kNonnegSlack)
            throw ConfigError("lyapunov: u has negative values (entry " + fmt(u) + ")");
        s += std::pow(std::max(u, 0.0), cfg.k) * std::exp(arg);
    }
    return s * grid.cell_volume;
}

ThresholdReport thresholds(int n, double v_sup0, double w_sup0, std::optional<double> k) {
    if (n < 2) throw ConfigError("thresholds: dimension must be >= 2");
    if (!(v_sup0 > 0.0)) throw ConfigError("thresholds: v_sup0 must be > 0");
    if (w_sup0 < 0.0) throw ConfigError("thresholds: w_sup0 must be >= 0");

    ThresholdReport r;
    r.n = n;
    r.v_sup0 = v_sup0;
    r.w_sup0 = w_sup0;
    r.k = k.value_or(default_k(n));
    if (!(r.k > 1.0)) throw ConfigError("thresholds: k must be > 1");

    r.chi_max_theorem = 1.0 / (5.0 * n * v_sup0);
    r.chi_max_lemma_k = 1.0 / (10.0 * r.k * v_sup0);
    r.chi_interval_attraction_only = 2.0 / (3.0 * n * v_sup0);
    r.chi_sup_limit_attr_rep = 2.0 / (5.0 * n * v_sup0);
    r.reference_taoboun = 1.0 / (6.0 * (n + 1) * v_sup0);
    r.reference_baghaei = M_PI / (v_sup0 * std::sqrt(2.0 * (n + 1)));
    if (w_sup0 > 0.0) {
        r.xi_max_theorem = 1.0 / (5.0 * n * w_sup0);
        r.xi_max_lemma_k = 1.0 / (10.0 * r.k * w_sup0);
    }
    return r;
}

DiagnosticsRecord collect_record(const Grid& grid, const SimState& state,
                                 const StepOutcome* outcome, const LyapunovConfig* cfg,
                                 double lk_exponent) {
    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.mass_u = mass(grid, state.u);
    std::tie(rec.min_u, rec.max_u) = field_extrema(state.u);
    std::tie(rec.min_v, rec.max_v) = field_extrema(state.v);
    if (state.has_w) {
        std::tie(rec.min_w, rec.max_w) = field_extrema(state.w);
    } else {
        rec.min_w = rec.max_w = kNaN;
    }
    rec.lk_u = lk_norm(grid, state.u, lk_exponent);
    rec.lyapunov = cfg != nullptr ? lyapunov(grid, state, *cfg) : kNaN;
    if (outcome != nullptr) {
        if (outcome->cfl_clamped) rec.flags.push_back("cfl_clamped");
        if (outcome->bound_violation) rec.flags.push_back("bound_violation");
        for (const auto& v : outcome->violations) rec.flags.push_back(v);
    }
    return rec;
}

std::string csv_header() {
    return "t,mass_u,min_u,max_u,min_v,max_v,min_w,max_w,lk_u,lyapunov,flags";
}

std::string to_csv_row(const DiagnosticsRecord& rec) {
    std::string s;
    s.reserve(256);
    s += fmt(rec.t);
    for (double x : {rec.mass_u, rec.min_u, rec.max_u, rec.min_v, rec.max_v, rec.min_w,
                     rec.max_w, rec.lk_u, rec.lyapunov}) {
        s += ',';
        s += fmt(x);
    }
    s += ',';
    for (size_t i = 0; i < rec.flags.size(); ++i) {
        if (i > 0) s += ';';
        s += rec.flags[i];
    }
    return s;
}

DiagnosticsRecord parse_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(cur);
    if (cells.size() != 11)
        throw ConfigError("series row has " + std::to_string(cells.size()) +
                          " columns, expected 11: " + line);
    auto num = [&](int idx) {
        try {
            size_t pos = 0;
            const double v = std::stod(cells[idx], &pos);
            if (pos != cells[idx].size()) throw std::invalid_argument("trailing junk");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("bad numeric value '" + cells[idx] + "' in series row: " + line);
        }
    };
    DiagnosticsRecord rec;
    rec.t = num(0);
    rec.mass_u = num(1);
    rec.min_u = num(2);
    rec.max_u = num(3);
    rec.min_v = num(4);
    rec.max_v = num(5);
    rec.min_w = num(6);
    rec.max_w = num(7);
    rec.lk_u = num(8);
    rec.lyapunov = num(9);
    std::stringstream fs(cells[10]);
    std::string flag;
    while (std::getline(fs, flag, ';'))
        if (!flag.empty()) rec.flags.push_back(flag);
    return rec;
}

}  // namespace taxisim
