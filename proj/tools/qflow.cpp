// qflow: maximal classically-forbidden probability flow for quantum
// backflow against a constant force and for quantum reentry, via the shared
// half-line integral eigenproblem.
//
// Subcommands: eigen, cbm, sweep, flux, prob, equiv.
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qflow/eigenproblem.hpp"
#include "qflow/errors.hpp"
#include "qflow/flux.hpp"
#include "qflow/grid.hpp"
#include "qflow/params.hpp"
#include "qflow/states.hpp"
#include "qflow/version.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr std::size_t kMaxNodes = 10000;

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class nonfinite_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct OutputTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_meta(const std::string& key, const std::string& value) {
        meta.emplace_back(key, value);
    }
    void add_meta(const std::string& key, double value) {
        meta.emplace_back(key, format_double(value));
    }
};

void check_finite(const OutputTable& table) {
    for (const auto& row : table.rows)
        for (const double v : row)
            if (!std::isfinite(v)) throw nonfinite_error("non-finite value in output row");
}

std::string render_csv(const OutputTable& t) {
    std::ostringstream os;
    for (const auto& [k, v] : t.meta) os << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
    return os.str();
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string render_json(const OutputTable& t) {
    std::ostringstream os;
    os << "{\n  \"meta\": {";
    for (std::size_t i = 0; i < t.meta.size(); ++i)
        os << (i ? "," : "") << "\n    \"" << json_escape(t.meta[i].first) << "\": \""
           << json_escape(t.meta[i].second) << "\"";
    os << "\n  },\n  \"rows\": [";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        os << (r ? "," : "") << "\n    {";
        for (std::size_t i = 0; i < t.rows[r].size(); ++i)
            os << (i ? ", " : "") << "\"" << json_escape(t.columns[i])
               << "\": " << format_double(t.rows[r][i]);
        os << "}";
    }
    os << "\n  ]\n}\n";
    return os.str();
}

struct CommonOpts {
    std::string out;
    std::string format = "csv";
    std::string config_path;
    unsigned seed = 0;
    bool quiet = false;
    json config;  // loaded from config_path
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--out", c.out, "Output file path (stdout when empty)");
    sub->add_option("--format", c.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--config", c.config_path, "JSON config file; flags override it");
    sub->add_option("--seed", c.seed, "Seed for randomized test-state generation");
    sub->add_flag("--quiet", c.quiet, "Suppress status messages");
}

void load_config(CommonOpts& c) {
    if (c.config_path.empty()) return;
    std::ifstream in(c.config_path);
    if (!in) throw config_error("cannot open config file: " + c.config_path);
    try {
        in >> c.config;
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
}

template <typename T>
void cfg_override(const CommonOpts& c, const CLI::Option* opt, const char* key, T& var) {
    if (opt->count() == 0 && c.config.contains(key)) {
        try {
            var = c.config.at(key).get<T>();
        } catch (const json::exception& e) {
            throw config_error(std::string("config field '") + key + "': " + e.what());
        }
    }
}

void emit(const OutputTable& table, const CommonOpts& c) {
    check_finite(table);
    const std::string text = c.format == "json" ? render_json(table) : render_csv(table);
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(c.out, std::ios::binary);
    if (!out) throw config_error("cannot open output file: " + c.out);
    out << text;
    if (!c.quiet) std::cout << "wrote " << c.out << "\n";
}

// ---- state-spec mini-grammar: family:key=val,key=val ---------------------

struct StateSpec {
    std::string family;
    std::map<std::string, double> kv;

    double get(const std::string& key, std::optional<double> fallback = std::nullopt) const {
        auto it = kv.find(key);
        if (it != kv.end()) return it->second;
        if (fallback) return *fallback;
        throw config_error("state spec missing key '" + key + "' for family " + family);
    }
    bool has(const std::string& key) const { return kv.count(key) != 0; }
};

StateSpec parse_state_spec(const std::string& text) {
    StateSpec spec;
    const auto colon = text.find(':');
    spec.family = text.substr(0, colon);
    if (spec.family.empty()) throw config_error("empty state family");
    if (colon == std::string::npos) return spec;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw config_error("bad state spec item: " + item);
        try {
            spec.kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw config_error("bad numeric value in state spec item: " + item);
        }
    }
    return spec;
}

std::vector<double> parse_range(const std::string& text) {
    // start:stop:count
    double start = 0, stop = 0;
    long count = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':' || count < 1)
        throw config_error("bad range (want start:stop:count): " + text);
    std::vector<double> out(static_cast<std::size_t>(count));
    if (count == 1) {
        out[0] = start;
        return out;
    }
    for (long i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw config_error("bad numeric list item: " + item);
        }
    }
    if (out.empty()) throw config_error("empty numeric list");
    return out;
}

void check_grid_bounds(std::size_t n) {
    if (n > kMaxNodes)
        throw config_error("n=" + std::to_string(n) + " exceeds the guard limit " +
                           std::to_string(kMaxNodes));
}

qflow::MomentumState make_momentum_state(const StateSpec& spec) {
    const auto n = static_cast<std::size_t>(spec.get("n", 400.0));
    check_grid_bounds(n);
    if (spec.family == "gaussian")
        return qflow::momentum_gaussian(spec.get("p0"), spec.get("sigma"), n,
                                        spec.get("pmax", 0.0));
    if (spec.family == "exponential")
        return qflow::momentum_exponential(spec.get("sigma", 1.0), n, spec.get("pmax", 0.0));
    throw config_error("unknown momentum-state family: " + spec.family);
}

qflow::PositionState make_position_state(const StateSpec& spec, double planck) {
    const auto n = static_cast<std::size_t>(spec.get("n", 400.0));
    check_grid_bounds(n);
    if (spec.family == "gaussian")
        return qflow::position_gaussian(spec.get("x0"), spec.get("sigma"), spec.get("p0", 0.0),
                                        planck, n, spec.get("extent", 0.0));
    if (spec.family == "chopped")
        return qflow::chopped_beam(spec.get("k"), spec.get("L"), n);
    throw config_error("unknown position-state family: " + spec.family);
}

qflow::DimensionlessState make_dimensionless_state(const StateSpec& spec, const qflow::Grid& grid,
                                                   double alpha, unsigned seed) {
    if (spec.family == "eigen")
        return qflow::dimensionless_from_eigen(qflow::max_probability(alpha, grid));
    if (spec.family == "gaussian")
        return qflow::dimensionless_gaussian(grid, spec.get("z0", 1.0), spec.get("sigma", 0.5));
    if (spec.family == "exponential")
        return qflow::dimensionless_exponential(grid, spec.get("scale", 1.0));
    if (spec.family == "random") {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> center(0.0, grid.z_max / 4.0);
        std::uniform_real_distribution<double> width(0.2, 1.5);
        std::normal_distribution<double> coeff(0.0, 1.0);
        const auto modes = static_cast<std::size_t>(spec.get("modes", 4.0));
        qflow::DimensionlessState s{{}, grid};
        s.f.assign(grid.size(), {0.0, 0.0});
        for (std::size_t k = 0; k < modes; ++k) {
            const double z0 = center(rng), w = width(rng);
            const std::complex<double> a{coeff(rng), coeff(rng)};
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double d = (grid.nodes[i] - z0) / w;
                s.f[i] += a * std::exp(-d * d);
            }
        }
        const double nrm =
            qflow::quadrature_norm(std::span<const std::complex<double>>(s.f), grid);
        if (!(nrm > 0.0)) throw config_error("random state degenerated to zero");
        for (auto& c : s.f) c /= std::sqrt(nrm);
        return s;
    }
    throw config_error("unknown dimensionless-state family: " + spec.family);
}

void add_reproducibility_meta(OutputTable& t, const std::string& command) {
    t.add_meta("command", command);
    t.add_meta("version", QFLOW_VERSION);
}

void add_grid_meta(OutputTable& t, std::size_t n, double z_max, const std::string& rule) {
    t.add_meta("n", std::to_string(n));
    t.add_meta("z_max", z_max);
    t.add_meta("rule", rule);
}

// ---- subcommands ----------------------------------------------------------

struct EigenOpts {
    CommonOpts common;
    double alpha = -1.0;
    std::string scenario = "dimensionless";
    double mass = 1.0, hbar = 1.0;
    double g = 0.0, t1 = 0.0, t2 = 1.0;
    double ell = 0.0, tau1 = 1.0, tau2 = 2.0;
    std::size_t n = 1500;
    double zmax = 30.0;
    std::string rule = "gauss-legendre-composite";
};

double resolve_parameter(const std::string& scenario, bool alpha_given, double alpha,
                         const EigenOpts& o) {
    const bool physical = scenario != "dimensionless";
    if (alpha_given && physical)
        throw config_error("give either a direct alpha/beta or physical parameters, not both");
    if (!alpha_given && !physical)
        throw config_error("need --alpha (or a physical scenario with its parameters)");
    if (scenario == "backflow")
        return qflow::alpha_from(qflow::BackflowParams(o.mass, o.hbar, o.g, o.t1, o.t2));
    if (scenario == "reentry")
        return qflow::beta_from(qflow::ReentryParams(o.mass, o.hbar, o.ell, o.tau1, o.tau2));
    if (scenario != "dimensionless") throw config_error("unknown scenario: " + scenario);
    if (!(alpha >= 0.0)) throw config_error("alpha must be >= 0");
    return alpha;
}

int run_eigen(EigenOpts& o, const CLI::Option* alpha_opt) {
    const double alpha = resolve_parameter(o.scenario, alpha_opt->count() > 0 ||
                                                           o.common.config.contains("alpha"),
                                           o.alpha, o);
    check_grid_bounds(o.n);

    qflow::Grid grid;
    bool sub_resolution = false;
    if (o.n == 1) {
        // Single midpoint node; too coarse to resolve anything, but legal.
        grid.nodes = {0.5 * o.zmax};
        grid.weights = {o.zmax};
        grid.z_max = o.zmax;
        grid.rule = qflow::QuadRule::UniformMidpoint;
        sub_resolution = true;
    } else {
        grid = qflow::build_grid(o.n, o.zmax, qflow::quad_rule_from_string(o.rule));
    }

    const qflow::EigenResult result = qflow::max_probability(alpha, grid);

    OutputTable t;
    add_reproducibility_meta(t, "eigen");
    t.add_meta("scenario", o.scenario);
    t.add_meta("alpha", alpha);
    add_grid_meta(t, grid.size(), grid.z_max, to_string(grid.rule));
    t.add_meta("lambda_max", result.lambda_max);
    t.add_meta("residual", result.residual);
    t.add_meta("solver_tolerance", 1e-9);
    if (sub_resolution) t.add_meta("sub_resolution", "true");
    t.columns = {"z", "weight", "f"};
    for (std::size_t i = 0; i < grid.size(); ++i)
        t.rows.push_back({grid.nodes[i], grid.weights[i], result.f[i]});
    emit(t, o.common);
    return 0;
}

struct CbmOpts {
    CommonOpts common;
    std::string grids = "750:20,1500:30,3000:40";
    std::string rule = "gauss-legendre-composite";
};

int run_cbm(CbmOpts& o) {
    std::vector<qflow::GridSpec> specs;
    std::stringstream ss(o.grids);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw config_error("bad grid spec (want n:zmax): " + item);
        try {
            specs.push_back({static_cast<std::size_t>(std::stoul(item.substr(0, colon))),
                             std::stod(item.substr(colon + 1))});
        } catch (const std::exception&) {
            throw config_error("bad grid spec: " + item);
        }
        check_grid_bounds(specs.back().n);
    }

    const qflow::CbmEstimate est =
        qflow::estimate_cbm(specs, qflow::quad_rule_from_string(o.rule));

    OutputTable t;
    add_reproducibility_meta(t, "cbm");
    t.add_meta("rule", o.rule);
    t.add_meta("estimate", est.value);
    t.add_meta("error", est.error);
    t.add_meta("exponent", est.exponent);
    t.add_meta("degenerate", est.degenerate ? "true" : "false");
    t.columns = {"n", "z_max", "lambda_coarse", "lambda_fine", "lambda_richardson"};
    for (const qflow::CbmRow& r : est.table)
        t.rows.push_back({static_cast<double>(r.n), r.z_max, r.lambda_coarse, r.lambda_fine,
                          r.lambda_richardson});
    emit(t, o.common);
    return 0;
}

struct SweepOpts {
    CommonOpts common;
    std::string alphas = "0,0.25,0.5,0.75,1";
    std::size_t n = 1500;
    double zmax = 30.0;
    std::string rule = "gauss-legendre-composite";
};

int run_sweep(SweepOpts& o) {
    check_grid_bounds(o.n);
    const std::vector<double> alphas = parse_list(o.alphas);
    const qflow::Grid grid = qflow::build_grid(o.n, o.zmax, qflow::quad_rule_from_string(o.rule));
    const std::vector<qflow::SweepRow> rows = qflow::sweep_alpha(alphas, grid);

    OutputTable t;
    add_reproducibility_meta(t, "sweep");
    add_grid_meta(t, o.n, o.zmax, o.rule);
    if (rows.size() >= 3) {
        const qflow::ExpFit fit = qflow::fit_exponential(rows);
        t.add_meta("fit_prefactor", fit.prefactor);
        t.add_meta("fit_rate", fit.rate);
        t.add_meta("fit_residual", fit.residual_norm);
    }
    t.columns = {"alpha", "lambda_max"};
    for (const qflow::SweepRow& r : rows) t.rows.push_back({r.alpha, r.lambda_max});
    emit(t, o.common);
    return 0;
}

struct FluxOpts {
    CommonOpts common;
    std::string scenario;
    std::string state;
    std::string times = "0.1:10:200";
    bool nu_grid = false;
    double mass = 1.0, hbar = 1.0;
    double g = 0.0, t1 = 0.0, t2 = 1.0;
    double ell = 0.0, tau1 = 1.0, tau2 = 2.0;
};

int run_flux(FluxOpts& o) {
    std::vector<double> times = parse_range(o.times);
    if (o.nu_grid) {
        // Uniform in nu = 1/t between the range endpoints.
        const double lo = times.front(), hi = times.back();
        if (!(lo > 0.0)) throw config_error("--nu-grid needs positive start time");
        const std::size_t count = times.size();
        for (std::size_t i = 0; i < count; ++i) {
            const double nu = 1.0 / lo + (1.0 / hi - 1.0 / lo) * static_cast<double>(i) /
                                             static_cast<double>(count > 1 ? count - 1 : 1);
            times[i] = 1.0 / nu;
        }
    }

    const StateSpec spec = parse_state_spec(o.state);
    qflow::FluxSeries series;
    OutputTable t;
    add_reproducibility_meta(t, "flux");
    if (o.scenario == "backflow") {
        const qflow::BackflowParams params(o.mass, o.hbar, o.g, o.t1, o.t2);
        series = qflow::flux_series_backflow(make_momentum_state(spec), params, times);
        t.add_meta("alpha", qflow::alpha_from(params));
    } else if (o.scenario == "reentry") {
        const qflow::ReentryParams params(o.mass, o.hbar, o.ell, o.tau1, o.tau2);
        series = qflow::flux_series_reentry(make_position_state(spec, o.hbar), params, times);
        t.add_meta("beta", qflow::beta_from(params));
    } else {
        throw config_error("flux needs --scenario backflow or reentry");
    }

    t.add_meta("scenario", to_string(series.scenario));
    t.add_meta("state", o.state);
    t.add_meta("integrated_transfer", series.integrated_transfer);
    t.columns = {"t", "J"};
    for (std::size_t i = 0; i < series.times.size(); ++i)
        t.rows.push_back({series.times[i], series.values[i]});
    emit(t, o.common);
    return 0;
}

int run_prob(FluxOpts& o) {
    const StateSpec spec = parse_state_spec(o.state);
    double kernel_route = 0.0, time_route = 0.0, alpha = 0.0;
    OutputTable t;
    add_reproducibility_meta(t, "prob");
    if (o.scenario == "backflow") {
        const qflow::BackflowParams params(o.mass, o.hbar, o.g, o.t1, o.t2);
        const qflow::MomentumState state = make_momentum_state(spec);
        kernel_route = qflow::prob_backflow(state, params);
        time_route = qflow::prob_backflow_time_route(state, params);
        alpha = qflow::alpha_from(params);
        t.add_meta("alpha", alpha);
    } else if (o.scenario == "reentry") {
        const qflow::ReentryParams params(o.mass, o.hbar, o.ell, o.tau1, o.tau2);
        const qflow::PositionState state = make_position_state(spec, o.hbar);
        kernel_route = qflow::prob_reentry(state, params);
        time_route = qflow::prob_reentry_time_route(state, params);
        alpha = qflow::beta_from(params);
        t.add_meta("beta", alpha);
    } else {
        throw config_error("prob needs --scenario backflow or reentry");
    }

    const double rel = std::abs(kernel_route - time_route) /
                       std::max({std::abs(kernel_route), std::abs(time_route), 1e-12});
    t.add_meta("scenario", o.scenario);
    t.add_meta("state", o.state);
    t.columns = {"probability_kernel", "probability_time_integral", "relative_difference"};
    t.rows.push_back({kernel_route, time_route, rel});
    emit(t, o.common);
    return 0;
}

struct EquivOpts {
    CommonOpts common;
    double alpha = 0.5;
    double t1 = 0.0, t2 = 1.0;
    double tau1 = 1.0, tau2 = 2.0;
    std::string state = "eigen";
    std::size_t n = 600;
    double zmax = 30.0;
    double tolerance = 1e-6;
};

int run_equiv(EquivOpts& o) {
    if (!(o.alpha >= 0.0)) throw config_error("alpha must be >= 0");
    check_grid_bounds(o.n);
    // Natural units; pick g so the backflow window realizes the requested alpha.
    const double mid = 0.5 * (o.t1 + o.t2);
    const double g = o.alpha / (std::sqrt(o.t2 - o.t1) * mid);
    const qflow::BackflowParams bf(1.0, 1.0, g, o.t1, o.t2);
    const qflow::ReentryParams re = qflow::match_reentry_to_backflow(bf, o.tau1, o.tau2);

    const qflow::Grid grid = qflow::build_grid(o.n, o.zmax);
    const qflow::DimensionlessState f =
        make_dimensionless_state(parse_state_spec(o.state), grid, o.alpha, o.common.seed);
    const qflow::EquivalenceReport report = qflow::equivalence_check(f, bf, re, o.tolerance);

    OutputTable t;
    add_reproducibility_meta(t, "equiv");
    t.add_meta("alpha", o.alpha);
    t.add_meta("state", o.state);
    add_grid_meta(t, o.n, o.zmax, "gauss-legendre-composite");
    t.add_meta("tolerance", report.tolerance);
    t.add_meta("pass", report.pass ? "true" : "false");
    t.columns = {"backflow_probability", "reentry_probability", "difference",
                 "relative_difference"};
    t.rows.push_back({report.backflow_probability, report.reentry_probability, report.difference,
                      report.relative_difference});
    emit(t, o.common);
    return report.pass ? 0 : kExitNumerical;
}

void add_backflow_params(CLI::App* sub, FluxOpts& o) {
    sub->add_option("--mass", o.mass);
    sub->add_option("--hbar", o.hbar);
    sub->add_option("--g", o.g);
    sub->add_option("--t1", o.t1);
    sub->add_option("--t2", o.t2);
    sub->add_option("--ell", o.ell);
    sub->add_option("--tau1", o.tau1);
    sub->add_option("--tau2", o.tau2);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classically-forbidden probability flow: quantum backflow and quantum reentry"};
    app.require_subcommand(1);

    EigenOpts eigen_opts;
    CLI::App* eigen_cmd = app.add_subcommand("eigen", "Largest eigenvalue and optimal state");
    CLI::Option* eigen_alpha = eigen_cmd->add_option("--alpha", eigen_opts.alpha);
    eigen_cmd->add_option("--scenario", eigen_opts.scenario);
    eigen_cmd->add_option("--mass", eigen_opts.mass);
    eigen_cmd->add_option("--hbar", eigen_opts.hbar);
    eigen_cmd->add_option("--g", eigen_opts.g);
    eigen_cmd->add_option("--t1", eigen_opts.t1);
    eigen_cmd->add_option("--t2", eigen_opts.t2);
    eigen_cmd->add_option("--ell", eigen_opts.ell);
    eigen_cmd->add_option("--tau1", eigen_opts.tau1);
    eigen_cmd->add_option("--tau2", eigen_opts.tau2);
    CLI::Option* eigen_n = eigen_cmd->add_option("--n", eigen_opts.n);
    CLI::Option* eigen_zmax = eigen_cmd->add_option("--zmax", eigen_opts.zmax);
    CLI::Option* eigen_rule = eigen_cmd->add_option("--rule", eigen_opts.rule);
    add_common(eigen_cmd, eigen_opts.common);

    CbmOpts cbm_opts;
    CLI::App* cbm_cmd = app.add_subcommand("cbm", "Extrapolated backflow constant");
    CLI::Option* cbm_grids = cbm_cmd->add_option("--grids", cbm_opts.grids);
    cbm_cmd->add_option("--rule", cbm_opts.rule);
    add_common(cbm_cmd, cbm_opts.common);

    SweepOpts sweep_opts;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Eigenvalue sweep over alpha");
    CLI::Option* sweep_alphas = sweep_cmd->add_option("--alphas", sweep_opts.alphas);
    sweep_cmd->add_option("--n", sweep_opts.n);
    sweep_cmd->add_option("--zmax", sweep_opts.zmax);
    sweep_cmd->add_option("--rule", sweep_opts.rule);
    add_common(sweep_cmd, sweep_opts.common);

    FluxOpts flux_opts;
    CLI::App* flux_cmd = app.add_subcommand("flux", "Time series of the probability flux");
    flux_cmd->add_option("--scenario", flux_opts.scenario);
    flux_cmd->add_option("--state", flux_opts.state);
    flux_cmd->add_option("--t,--times", flux_opts.times);
    flux_cmd->add_flag("--nu-grid", flux_opts.nu_grid);
    add_backflow_params(flux_cmd, flux_opts);
    add_common(flux_cmd, flux_opts.common);

    FluxOpts prob_opts;
    CLI::App* prob_cmd =
        app.add_subcommand("prob", "Probability transfer, kernel and time-integral routes");
    prob_cmd->add_option("--scenario", prob_opts.scenario);
    prob_cmd->add_option("--state", prob_opts.state);
    add_backflow_params(prob_cmd, prob_opts);
    add_common(prob_cmd, prob_opts.common);

    EquivOpts equiv_opts;
    CLI::App* equiv_cmd = app.add_subcommand("equiv", "Backflow-reentry equivalence report");
    equiv_cmd->add_option("--alpha", equiv_opts.alpha);
    equiv_cmd->add_option("--t1", equiv_opts.t1);
    equiv_cmd->add_option("--t2", equiv_opts.t2);
    equiv_cmd->add_option("--tau1", equiv_opts.tau1);
    equiv_cmd->add_option("--tau2", equiv_opts.tau2);
    equiv_cmd->add_option("--state", equiv_opts.state);
    equiv_cmd->add_option("--n", equiv_opts.n);
    equiv_cmd->add_option("--zmax", equiv_opts.zmax);
    equiv_cmd->add_option("--tolerance", equiv_opts.tolerance);
    add_common(equiv_cmd, equiv_opts.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*eigen_cmd) {
            load_config(eigen_opts.common);
            cfg_override(eigen_opts.common, eigen_alpha, "alpha", eigen_opts.alpha);
            cfg_override(eigen_opts.common, eigen_n, "n", eigen_opts.n);
            cfg_override(eigen_opts.common, eigen_zmax, "zmax", eigen_opts.zmax);
            cfg_override(eigen_opts.common, eigen_rule, "rule", eigen_opts.rule);
            return run_eigen(eigen_opts, eigen_alpha);
        }
        if (*cbm_cmd) {
            load_config(cbm_opts.common);
            cfg_override(cbm_opts.common, cbm_grids, "grids", cbm_opts.grids);
            return run_cbm(cbm_opts);
        }
        if (*sweep_cmd) {
            load_config(sweep_opts.common);
            cfg_override(sweep_opts.common, sweep_alphas, "alphas", sweep_opts.alphas);
            return run_sweep(sweep_opts);
        }
        if (*flux_cmd) {
            load_config(flux_opts.common);
            return run_flux(flux_opts);
        }
        if (*prob_cmd) {
            load_config(prob_opts.common);
            return run_prob(prob_opts);
        }
        if (*equiv_cmd) {
            load_config(equiv_opts.common);
            return run_equiv(equiv_opts);
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const qflow::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const qflow::shape_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nonfinite_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const qflow::solver_error& e) {
        std::cerr << "numerical failure: " << e.what() << " (iterations: " << e.iterations()
                  << ")\n";
        return kExitNumerical;
    } catch (const qflow::truncation_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const qflow::extrapolation_error& e) {
        std::cerr << "numerical failure: " << e.what() << "; raw values:";
        for (const double v : e.raw_values()) std::cerr << " " << format_double(v);
        std::cerr << "\n";
        return kExitNumerical;
    }
    return 0;
}
