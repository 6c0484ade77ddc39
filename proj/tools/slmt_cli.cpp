// slmt: solve, verify, sweep, expand, scan, asymptotics, trajectory.
//
// Exit codes: 0 success, 1 validation/config/parse error or failed check,
// 2 suspected missed root.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <slmt/slmt.hpp>

namespace {

using slmt::Json;

struct RunConfig {
    std::string command;
    std::string problem_path;
    int n_max = 10;
    double ode_abs = 1e-12;
    double ode_rel = 1e-12;
    double root_tol = 1e-12;
    double quad_tol = 1e-10;
    std::string format = "json";
    std::string out_path;
    std::uint64_t seed = 1;
    std::string checks = "chain,orthogonality,asymptotics,norm-identity,greens,delta-invariance";
    std::string param;
    std::string values;
    std::string target_path;
    double s_max = 20.0;
    double lambda = 1.0;
    std::string kind = "phi";
    std::size_t samples = 101;
    std::optional<double> lambda_floor;
    std::size_t max_floor_doublings = 20;
    std::size_t threads = 0;
    bool determinism_check = false;

    slmt::SolveOptions solve_options() const {
        slmt::SolveOptions so;
        so.ode = {ode_abs, ode_rel};
        so.root.rel_tol = root_tol;
        so.quad.tolerance = quad_tol;
        so.lambda_floor = lambda_floor;
        so.scan.max_floor_doublings = max_floor_doublings;
        so.scan.threads = threads;
        so.strict = false;
        return so;
    }

    Json to_json() const {
        Json j{{"command", command},       {"problem", problem_path}, {"n_max", n_max},
               {"ode_abs_tol", ode_abs},   {"ode_rel_tol", ode_rel}, {"root_tol", root_tol},
               {"quad_tol", quad_tol},     {"format", format},       {"out", out_path},
               {"seed", seed},             {"max_floor_doublings", max_floor_doublings}};
        j["lambda_floor"] = lambda_floor ? Json(*lambda_floor) : Json(nullptr);
        if (command == "verify") j["checks"] = checks;
        if (command == "sweep") {
            j["param"] = param;
            j["values"] = values;
        }
        if (command == "expand") j["target"] = target_path;
        if (command == "scan") j["s_max"] = s_max;
        if (command == "trajectory") {
            j["lambda"] = lambda;
            j["kind"] = kind;
            j["samples"] = samples;
        }
        return j;
    }
};

/// Result of one command: the report text plus the exit code.
struct Outcome {
    std::string report;
    int exit_code = 0;
};

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void validate_config(const RunConfig& c) {
    using slmt::ErrorCode;
    if (c.n_max < 1) throw slmt::Error(ErrorCode::invalid_config, "n_max ≥ 1 required, got " + std::to_string(c.n_max));
    for (auto [name, v] : {std::pair{"ode-tol", c.ode_abs}, {"ode-rel-tol", c.ode_rel}, {"root-tol", c.root_tol},
                           {"quad-tol", c.quad_tol}})
        if (!(v > 0.0)) throw slmt::Error(ErrorCode::invalid_config, std::string(name) + " must be positive");
    if (c.format != "json" && c.format != "csv")
        throw slmt::Error(ErrorCode::invalid_config, "format must be json or csv");
}

// ---------------------------------------------------------------- solve

Json eigenpair_json(const slmt::Eigenpair& e) {
    const auto& r = e.residuals;
    return Json{{"n", e.index},
                {"formula_index", e.formula_index},
                {"lambda", e.lambda},
                {"s", nullable(e.s)},
                {"omega", r.omega},
                {"omega_prime", e.omega_prime},
                {"k_ratio", e.k_ratio},
                {"f1", e.f1},
                {"normalization", e.normalization},
                {"residuals",
                 {{"right_bc", r.right_bc},
                  {"left_bc", r.left_bc},
                  {"transmission_max", r.transmission_max},
                  {"norm_identity", r.norm_identity},
                  {"norm_identity_printed", r.norm_identity_printed},
                  {"substitution", r.substitution},
                  {"k_spread", r.k_spread},
                  {"simplicity_margin", r.simplicity_margin}}}};
}

std::string missed_root_reason(const slmt::SolveResult& res) {
    std::string why;
    for (const auto& w : res.windows)
        if (!w.ok)
            why += " window s in [" + std::to_string(w.s_lo) + ", " + std::to_string(w.s_hi) + "): " +
                   std::to_string(w.computed) + " roots vs " + std::to_string(w.predicted) + " predicted;";
    for (const auto& m : res.suspicious) why += " near-zero dip at lambda = " + std::to_string(m.lambda) + ";";
    for (int i : res.simplicity_violations) why += " small |omega'| at n = " + std::to_string(i) + ";";
    if (!res.floor_verified) why += " lambda floor " + std::to_string(res.lambda_floor) + " not verified;";
    return why;
}

Outcome run_solve(const RunConfig& cfg, const slmt::Problem& problem) {
    auto res = slmt::find_eigenvalues(problem, cfg.n_max, cfg.solve_options());
    std::ostringstream os;
    if (cfg.format == "csv") {
        os << "n,formula_index,lambda,s,omega_prime,k_ratio,norm_identity,simplicity_margin\n";
        os.precision(17);
        for (const auto& e : res.eigenpairs)
            os << e.index << ',' << e.formula_index << ',' << e.lambda << ',' << e.s << ',' << e.omega_prime << ','
               << e.k_ratio << ',' << e.residuals.norm_identity << ',' << e.residuals.simplicity_margin << '\n';
    } else {
        Json j;
        j["case"] = std::string(slmt::to_string(res.which));
        j["lambda_floor"] = res.lambda_floor;
        j["floor_verified"] = res.floor_verified;
        j["s_max"] = res.s_max;
        j["eigenpairs"] = Json::array();
        for (const auto& e : res.eigenpairs) j["eigenpairs"].push_back(eigenpair_json(e));
        j["windows"] = Json::array();
        for (const auto& w : res.windows)
            j["windows"].push_back(
                {{"s_lo", w.s_lo}, {"s_hi", w.s_hi}, {"computed", w.computed}, {"predicted", w.predicted}, {"ok", w.ok}});
        j["suspicious"] = Json::array();
        for (const auto& m : res.suspicious)
            j["suspicious"].push_back({{"lambda", m.lambda}, {"omega", m.omega}, {"local_scale", m.local_scale}});
        j["simplicity_violations"] = res.simplicity_violations;
        j["near_degenerate"] = res.near_degenerate;
        j["suspected_missed_root"] = res.suspected_missed_root();
        os << j.dump(2) << '\n';
    }
    Outcome out{os.str(), 0};
    if (res.suspected_missed_root()) {
        std::cerr << "SuspectedMissedRoot:" << missed_root_reason(res) << '\n';
        out.exit_code = 2;
    }
    return out;
}

// ---------------------------------------------------------------- verify

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    Json details = Json::object();
};

double lsq_slope_vs_log(const std::vector<double>& n, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        mx += std::log(n[i]);
        my += y[i];
    }
    mx /= static_cast<double>(n.size());
    my /= static_cast<double>(n.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        double dx = std::log(n[i]) - mx;
        sxy += dx * (y[i] - my);
        sxx += dx * dx;
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

CheckResult check_chain(const RunConfig& cfg, const slmt::Problem& problem) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> dist(-20.0, 400.0);
    CheckResult c{"chain", false, 0.0, 1e-7};
    slmt::IntegratorOptions opts{cfg.ode_abs, cfg.ode_rel};
    for (int i = 0; i < 50; ++i) {
        double l = dist(rng);
        auto smp = slmt::omega_per_interval(problem, l, opts);
        double rel = smp.chain_residual_max / std::max(1.0, std::abs(smp.omega_i[0]));
        if (rel > c.measured) {
            c.measured = rel;
            c.details["worst_lambda"] = l;
        }
    }
    c.pass = c.measured <= c.threshold;
    return c;
}

CheckResult check_orthogonality(const slmt::SolveResult& res, const slmt::Problem& problem) {
    auto g = slmt::gram_matrix(res.eigenpairs, problem);
    CheckResult c{"orthogonality", false, g.max_off_diagonal(), 1e-6};
    c.details["max_diagonal_error"] = g.max_diagonal_error();
    c.details["size"] = g.n;
    c.pass = c.measured <= c.threshold && g.max_diagonal_error() <= 1e-6;
    return c;
}

CheckResult check_asymptotics(const slmt::SolveResult& res, const slmt::Problem& problem) {
    CheckResult c{"asymptotics", false, 0.0, 0.05};
    std::vector<double> ns, y1, y2;
    for (const auto& e : res.eigenpairs) {
        if (e.formula_index < 5 || !(e.lambda > 0)) continue;
        auto est = slmt::eigenvalue_estimate(problem, e.formula_index);
        double n = e.formula_index;
        ns.push_back(n);
        y1.push_back(n * std::abs(e.s - est.first_order));
        y2.push_back(n * n * std::abs(e.s - est.second_order));
    }
    if (ns.size() < 3) {
        c.details["note"] = "fewer than 3 indices n >= 5; raise --nmax";
        return c;
    }
    double k1 = lsq_slope_vs_log(ns, y1), k2 = lsq_slope_vs_log(ns, y2);
    c.measured = std::max(k1, k2);
    c.details["slope_first_order"] = k1;
    c.details["slope_second_order"] = k2;
    c.details["max_n_err1"] = *std::max_element(y1.begin(), y1.end());
    c.details["max_n2_err2"] = *std::max_element(y2.begin(), y2.end());
    c.details["n_range"] = {ns.front(), ns.back()};
    c.pass = c.measured <= c.threshold;
    return c;
}

CheckResult check_norm_identity(const slmt::SolveResult& res) {
    CheckResult c{"norm-identity", false, 0.0, 1e-6};
    double sub = 0.0;
    for (const auto& e : res.eigenpairs) {
        c.measured = std::max(c.measured, e.residuals.norm_identity);
        sub = std::max(sub, e.residuals.substitution);
    }
    c.details["substitution_max"] = sub;
    c.pass = c.measured <= c.threshold && sub <= 1e-6;
    return c;
}

CheckResult check_greens(const RunConfig& cfg, const slmt::Problem& problem) {
    std::mt19937_64 rng(cfg.seed + 1);
    std::uniform_real_distribution<double> dist(-20.0, 400.0);
    CheckResult c{"greens", false, 0.0, 1e-7};
    double lw = 0, iw = 0, bi = 0;
    slmt::IntegratorOptions opts{cfg.ode_abs, cfg.ode_rel};
    for (int i = 0; i < 10; ++i) {
        double a = dist(rng), b = dist(rng);
        auto rep = slmt::greens_identity_residual(problem, a, b, opts);
        c.measured = std::max(c.measured, rep.residual);
        lw = std::max(lw, rep.left_wronskian);
        iw = std::max(iw, rep.interface_wronskian_max);
        bi = std::max(bi, rep.boundary_identity);
    }
    c.details["left_wronskian"] = lw;
    c.details["interface_wronskian"] = iw;
    c.details["boundary_identity"] = bi;
    c.pass = c.measured <= c.threshold && lw <= 1e-12 && iw <= 1e-9 && bi <= 1e-12;
    return c;
}

CheckResult check_delta_invariance(const RunConfig& cfg, const slmt::Problem& problem,
                                   const slmt::SolveResult& res) {
    CheckResult c{"delta-invariance", false, 0.0, 1e-8};
    slmt::ProblemSpec unit = problem.spec();
    for (double& d : unit.jumps) d = 1.0;
    auto so = cfg.solve_options();
    so.eigenvalues_only = true;
    auto ref = slmt::find_eigenvalues(slmt::Problem(unit), cfg.n_max, so);
    std::size_t n = std::min(ref.eigenpairs.size(), res.eigenpairs.size());
    for (std::size_t i = 0; i < n; ++i) {
        double l = res.eigenpairs[i].lambda, r = ref.eigenpairs[i].lambda;
        c.measured = std::max(c.measured, std::abs(l - r) / std::max(1.0, std::abs(r)));
    }
    c.details["compared"] = n;
    c.pass = n == res.eigenpairs.size() && c.measured <= c.threshold;
    return c;
}

Outcome run_verify(const RunConfig& cfg, const slmt::Problem& problem) {
    static const std::vector<std::string> known = {"chain",  "orthogonality", "asymptotics", "norm-identity",
                                                   "greens", "delta-invariance"};
    std::vector<std::string> checks;
    std::stringstream ss(cfg.checks);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        if (std::find(known.begin(), known.end(), item) == known.end())
            throw slmt::Error(slmt::ErrorCode::invalid_config, "unknown check '" + item + "'");
        checks.push_back(item);
    }
    if (checks.empty()) throw slmt::Error(slmt::ErrorCode::invalid_config, "no checks selected");

    bool need_solve = false;
    for (const auto& c : checks) need_solve |= c != "chain" && c != "greens";
    std::optional<slmt::SolveResult> res;
    if (need_solve) res = slmt::find_eigenvalues(problem, cfg.n_max, cfg.solve_options());

    std::vector<CheckResult> results(checks.size());
    slmt::detail::parallel_for(
        checks.size(),
        [&](std::size_t i) {
            const auto& name = checks[i];
            if (name == "chain") results[i] = check_chain(cfg, problem);
            else if (name == "orthogonality") results[i] = check_orthogonality(*res, problem);
            else if (name == "asymptotics") results[i] = check_asymptotics(*res, problem);
            else if (name == "norm-identity") results[i] = check_norm_identity(*res);
            else if (name == "greens") results[i] = check_greens(cfg, problem);
            else results[i] = check_delta_invariance(cfg, problem, *res);
        },
        cfg.threads);

    bool all = true;
    Json j{{"checks", Json::array()}};
    std::ostringstream csv;
    csv << "check,status,measured,threshold\n";
    csv.precision(17);
    for (const auto& r : results) {
        all &= r.pass;
        std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name << ": measured " << r.measured << " threshold "
                  << r.threshold << ' ' << r.details.dump() << '\n';
        j["checks"].push_back({{"name", r.name},
                               {"status", r.pass ? "PASS" : "FAIL"},
                               {"measured", r.measured},
                               {"threshold", r.threshold},
                               {"details", r.details}});
        csv << r.name << ',' << (r.pass ? "PASS" : "FAIL") << ',' << r.measured << ',' << r.threshold << '\n';
    }
    j["all_pass"] = all;
    return {cfg.format == "csv" ? csv.str() : j.dump(2) + "\n", all ? 0 : 1};
}

// ---------------------------------------------------------------- sweep

/// Sets the scalar addressed by `path` (jumps[i], interfaces[i], alpha[i],
/// beta[i], beta_prime[i], or q for a constant potential).
void set_param(slmt::ProblemSpec& s, const std::string& path, double v) {
    if (path == "q") {
        s.potential = slmt::PiecewiseFunction::constant(v);
        return;
    }
    auto lb = path.find('['), rb = path.find(']');
    if (lb == std::string::npos || rb != path.size() - 1)
        throw slmt::Error(slmt::ErrorCode::invalid_config, "parameter path '" + path + "' not understood");
    std::string name = path.substr(0, lb);
    std::size_t i = 0;
    try {
        i = std::stoul(path.substr(lb + 1, rb - lb - 1));
    } catch (...) {
        throw slmt::Error(slmt::ErrorCode::invalid_config, "bad index in '" + path + "'");
    }
    auto bad = [&] { throw slmt::Error(slmt::ErrorCode::invalid_config, "index out of range in '" + path + "'"); };
    if (name == "jumps" || name == "interfaces") {
        auto& vec = name == "jumps" ? s.jumps : s.interfaces;
        if (i >= vec.size()) bad();
        vec[i] = v;
    } else if (name == "alpha") {
        if (i > 1) bad();
        (i == 0 ? s.left_bc.alpha1 : s.left_bc.alpha2) = v;
    } else if (name == "beta") {
        if (i > 1) bad();
        (i == 0 ? s.right_bc.beta1 : s.right_bc.beta2) = v;
    } else if (name == "beta_prime") {
        if (i > 1) bad();
        (i == 0 ? s.right_bc.beta1_prime : s.right_bc.beta2_prime) = v;
    } else {
        throw slmt::Error(slmt::ErrorCode::invalid_config, "unknown parameter '" + name + "'");
    }
}

Outcome run_sweep(const RunConfig& cfg, const slmt::ProblemSpec& base) {
    std::vector<double> values;
    std::stringstream ss(cfg.values);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        values.push_back(slmt::io_detail::real(Json(item), "values"));
    }
    if (values.empty()) throw slmt::Error(slmt::ErrorCode::invalid_config, "values: empty list");
    if (cfg.param.empty()) throw slmt::Error(slmt::ErrorCode::invalid_config, "param: missing");
    {
        slmt::ProblemSpec probe = base;
        set_param(probe, cfg.param, values.front());
    }

    struct Row {
        std::vector<double> lambdas;
        std::string error;
    };
    std::vector<Row> rows(values.size());
    auto so = cfg.solve_options();
    so.eigenvalues_only = true;
    so.scan.threads = 1;
    slmt::detail::parallel_for(
        values.size(),
        [&](std::size_t i) {
            try {
                slmt::ProblemSpec s = base;
                set_param(s, cfg.param, values[i]);
                auto res = slmt::find_eigenvalues(slmt::Problem(s), cfg.n_max, so);
                for (const auto& e : res.eigenpairs) rows[i].lambdas.push_back(e.lambda);
                if (res.suspected_missed_root()) rows[i].error = "SuspectedMissedRoot:" + missed_root_reason(res);
            } catch (const std::exception& e) {
                rows[i].error = e.what();
            }
        },
        cfg.threads);

    std::ostringstream os;
    if (cfg.format == "csv") {
        os.precision(17);
        os << "param_value,n,lambda,error\n";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (rows[i].lambdas.empty()) os << values[i] << ",,,\"" << rows[i].error << "\"\n";
            for (std::size_t n = 0; n < rows[i].lambdas.size(); ++n)
                os << values[i] << ',' << n << ',' << rows[i].lambdas[n] << ",\"" << rows[i].error << "\"\n";
        }
    } else {
        Json j{{"param", cfg.param}, {"rows", Json::array()}};
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (rows[i].lambdas.empty())
                j["rows"].push_back({{"param_value", values[i]}, {"n", nullptr}, {"lambda", nullptr},
                                     {"error", rows[i].error}});
            for (std::size_t n = 0; n < rows[i].lambdas.size(); ++n) {
                Json r{{"param_value", values[i]}, {"n", n}, {"lambda", rows[i].lambdas[n]}};
                r["error"] = rows[i].error.empty() ? Json(nullptr) : Json(rows[i].error);
                j["rows"].push_back(r);
            }
        }
        os << j.dump(2) << '\n';
    }
    return {os.str(), 0};
}

// ---------------------------------------------------------------- expand

Outcome run_expand(const RunConfig& cfg, const slmt::Problem& problem) {
    if (cfg.target_path.empty()) throw slmt::Error(slmt::ErrorCode::invalid_config, "target: missing");
    auto spec = slmt::element_spec_from_json(slmt::parse_json_text(slmt::read_text_file(cfg.target_path)));
    slmt::HElement F = slmt::make_element(problem, spec);
    auto res = slmt::find_eigenvalues(problem, cfg.n_max, cfg.solve_options());
    auto ex = slmt::expand(F, res.eigenpairs, problem);
    std::ostringstream os;
    if (cfg.format == "csv") {
        os.precision(17);
        os << "N,coefficient,residual,parseval\n";
        for (std::size_t i = 0; i < ex.coefficients.size(); ++i)
            os << i + 1 << ',' << ex.coefficients[i] << ',' << ex.residuals[i] << ','
               << ex.parseval[i] / ex.norm2 << '\n';
    } else {
        Json j{{"norm2", ex.norm2},
               {"coefficients", ex.coefficients},
               {"residuals", ex.residuals},
               {"parseval", ex.parseval.empty() ? 0.0 : ex.parseval.back() / ex.norm2},
               {"parseval_curve", Json::array()},
               {"monotone", ex.max_increase() <= 1e-12},
               {"max_increase", ex.max_increase()}};
        for (double p : ex.parseval) j["parseval_curve"].push_back(p / ex.norm2);
        os << j.dump(2) << '\n';
    }
    return {os.str(), res.suspected_missed_root() ? 2 : 0};
}

// ---------------------------------------------------------------- scan

Outcome run_scan(const RunConfig& cfg, const slmt::Problem& problem) {
    slmt::IntegratorOptions opts{cfg.ode_abs, cfg.ode_rel};
    slmt::ScanOptions so;
    so.max_floor_doublings = cfg.max_floor_doublings;
    so.threads = cfg.threads;
    auto scan = slmt::bracket_scan(problem, cfg.s_max, cfg.lambda_floor, opts, so);
    std::vector<slmt::CharacteristicSample> smp(scan.samples.size());
    slmt::detail::parallel_for(
        smp.size(), [&](std::size_t i) { smp[i] = slmt::omega_per_interval(problem, scan.samples[i].lambda, opts); },
        cfg.threads);
    std::ostringstream os;
    if (cfg.format == "csv") {
        os.precision(17);
        os << "lambda,omega,chain_residual_max\n";
        for (const auto& s : smp) os << s.lambda << ',' << s.omega << ',' << s.chain_residual_max << '\n';
    } else {
        Json j{{"lambda_floor", scan.lambda_floor},
               {"floor_verified", scan.floor_verified},
               {"s_max", scan.s_max},
               {"brackets", Json::array()},
               {"samples", Json::array()}};
        for (const auto& b : scan.brackets) j["brackets"].push_back({{"lo", b.lo}, {"hi", b.hi}});
        for (const auto& s : smp)
            j["samples"].push_back({{"lambda", s.lambda},
                                    {"omega", s.omega},
                                    {"omega_i", s.omega_i},
                                    {"chain_residual_max", s.chain_residual_max}});
        os << j.dump(2) << '\n';
    }
    return {os.str(), 0};
}

// ---------------------------------------------------------------- asymptotics

Outcome run_asymptotics(const RunConfig& cfg, const slmt::Problem& problem) {
    auto so = cfg.solve_options();
    so.eigenvalues_only = true;
    auto res = slmt::find_eigenvalues(problem, cfg.n_max, so);
    const double I0 = slmt::potential_moments(problem).I0;
    std::vector<std::map<std::string, double>> rows;
    for (const auto& e : res.eigenpairs) {
        if (!(e.lambda > 0)) continue;
        std::map<std::string, double> r;
        const double n = e.formula_index, nan = std::numeric_limits<double>::quiet_NaN();
        r["n"] = n;
        r["s"] = e.s;
        for (auto v : {slmt::FormulaVariant::corrected, slmt::FormulaVariant::printed}) {
            std::string p = v == slmt::FormulaVariant::printed ? "printed_" : "";
            double f1 = nan, f2 = nan;
            try {
                auto est = slmt::eigenvalue_estimate(problem, e.formula_index, v, I0);
                f1 = est.first_order;
                f2 = est.second_order;
            } catch (const slmt::Error&) {
            }
            r[p + "first_order"] = f1;
            r[p + "second_order"] = f2;
            r[p + "n_err1"] = n * std::abs(e.s - f1);
            r[p + "n2_err2"] = n * n * std::abs(e.s - f2);
        }
        rows.push_back(r);
    }
    static const char* cols[] = {"n",      "s",        "first_order",           "second_order",
                                 "n_err1", "n2_err2",  "printed_second_order", "printed_n2_err2"};
    std::ostringstream os;
    if (cfg.format == "csv") {
        os.precision(17);
        for (std::size_t c = 0; c < std::size(cols); ++c) os << (c ? "," : "") << cols[c];
        os << '\n';
        for (auto& r : rows) {
            for (std::size_t c = 0; c < std::size(cols); ++c) os << (c ? "," : "") << r[cols[c]];
            os << '\n';
        }
    } else {
        Json j{{"case", std::string(slmt::to_string(res.which))}, {"I0", I0}, {"rows", Json::array()}};
        for (auto& r : rows) {
            Json row;
            for (const char* c : cols) row[c] = nullable(r[c]);
            j["rows"].push_back(row);
        }
        os << j.dump(2) << '\n';
    }
    return {os.str(), 0};
}

// ---------------------------------------------------------------- trajectory

Outcome run_trajectory(const RunConfig& cfg, const slmt::Problem& problem) {
    slmt::IntegratorOptions opts{cfg.ode_abs, cfg.ode_rel};
    slmt::PiecewiseSolution sol;
    if (cfg.kind == "phi") sol = slmt::shoot_phi(problem, cfg.lambda, opts, true);
    else if (cfg.kind == "chi") sol = slmt::shoot_chi(problem, cfg.lambda, opts, true);
    else throw slmt::Error(slmt::ErrorCode::invalid_config, "kind must be phi or chi");
    std::ostringstream os;
    os.precision(17);
    slmt::write_trajectory_csv(os, sol, cfg.samples);
    return {os.str(), 0};
}

Outcome dispatch(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.problem_path.empty()) throw slmt::Error(slmt::ErrorCode::invalid_config, "problem: missing");
    slmt::ProblemSpec spec = slmt::load_problem_spec(cfg.problem_path);
    if (cfg.command == "sweep") return run_sweep(cfg, spec);
    slmt::Problem problem(spec);
    if (cfg.command == "solve") return run_solve(cfg, problem);
    if (cfg.command == "verify") return run_verify(cfg, problem);
    if (cfg.command == "expand") return run_expand(cfg, problem);
    if (cfg.command == "scan") return run_scan(cfg, problem);
    if (cfg.command == "asymptotics") return run_asymptotics(cfg, problem);
    if (cfg.command == "trajectory") return run_trajectory(cfg, problem);
    throw slmt::Error(slmt::ErrorCode::invalid_config, "no command given");
}

int emit(const RunConfig& cfg, const Outcome& out) {
    if (cfg.out_path.empty()) {
        std::cout << out.report;
    } else {
        std::ofstream f(cfg.out_path, std::ios::binary);
        if (!f) {
            std::cerr << "InvalidConfig: cannot write '" << cfg.out_path << "'\n";
            return 1;
        }
        f << out.report;
    }
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;
    CLI::App app{"Discontinuous Sturm-Liouville eigenproblems with an eigenparameter-dependent boundary condition"};
    app.require_subcommand(1);
    app.add_flag("--determinism-check", cfg.determinism_check,
                 "Run the command twice and compare the reports byte for byte");

    auto common = [&](CLI::App* sub) {
        sub->add_option("--problem", cfg.problem_path, "Problem JSON file")->required();
        sub->add_option("--nmax", cfg.n_max, "Number of eigenvalues");
        sub->add_option("--ode-tol", cfg.ode_abs, "ODE absolute tolerance");
        sub->add_option("--ode-rel-tol", cfg.ode_rel, "ODE relative tolerance");
        sub->add_option("--root-tol", cfg.root_tol, "Relative root tolerance");
        sub->add_option("--quad-tol", cfg.quad_tol, "Inner-product tolerance");
        sub->add_option("--out", cfg.out_path, "Output file (default stdout)");
        sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", cfg.seed, "Seed for randomized checks");
        sub->add_option("--lambda-floor", cfg.lambda_floor, "Initial lower end of the eigenvalue scan");
        sub->add_option("--max-floor-doublings", cfg.max_floor_doublings, "Floor doublings before giving up");
        sub->add_option("--threads", cfg.threads, "Worker threads (0 = hardware)");
    };

    auto* solve = app.add_subcommand("solve", "Eigenvalues and eigenfunction diagnostics");
    common(solve);
    auto* verify = app.add_subcommand("verify", "Run residual checks");
    common(verify);
    verify->add_option("--checks", cfg.checks,
                       "Comma list of chain, orthogonality, asymptotics, norm-identity, greens, delta-invariance");
    auto* sweep = app.add_subcommand("sweep", "Re-solve over a list of parameter values");
    common(sweep);
    sweep->add_option("--param", cfg.param, "jumps[i], interfaces[i], alpha[i], beta[i], beta_prime[i] or q")
        ->required();
    sweep->add_option("--values", cfg.values, "Comma-separated values")->required();
    auto* expand = app.add_subcommand("expand", "Eigenfunction expansion of a target element");
    common(expand);
    expand->add_option("--target", cfg.target_path, "Target element JSON {\"f\": ..., \"f1\": ...}")->required();
    auto* scan = app.add_subcommand("scan", "Characteristic function samples and brackets");
    common(scan);
    scan->add_option("--smax", cfg.s_max, "Upper end of the scan in s = sqrt(lambda)");
    auto* asym = app.add_subcommand("asymptotics", "Computed s_n against the asymptotic formulas");
    common(asym);
    auto* traj = app.add_subcommand("trajectory", "phi or chi on a uniform grid (CSV)");
    common(traj);
    traj->add_option("--lambda", cfg.lambda, "Spectral parameter")->required();
    traj->add_option("--kind", cfg.kind, "phi or chi");
    traj->add_option("--samples", cfg.samples, "Points per subinterval");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

    std::cerr << "effective config: " << cfg.to_json().dump() << '\n';
    try {
        Outcome out = dispatch(cfg);
        if (cfg.determinism_check) {
            Outcome again = dispatch(cfg);
            bool same = again.report == out.report && again.exit_code == out.exit_code;
            std::cerr << (same ? "determinism: reports identical (" : "determinism: reports differ (")
                      << out.report.size() << " bytes)\n";
            if (!same) return 1;
        }
        return emit(cfg, out);
    } catch (const slmt::Error& e) {
        std::cerr << e.what() << '\n';
        return e.code() == slmt::ErrorCode::suspected_missed_root ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
