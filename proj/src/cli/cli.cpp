#include "robinquad/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "robinquad/certificates.hpp"
#include "robinquad/errors.hpp"
#include "robinquad/sensitivity.hpp"
#include "robinquad/serialization.hpp"

namespace robinquad::cli {

using nlohmann::json;

namespace {

constexpr int kDefaultMesh = 64;
constexpr long kMaxCells = 1000000;

struct Common {
    double a1 = 0.0;
    double a2 = 0.0;
    std::optional<double> c;
    std::optional<double> S1;
    double S = 1.0;
    std::optional<double> alpha;
    int mesh = kDefaultMesh;
    std::string output;
    std::string format = "json";

    QuadParams params() const {
        QuadParams p;
        p.a1 = a1;
        p.a2 = a2;
        p.S = S;
        p.c = c.value_or(std::sqrt(S));
        p.S1 = S1.value_or(S);
        return p;
    }
    double require_alpha() const {
        if (!alpha) throw DomainError("--alpha is required");
        if (!std::isfinite(*alpha) || *alpha == 0.0) throw DomainError("--alpha must be finite and nonzero");
        return *alpha;
    }
    void validate() const {
        if (mesh < 2) throw DomainError("--mesh must be at least 2");
        if (!(S > 0.0) || !std::isfinite(S)) throw DomainError("--S must be positive");
        if (format != "json" && format != "csv") throw DomainError("--format must be json or csv");
    }
};

void add_params(CLI::App* sub, Common& o) {
    sub->add_option("--a1", o.a1, "horizontal offset of the upper apex");
    sub->add_option("--a2", o.a2, "horizontal offset of the lower apex");
    sub->add_option("--c", o.c, "half-diagonal along y = 0 (default sqrt(S))");
    sub->add_option("--S1", o.S1, "area of the upper triangle (default S)");
}

void add_common(CLI::App* sub, Common& o, bool mesh) {
    sub->add_option("--S", o.S, "half the area of the quadrilateral")->capture_default_str();
    sub->add_option("--alpha", o.alpha, "Robin parameter");
    if (mesh) sub->add_option("--mesh", o.mesh, "mesh refinement level n")->capture_default_str();
    sub->add_option("--output,-o", o.output, "write the result to this file");
    sub->add_option("--format", o.format, "json or csv")->capture_default_str();
}

json envelope(const std::string& command, const Common& o) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    j["defaults"] = {{"mesh", kDefaultMesh}, {"S", 1.0}};
    j["inputs"] = {{"S", o.S}, {"mesh", o.mesh}};
    if (o.alpha) j["inputs"]["alpha"] = *o.alpha;
    return j;
}

json error_object(const std::string& kind, const std::string& message) {
    return {{"schema_version", kSchemaVersion}, {"error", {{"kind", kind}, {"message", message}}}};
}

json gradient_json(const Vector4& g) {
    json j;
    for (Param v : kParams) j[param_name(v)] = g(static_cast<int>(v));
    return j;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

std::string num(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

int thread_count() {
    const char* env = std::getenv("ROBINQUAD_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw DomainError("ROBINQUAD_THREADS must be an integer in [1, 1024]");
    return static_cast<int>(v);
}

// Runs f(k) for k in [0, count) on the worker pool; results land by index.
template <typename F>
void parallel_for(long count, int threads, F&& f) {
    std::atomic<long> next{0};
    auto work = [&] {
        for (long k = next++; k < count; k = next++) f(k);
    };
    if (threads <= 1 || count <= 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<long>(threads, count); ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

double lambda_square_fem(double alpha, const Mesh& m) { return solve_quad(QuadParams::square(m.S), alpha, m).lambda; }

// ---- commands -------------------------------------------------------------

int cmd_solve_square(const Common& o, json& res) {
    const double alpha = o.require_alpha();
    res["solution"] = solve_square(alpha, o.S);
    return kOk;
}

int cmd_solve_quad(const Common& o, const std::string& assembly, json& res) {
    const double alpha = o.require_alpha();
    const QuadParams p = o.params();
    p.validate();
    const Mesh m = build_mesh(o.mesh, o.S);
    EigenPair e;
    AssembledSystem sys;
    if (assembly == "transformed") {
        e = solve_quad(p, alpha, m);
        sys = assemble_transformed(p, alpha, m);
    } else if (assembly == "direct") {
        sys = assemble_direct(p, alpha, m);
        e = solve_lowest(sys);
    } else {
        throw DomainError("--assembly must be transformed or direct");
    }
    res["params"] = p;
    res["assembly"] = assembly;
    res["lambda"] = e.lambda;
    res["residual"] = e.residual;
    res["stiffness_norm"] = e.stiffness_norm;
    res["iterations"] = e.iterations;
    res["factorizations"] = e.factorizations;
    res["dof_count"] = sys.dof_count;
    res["warnings"] = sys.warnings;
    if (alpha < 0.0 || alpha > 0.0) res["lambda_square_exact"] = solve_square(alpha, o.S).lambda1;
    return kOk;
}

int cmd_gradient(const Common& o, const std::string& method, json& res) {
    const double alpha = o.require_alpha();
    const QuadParams p = o.params();
    p.validate();
    const Mesh m = build_mesh(o.mesh, o.S);
    const Method meth = method_from_name(method);
    res["params"] = p;
    res["method"] = method_name(meth);
    if (meth == Method::ClosedForm) {
        if (!p.is_square(1e-14)) throw DomainError("closed_form gradient is only available at the square");
        res["lambda"] = solve_square(alpha, o.S).lambda1;
        res["gradient"] = gradient_json(Vector4::Zero());
    } else if (meth == Method::DiscreteFormula) {
        const SensitivityContext ctx(p, alpha, m);
        res["lambda"] = ctx.eigenpair().lambda;
        res["gradient"] = gradient_json(ctx.gradient());
    } else {
        const double lam = solve_quad(p, alpha, m).lambda;
        Vector4 g;
        for (Param v : kParams)
            g(static_cast<int>(v)) = finite_difference_first(p, alpha, v, m, 1e-4 * std::max(1.0, std::abs(param_value(p, v))), lam);
        res["lambda"] = lam;
        res["gradient"] = gradient_json(g);
    }
    return kOk;
}

int cmd_hessian(const Common& o, const std::string& method, json& res) {
    const double alpha = o.require_alpha();
    const QuadParams p = o.params();
    p.validate();
    const Mesh m = build_mesh(o.mesh, o.S);
    const Method meth = method_from_name(method);
    SensitivityReport r;
    if (meth == Method::ClosedForm) {
        if (!p.is_square(1e-14)) throw DomainError("closed_form Hessian is only available at the square");
        r = hessian_at_square_closed_form(alpha, o.S, m);
    } else if (meth == Method::DiscreteFormula) {
        r = discrete_report(p, alpha, m);
    } else {
        r = finite_difference_report(p, alpha, m);
    }
    res["report"] = r;
    return kOk;
}

int cmd_certify(const Common& o, const std::string& kind, json& res) {
    const double alpha = o.require_alpha();
    const QuadParams p = o.params();
    p.validate();
    std::vector<Certificate> certs;
    if (kind == "all") {
        certs = all_certificates(p, alpha);
    } else if (kind == "small-alpha") {
        certs.push_back(small_alpha_certificate(p, alpha));
    } else if (kind == "trial") {
        certs.push_back(trial_one_certificate(p, alpha));
    } else if (kind == "asymptotic") {
        certs.push_back(large_alpha_certificate(p));
    } else if (kind == "thresholds") {
        certs = threshold_certificates(p, alpha);
        res["thresholds"] = parameter_thresholds(alpha, p.S);
    } else {
        throw DomainError("--kind must be all, small-alpha, trial, asymptotic or thresholds");
    }
    res["params"] = p;
    res["certificates"] = certs;
    res["any_certified"] = std::any_of(certs.begin(), certs.end(),
                                       [](const Certificate& c) { return c.verdict == Verdict::CertifiedLess; });
    return kOk;
}

struct SweepRow {
    QuadParams p;
    double alpha = 0.0;
    double lambda = 0.0;
    double residual = 0.0;
    std::string status = "ok";
    std::string message;
};

int cmd_sweep(const Common& o, const std::vector<std::string>& grid_specs, std::ostream& out, json& res,
              bool& wrote_csv) {
    if (grid_specs.empty()) throw DomainError("sweep needs at least one --grid name=lo:hi:count");
    std::vector<GridAxis> axes;
    long cells = 1;
    for (const auto& s : grid_specs) {
        axes.push_back(parse_grid(s));
        for (size_t k = 0; k + 1 < axes.size(); ++k)
            if (axes[k].name == axes.back().name) throw DomainError("grid axis '" + axes.back().name + "' given twice");
        cells *= axes.back().count;
        if (cells > kMaxCells) throw DomainError("grid has more than 1000000 cells");
    }
    const bool alpha_axis = std::any_of(axes.begin(), axes.end(), [](const GridAxis& a) { return a.name == "alpha"; });
    if (!alpha_axis) o.require_alpha();
    const Mesh m = build_mesh(o.mesh, o.S);
    const int threads = thread_count();

    std::vector<SweepRow> rows(static_cast<size_t>(cells));
    parallel_for(cells, threads, [&](long k) {
        SweepRow& row = rows[static_cast<size_t>(k)];
        QuadParams p = o.params();
        double alpha = o.alpha.value_or(0.0);
        long rest = k;
        // last axis varies fastest
        for (int a = static_cast<int>(axes.size()) - 1; a >= 0; --a) {
            const int idx = static_cast<int>(rest % axes[a].count);
            rest /= axes[a].count;
            const double v = axes[a].value(idx);
            if (axes[a].name == "alpha")
                alpha = v;
            else
                p = with_param(p, param_from_name(axes[a].name), v);
        }
        row.p = p;
        row.alpha = alpha;
        try {
            if (alpha == 0.0) throw DomainError("alpha must be nonzero");
            const EigenPair e = solve_quad(p, alpha, m);
            row.lambda = e.lambda;
            row.residual = e.residual;
        } catch (const Error& e) {
            row.status = e.kind();
            row.message = e.what();
            row.lambda = std::nan("");
        }
    });

    if (o.format == "csv") {
        out << "index,a1,a2,c,S1,S,alpha,mesh,lambda,residual,status,message\n";
        for (long k = 0; k < cells; ++k) {
            const SweepRow& r = rows[static_cast<size_t>(k)];
            out << k << ',' << num(r.p.a1) << ',' << num(r.p.a2) << ',' << num(r.p.c) << ',' << num(r.p.S1) << ','
                << num(r.p.S) << ',' << num(r.alpha) << ',' << o.mesh << ',' << num(r.lambda) << ','
                << num(r.residual) << ',' << csv_field(r.status) << ',' << csv_field(r.message) << '\n';
        }
        wrote_csv = true;
    } else {
        json arr = json::array();
        for (long k = 0; k < cells; ++k) {
            const SweepRow& r = rows[static_cast<size_t>(k)];
            json row = {{"index", k}, {"params", r.p}, {"alpha", r.alpha}, {"status", r.status}};
            if (r.status == "ok") {
                row["lambda"] = r.lambda;
                row["residual"] = r.residual;
            } else {
                row["message"] = r.message;
            }
            arr.push_back(row);
        }
        json grid = json::array();
        for (const auto& a : axes) grid.push_back({{"name", a.name}, {"lo", a.lo}, {"hi", a.hi}, {"count", a.count}});
        res["grid"] = grid;
        res["threads"] = threads;
        res["rows"] = arr;
    }
    const bool all_ok = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.status == "ok"; });
    return all_ok ? kOk : kNumericalError;
}

int cmd_theorem1(const Common& o, json& res) {
    const double alpha = o.require_alpha();
    if (!(alpha < 0.0)) throw DomainError("verify-theorem1 needs alpha < 0");
    const Mesh m = build_mesh(o.mesh, o.S);
    const LocalMaxVerdict v = verify_local_max(alpha, o.S, m);
    const double grad_max = v.gradient.cwiseAbs().maxCoeff();
    const double grad_tol = 1e-6;
    const double block_tol = 1e-5;
    const bool trace_ok = v.block_trace < 0.0;
    const bool det_ok = v.block_det > 0.0;
    res["verdict"] = v;
    res["checks"] = {
        {"gradient_max", grad_max},
        {"gradient_tolerance", grad_tol},
        {"gradient_ok", grad_max <= grad_tol},
        {"off_block_tolerance", block_tol},
        {"block_structure_ok", v.off_block_max <= block_tol},
        {"trace_negative", trace_ok},
        {"determinant_positive", det_ok},
        {"cauchy_schwarz_ok", v.cauchy_schwarz_gap >= -1e-12 * std::max(1.0, v.g11 * v.g22)},
        {"negative_definite", v.negative_definite},
        {"margin", *std::max_element(v.mu.begin(), v.mu.end())},
    };
    const bool pass = grad_max <= grad_tol && v.off_block_max <= block_tol && trace_ok && det_ok && v.negative_definite;
    res["passed"] = pass;
    return pass ? kOk : kCheckFailed;
}

std::vector<double> log_alpha_grid(double lo, double hi, int points) {
    // lo < hi < 0, points spaced evenly in log|alpha|, ordered from lo to hi
    if (!(lo < hi && hi < 0.0)) throw DomainError("alpha range must satisfy alpha-min < alpha-max < 0");
    if (points < 2) throw DomainError("--points must be at least 2");
    std::vector<double> g(static_cast<size_t>(points));
    const double l0 = std::log(-lo), l1 = std::log(-hi);
    for (int k = 0; k < points; ++k) g[static_cast<size_t>(k)] = -std::exp(l0 + (l1 - l0) * k / (points - 1));
    return g;
}

int cmd_theorem2(const Common& o, double alpha_min, double alpha_max, int points, json& res, std::ostream& out,
                 bool& wrote_csv) {
    const QuadParams p = o.params();
    p.validate();
    if (p.is_square(1e-14)) throw DomainError("verify-theorem2 compares a quadrilateral against the square; pass one that differs");
    const std::vector<double> grid = log_alpha_grid(alpha_min, alpha_max, points);
    const Mesh m = build_mesh(o.mesh, o.S);
    const int threads = thread_count();

    struct Row {
        double alpha;
        bool small_alpha = false;
        bool trial_one = false;
        double lambda_quad = 0.0, lambda_square = 0.0;
    };
    std::vector<Row> rows(grid.size());
    parallel_for(static_cast<long>(grid.size()), threads, [&](long k) {
        Row& r = rows[static_cast<size_t>(k)];
        r.alpha = grid[static_cast<size_t>(k)];
        r.small_alpha = small_alpha_certificate(p, r.alpha).verdict == Verdict::CertifiedLess;
        r.trial_one = trial_one_certificate(p, r.alpha).verdict == Verdict::CertifiedLess;
        r.lambda_quad = solve_quad(p, r.alpha, m).lambda;
        r.lambda_square = lambda_square_fem(r.alpha, m);
    });

    // Small-alpha end: the most negative grid alpha such that the certificate fires on every
    // grid point between it and 0.
    std::optional<size_t> small_end;
    for (size_t k = rows.size(); k-- > 0;) {
        if (!rows[k].small_alpha) break;
        small_end = k;
    }
    // Large-alpha end: the least negative grid alpha such that the solver finds the quad
    // below the square at every grid point from alpha-min up to it.
    const Certificate asym = large_alpha_certificate(p);
    std::optional<size_t> large_end;
    for (size_t k = 0; k < rows.size(); ++k) {
        if (!(rows[k].lambda_quad < rows[k].lambda_square)) break;
        large_end = k;
    }

    const Mesh fine = build_mesh(2 * o.mesh, o.S);
    auto cross_check = [&](double alpha) {
        const double lq = solve_quad(p, alpha, fine).lambda;
        const double ls = solve_square(alpha, o.S).lambda1;
        return json{{"alpha", alpha}, {"mesh", fine.refinement_level}, {"lambda_quad", lq},
                    {"lambda_square_exact", ls}, {"confirmed", lq < ls}};
    };
    bool pass = true;
    json small = {{"label", "empirical"}};
    if (small_end) {
        small["alpha1_estimate"] = rows[*small_end].alpha;
        small["cross_check"] = cross_check(rows[*small_end].alpha);
        pass = pass && small["cross_check"]["confirmed"].get<bool>();
    } else {
        small["alpha1_estimate"] = nullptr;
        small["note"] = "small-alpha certificate does not fire next to 0 on this grid";
    }
    json large = {{"label", "empirical"}, {"certificate", asym}};
    if (large_end && asym.verdict == Verdict::CertifiedLess) {
        large["alpha2_estimate"] = rows[*large_end].alpha;
        large["cross_check"] = cross_check(rows[*large_end].alpha);
        pass = pass && large["cross_check"]["confirmed"].get<bool>();
    } else {
        large["alpha2_estimate"] = nullptr;
        large["note"] = asym.verdict == Verdict::CertifiedLess
                            ? "solver comparison fails at alpha-min; extend the grid or refine the mesh"
                            : "asymptotic certificate inconclusive for this quadrilateral";
    }
    if (o.format == "csv") {
        out << "alpha,small_alpha_certified,trial_one_certified,lambda_quad,lambda_square,mesh\n";
        for (const Row& r : rows)
            out << num(r.alpha) << ',' << (r.small_alpha ? 1 : 0) << ',' << (r.trial_one ? 1 : 0) << ','
                << num(r.lambda_quad) << ',' << num(r.lambda_square) << ',' << o.mesh << '\n';
        wrote_csv = true;
    } else {
        json arr = json::array();
        for (const Row& r : rows)
            arr.push_back({{"alpha", r.alpha},
                           {"small_alpha_certified", r.small_alpha},
                           {"trial_one_certified", r.trial_one},
                           {"lambda_quad", r.lambda_quad},
                           {"lambda_square", r.lambda_square}});
        res["params"] = p;
        res["alpha_grid"] = {{"min", alpha_min}, {"max", alpha_max}, {"points", points}};
        res["rows"] = arr;
        res["small_alpha"] = small;
        res["large_alpha"] = large;
        res["passed"] = pass;
    }
    return pass ? kOk : kCheckFailed;
}

int cmd_theorem3(const Common& o, int samples, unsigned seed, json& res) {
    const double alpha = o.require_alpha();
    if (!(alpha < 0.0)) throw DomainError("verify-theorem3 needs alpha < 0");
    if (samples < 1) throw DomainError("--samples must be positive");
    const double S = o.S;
    const Thresholds t = parameter_thresholds(alpha, S);
    const double R = hausdorff_threshold(alpha, S);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int tested = 0, fired = 0, trial_fired = 0, drawn = 0;
    json failures = json::array();
    while (tested < samples && drawn < 1000 * samples) {
        ++drawn;
        QuadParams p;
        p.S = S;
        p.a1 = (2.0 * unit(rng) - 1.0) * 3.0 * R;
        p.a2 = (2.0 * unit(rng) - 1.0) * 3.0 * R;
        p.c = std::sqrt(S) * std::exp((2.0 * unit(rng) - 1.0) * std::log(4.0 * R));
        p.S1 = 2.0 * S * (0.001 + 0.998 * unit(rng));
        if (hausdorff_distance_to_square(p) <= R) continue;
        ++tested;
        const auto certs = threshold_certificates(p, alpha);
        const bool any = std::any_of(certs.begin(), certs.end(),
                                     [](const Certificate& c) { return c.verdict == Verdict::CertifiedLess; });
        if (any) ++fired;
        if (trial_one_certificate(p, alpha).verdict == Verdict::CertifiedLess) ++trial_fired;
        if (!any && failures.size() < 20) failures.push_back(p);
    }
    res["thresholds"] = t;
    res["radius"] = R;
    res["seed"] = seed;
    res["samples_requested"] = samples;
    res["samples_tested"] = tested;
    res["threshold_fired"] = fired;
    res["trial_one_fired"] = trial_fired;
    res["failures"] = failures;
    const bool pass = tested == samples && fired == tested && trial_fired == tested;
    res["passed"] = pass;
    return pass ? kOk : kCheckFailed;
}

}  // namespace

double GridAxis::value(int k) const {
    if (count == 1) return lo;
    return lo + (hi - lo) * static_cast<double>(k) / (count - 1);
}

GridAxis parse_grid(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw DomainError("grid '" + text + "' is not of the form name=lo:hi:count");
    GridAxis g;
    g.name = text.substr(0, eq);
    if (g.name != "a1" && g.name != "a2" && g.name != "c" && g.name != "S1" && g.name != "alpha")
        throw DomainError("grid name must be one of a1, a2, c, S1, alpha (got '" + g.name + "')");
    std::vector<std::string> parts;
    std::stringstream ss(text.substr(eq + 1));
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw DomainError("grid '" + text + "' is not of the form name=lo:hi:count");
    try {
        size_t used = 0;
        g.lo = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("lo");
        g.hi = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("hi");
        g.count = std::stoi(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("count");
    } catch (const std::exception&) {
        throw DomainError("grid '" + text + "' has a malformed number");
    }
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi)) throw DomainError("grid '" + text + "' bounds must be finite");
    if (g.count < 1) throw DomainError("grid '" + text + "' needs count >= 1");
    return g;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Robin eigenvalues on quadrilaterals of fixed area", "robinquad"};
    app.require_subcommand(1);
    Common o;
    std::string assembly = "transformed";
    std::string method = "discrete";
    std::string kind = "all";
    std::vector<std::string> grids;
    double alpha_min = -20.0, alpha_max = -1e-3;
    int points = 25;
    int samples = 200;
    unsigned seed = 1;

    auto* s_square = app.add_subcommand("solve-square", "exact first eigenpair of the square");
    add_common(s_square, o, false);
    auto* s_quad = app.add_subcommand("solve-quad", "finite-element first eigenvalue of a quadrilateral");
    add_params(s_quad, o);
    add_common(s_quad, o, true);
    s_quad->add_option("--assembly", assembly, "transformed or direct")->capture_default_str();
    auto* s_grad = app.add_subcommand("gradient", "first derivatives in (a1, a2, c, S1)");
    add_params(s_grad, o);
    add_common(s_grad, o, true);
    s_grad->add_option("--method", method, "discrete, fd or closed")->capture_default_str();
    auto* s_hess = app.add_subcommand("hessian", "second derivatives in (a1, a2, c, S1)");
    add_params(s_hess, o);
    add_common(s_hess, o, true);
    s_hess->add_option("--method", method, "discrete, fd or closed")->capture_default_str();
    auto* s_cert = app.add_subcommand("certify", "closed-form comparison certificates");
    add_params(s_cert, o);
    add_common(s_cert, o, false);
    s_cert->add_option("--kind", kind, "all, small-alpha, trial, asymptotic or thresholds")->capture_default_str();
    auto* s_sweep = app.add_subcommand("sweep", "first eigenvalue over a parameter grid");
    add_params(s_sweep, o);
    add_common(s_sweep, o, true);
    s_sweep->add_option("--grid", grids, "name=lo:hi:count, repeatable (a1, a2, c, S1, alpha)");
    auto* s_t1 = app.add_subcommand("verify-theorem1", "local maximality of the square");
    add_common(s_t1, o, true);
    auto* s_t2 = app.add_subcommand("verify-theorem2", "small and large alpha comparison for one quadrilateral");
    add_params(s_t2, o);
    add_common(s_t2, o, true);
    s_t2->add_option("--alpha-min", alpha_min, "most negative alpha of the log grid")->capture_default_str();
    s_t2->add_option("--alpha-max", alpha_max, "alpha closest to 0 of the log grid")->capture_default_str();
    s_t2->add_option("--points", points, "grid points")->capture_default_str();
    auto* s_t3 = app.add_subcommand("verify-theorem3", "quadrilaterals far from the square fall below it");
    add_common(s_t3, o, false);
    s_t3->add_option("--samples", samples, "random quadrilaterals beyond the radius")->capture_default_str();
    s_t3->add_option("--seed", seed, "random seed")->capture_default_str();

    std::vector<std::string> argv_store{"robinquad"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_store) argv.push_back(s.c_str());

    auto emit_error = [&](const std::string& kind_, const std::string& msg, int code) {
        out << error_object(kind_, msg).dump(2) << '\n';
        err << "error: " << msg << '\n';
        return code;
    };

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return emit_error("usage", e.what(), kUsageError);
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    std::ostringstream body;
    bool wrote_csv = false;
    int code = kOk;
    try {
        o.validate();
        if (o.format == "csv" && command != "sweep" && command != "verify-theorem2")
            throw DomainError("csv output is available for sweep and verify-theorem2 only");
        json res = envelope(command, o);
        if (command == "solve-square")
            code = cmd_solve_square(o, res);
        else if (command == "solve-quad")
            code = cmd_solve_quad(o, assembly, res);
        else if (command == "gradient")
            code = cmd_gradient(o, method, res);
        else if (command == "hessian")
            code = cmd_hessian(o, method, res);
        else if (command == "certify")
            code = cmd_certify(o, kind, res);
        else if (command == "sweep")
            code = cmd_sweep(o, grids, body, res, wrote_csv);
        else if (command == "verify-theorem1")
            code = cmd_theorem1(o, res);
        else if (command == "verify-theorem2")
            code = cmd_theorem2(o, alpha_min, alpha_max, points, res, body, wrote_csv);
        else
            code = cmd_theorem3(o, samples, seed, res);
        if (!wrote_csv) body << res.dump(2) << '\n';
    } catch (const DomainError& e) {
        return emit_error(e.kind(), e.what(), kUsageError);
    } catch (const ContractError& e) {
        return emit_error(e.kind(), e.what(), kUsageError);
    } catch (const ConditioningError& e) {
        out << json{{"schema_version", kSchemaVersion},
                    {"error", {{"kind", e.kind()}, {"message", e.what()}, {"gap", e.gap()}}}}
                   .dump(2)
            << '\n';
        err << "error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const Error& e) {
        return emit_error(e.kind(), e.what(), kNumericalError);
    }

    if (o.output.empty()) {
        out << body.str();
    } else {
        std::ofstream f(o.output);
        if (!f) return emit_error("io", "cannot open '" + o.output + "' for writing", kUsageError);
        f << body.str();
    }
    return code;
}

}  // namespace robinquad::cli
