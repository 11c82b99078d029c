#include "CLI11.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttrace/indices.hpp"
#include "ttrace/json_io.hpp"
#include "ttrace/operators.hpp"

using namespace ttrace;

namespace {

constexpr int kExitInputError = 1;
constexpr int kExitDisagreement = 2;  // routes ran but disagree beyond their bars

struct Rendered {
    json result;
    std::string csv;
    std::string table;
    int exit_code = 0;
};

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::string complex_cell(cd v) {
    std::string s = csv_number(v.real());
    s += v.imag() < 0 ? "-" : "+";
    s += csv_number(std::abs(v.imag()));
    s += "i";
    return s;
}

json jcomplex(cd v) {
    if (v.imag() == 0.0) return json(v.real());
    return json::array({v.real(), v.imag()});
}

json load_json_arg(const std::string& text) {
    std::string s = text;
    if (!s.empty() && s[0] == '@') {
        std::ifstream in(s.substr(1));
        if (!in) throw std::invalid_argument("cannot read JSON file: " + s.substr(1));
        return json::parse(in);
    }
    return json::parse(s);
}

// agreement gate shared by the dual-route commands; the absolute floor keeps
// machine noise from failing values near zero
bool within_bars(double a, double ea, double b, double eb) {
    return std::abs(a - b) <= ea + eb + 1e-6 * (1.0 + std::abs(a));
}

FourierSymbol require_symbol(const JobSpec& job, int degree) {
    if (job.symbol.is_null())
        throw std::invalid_argument(job.command + " needs --symbol");
    return symbol_from_spec(job.symbol, degree);
}

// matrix-section commands compare against a half-size control, so the
// truncation degree cannot exceed half the section
int matrix_degree(const JobSpec& job) { return std::min(job.degree, job.size / 2); }

// ---------------------------------------------------------------- commands

Rendered run_index(const JobSpec& job) {
    auto f = require_symbol(job, job.degree);
    int ind = fredholm_index(f);  // rejects circle zeros with a pointer to witten
    int w = winding_number(f);
    Rendered r;
    r.result["fredholm_index"] = ind;
    r.result["winding"] = w;
    r.csv = "fredholm_index,winding\n" + std::to_string(ind) + "," + std::to_string(w) + "\n";
    r.table = fmt("fredholm index : %d\nwinding number : %d\n", ind, w);
    return r;
}

Rendered route_report(const IndexReport& rep) {
    Rendered r;
    r.result["witten"] = rep.witten;
    r.result["error"] = rep.error;
    if (rep.fredholm)
        r.result["fredholm"] = *rep.fredholm;
    else
        r.result["fredholm"] = nullptr;
    json routes = json::array();
    std::string csv = "route,value,error\n";
    std::string tab;
    for (const auto& rt : rep.routes) {
        routes.push_back({{"name", rt.name}, {"value", rt.value}, {"error", rt.error}});
        csv += rt.name + "," + csv_number(rt.value) + "," + csv_number(rt.error) + "\n";
        tab += fmt("  %-12s  % -22.15g  %.2e\n", rt.name.c_str(), rt.value, rt.error);
    }
    csv += "consensus," + csv_number(rep.witten) + "," + csv_number(rep.error) + "\n";
    r.result["routes"] = routes;
    r.result["routes_agree"] = rep.routes_agree;
    json zeros = json::array();
    std::string ztab;
    for (const auto& z : rep.zeros_used) {
        zeros.push_back({{"angle", z.location}, {"order", z.order}});
        ztab += fmt("  t = %-18.15g order %.6g\n", z.location, z.order);
    }
    r.result["circle_zeros"] = zeros;

    r.csv = csv;
    r.table = fmt("witten index   : %.15g\nerror estimate : %.2e\n", rep.witten, rep.error);
    if (rep.fredholm)
        r.table += fmt("fredholm index : %d\n", *rep.fredholm);
    else
        r.table += "fredholm index : undefined (symbol vanishes on the circle)\n";
    r.table += "routes:\n" + tab;
    if (!ztab.empty()) r.table += "circle zeros:\n" + ztab;
    r.table += std::string("routes agree   : ") + (rep.routes_agree ? "yes" : "NO") + "\n";
    r.exit_code = rep.routes_agree ? 0 : kExitDisagreement;
    return r;
}

Rendered run_witten(const JobSpec& job) {
    auto f = require_symbol(job, job.degree);
    return route_report(witten_index(f, job.settings));
}

Rendered two_route(const std::string& na, const TraceResult& a, const std::string& nb,
                   const TraceResult& b) {
    Rendered r;
    bool agree = within_bars(a.value, a.error_estimate, b.value, b.error_estimate);
    r.result["routes"] = json::array({
        {{"name", na}, {"value", a.value}, {"error", a.error_estimate}},
        {{"name", nb}, {"value", b.value}, {"error", b.error_estimate}},
    });
    r.result["difference"] = std::abs(a.value - b.value);
    r.result["agree"] = agree;
    r.csv = "route,value,error\n" + na + "," + csv_number(a.value) + "," +
            csv_number(a.error_estimate) + "\n" + nb + "," + csv_number(b.value) + "," +
            csv_number(b.error_estimate) + "\n";
    r.table = fmt("  %-18s  % -22.15g  %.2e\n", na.c_str(), a.value, a.error_estimate) +
              fmt("  %-18s  % -22.15g  %.2e\n", nb.c_str(), b.value, b.error_estimate) +
              fmt("difference : %.3e\nagree      : %s\n", std::abs(a.value - b.value),
                  agree ? "yes" : "NO");
    r.exit_code = agree ? 0 : kExitDisagreement;
    return r;
}

Rendered run_trace(const JobSpec& job) {
    if (job.phi.empty()) throw std::invalid_argument("trace needs --phi");
    auto f = require_symbol(job, matrix_degree(job));
    auto phi = parse_scalar_function(job.phi);
    TraceResult m = trace_phi_difference(f, phi, job.size);
    TraceResult b = boundary_trace_integral(f, phi, job.settings);
    return two_route("matrix_section", m, "boundary_integral", b);
}

Rendered run_heat(const JobSpec& job) {
    if (job.s_list.empty()) throw std::invalid_argument("heat needs --s");
    for (double s : job.s_list)
        if (!(s > 0.0)) throw std::invalid_argument("heat parameters must be positive");
    auto f = require_symbol(job, matrix_degree(job));
    auto mats = heat_trace(f, job.s_list, job.size);
    Rendered r;
    json rows = json::array();
    r.csv = "s,matrix,matrix_error,integral,integral_error\n";
    r.table = fmt("%-8s %-22s %-10s %-22s %-10s\n", "s", "matrix", "err", "integral", "err");
    bool all_agree = true;
    for (size_t i = 0; i < job.s_list.size(); ++i) {
        double s = job.s_list[i];
        TraceResult integ = heat_integral(f, s, job.settings);
        bool agree = within_bars(mats[i].value, mats[i].error_estimate, integ.value,
                                 integ.error_estimate);
        all_agree = all_agree && agree;
        rows.push_back({{"s", s},
                        {"matrix", mats[i].value},
                        {"matrix_error", mats[i].error_estimate},
                        {"integral", integ.value},
                        {"integral_error", integ.error_estimate},
                        {"agree", agree}});
        r.csv += csv_number(s) + "," + csv_number(mats[i].value) + "," +
                 csv_number(mats[i].error_estimate) + "," + csv_number(integ.value) + "," +
                 csv_number(integ.error_estimate) + "\n";
        r.table += fmt("%-8.6g % -22.15g %-10.2e % -22.15g %-10.2e %s\n", s, mats[i].value,
                       mats[i].error_estimate, integ.value, integ.error_estimate,
                       agree ? "" : "  DISAGREE");
    }
    r.result["rows"] = rows;
    r.result["agree"] = all_agree;
    r.exit_code = all_agree ? 0 : kExitDisagreement;
    return r;
}

Rendered run_ssf(const JobSpec& job) {
    auto f = require_symbol(job, job.degree);
    std::vector<double> grid;
    if (job.grid > 0) {
        double sup = f.sup_norm_estimate();
        for (int j = 0; j < job.grid; ++j)
            grid.push_back(sup * sup * (j + 0.5) / job.grid);
    }
    SpectralShiftFunction ssf;
    if (job.route == "boundary")
        ssf = spectral_shift(f, grid, job.settings);
    else if (job.route == "principal")
        ssf = ssf_from_principal(f, grid, job.settings);
    else if (job.route == "pushforward")
        ssf = ssf_pushforward(f, grid, job.settings);
    else
        throw std::invalid_argument("unknown ssf route: " + job.route +
                                    " (boundary | principal | pushforward)");
    Rendered r;
    r.result["route"] = ssf.route;
    r.result["residual"] = ssf.residual;
    r.result["grid"] = ssf.grid;
    r.result["xi"] = ssf.xi;
    r.csv = "x,xi\n";
    r.table = fmt("route: %s   residual: %.2e\n%-22s %s\n", ssf.route.c_str(), ssf.residual,
                  "x", "xi");
    for (size_t j = 0; j < ssf.grid.size(); ++j) {
        r.csv += csv_number(ssf.grid[j]) + "," + csv_number(ssf.xi[j]) + "\n";
        r.table += fmt("%-22.15g %.15g\n", ssf.grid[j], ssf.xi[j]);
    }
    return r;
}

Rendered run_besov(const JobSpec& job) {
    if (!job.p) throw std::invalid_argument("besov needs --p");
    auto f = require_symbol(job, job.degree);
    auto rep = besov_integral(f, *job.p, job.n.value_or(0), job.settings);
    Rendered r;
    r.result["p"] = rep.p;
    r.result["derivative_order"] = rep.derivative_order;
    r.result["verdict"] = rep.verdict;
    r.result["beta"] = rep.beta_hat;
    r.result["gamma"] = rep.gamma_hat;
    r.result["partial_sum"] = rep.partial_sum;
    r.result["octaves"] = rep.octave_contributions;
    r.csv = "p,derivative_order,verdict,beta,gamma,partial_sum\n" + csv_number(rep.p) + "," +
            std::to_string(rep.derivative_order) + "," + rep.verdict + "," +
            csv_number(rep.beta_hat) + "," + csv_number(rep.gamma_hat) + "," +
            csv_number(rep.partial_sum) + "\n";
    r.table = fmt("verdict     : %s\nbeta        : %.6g\ngamma       : %.6g\n"
                  "partial sum : %.12g\nderivative  : %d\n",
                  rep.verdict.c_str(), rep.beta_hat, rep.gamma_hat, rep.partial_sum,
                  rep.derivative_order);
    return r;
}

Rendered run_krein(const JobSpec& job) {
    if (job.phi.empty()) throw std::invalid_argument("krein-check needs --phi");
    auto f = require_symbol(job, matrix_degree(job));
    auto phi = parse_scalar_function(job.phi);
    auto rep = krein_check(f, phi, job.size, job.settings);
    const std::pair<const char*, const TraceResult*> routes[] = {
        {"matrix_section", &rep.matrix_trace},
        {"ssf_integral", &rep.ssf_integral},
        {"boundary_integral", &rep.boundary_integral},
        {"disk_integral", &rep.disk_integral},
    };
    Rendered r;
    json rows = json::array();
    r.csv = "route,value,error\n";
    for (const auto& [name, tr] : routes) {
        rows.push_back({{"name", name}, {"value", tr->value}, {"error", tr->error_estimate}});
        r.csv += std::string(name) + "," + csv_number(tr->value) + "," +
                 csv_number(tr->error_estimate) + "\n";
        r.table += fmt("  %-18s  % -22.15g  %.2e\n", name, tr->value, tr->error_estimate);
    }
    r.result["routes"] = rows;
    r.result["agree"] = rep.agree;
    r.table += fmt("agree : %s\n", rep.agree ? "yes" : "NO");
    r.exit_code = rep.agree ? 0 : kExitDisagreement;
    return r;
}

Rendered run_dump(const JobSpec& job) {
    auto f = require_symbol(job, job.degree);
    Matrix M;
    if (job.which == "toeplitz")
        M = toeplitz_section(f, job.size);
    else if (job.which == "hankel")
        M = hankel_section(f, job.size);
    else if (job.which == "commutator")
        M = self_commutator(f, job.size);
    else
        throw std::invalid_argument("unknown matrix kind: " + job.which +
                                    " (toeplitz | hankel | commutator)");
    Rendered r;
    r.result["which"] = job.which;
    r.result["size"] = job.size;
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < M.cols(); ++j)
            row.push_back(json::array({M(i, j).real(), M(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    r.result["entries"] = rows;
    for (int i = 0; i < M.rows(); ++i) {
        std::string line, tline;
        for (int j = 0; j < M.cols(); ++j) {
            std::string cell = complex_cell(M(i, j));
            line += (j ? "," : "") + cell;
            tline += fmt("%-26s", cell.c_str());
        }
        r.csv += line + "\n";
        r.table += tline + "\n";
    }
    return r;
}

// ------------------------------------------------------------- reproduce

struct ReproRow {
    std::string quantity;
    cd computed;
    cd reference;
    double tolerance;
    bool pass() const { return std::abs(computed - reference) <= tolerance; }
};

Rendered render_repro(const std::string& id, const std::vector<ReproRow>& rows) {
    Rendered r;
    bool all = true;
    json jr = json::array();
    r.csv = "quantity,computed,reference,difference,tolerance,verdict\n";
    r.table = fmt("%-20s %-24s %-24s %-11s %-9s %s\n", "quantity", "computed", "reference",
                  "difference", "tolerance", "verdict");
    for (const auto& row : rows) {
        bool ok = row.pass();
        all = all && ok;
        double diff = std::abs(row.computed - row.reference);
        jr.push_back({{"quantity", row.quantity},
                      {"computed", jcomplex(row.computed)},
                      {"reference", jcomplex(row.reference)},
                      {"difference", diff},
                      {"tolerance", row.tolerance},
                      {"pass", ok}});
        std::string cs = row.computed.imag() == 0.0 ? csv_number(row.computed.real())
                                                    : complex_cell(row.computed);
        std::string rs = row.reference.imag() == 0.0 ? csv_number(row.reference.real())
                                                     : complex_cell(row.reference);
        r.csv += row.quantity + "," + cs + "," + rs + "," + csv_number(diff) + "," +
                 csv_number(row.tolerance) + "," + (ok ? "PASS" : "FAIL") + "\n";
        r.table += fmt("%-20s %-24s %-24s %-11.3e %-9.1e %s\n", row.quantity.c_str(),
                       cs.c_str(), rs.c_str(), diff, row.tolerance, ok ? "PASS" : "FAIL");
    }
    r.result["example"] = id;
    r.result["rows"] = jr;
    r.result["pass"] = all;
    r.table += std::string("verdict : ") + (all ? "PASS" : "FAIL") + "\n";
    r.exit_code = all ? 0 : kExitDisagreement;
    return r;
}

const IndexRoute& find_route(const IndexReport& rep, const std::string& name) {
    for (const auto& rt : rep.routes)
        if (rt.name == name) return rt;
    throw std::runtime_error("missing route: " + name);
}

Rendered run_reproduce(JobSpec& job) {
    const std::string& id = job.example;
    std::vector<ReproRow> rows;

    if (id == "gamma") {
        if (!job.p) job.p = 2.0;
        double p = *job.p;
        if (p <= 0.0) throw std::invalid_argument("gamma needs p > 0");
        double ref = closed_forms::gamma_ratio(p);
        double tol = p >= 2.0 ? 1e-6 : 1e-4;
        auto f = parse_symbol_expression("1+z", job.degree);
        auto phi = ScalarFunction::power(0.5 * p);
        rows.push_back({"matrix_section", trace_phi_difference(f, phi, 512).value, ref, tol});
        rows.push_back(
            {"boundary_integral", boundary_trace_integral(f, phi, job.settings).value, ref, tol});
    } else if (id == "anyv") {
        if (!job.n) job.n = 0;
        if (!job.a) job.a = 1.0;
        if (*job.n < 0 || *job.a <= 0.0)
            throw std::invalid_argument("anyv needs twist n >= 0 and alpha > 0");
        auto f = from_family(std::make_shared<TwistedPowerFamily>(*job.n, *job.a), job.degree);
        auto rep = witten_index(f, job.settings);
        double ref = closed_forms::twisted_index(*job.n, *job.a);
        rows.push_back({"pv_integral", find_route(rep, "pv_integral").value, ref, 1e-8});
        rows.push_back({"heat_limit", find_route(rep, "heat_limit").value, ref, 2e-2});
    } else if (id == "rational") {
        std::vector<std::pair<cd, int>> zeros = {{cd(-1, 0), 1}, {cd(0.5, 0), 1}};
        std::vector<std::pair<cd, int>> poles = {{cd(2, 0), 1}};
        auto f = from_family(std::make_shared<RationalFamily>(cd(1, 0), zeros, poles),
                             job.degree);
        auto rep = witten_index(f, job.settings);
        double ref = closed_forms::rational_index(zeros, poles);
        rows.push_back({"pv_integral", find_route(rep, "pv_integral").value, ref, 1e-8});
        rows.push_back({"heat_limit", find_route(rep, "heat_limit").value, ref, 2e-2});
    } else if (id == "elliptic_small_a" || id == "elliptic_large_a") {
        if (!job.a) job.a = id == "elliptic_small_a" ? 0.5 : 2.0;
        double a = *job.a;
        if (!(a > 0.0)) throw std::invalid_argument("elliptic examples need a > 0");
        double ref = closed_forms::elliptic_trace(a);
        auto f = from_family(std::make_shared<ShiftPlusFamily>(a), 8);
        auto phi = ScalarFunction::power(0.5);
        rows.push_back({"matrix_section", trace_phi_difference(f, phi, job.size).value, ref, 1e-3});
        rows.push_back(
            {"boundary_integral", boundary_trace_integral(f, phi, job.settings).value, ref, 1e-3});
    } else if (id == "shift_sum_even" || id == "shift_sum_odd") {
        if (!job.n) job.n = id == "shift_sum_even" ? 4 : 3;
        int n = *job.n;
        bool want_even = id == "shift_sum_even";
        if (n < 2 || (n % 2 == 0) != want_even)
            throw std::invalid_argument(id + " needs an " + (want_even ? "even" : "odd") +
                                        " n >= 2");
        double ref = closed_forms::shift_sum_trace(n);
        auto f = from_family(std::make_shared<ShiftSumFamily>(n), 8);
        auto phi = ScalarFunction::power(0.5);
        rows.push_back({"matrix_section", trace_phi_difference(f, phi, job.size).value, ref, 1e-3});
        rows.push_back(
            {"boundary_integral", boundary_trace_integral(f, phi, job.settings).value, ref, 1e-3});
    } else if (id == "helton_howe_monomials") {
        if (!job.m) job.m = 3;
        if (!job.n) job.n = 2;
        if (job.h.empty()) job.h = "coeffs{1:1}";
        int m = *job.m, n = *job.n;
        if (m < 1 || n < 1) throw std::invalid_argument("monomial orders must be >= 1");
        auto h = symbol_from_spec(json(job.h), job.degree);
        cd ref = closed_forms::monomial_commutator_trace(h, m, n);
        FourierSymbol em = from_coefficients({{-m, cd(1, 0)}});
        FourierSymbol en = from_coefficients({{n, cd(1, 0)}});
        int N = std::max(job.size, h.degree() + m + n + 8);
        cd op = (toeplitz_section(h, N) * commutator(em, en, N)).trace();
        rows.push_back({"operator_trace", op, ref, 1e-10});
    } else {
        throw std::invalid_argument(
            "unknown example id: " + id +
            " (rational | anyv | gamma | elliptic_small_a | elliptic_large_a | "
            "shift_sum_even | shift_sum_odd | helton_howe_monomials)");
    }
    return render_repro(id, rows);
}

Rendered dispatch(JobSpec& job) {
    if (job.command == "index") return run_index(job);
    if (job.command == "witten") return run_witten(job);
    if (job.command == "trace") return run_trace(job);
    if (job.command == "heat") return run_heat(job);
    if (job.command == "ssf") return run_ssf(job);
    if (job.command == "besov") return run_besov(job);
    if (job.command == "krein-check") return run_krein(job);
    if (job.command == "reproduce") return run_reproduce(job);
    if (job.command == "dump-matrix") return run_dump(job);
    throw std::invalid_argument("unknown command: " + job.command);
}

int run_job(JobSpec& job) {
    Rendered r = dispatch(job);
    std::string payload;
    if (job.format == "json") {
        json doc;
        doc["job"] = jobspec_to_json(job);
        doc["result"] = r.result;
        payload = doc.dump(2) + "\n";
    } else if (job.format == "csv") {
        payload = r.csv;
    } else {
        payload = r.table;
    }
    if (job.out.empty()) {
        std::fputs(payload.c_str(), stdout);
    } else {
        std::ofstream out(job.out, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot open output file: " + job.out);
        out << payload;
    }
    return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace identities, indices and spectral shift for Toeplitz operator pairs"};
    app.require_subcommand(1);

    JobSpec job;
    std::string symbol_text, config_text;
    int nodes = 0;
    double p_val = 0, a_val = 0;
    int n_val = 0, m_val = 0;
    CLI::Option *p_opt = nullptr, *n_opt = nullptr, *m_opt = nullptr, *a_opt = nullptr;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--symbol", symbol_text,
                        "symbol: expression (\"z^2*(1+z)^1.5\"), inline JSON, or @file");
        cmd->add_option("--degree", job.degree, "family truncation degree")
            ->check(CLI::Range(1, 1 << 18));
        cmd->add_option("--nodes", nodes, "circle quadrature node cap")
            ->check(CLI::Range(16, 1 << 22));
        cmd->add_option("--size", job.size, "matrix section dimension")
            ->check(CLI::Range(2, 1 << 14));
        cmd->add_option("--format", job.format, "table | json | csv")
            ->check(CLI::IsMember({"table", "json", "csv"}));
        cmd->add_option("--out", job.out, "write output to this file instead of stdout");
        cmd->add_option("--seed", job.seed, "seed recorded in the job echo");
        cmd->add_option("--config", config_text, "quadrature settings: inline JSON or @file");
        return cmd;
    };

    add_common(app.add_subcommand("index", "Fredholm index of an invertible symbol"));
    add_common(app.add_subcommand("witten", "Witten index by independent routes"));
    auto* c_trace = add_common(
        app.add_subcommand("trace", "Tr(phi(T*T) - phi(TT*)) by matrix and integral routes"));
    c_trace->add_option("--phi", job.phi, "scalar function, e.g. x^2 or exp_heat(1)");
    auto* c_heat = add_common(app.add_subcommand("heat", "heat-kernel trace differences"));
    c_heat->add_option("--s", job.s_list, "heat parameter(s)")->delimiter(',');
    auto* c_ssf = add_common(app.add_subcommand("ssf", "spectral shift function on a grid"));
    c_ssf->add_option("--grid", job.grid, "number of grid points")->check(CLI::Range(1, 65536));
    c_ssf->add_option("--route", job.route, "boundary | principal | pushforward");
    auto* c_besov = add_common(
        app.add_subcommand("besov", "Besov-class membership of the analytic symbol"));
    p_opt = c_besov->add_option("--p", p_val, "Schatten exponent");
    n_opt = c_besov->add_option("--n", n_val, "derivative order (0 = automatic)");
    auto* c_krein = add_common(
        app.add_subcommand("krein-check", "four-way trace identity consistency check"));
    c_krein->add_option("--phi", job.phi, "scalar function");
    auto* c_repro = add_common(app.add_subcommand("reproduce", "run a named worked example"));
    c_repro->set_help_flag("--help", "print help");  // frees -h / --h for the symbol option
    c_repro->add_option("id", job.example, "example id")->required();
    p_opt = c_repro->add_option("--p", p_val, "power parameter");
    n_opt = c_repro->add_option("--n", n_val, "integer parameter");
    m_opt = c_repro->add_option("--m", m_val, "monomial order");
    a_opt = c_repro->add_option("--a", a_val, "real parameter");
    c_repro->add_option("--h", job.h, "auxiliary symbol spec");
    auto* c_dump = add_common(app.add_subcommand("dump-matrix", "emit a finite section"));
    c_dump->add_option("--which", job.which, "toeplitz | hankel | commutator");

    // the besov subcommand owns its own --p/--n pair
    auto* besov_p = c_besov->get_option("--p");
    auto* besov_n = c_besov->get_option("--n");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInputError;  // usage problems are input errors
    }

    try {
        job.command = app.get_subcommands().front()->get_name();
        if (!symbol_text.empty()) {
            std::string t = symbol_text;
            size_t first = t.find_first_not_of(" \t");
            if (first != std::string::npos && t[first] == '{')
                job.symbol = json::parse(t);
            else if (first != std::string::npos && t[first] == '@')
                job.symbol = load_json_arg(t.substr(first));
            else
                job.symbol = symbol_text;
        }
        if (!config_text.empty()) job.settings = settings_from_json(load_json_arg(config_text));
        if (nodes > 0) job.settings.circle_nodes = nodes;
        if (besov_p->count() || (p_opt && p_opt->count())) job.p = p_val;
        if (besov_n->count() || (n_opt && n_opt->count())) job.n = n_val;
        if (m_opt && m_opt->count()) job.m = m_val;
        if (a_opt && a_opt->count()) job.a = a_val;
        return run_job(job);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInputError;
    }
}
