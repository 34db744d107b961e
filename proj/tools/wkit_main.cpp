#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "wkit/abelianity.hpp"
#include "wkit/errors.hpp"
#include "wkit/suites.hpp"

namespace {

using wkit::cplx;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

cplx parse_complex(const std::string& text) {
    std::istringstream is(text);
    double re = 0, im = 0;
    if (!(is >> re)) throw wkit::ConfigError("cannot parse number '" + text + "'");
    char comma = 0;
    if (is >> comma) {
        if (comma != ',' || !(is >> im)) throw wkit::ConfigError("cannot parse number '" + text + "'");
    }
    if (!(is >> std::ws).eof()) throw wkit::ConfigError("trailing text in number '" + text + "'");
    return {re, im};
}

// Signed zeros print as 0.
std::string fmt_real(double v) { return fmt::format("{:.17g}", v == 0.0 ? 0.0 : v); }

// Parameters shared by eval and scan.
struct FnArgs {
    int N = 2;
    std::string q = "0.5";
    std::string s = "0.3";
    std::string c = "0";
    std::string p = "0.3";  // nome of theta_big
    int m = 1, n = 1, k = 1, kprime = 1, a = 1;
    std::string branch;
    std::string lambda = "1";

    void add_to(CLI::App* app) {
        app->add_option("--N", N, "rank");
        app->add_option("--q", q, "deformation parameter, RE[,IM]");
        app->add_option("--s", s, "designated value of -p^{1/2}, RE[,IM]");
        app->add_option("--c", c, "central charge, RE[,IM]");
        app->add_option("--p", p, "nome for theta_big, RE[,IM]");
        app->add_option("--m", m, "surface index m of Y_mn");
        app->add_option("--n", n, "surface index n of Y_mn");
        app->add_option("--k", k, "generator degree k");
        app->add_option("--kprime", kprime, "second generator degree k'");
        app->add_option("--a", a, "ladder length for F_a");
        app->add_option("--branch", branch, "abelianity branch fixing s and c (abel1..abel4, equal_twist)");
        app->add_option("--lambda", lambda, "branch parameter as NUM or NUM/DEN");
    }

    wkit::EllipticParams params() const {
        cplx sv = parse_complex(s), cv = parse_complex(c);
        const cplx qv = parse_complex(q);
        if (!branch.empty()) {
            wkit::qseries::AbelInstance inst;
            inst.branch = wkit::qseries::abel_branch_from_string(branch);
            inst.m = m;
            inst.n = n;
            const auto slash = lambda.find('/');
            inst.lambda_num = std::stol(lambda.substr(0, slash));
            inst.lambda_den = slash == std::string::npos ? 1 : std::stol(lambda.substr(slash + 1));
            const auto pt = wkit::qseries::resolve_abelian(inst, N, qv);
            sv = pt.s;
            cv = pt.c;
        }
        return wkit::EllipticParams::make(N, qv, sv, cv);
    }
};

using ScalarFn = std::function<cplx(cplx)>;

ScalarFn make_function(const std::string& name, const FnArgs& args) {
    namespace qs = wkit::qseries;
    wkit::EllipticParams P;
    try {
        P = args.params();
    } catch (const wkit::Error& e) {
        throw wkit::ConfigError(std::string("parameters: ") + e.what());
    } catch (const std::logic_error&) {
        throw wkit::ConfigError("cannot parse --lambda '" + args.lambda + "'");
    }
    const wkit::TruncationPolicy pol;
    if (name == "theta_big") {
        const cplx p = parse_complex(args.p);
        return [=](cplx z) { return qs::theta_big(z, p, pol); };
    }
    if (name == "tau_N") return [=](cplx z) { return qs::tau_N(z, P, pol); };
    if (name == "U") return [=](cplx z) { return qs::U(z, P, pol); };
    if (name == "F_a") return [=](cplx z) { return qs::F_a(z, args.a, P.s, P, pol); };
    if (name == "Y_mn") return [=](cplx z) { return qs::Y_mn(z, args.m, args.n, P, pol); };
    if (name == "Y_FF") return [=](cplx z) { return qs::Y_FF(z, P, pol); };
    if (name == "I") return [=](cplx z) { return qs::I_series(z, P, pol); };
    if (name == "f_cr_series")
        return [=](cplx z) { return qs::f_cr_series(z, args.k, args.kprime, P, pol); };
    if (name == "f_cr_modes")
        return [=](cplx z) { return qs::f_cr_modes(z, args.k, args.kprime, P, pol); };
    throw wkit::ConfigError("unknown function '" + name + "'");
}

int cmd_check(const std::string& config_path, const std::string& out_path) {
    wkit::RunConfig cfg;
    try {
        cfg = wkit::load_config(config_path);
    } catch (const wkit::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    const auto reports = wkit::run_suites(cfg);
    const std::string text = nlohmann::json(reports).dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "cannot write '" << out_path << "'\n";
            return kExitFail;
        }
        out << text;
    }
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.pass;
    return ok ? 0 : kExitFail;
}

int cmd_eval(const std::string& fn, const std::vector<std::string>& points, const FnArgs& args) {
    const auto f = make_function(fn, args);
    int status = 0;
    for (const auto& text : points) {
        try {
            const cplx v = f(parse_complex(text));
            std::cout << fmt_real(v.real()) << " " << fmt_real(v.imag()) << "\n";
        } catch (const wkit::ConfigError&) {
            throw;
        } catch (const wkit::Error& e) {
            std::cerr << text << ": " << e.what() << "\n";
            std::cout << "nan nan\n";
            status = kExitFail;
        }
    }
    return status;
}

int cmd_scan(const std::string& fn, const wkit::GridSpec& grid, const std::string& csv,
             const FnArgs& args) {
    if (!(grid.from < grid.to) || grid.count < 1 || (grid.log && grid.from <= 0))
        throw wkit::ConfigError("invalid grid: need from < to, points >= 1 and from > 0 for --log");
    const auto f = make_function(fn, args);
    std::ostringstream body;
    body << "x_re,x_im,f_re,f_im\n";
    int status = 0;
    for (double x : grid.points()) {
        std::string value;
        try {
            const cplx v = f(x);
            value = fmt_real(v.real()) + "," + fmt_real(v.imag());
        } catch (const wkit::Error& e) {
            std::cerr << fmt_real(x) << ": " << e.what() << "\n";
            value = "nan,nan";
            status = kExitFail;
        }
        body << fmt_real(x) << ",0," << value << "\n";
    }
    if (csv.empty() || csv == "-") {
        std::cout << body.str();
    } else {
        std::ofstream out(csv);
        if (!out) throw wkit::ConfigError("cannot write '" + csv + "'");
        out << body.str();
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical checks for the elliptic Z_N R-matrix and deformed W-algebra generators"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    auto* check = app.add_subcommand("check", "run check suites from a JSON config");
    check->add_option("--config", config_path, "config file")->required();
    check->add_option("--out", out_path, "write the report array here instead of stdout");

    std::string eval_fn;
    std::vector<std::string> eval_points;
    FnArgs eval_args;
    auto* eval = app.add_subcommand("eval", "evaluate a scalar function at points");
    eval->add_option("function", eval_fn, "theta_big, tau_N, U, F_a, Y_mn, Y_FF, I, f_cr_series, f_cr_modes")
        ->required();
    eval->add_option("--at", eval_points, "evaluation point RE[,IM]; repeatable")->required();
    eval_args.add_to(eval);

    std::string scan_fn, csv;
    wkit::GridSpec grid;
    grid.log = false;
    FnArgs scan_args;
    auto* scan = app.add_subcommand("scan", "tabulate a scalar function on a real grid");
    scan->add_option("function", scan_fn, "same functions as eval")->required();
    scan->add_option("--from", grid.from, "first grid point")->required();
    scan->add_option("--to", grid.to, "last grid point")->required();
    scan->add_option("--points", grid.count, "number of grid points")->required();
    scan->add_flag("--log", grid.log, "logarithmic spacing");
    scan->add_option("--csv", csv, "output file; stdout when omitted");
    scan_args.add_to(scan);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*check) return cmd_check(config_path, out_path);
        if (*eval) return cmd_eval(eval_fn, eval_points, eval_args);
        return cmd_scan(scan_fn, grid, csv, scan_args);
    } catch (const wkit::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitFail;
    }
}
