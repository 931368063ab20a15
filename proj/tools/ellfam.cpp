#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ellfam/ellfam.hpp>

namespace
{

using namespace ellfam;

struct Options
{
    std::string config;
    std::string out;
    std::string format;
    double tol = 0.0;
    std::size_t grid = 800;
    double alpha = 0.5;
    std::string checkpoints = "0,0.25,0.5,0.75,1";
    std::string point;
};

std::vector<double> parse_list(const std::string &text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception &) {
            throw ValidationError("cannot parse number '" + item + "'");
        }
    }
    return out;
}

cplx parse_point(const std::string &text)
{
    const auto v = parse_list(text);
    if (v.size() != 2) {
        throw ValidationError("--point expects re,im");
    }
    return {v[0], v[1]};
}

void emit(const Options &opt, const std::string &text)
{
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        write_text(opt.out, text);
    }
}

void require_config(const Options &opt)
{
    if (opt.config.empty()) {
        throw ValidationError("--config is required for this command");
    }
}

IntegratorConfig integrator_config(const Options &opt)
{
    IntegratorConfig cfg;
    if (opt.tol > 0.0) {
        cfg.rel_tol = opt.tol;
        cfg.abs_tol = 1e-2 * opt.tol;
    }
    return cfg;
}

void lattice_info(const Options &opt)
{
    require_config(opt);
    const auto cfg = load_lattice_config(opt.config);
    const auto inv = invariants(cfg.lattice, opt.tol > 0.0 ? opt.tol : cfg.tol);
    const cplx legendre = inv.eta1 * inv.lattice.omega2 - inv.eta2 * inv.lattice.omega1 - 2.0 * pi * imag_unit;
    json j = {{"v", schema_version},
              {"omega1", to_json(inv.lattice.omega1)},
              {"omega2", to_json(inv.lattice.omega2)},
              {"g2", to_json(inv.g2)},
              {"g3", to_json(inv.g3)},
              {"e", to_json(std::vector<cplx>{inv.e1, inv.e2, inv.e3})},
              {"eta1", to_json(inv.eta1)},
              {"eta2", to_json(inv.eta2)},
              {"legendre_residual", std::abs(legendre)}};
    emit(opt, j.dump(2) + "\n");
}

void eval(const Options &opt)
{
    require_config(opt);
    if (opt.point.empty()) {
        throw ValidationError("--point re,im is required for eval");
    }
    const auto cfg = load_lattice_config(opt.config);
    const auto inv = invariants(cfg.lattice, cfg.tol);
    const cplx z = parse_point(opt.point);
    json j = {{"v", schema_version},
              {"z", to_json(z)},
              {"wp", to_json(wp(z, inv))},
              {"wp_prime", to_json(wp_prime(z, inv))},
              {"zeta", to_json(zeta_w(z, inv))},
              {"sigma", to_json(sigma(z, inv))}};
    emit(opt, j.dump(2) + "\n");
}

void rational_solve(const Options &opt)
{
    require_config(opt);
    const auto cfg = load_family_config(opt.config);
    const auto *spec = std::get_if<RationalFamilySpec>(&cfg);
    if (!spec) {
        throw ValidationError("rational-solve needs a rational family config");
    }
    const auto sol = solve_rational_family(*spec, integrator_config(opt), parse_list(opt.checkpoints));
    if (opt.format == "json") {
        auto j = trajectory_json(sol.checkpoints);
        j["max_gauge_residual"] = sol.max_gauge_residual;
        emit(opt, j.dump(2) + "\n");
    } else if (opt.format.empty() || opt.format == "csv") {
        emit(opt, trajectory_csv(sol.checkpoints, spec->a0.size(), spec->b0.size()));
    } else {
        throw ValidationError("rational-solve supports --format csv or json");
    }
}

void torus_solve(const Options &opt)
{
    require_config(opt);
    const auto cfg = load_family_config(opt.config);
    const auto *spec = std::get_if<TorusFamilySpec>(&cfg);
    if (!spec) {
        throw ValidationError("torus-solve needs a torus family config");
    }
    const auto sol = solve_torus_family(*spec, integrator_config(opt), parse_list(opt.checkpoints));
    if (opt.format == "json") {
        auto j = trajectory_json(sol.checkpoints);
        j["max_gauge_residual"] = sol.max_gauge_residual;
        emit(opt, j.dump(2) + "\n");
    } else if (opt.format.empty() || opt.format == "csv") {
        emit(opt, trajectory_csv(sol.checkpoints, static_cast<std::size_t>(spec->n)));
    } else {
        throw ValidationError("torus-solve supports --format csv or json");
    }
}

int verify(const Options &opt)
{
    require_config(opt);
    const auto cfg = load_family_config(opt.config);
    std::vector<cplx> values, targets;
    json endpoint;
    if (const auto *spec = std::get_if<RationalFamilySpec>(&cfg)) {
        const auto sol = solve_rational_family(*spec, integrator_config(opt));
        values = critical_values_quadrature(sol.endpoint, *spec);
        for (const auto &p : spec->paths) {
            targets.push_back(p.end());
        }
        endpoint = {{"a", to_json(sol.endpoint.a)}, {"b", to_json(sol.endpoint.b)}};
    } else {
        const auto &tspec = std::get<TorusFamilySpec>(cfg);
        const auto sol = solve_torus_family(tspec, integrator_config(opt));
        const auto all = torus_critical_values(sol.endpoint);
        values.assign(all.begin() + 1, all.end());
        for (const auto &p : tspec.paths) {
            targets.push_back(p.end());
        }
        endpoint = {{"a", to_json(sol.endpoint.a)}, {"c", to_json(sol.endpoint.c)},
                    {"omega2", to_json(sol.endpoint.omega2)}};
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        worst = std::max(worst, std::abs(values[k] - targets[k]));
    }
    json j = {{"v", schema_version},
              {"endpoint", endpoint},
              {"critical_values", to_json(values)},
              {"targets", to_json(targets)},
              {"max_error", worst}};
    emit(opt, j.dump(2) + "\n");
    if (!(worst < 1e-6)) {
        std::cerr << "verify: critical values miss their targets by " << worst << "\n";
        return 3;
    }
    return 0;
}

void nuttall_partition(const Options &opt)
{
    const auto ctx = make_nuttall_context(opt.alpha);
    const Bounds bounds{-std::sqrt(3.0), std::sqrt(3.0), -1.5, 3.0};
    SheetOptions so;
    so.nx = so.ny = opt.grid;
    const auto field = classify_sheets(ctx, bounds, so);
    if (opt.format == "json") {
        emit(opt, sheet_field_json(field, opt.alpha).dump() + "\n");
    } else if (opt.format.empty() || opt.format == "svg") {
        emit(opt, sheet_field_svg(field));
    } else {
        throw ValidationError("nuttall-partition supports --format svg or json");
    }
}

void nuttall_critical(const Options &opt)
{
    const auto ctx = make_nuttall_context(opt.alpha);
    json pts = json::array();
    int real_roots = 0;
    for (const auto &cp : critical_points(opt.alpha, ctx)) {
        pts.push_back({{"z", to_json(cp.z)}, {"multiplicity", cp.multiplicity}, {"real", cp.real}});
        real_roots += cp.real ? cp.multiplicity : 0;
    }
    json j = {{"v", schema_version}, {"alpha", opt.alpha}, {"critical_points", pts}, {"real_roots", real_roots}};
    emit(opt, j.dump(2) + "\n");
}

void nuttall_threshold(const Options &opt)
{
    const auto ctx = make_nuttall_context(0.0);
    const double root = psi_root(ctx);
    json j = {{"v", schema_version}, {"psi_root", root}, {"distance_to_sqrt3_over_3", std::abs(root - std::sqrt(3.0) / 3.0)}};
    emit(opt, j.dump(2) + "\n");
}

}

int main(int argc, char **argv)
{
    CLI::App app{"Elliptic and rational function families"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("--config", opt.config, "Input configuration (JSON)");
        cmd->add_option("--out", opt.out, "Output path (default: standard output)");
        cmd->add_option("--tol", opt.tol, "Tolerance")->check(CLI::PositiveNumber);
    };
    auto *c_lattice = app.add_subcommand("lattice-info", "Invariants of a lattice");
    add_common(c_lattice);
    auto *c_eval = app.add_subcommand("eval", "Evaluate wp, wp', zeta and sigma at a point");
    add_common(c_eval);
    c_eval->add_option("--point", opt.point, "Point as re,im")->required();
    auto *c_rat = app.add_subcommand("rational-solve", "Integrate a rational family");
    auto *c_tor = app.add_subcommand("torus-solve", "Integrate a torus family");
    for (auto *cmd : {c_rat, c_tor}) {
        add_common(cmd);
        cmd->add_option("--format", opt.format, "csv or json");
        cmd->add_option("--checkpoints", opt.checkpoints, "Comma-separated output times");
    }
    auto *c_verify = app.add_subcommand("verify", "Solve a family and check its critical values");
    add_common(c_verify);
    auto *c_part = app.add_subcommand("nuttall-partition", "Sheet labels and contours");
    add_common(c_part);
    c_part->add_option("--alpha", opt.alpha, "Real parameter alpha");
    c_part->add_option("--grid", opt.grid, "Grid nodes per side")->check(CLI::Range(2, 20000));
    c_part->add_option("--format", opt.format, "svg or json");
    auto *c_crit = app.add_subcommand("nuttall-critical", "Critical points for real alpha");
    add_common(c_crit);
    c_crit->add_option("--alpha", opt.alpha, "Real parameter alpha");
    auto *c_thr = app.add_subcommand("nuttall-threshold", "Zero of psi");
    add_common(c_thr);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_lattice->parsed()) {
            lattice_info(opt);
        } else if (c_eval->parsed()) {
            eval(opt);
        } else if (c_rat->parsed()) {
            rational_solve(opt);
        } else if (c_tor->parsed()) {
            torus_solve(opt);
        } else if (c_verify->parsed()) {
            return verify(opt);
        } else if (c_part->parsed()) {
            nuttall_partition(opt);
        } else if (c_crit->parsed()) {
            nuttall_critical(opt);
        } else if (c_thr->parsed()) {
            nuttall_threshold(opt);
        }
    } catch (const ellfam::Error &e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
