#include "anonprice/cli.hpp"

#include "anonprice/errors.hpp"
#include "anonprice/instances.hpp"
#include "anonprice/io.hpp"
#include "anonprice/special_functions.hpp"
#include "anonprice/transform.hpp"
#include "anonprice/unit_demand.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

namespace anonprice {

using nlohmann::json;

namespace {

// Rounds to 10 significant digits; json then prints the shortest round-trip form.
json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return std::strtod(format_number(x).c_str(), nullptr);
}

json report(double value, double abs_err, json detail) {
    return {{"value", num(value)}, {"abs_err", num(abs_err)}, {"detail", std::move(detail)}};
}

bool closed_form_supported(const Instance& inst) {
    if (inst.gamma) return false;
    return std::all_of(inst.dists.begin(), inst.dists.end(), [](const Distribution& d) {
        return std::holds_alternative<TriangularDist>(d) || std::holds_alternative<TriInfinityDist>(d);
    });
}

json mc_detail(const McResult& mc) {
    return {{"mean", num(mc.mean)}, {"std_err", num(mc.std_err)}, {"samples", mc.samples}, {"seed", mc.seed}};
}

json violations_json(const LemmaReport& r, std::size_t limit) {
    json out = json::array();
    for (std::size_t i = 0; i < r.violations.size() && i < limit; ++i) {
        const auto& v = r.violations[i];
        out.push_back({{"check", v.check}, {"x", num(v.x)}, {"y", num(v.y)}, {"lhs", num(v.lhs)}, {"rhs", num(v.rhs)}});
    }
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write '" + path + "'");
    return f;
}

struct Options {
    std::string config;
    std::string instance;
    std::string out_file;
    std::string trace;
    double eps = 0.0;
    double gamma = 1.0;
    double h = 0.0;
    double cap = kDefaultItemCap;
    std::optional<std::size_t> n;
    std::optional<double> price;
    std::optional<double> step_override;
    std::optional<std::size_t> discretize;
    std::uint64_t mc = 0;
    std::uint64_t seed = 0;
    bool check = false;
    bool dense = false;
};

int cmd_constant(const RunConfig& cfg, std::ostream& out) {
    const auto c = cstar(cfg.quad);
    out << report(c.value, c.abs_err, {{"two_c", num(2.0 * c.value)}}).dump() << '\n';
    return kExitOk;
}

int cmd_lower_bound(const Options& o, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::size_t n = o.n ? *o.n : default_lower_bound_size(o.eps);
    const Instance inst = lower_bound_instance(o.eps, n);
    const double opt = myerson_revenue_triangular(inst);
    const auto ap = ap_optimal(inst);
    const double c = cstar(cfg.quad).value;
    json detail = {{"eps", num(o.eps)},         {"n", n},
                   {"ap_optimal", num(ap.revenue)}, {"ap_price", num(ap.price)},
                   {"cstar", num(c)},           {"meets_cstar_minus_eps", opt >= c - o.eps}};
    bool feasible = true;
    if (o.check) {
        const auto fc = feasibility_check(inst, default_feasibility_grid(inst, cfg.grid_points), Constraint::AP, 1e-6);
        feasible = fc.feasible;
        detail["feasible"] = fc.feasible;
        detail["worst_ap"] = num(fc.worst_ap);
        detail["worst_ap_price"] = num(fc.worst_ap_price);
        detail["grid_points"] = fc.points;
    }
    if (!o.out_file.empty()) {
        auto f = open_out(o.out_file);
        f << instance_to_json(inst) << '\n';
    } else {
        out << instance_to_json(inst) << '\n';
    }
    out << report(opt, 0.0, detail).dump() << '\n';
    if (!feasible) {
        err << "lower-bound: instance violates AP <= 1 + 1e-6\n";
        return kExitInvalid;
    }
    return kExitOk;
}

int cmd_opt(const Options& o, const RunConfig& cfg, std::ostream& out) {
    const Instance inst = read_instance_file(o.instance);
    const auto opt = myerson_revenue(inst, cfg.quad);
    json detail = json::object();
    if (closed_form_supported(inst)) detail["closed_form"] = num(myerson_revenue_triangular(inst));
    if (o.mc > 0) detail["mc"] = mc_detail(simulate_myerson(inst, o.mc, o.seed, cfg.mc_shards));
    out << report(opt.value, opt.abs_err, detail).dump() << '\n';
    return kExitOk;
}

int cmd_ap(const Options& o, const RunConfig& cfg, std::ostream& out) {
    const Instance inst = read_instance_file(o.instance);
    double price = 0.0, rev = 0.0;
    if (o.price) {
        price = *o.price;
        rev = ap_revenue(inst, price);
    } else {
        const auto best = ap_optimal(inst);
        price = best.price;
        rev = best.revenue;
    }
    json detail = {{"price", num(price)}, {"optimized", !o.price.has_value()}};
    if (o.mc > 0) detail["mc"] = mc_detail(simulate_ap(inst, price, o.mc, o.seed, cfg.mc_shards));
    out << report(rev, 0.0, detail).dump() << '\n';
    return kExitOk;
}

int cmd_transform(const Options& o, const RunConfig& cfg, std::ostream& out) {
    const Instance inst = read_instance_file(o.instance);
    auto trace = open_out(o.trace);
    write_trace_header(trace);
    PipelineOptions opts;
    opts.step_override = o.step_override;
    opts.keep_trace = false;
    std::uint64_t rows = 0;
    opts.on_row = [&](const TraceRow& r) {
        write_trace_row(trace, r);
        ++rows;
    };
    const auto res = run_pipeline(inst, o.eps, cfg.quad, opts);
    const auto& p = res.params;
    json detail = {{"gamma_hat", num(res.gamma_hat)},
                   {"gamma_star", num(res.gamma_star)},
                   {"psi_initial", num(res.psi_initial)},
                   {"absorbed_total", num(res.absorbed_total)},
                   {"iterations", rows},
                   {"iteration_bound", res.iteration_bound},
                   {"step", num(p.step())},
                   {"u_star", num(p.u_star)},
                   {"v_star", num(p.v_star)},
                   {"kappa_star", num(p.kappa_star)},
                   {"delta_star", num(p.delta_star)},
                   {"Delta_star", num(p.Delta_star)},
                   {"input_objective", num(res.preprocess.input_objective)},
                   {"hybrid_objective", num(res.preprocess.hybrid_objective)},
                   {"cstar", num(cstar(cfg.quad).value)}};
    out << report(res.final_objective, 0.0, detail).dump() << '\n';
    return kExitOk;
}

int cmd_cont(const Options& o, const RunConfig& cfg, std::ostream& out) {
    const auto v = opt_cont(o.gamma, cfg.quad);
    json detail = {{"gamma", num(o.gamma)}};
    if (o.discretize) {
        const Instance inst = cont_discretize(o.gamma, *o.discretize);
        const auto d = p1_objective(inst.dists, std::nullopt, cfg.quad);
        detail["discretize"] = *o.discretize;
        detail["discretized_objective"] = num(d.value);
        detail["discretized_abs_err"] = num(d.abs_err);
    }
    out << report(v.value, v.abs_err, detail).dump() << '\n';
    return kExitOk;
}

int cmd_check_lemmas(const Options& o, std::ostream& out, std::ostream& err) {
    std::vector<double> rq;
    std::vector<std::pair<double, double>> xy, sp;
    if (o.dense) {
        rq = dense_rq_grid();
        xy = dense_xy_grid();
        sp = dense_sp_grid();
    } else {
        rq = log_grid(1.0 + 1e-6, 1e6, 100);
        const auto xs = log_grid(1.0 + 1e-3, 1e3, 30);
        for (std::size_t i = 0; i < xs.size(); ++i)
            for (std::size_t j = i; j < xs.size(); ++j) xy.emplace_back(xs[i], xs[j]);
        for (int i = 0; i < 30; ++i)
            for (double d : log_grid(1e-4, 99.0, 30)) sp.emplace_back(0.577 * i / 29.0, 1.0 + d);
    }
    const auto a = check_lemma_rq(rq);
    const auto b = check_inequality_suite(xy, sp);
    const std::size_t bad = a.violations.size() + b.violations.size();
    json detail = {{"dense", o.dense},
                   {"rq_points", a.points},
                   {"suite_points", b.points},
                   {"rq_violations", violations_json(a, 10)},
                   {"suite_violations", violations_json(b, 10)}};
    out << report(static_cast<double>(bad), 0.0, detail).dump() << '\n';
    if (bad > 0) {
        err << "check-lemmas: " << bad << " violations\n";
        return kExitInvariant;
    }
    return kExitOk;
}

int cmd_item_pricing(const Options& o, const RunConfig& cfg, std::ostream& out) {
    const Instance inst = read_instance_file(o.instance);
    const auto prices = bupp_prices(inst, o.h, o.cap);
    const auto bound = bupp_expected_revenue_lower(inst, o.h, o.cap);
    json ps = json::array();
    for (double p : prices) ps.push_back(num(p));
    json detail = {{"h", num(o.h)},
                   {"cap", num(o.cap)},
                   {"prices", ps},
                   {"truncation_error", num(bound.truncation_error)},
                   {"opt", num(myerson_revenue_triangular(inst))}};
    if (o.mc > 0) detail["mc"] = mc_detail(simulate_unit_demand(inst, prices, o.mc, o.seed, cfg.mc_shards));
    out << report(bound.value, 0.0, detail).dump() << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Anonymous pricing versus Myerson: constants, instances, pipelines"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "JSON file with quadrature and grid settings");

    auto* constant = app.add_subcommand("constant", "Print C*");

    auto* lower = app.add_subcommand("lower-bound", "Emit the lower-bound instance with its OPT/AP report");
    lower->add_option("--eps", o.eps, "Target accuracy in (0, 1)")->required();
    lower->add_option("--n", o.n, "Number of steps (default ceil(80/eps^2))")->check(CLI::PositiveNumber);
    lower->add_flag("--check", o.check, "Verify AP <= 1 + 1e-6 on the feasibility grid");
    lower->add_option("--out", o.out_file, "Write the instance JSON here instead of stdout");

    auto* opt = app.add_subcommand("opt", "Myerson revenue of an instance");
    auto* ap = app.add_subcommand("ap", "Anonymous-pricing revenue of an instance");
    auto* item = app.add_subcommand("item-pricing", "Item-pricing bound for a unit-demand buyer");
    for (auto* sc : {opt, ap, item}) {
        sc->add_option("--instance", o.instance, "Instance JSON file")->required();
        sc->add_option("--mc", o.mc, "Monte Carlo samples (0 = none)");
        sc->add_option("--seed", o.seed, "Monte Carlo seed");
    }
    ap->add_option("--price", o.price, "Price (default: the optimum)");
    item->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
    item->add_option("--h", o.h, "Price discount h in [0, 1)")->required();
    item->add_option("--cap", o.cap, "Price for Tri(inf) items");

    auto* transform = app.add_subcommand("transform", "Run the transformation pipeline");
    transform->add_option("--instance", o.instance, "Instance JSON file")->required();
    transform->add_option("--eps", o.eps, "Accuracy in (0, 1)")->required();
    transform->add_option("--step-override", o.step_override, "Replace Delta* by this step");
    transform->add_option("--trace", o.trace, "Trace CSV output")->required();

    auto* cont = app.add_subcommand("cont", "opt(Cont(gamma)), optionally against its discretization");
    cont->add_option("--gamma", o.gamma, "gamma >= 1")->required();
    cont->add_option("--discretize", o.discretize, "Discretization parameter n")->check(CLI::PositiveNumber);

    auto* lemmas = app.add_subcommand("check-lemmas", "Numeric checks of the R/Q lemmas and inequality suite");
    lemmas->add_flag("--dense", o.dense, "Use the dense grids");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        const RunConfig cfg = o.config.empty() ? RunConfig{} : read_config_file(o.config);
        if (constant->parsed()) return cmd_constant(cfg, out);
        if (lower->parsed()) return cmd_lower_bound(o, cfg, out, err);
        if (opt->parsed()) return cmd_opt(o, cfg, out);
        if (ap->parsed()) return cmd_ap(o, cfg, out);
        if (transform->parsed()) return cmd_transform(o, cfg, out);
        if (cont->parsed()) return cmd_cont(o, cfg, out);
        if (lemmas->parsed()) return cmd_check_lemmas(o, out, err);
        if (item->parsed()) return cmd_item_pricing(o, cfg, out);
    } catch (const invariant_violation& e) {
        err << "invariant violation: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const feasibility_error& e) {
        err << "infeasible: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::domain_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvariant;
    }
    return kExitUsage;
}

}  // namespace anonprice
