#include "anonprice/transform.hpp"

#include "anonprice/errors.hpp"
#include "anonprice/instances.hpp"
#include "anonprice/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace anonprice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kAuditPoints = 256;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

// Finite support suprema of the non-vanished distributions inside (lo, hi].
std::vector<double> suprema_in(const std::vector<Distribution>& dists, double lo, double hi) {
    std::vector<double> out;
    for (const auto& d : dists) {
        if (is_vanished(d)) continue;
        const double s = support_supremum(d);
        if (s > lo && s <= hi) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// 256 points with p - 1 log-spaced over (1, hi], with R cached per hi.
struct AuditGrid {
    double hi = -1.0;
    std::vector<double> p;
    std::vector<double> r;

    void ensure(double cap) {
        if (cap == hi) return;
        hi = cap;
        const auto off = log_grid(1e-3 * (cap - 1.0), cap - 1.0, kAuditPoints);
        p.resize(off.size());
        r.resize(off.size());
        for (std::size_t k = 0; k < off.size(); ++k) {
            p[k] = k + 1 == off.size() ? cap : 1.0 + off[k];
            r[k] = R(p[k]);
        }
    }
};

thread_local AuditGrid audit_grid;

// Psi_total at every point of an ascending grid. Triangular potentials are flat
// up to v, so they go in through a difference array instead of pointwise.
void grid_potential(const std::vector<Distribution>& dists, const std::vector<double>& grid, std::vector<double>& out) {
    out.assign(grid.size(), 0.0);
    std::vector<double> diff(grid.size() + 1, 0.0);
    for (const auto& d : dists) {
        if (is_vanished(d)) continue;
        const auto* t = std::get_if<TriangularDist>(&d);
        if (t && t->q < 1.0) {
            const auto k = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), t->v) - grid.begin());
            const double plateau = peak_potential(d);
            diff[0] += plateau;
            diff[k] -= plateau;
            continue;
        }
        for (std::size_t k = 0; k < grid.size(); ++k) out[k] += potential(d, grid[k]);
    }
    double run = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        run += diff[k];
        out[k] += std::max(run, 0.0);
    }
}

struct SlackMin {
    double value = kInf;
    double at = 0.0;
};

// Minimum of R(p) - Psi(p) [- R(max(p, gamma))] over (1, hi]: audit grid,
// support suprema (where Psi jumps) and optionally a golden-section polish
// around the best grid point.
SlackMin min_c2_slack(const std::vector<Distribution>& dists, std::optional<double> gamma, double hi,
                      bool polish) {
    SlackMin best;
    if (!(hi > 1.0)) return best;
    const double r_gamma = gamma ? R(std::max(*gamma, 1.0 + 2.0 * kSingularGap)) : 0.0;
    auto slack = [&](double p, double rp, double psi) {
        double s = rp - psi;
        if (gamma) s -= p >= *gamma ? rp : r_gamma;
        return s;
    };
    audit_grid.ensure(hi);
    const auto& g = audit_grid;
    thread_local std::vector<double> psi;
    grid_potential(dists, g.p, psi);
    std::size_t arg = 0;
    for (std::size_t k = 0; k < g.p.size(); ++k) {
        const double s = slack(g.p[k], g.r[k], psi[k]);
        if (s < best.value) {
            best = {s, g.p[k]};
            arg = k;
        }
    }
    auto f = [&](double x) {
        const double rx = R(x);
        return slack(x, rx, potential_total(dists, x));
    };
    for (double x : suprema_in(dists, 1.0, hi)) {
        const double s = f(x);
        if (s < best.value) best = {s, x};
    }
    if (!polish) return best;
    double a = arg == 0 ? 1.0 + 0.5 * (g.p[0] - 1.0) : g.p[arg - 1];
    double b = arg + 1 < g.p.size() ? g.p[arg + 1] : g.p[arg];
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 100 && b - a > 1e-13 * b; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    if (fc < best.value) best = {fc, c};
    if (fd < best.value) best = {fd, d};
    return best;
}

// Solves R(p) = target starting from a nearby guess; falls back to R_inverse.
double gamma_from_R(double target, double guess) {
    double p = guess;
    for (int it = 0; it < 8; ++it) {
        if (!(p > 1.0 + kSingularGap) || !std::isfinite(p)) break;
        const double f = R(p) - target;
        if (std::abs(f) <= 1e-15 * target) return p;
        p -= f / R_prime(p);
    }
    if (p > 1.0 + kSingularGap && std::isfinite(p) && std::abs(R(p) - target) <= 1e-14 * target) return p;
    return R_inverse(target);
}

double sum_peaks(const std::vector<Distribution>& dists) {
    double s = 0.0;
    for (const auto& d : dists) s += peak_potential(d);
    return s;
}

std::size_t count_vanished(const std::vector<Distribution>& dists) {
    return static_cast<std::size_t>(std::count_if(dists.begin(), dists.end(), [](const auto& d) { return is_vanished(d); }));
}

double gap_integrand(double x) { return -std::expm1(-Q(x)); }

// The P1 objective, reusing the state's tracked tail integral at gamma.
double state_objective(const PipelineState& s, const QuadratureConfig& quad) {
    if (s.objective) return *s.objective;
    GapTail tail = [&s](double a, const QuadratureConfig& cfg) {
        if (a == s.gamma && s.gap_tail.value > 0.0) return s.gap_tail;
        return q_gap_tail(a, cfg);
    };
    return p1_objective(s.dists, s.gamma, quad, tail).value;
}

// Largest p in [v, u] with Psi(p) >= delta. Psi is non-increasing, left-continuous
// and jumps only at support suprema.
double find_u_bar(const std::vector<Distribution>& dists, double v, double u, double delta) {
    auto psi = [&](double p) { return potential_total(dists, p); };
    if (psi(u) >= delta) return u;
    std::vector<double> pts{v};
    for (double s : suprema_in(dists, v, u)) pts.push_back(s);
    pts.push_back(u);
    std::size_t j = 0;
    for (std::size_t k = 1; k < pts.size(); ++k) {
        if (psi(pts[k]) >= delta) j = k;
        else break;
    }
    double lo = pts[j];
    double hi = pts[std::min(j + 1, pts.size() - 1)];
    if (hi <= lo || psi(std::nextafter(lo, kInf)) < delta) return lo;
    while (hi - lo > 1e-12 * u) {
        const double mid = 0.5 * (lo + hi);
        if (psi(mid) >= delta) lo = mid;
        else hi = mid;
    }
    return lo;
}

bool regular_on_grid(const Distribution& d, double hi, std::string& why) {
    if (std::holds_alternative<TriangularDist>(d) || is_vanished(d)) return true;
    const double lo = support_infimum(d);
    double prev = -kInf;
    constexpr int kPts = 64;
    for (int k = 1; k <= kPts; ++k) {
        const double p = lo + (hi - lo) * static_cast<double>(k) / kPts;
        if (p > support_supremum(d)) break;
        const double phi = virtual_value(d, p);
        if (phi < prev - 1e-9 * std::max(1.0, std::abs(prev))) {
            why = "virtual value decreases near p = " + fmt(p);
            return false;
        }
        prev = phi;
    }
    return true;
}

}  // namespace

PipelineState preprocess(const Instance& inst, double eps, const QuadratureConfig& quad, PreprocessReport* report) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("preprocess: eps must lie in (0, 1)");
    if (inst.gamma) throw unsupported_error("preprocess: input must be a discrete instance");
    quad.validate();
    for (std::size_t i = 0; i < inst.dists.size(); ++i) {
        const auto& d = inst.dists[i];
        if (monopoly_stats(d).r0 > 0.0)
            throw feasibility_error("preprocess: distribution " + std::to_string(i) + " has r(0) > 0");
        if (!satisfies_c1(d))
            throw feasibility_error("preprocess: distribution " + std::to_string(i) + " violates C1");
    }

    PipelineState st;
    auto& pr = st.params;
    pr.eps = eps;
    pr.u_star = R_inverse(eps);
    st.dists.reserve(inst.dists.size());
    for (const auto& d : inst.dists) st.dists.push_back(compress(d, eps, pr.u_star));

    pr.v_star = pr.u_star;
    bool any = false;
    for (const auto& d : st.dists) {
        if (is_vanished(d)) continue;
        const auto ms = monopoly_stats(d);
        pr.v_star = any ? std::min(pr.v_star, ms.v) : ms.v;
        any = true;
        pr.kappa_star *= 1.0 - ms.q;
    }

    double input_top = 1.0;
    for (const auto& d : inst.dists)
        if (!is_vanished(d)) input_top = std::max(input_top, support_supremum(d));
    const double input_slack = min_c2_slack(inst.dists, std::nullopt, input_top, true).value;

    pr.delta_star = 0.5 * min_c2_slack(st.dists, std::nullopt, pr.u_star, true).value;
    const double lo_delta = eps * eps / 32.0;
    if (!(pr.delta_star > 0.0) || (input_slack < -1e-9 && pr.delta_star < lo_delta)) {
        throw feasibility_error("preprocess: compressed instance has no C2 slack (delta* = " + fmt(pr.delta_star) +
                                ", input slack " + fmt(input_slack) + ")");
    }
    pr.gamma_star = R_inverse(pr.delta_star);
    pr.Delta_star = (pr.v_star - 1.0) / (3.0 * pr.gamma_star * pr.gamma_star) * pr.kappa_star * pr.delta_star;

    auto fail = [](const std::string& what) { throw invariant_violation("preprocess: " + what); };
    constexpr double tol = 1e-12;
    if (pr.delta_star < lo_delta * (1.0 - tol) || pr.delta_star > 0.5 * eps * (1.0 + tol))
        fail("delta* = " + fmt(pr.delta_star) + " outside [eps^2/32, eps/2]");
    if (!(pr.v_star > 1.0) || pr.v_star > pr.u_star * (1.0 + tol) || pr.u_star > pr.gamma_star * (1.0 + tol) ||
        pr.gamma_star > 33.0 / (eps * eps))
        fail("expected 1 < v* <= u* <= gamma* <= 33/eps^2, got v* = " + fmt(pr.v_star) + ", u* = " + fmt(pr.u_star) +
             ", gamma* = " + fmt(pr.gamma_star));
    if (!(pr.Delta_star > 0.0 && pr.Delta_star < pr.delta_star))
        fail("Delta* = " + fmt(pr.Delta_star) + " outside (0, delta*)");

    st.gamma = pr.gamma_star;
    st.R_gamma = R(pr.gamma_star);
    st.u = pr.u_star;
    st.psi_total = sum_peaks(st.dists);
    st.gap_tail = q_gap_tail(st.gamma, quad);

    const double hybrid_slack_min = min_c2_slack(st.dists, st.gamma, pr.u_star, true).value;
    if (hybrid_slack_min < pr.delta_star - 1e-9)
        fail("preprocessed hybrid slack " + fmt(hybrid_slack_min) + " below delta* = " + fmt(pr.delta_star));

    const double input_obj = p1_objective(inst.dists, std::nullopt, quad).value;
    st.objective = state_objective(st, quad);
    if (*st.objective < input_obj - 5.0 * eps)
        fail("objective fell from " + fmt(input_obj) + " to " + fmt(*st.objective));

    if (report) *report = {input_obj, *st.objective, input_slack, hybrid_slack_min};
    return st;
}

DiminishResult diminish(const std::vector<Distribution>& dists, double delta, double u_bar) {
    if (!(delta >= 0.0)) throw std::invalid_argument("diminish: delta must be non-negative");
    DiminishResult out{dists, std::vector<double>(dists.size(), 0.0), 0.0};
    if (delta == 0.0) return out;
    const double available = potential_total(dists, u_bar);
    if (available < delta * (1.0 - 1e-12))
        throw std::invalid_argument("diminish: Psi(u_bar) = " + fmt(available) + " is below delta = " + fmt(delta));

    std::vector<bool> in_w(dists.size());
    for (std::size_t i = 0; i < dists.size(); ++i) in_w[i] = has_mass_at(dists[i], u_bar);

    double remaining = delta;
    auto absorb = [&](std::size_t i, double d_i) {
        if (!(d_i > 0.0)) return;
        out.dists[i] = shift_potential(dists[i], d_i, u_bar);
        out.absorbed[i] = d_i;
        out.total += d_i;
        remaining = std::max(remaining - d_i, 0.0);
    };
    for (std::size_t i = 0; i < dists.size(); ++i)
        if (!in_w[i]) absorb(i, potential(dists[i], u_bar));
    for (std::size_t i = 0; i < dists.size(); ++i)
        if (in_w[i]) absorb(i, std::min(remaining, potential(dists[i], u_bar)));
    return out;
}

VerifyReport verify_iteration(const PipelineState& before, const PipelineState& after, const QuadratureConfig& quad) {
    VerifyReport rep;
    std::ostringstream why;

    const double ob = state_objective(before, quad);
    const double oa = state_objective(after, quad);
    rep.objective_change = oa - ob;
    if (rep.objective_change < -1e-7) {
        rep.objective_monotone = false;
        why << "objective decreased by " << fmt(-rep.objective_change) << "; ";
    }

    const double u_bar = after.u;
    rep.min_slack = min_c2_slack(after.dists, after.gamma, u_bar, false).value;
    if (u_bar > 1.0 && rep.min_slack < after.params.delta_star - 1e-9) {
        rep.slack_ok = false;
        why << "slack " << fmt(rep.min_slack) << " below delta*; ";
    }

    const double absorbed = after.R_gamma - before.R_gamma;
    auto track = [&](double pb, double pa) {
        if (!std::isfinite(pb)) return;
        rep.worst_drop_error = std::max(rep.worst_drop_error, std::abs(pb - pa - absorbed));
    };
    if (u_bar > 1.0) {
        audit_grid.ensure(u_bar);
        thread_local std::vector<double> psi_b, psi_a;
        grid_potential(before.dists, audit_grid.p, psi_b);
        grid_potential(after.dists, audit_grid.p, psi_a);
        for (std::size_t k = 0; k < psi_b.size(); ++k) track(psi_b[k], psi_a[k]);
    }
    for (int k = 1; k <= 8; ++k) {
        const double p = u_bar * k / 8.0;
        track(potential_total(before.dists, p), potential_total(after.dists, p));
    }
    if (rep.worst_drop_error > 1e-9) {
        rep.potential_drop_ok = false;
        why << "potential drop off by " << fmt(rep.worst_drop_error) << "; ";
    }

    for (std::size_t i = 0; i < after.dists.size(); ++i) {
        std::string w;
        if (!regular_on_grid(after.dists[i], u_bar, w)) {
            rep.regular = false;
            why << "distribution " << i << ": " << w << "; ";
        }
    }
    rep.detail = why.str();
    return rep;
}

StepResult subroutine_step(const PipelineState& state, const QuadratureConfig& quad) {
    if (!(state.psi_total > 0.0)) throw invariant_violation("subroutine_step: potential is already 0");
    const auto& dists = state.dists;

    double v = 0.0;
    for (const auto& d : dists)
        if (!is_vanished(d) && peak_potential(d) > 0.0) v = std::max(v, monopoly_stats(d).v);
    const double delta = std::min(state.params.step(), potential_total(dists, v));
    const double u_bar = find_u_bar(dists, v, state.u, delta);
    auto dim = diminish(dists, delta, u_bar);

    StepResult res;
    auto& next = res.state;
    next.params = state.params;
    next.dists = std::move(dim.dists);
    next.u = u_bar;
    next.iteration = state.iteration + 1;
    next.R_gamma = state.R_gamma + dim.total;
    next.gamma = dim.total > 0.0 ? gamma_from_R(next.R_gamma, state.gamma) : state.gamma;
    next.gap_tail = state.gap_tail;
    if (next.gamma < state.gamma) next.gap_tail += integrate(gap_integrand, next.gamma, state.gamma, quad);
    next.psi_total = sum_peaks(next.dists);
    next.objective = state_objective(next, quad);

    res.verify = verify_iteration(state, next, quad);
    if (!res.verify.ok()) {
        throw invariant_violation("subroutine_step: iteration " + std::to_string(next.iteration) + ": " +
                                  res.verify.detail);
    }
    res.row = {next.iteration, next.gamma,   next.psi_total, *next.objective, res.verify.min_slack,
               dim.total,      next.u,       count_vanished(next.dists)};
    return res;
}

PipelineResult run_pipeline(const Instance& inst, double eps, const QuadratureConfig& quad,
                            const PipelineOptions& opts) {
    PipelineResult out;
    PipelineState st = preprocess(inst, eps, quad, &out.preprocess);
    if (opts.step_override) {
        if (!(*opts.step_override > 0.0)) throw std::invalid_argument("run_pipeline: step override must be positive");
        st.params.step_override = opts.step_override;
    }
    out.params = st.params;
    out.gamma_star = st.gamma;
    out.psi_initial = st.psi_total;
    const double bound = std::ceil(st.psi_total / st.params.step() + static_cast<double>(inst.dists.size()));
    out.iteration_bound = static_cast<std::uint64_t>(bound);

    while (st.psi_total > 0.0) {
        if (st.iteration >= out.iteration_bound) {
            throw invariant_violation("run_pipeline: iteration bound " + std::to_string(out.iteration_bound) +
                                      " reached with potential " + fmt(st.psi_total) + " left");
        }
        auto step = subroutine_step(st, quad);
        out.absorbed_total += step.row.delta;
        if (opts.on_row) opts.on_row(step.row);
        if (opts.keep_trace) out.trace.push_back(step.row);
        st = std::move(step.state);
    }
    out.gamma_hat = st.gamma;
    out.final_objective = opt_cont(st.gamma, quad).value;
    return out;
}

void write_trace_header(std::ostream& out) { out << "iter,gamma,psi_total,objective,min_slack,delta,u_bar,vanished\n"; }

void write_trace_row(std::ostream& out, const TraceRow& r) {
    out << r.iteration << ',' << fmt(r.gamma) << ',' << fmt(r.psi_total) << ',' << fmt(r.objective) << ','
        << fmt(r.min_slack) << ',' << fmt(r.delta) << ',' << fmt(r.u_bar) << ',' << r.vanished << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
    write_trace_header(out);
    for (const auto& r : trace) write_trace_row(out, r);
}

}  // namespace anonprice
