#include "inflation.hpp"

#include "error.hpp"
#include "feasibility.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <thread>

namespace illpose {

namespace {

constexpr double pi = std::numbers::pi;

long lattice_multiple(double x, double dk, const char* what)
{
    const double q = x / dk;
    const double r = std::round(q);
    require(std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q)), ErrorCode::invalid_argument, what);
    return static_cast<long>(r);
}

struct BumpModes {
    long n = 0;
    long half = 0;
    // first bump covers modes [n - half, n + half), second [2n - half, 2n + half)
    bool in_first(long k) const { return k >= n - half && k < n + half; }
    bool in_second(long k) const { return k >= 2 * n - half && k < 2 * n + half; }
};

BumpModes bump_modes(const TwoBumpData& d, const Grid& g)
{
    require(d.R >= 0.0 && d.N > 0.0 && d.A > 0.0, ErrorCode::invalid_argument, "two-bump parameters must be positive");
    const double dk = g.dk();
    BumpModes b;
    b.n = lattice_multiple(d.N, dk, "carrier frequency is not a lattice multiple");
    const long r = lattice_multiple(d.A, dk, "bump width is not a lattice multiple");
    require(r >= 2 && r % 2 == 0, ErrorCode::invalid_argument, "bump width must span an even number of cells");
    require(d.A < d.N / 4.0, ErrorCode::invalid_argument, "bump width must stay below N/4");
    require(3.0 * d.N + 2.0 * d.A < g.nyquist(), ErrorCode::resolution, "3N + 2A exceeds the Nyquist frequency");
    b.half = r / 2;
    return b;
}

// |k + 1/2|^beta, the dispersion in units of dk^beta
long double omega_cells(long k, double beta)
{
    const long double x = std::abs(static_cast<long double>(k) + 0.5L);
    return beta == 1.0 ? x : std::pow(x, static_cast<long double>(beta));
}

// (e^{i t Phi} - 1) / (i Phi)
cplx time_factor(double t, double phi)
{
    const double x = t * phi;
    if (std::abs(x) < 1e-4) return t * cplx(1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0);
    return (std::exp(cplx(0.0, x)) - 1.0) / cplx(0.0, phi);
}

long window_nodes(double A, double h)
{
    // nodes (k + 1/2) h in [0, A/8)
    const double q = A / (8.0 * h) - 0.5;
    long c = static_cast<long>(std::ceil(q));
    while (c > 0 && (static_cast<double>(c - 1) + 0.5) * h >= A / 8.0) --c;
    while ((static_cast<double>(c) + 0.5) * h < A / 8.0) ++c;
    return c;
}

// int_lo^hi <x>^{2s} dx for 0 <= lo <= hi; logarithmic variable above x = 1
double bracket_weight(double s, double lo, double hi)
{
    double acc = 0.0;
    if (lo < 1.0)
        acc += integrate_adaptive([s](double x) { return std::pow(1.0 + x * x, s); }, lo, std::min(hi, 1.0), 1e-13);
    if (hi > 1.0) {
        const auto f = [s](double u) {
            const double x = std::exp(u);
            return x * std::pow(1.0 + x * x, s);
        };
        acc += integrate_adaptive(f, std::log(std::max(lo, 1.0)), std::log(hi), 1e-13);
    }
    return acc;
}

} // namespace

TwoBumpField make_two_bump(const TwoBumpData& data, const Grid& g)
{
    const auto b = bump_modes(data, g);
    std::vector<cplx> spec(g.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const long k = g.mode(i);
        if (b.in_first(k) || b.in_second(k)) spec[i] = data.R;
    }
    TwoBumpField out;
    out.field = SpectralField::from_spectrum(g, std::move(spec));
    out.hs_norm = norm(out.field, NormSpec::sobolev(data.s)).value;
    out.ma_norm = norm(out.field, NormSpec::modulation(data.A)).value;
    return out;
}

double indicator_measure(const TwoBumpData& data, const Grid& g, double xi)
{
    const auto b = bump_modes(data, g);
    const double dk = g.dk();
    const long k = std::lround(xi / dk - 0.5);
    long count = 0;
    for (long k1 = b.n - b.half; k1 < b.n + b.half; ++k1)
        for (long k3 = b.n - b.half; k3 < b.n + b.half; ++k3)
            if (b.in_second(k1 + k3 - k)) ++count;
    return static_cast<double>(count) * dk * dk;
}

U3Window u3_lower_bound(const TwoBumpData& data, const Grid& g, double beta, double t, double mu)
{
    require(beta > 0.0, ErrorCode::invalid_argument, "dispersion order must be positive");
    require(t >= 0.0, ErrorCode::invalid_argument, "time must be nonnegative");
    if (beta != 1.0)
        require(t <= 0.1 * std::pow(data.N, -beta) * (1.0 + 1e-12), ErrorCode::precondition,
                "t exceeds 0.1 N^{-beta}; the window phase is not controlled");
    const auto b = bump_modes(data, g);
    const double dk = g.dk();
    const double unit = std::pow(dk, beta);
    const long nodes = window_nodes(data.A, dk);
    const double R3 = data.R * data.R * data.R;
    const double pref = (dk / (2.0 * pi)) * (dk / (2.0 * pi));

    std::vector<cplx> spec(g.size());
    double acc = 0.0;
    for (long k = 0; k < nodes; ++k) {
        cplx sum = 0.0;
        const long double wk = omega_cells(k, beta);
        for (long k1 = b.n - b.half; k1 < b.n + b.half; ++k1) {
            const long double w1 = omega_cells(k1, beta);
            for (long k3 = b.n - b.half; k3 < b.n + b.half; ++k3) {
                const long k2 = k1 + k3 - k;
                if (!b.in_second(k2)) continue;
                const long double cells = wk - w1 + omega_cells(k2, beta) - omega_cells(k3, beta);
                sum += time_factor(t, static_cast<double>(cells) * unit);
            }
        }
        const double phase = -t * static_cast<double>(wk) * unit;
        const cplx v = cplx(0.0, -mu) * std::exp(cplx(0.0, phase)) * pref * R3 * sum;
        spec[g.index_of_mode(k)] = v;
        const double lo = static_cast<double>(k) * dk;
        acc += std::norm(v) * bracket_weight(data.s, lo, lo + dk);
    }
    U3Window out;
    out.field = SpectralField::from_spectrum(g, std::move(spec));
    out.hs_lower = std::sqrt(acc / (2.0 * pi));
    return out;
}

double window_indicator_norm(double A, double s, double h)
{
    require(A > 0.0 && h > 0.0, ErrorCode::invalid_argument, "window and spacing must be positive");
    const long c = window_nodes(A, h);
    if (c == 0) return 0.0;
    return std::sqrt(bracket_weight(s, 0.0, static_cast<double>(c) * h) / (2.0 * pi));
}

double InflationBudget::R(double N) const { return log_corrected ? 1.0 : std::pow(N, b); }

double InflationBudget::T(double N) const
{
    return log_corrected ? 1.0 / (N * N * std::pow(std::log(N), 1.0 / 6.0)) : std::pow(N, a);
}

double InflationBudget::A(double N) const
{
    return log_corrected ? N / std::pow(std::log(N), 1.0 / 12.0) : std::pow(N, 2.0 * theta - 2.0 * b);
}

bool budget_feasible(const InflationBudget& bud)
{
    if (bud.log_corrected) return bud.beta == 2.0 && bud.s == -0.5;
    if (!(bud.s < 0.0) || !(bud.beta > 0.0)) return false;
    const Rational beta = snap_rational(bud.beta), s = snap_rational(bud.s);
    const auto sys = build_system(system_for(beta, s), snap_rational(bud.theta), s, beta);
    return sys.theta_admissible && sys.contains(snap_rational(bud.a), snap_rational(bud.b));
}

InflationSetup inflation_setup(const InflationConfig& cfg, double N)
{
    require(N > 1.0, ErrorCode::invalid_argument, "carrier frequency must exceed 1");
    require(cfg.cells_per_bump >= 2 && cfg.cells_per_bump % 2 == 0, ErrorCode::invalid_argument,
            "cells per bump must be even");
    const double A = cfg.budget.A(N);
    const double dk = A / cfg.cells_per_bump;
    const double n = std::round(N / dk);
    require(n >= 1.0, ErrorCode::invalid_argument, "carrier frequency below one lattice cell");
    InflationSetup out;
    out.grid = Grid(2.0 * pi / dk, cfg.points);
    const double h = out.grid.dk();
    out.data.N = n * h;
    out.data.A = cfg.cells_per_bump * h;
    out.data.R = cfg.budget.R(out.data.N);
    out.data.s = cfg.budget.s;
    out.T = cfg.budget.T(out.data.N);
    return out;
}

InflationRun inflation_run(const InflationConfig& cfg, double N)
{
    const auto setup = inflation_setup(cfg, N);
    const auto& d = setup.data;
    const Grid& g = setup.grid;
    const double T = setup.T;
    const NormSpec hs = NormSpec::sobolev(d.s);

    InflationRun run;
    run.N = d.N;
    run.A = d.A;
    run.R = d.R;
    run.T = T;
    run.dk = g.dk();
    run.feasible = budget_feasible(cfg.budget);

    const auto phi = make_two_bump(d, g);
    run.norm_phi_hs = phi.hs_norm;

    IntegratorConfig ic;
    ic.beta = cfg.budget.beta;
    ic.mu = cfg.mu;
    ic.dealias = true;
    ic.dt = T / cfg.integrator_steps;

    PicardConfig pc;
    pc.order_cap = cfg.picard_order;
    pc.nodes = cfg.picard_nodes;
    pc.A = d.A;
    pc.enforce_tstar = cfg.enforce_tstar;
    require(pc.order_cap >= 5, ErrorCode::invalid_argument, "the tail estimate needs Picard order >= 5");
    const auto tree = picard_iterates(phi.field, ic, pc, T);
    run.tstar = tree.tstar;
    run.norm_u1 = norm(tree.at(1), hs).value;
    run.norm_u3 = norm(tree.at(3), hs).value;
    run.norm_u5 = norm(tree.at(5), hs).value;
    std::vector<double> tail_norms;
    for (int k = 3; k <= pc.order_cap; k += 2) tail_norms.push_back(norm(tree.at(k), hs).value);
    double tail = 0.0;
    for (std::size_t i = 1; i < tail_norms.size(); ++i) tail += tail_norms[i];
    run.tail_bound = tail + geometric_tail(tail_norms);
    const auto series = tree.partial_sum();
    run.norm_u_series = norm(series, hs).value;

    if (cfg.budget.beta == 1.0 || T <= 0.1 * std::pow(d.N, -cfg.budget.beta))
        run.norm_u3_lower = u3_lower_bound(d, g, cfg.budget.beta, T, cfg.mu).hs_lower;

    const auto& u3 = tree.at(3).spectrum();
    double peak = 0.0;
    for (const auto& v : u3) peak = std::max(peak, std::abs(v));
    run.support_u3 = peak > 0.0 ? support_count(tree.at(3), 1e-12 * peak).measure / d.A : 0.0;

    run.norm_u_final = run.norm_u_series;
    if (cfg.mode != InflationMode::series) {
        const auto snaps = evolve(phi.field, ic, T, {T});
        const auto& u = snaps.back().field;
        run.norm_u_integrator = norm(u, hs).value;
        run.series_gap = norm(u - series, hs).value;
        run.norm_u_final = run.norm_u_integrator;
    }

    const auto dom = dominance_check(run, cfg.dominance);
    run.verdict_8 = dom.u3_over_u1;
    run.verdict_9 = dom.u3_over_tail;
    run.verdict_10 = dom.u3_over_one;
    return run;
}

DominanceVerdict dominance_check(const InflationRun& run, double factor)
{
    const double u3 = run.norm_u3;
    DominanceVerdict v;
    if (!(u3 > 0.0) || !std::isfinite(u3)) return v;
    v.u3_over_u1 = u3 >= factor * run.norm_u1;
    v.u3_over_tail = std::isfinite(run.tail_bound) && u3 >= factor * run.tail_bound;
    v.u3_over_one = u3 >= factor;
    return v;
}

DominanceVerdict dominance_check(const ExperimentReport& report, double factor)
{
    require(!report.rows.empty(), ErrorCode::invalid_argument, "inflation report has no rows");
    InflationRun r;
    const auto col = [&](const char* name) { return report.column(name).back(); };
    r.norm_u1 = col("norm_u1");
    r.norm_u3 = col("norm_u3");
    r.norm_u3_lower = col("norm_u3_lower");
    r.tail_bound = col("tail_bound");
    return dominance_check(r, factor);
}

SupportFit support_fit(const TwoBumpData& data, const Grid& g, double beta, double t, int order)
{
    const auto phi = make_two_bump(data, g);
    IntegratorConfig ic;
    ic.beta = beta;
    PicardConfig pc;
    pc.order_cap = order;
    pc.nodes = 4;
    const auto tree = picard_iterates(phi.field, ic, pc, t);
    SupportFit fit;
    for (int k = 1; k <= order; k += 2) {
        const auto& u = tree.at(k);
        double peak = 0.0;
        for (const auto& v : u.spectrum()) peak = std::max(peak, std::abs(v));
        const double m = peak > 0.0 ? support_count(u, 1e-12 * peak).measure / data.A : 0.0;
        fit.measure_over_A.push_back(m);
        fit.C = std::max(fit.C, std::pow(m, 1.0 / k));
    }
    return fit;
}

ExperimentReport inflation_experiment(const InflationConfig& cfg, std::vector<double> Ns)
{
    require(!Ns.empty(), ErrorCode::invalid_argument, "empty N sweep");
    require(budget_feasible(cfg.budget), ErrorCode::infeasible, "inflation budget violates its exponent system");
    std::sort(Ns.begin(), Ns.end());

    std::vector<InflationRun> runs(Ns.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 2));
    for (std::size_t lo = 0; lo < Ns.size(); lo += workers) {
        std::vector<std::future<InflationRun>> jobs;
        for (std::size_t i = lo; i < std::min(Ns.size(), lo + workers); ++i)
            jobs.push_back(std::async(std::launch::async, [&cfg, N = Ns[i]] { return inflation_run(cfg, N); }));
        for (std::size_t i = 0; i < jobs.size(); ++i) runs[lo + i] = jobs[i].get();
    }

    const auto& bud = cfg.budget;
    ExperimentReport rep;
    rep.experiment = "inflate";
    rep.grid_info = "M=" + std::to_string(cfg.points) + " cells_per_bump=" + std::to_string(cfg.cells_per_bump);
    rep.add_config("beta", bud.beta);
    rep.add_config("s", bud.s);
    rep.add_config("theta", bud.theta);
    rep.add_config("a", bud.a);
    rep.add_config("b", bud.b);
    rep.add_config("budget", bud.log_corrected ? "log_corrected" : "power");
    rep.add_config("mu", cfg.mu);
    rep.add_config("picard_order", cfg.picard_order);
    rep.add_config("picard_nodes", cfg.picard_nodes);
    rep.add_config("integrator_steps", cfg.integrator_steps);
    rep.add_config("dominance", cfg.dominance);
    rep.add_config("width_margin", "A < N/4");
    rep.add_config("mode", cfg.mode == InflationMode::series ? "series"
                           : cfg.mode == InflationMode::integrator ? "integrator"
                                                                    : "both");
    rep.columns = {"beta", "s", "N", "A", "R", "T", "norm_phi_hs", "norm_u1", "norm_u3", "norm_u3_lower",
                   "tail_bound", "norm_u_final", "verdict_8", "verdict_9", "verdict_10", "ratio", "norm_u5",
                   "norm_u_series", "norm_u_integrator", "series_gap", "tstar", "n", "support_u3"};
    for (const auto& r : runs)
        rep.rows.push_back({bud.beta, bud.s, r.N, r.A, r.R, r.T, r.norm_phi_hs, r.norm_u1, r.norm_u3,
                            r.norm_u3_lower, r.tail_bound, r.norm_u_final, double(r.verdict_8), double(r.verdict_9),
                            double(r.verdict_10), r.ratio(), r.norm_u5, r.norm_u_series, r.norm_u_integrator,
                            r.series_gap, r.tstar, std::round(r.N / r.dk), r.support_u3});

    const auto& last = runs.back();
    bool increasing = runs.size() >= 2;
    for (std::size_t i = 1; i < runs.size(); ++i) increasing = increasing && runs[i].ratio() > runs[i - 1].ratio();
    rep.add_metric("ratio_first", runs.front().ratio());
    rep.add_metric("ratio_last", last.ratio());
    rep.add_metric("u3_lower_last", last.norm_u3_lower);

    auto& v1 = rep.add_verdict("inflation trend", "||u(T)||_{H^s} / ||phi||_{H^s} strictly increasing in N",
                               "norm inflation", increasing);
    v1.measured = {{"ratio_first", runs.front().ratio()}, {"ratio_last", last.ratio()}};
    auto& v2 = rep.add_verdict("inflation size", "ratio >= dominance factor at the largest N", "norm inflation",
                               last.ratio() >= cfg.dominance);
    v2.measured = {{"ratio", last.ratio()}, {"factor", cfg.dominance}};
    auto& v3 = rep.add_verdict("condition 8", "||U3|| >= factor ||U1||", "cubic term dominates the linear flow",
                               last.verdict_8);
    v3.measured = {{"u3", last.norm_u3}, {"u1", last.norm_u1}};
    auto& v4 = rep.add_verdict("condition 9", "||U3|| >= factor sum_{l>=2} ||U_{2l+1}||",
                               "cubic term dominates the series tail", last.verdict_9);
    v4.measured = {{"u3", last.norm_u3}, {"tail", last.tail_bound}};
    auto& v5 = rep.add_verdict("condition 10", "||U3|| >= factor", "cubic term is large", last.verdict_10);
    v5.measured = {{"u3", last.norm_u3}, {"u3_lower", last.norm_u3_lower}};
    if (cfg.mode == InflationMode::both) {
        bool agree = true;
        double worst = 0.0;
        for (const auto& r : runs) {
            agree = agree && r.series_gap <= r.tail_bound;
            worst = std::max(worst, r.series_gap / r.tail_bound);
        }
        auto& v6 = rep.add_verdict("series vs integrator", "||u_int(T) - sum_{k<=K} U_k(T)||_{H^s} <= tail bound",
                                   "convergence of the Picard series", agree);
        v6.measured = {{"worst_gap_over_tail", worst}};
    }
    return rep;
}

} // namespace illpose
