#include "qbeta.hpp"

#include "closed_forms.hpp"
#include "error.hpp"
#include "quadrature.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

namespace illpose {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double l2_of(const Grid& g, const std::vector<cplx>& s)
{
    double acc = 0.0;
    for (const auto& z : s) acc += std::norm(z);
    return std::sqrt(acc * g.dk() / two_pi);
}

double japanese(double x) { return std::sqrt(1.0 + x * x); }

std::string cache_path(const std::string& dir, double beta, const Grid& g, double tol)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "qbeta_b%.17g_L%.17g_M%zu_tol%.3g.csv", beta, g.length(), g.size(), tol);
    return (std::filesystem::path(dir) / buf).string();
}

bool load_cached(const std::string& path, double beta, const Grid& g, QBetaProfile& out)
{
    std::ifstream f(path);
    if (!f) return false;
    std::string line;
    double residual = 0.0;
    int iterations = 0;
    if (!std::getline(f, line) || std::sscanf(line.c_str(), "# residual=%lg iterations=%d", &residual, &iterations) != 2)
        return false;
    std::vector<cplx> spec;
    spec.reserve(g.size());
    while (std::getline(f, line)) {
        double xi = 0.0, re = 0.0, im = 0.0;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &xi, &re, &im) != 3) return false;
        spec.emplace_back(re, im);
    }
    if (spec.size() != g.size()) return false;
    out = {beta, SpectralField::from_spectrum(g, std::move(spec)), residual, iterations};
    return true;
}

void store_cached(const std::string& path, const QBetaProfile& q)
{
    std::error_code ec;
    std::filesystem::create_directories(std::filesystem::path(path).parent_path(), ec);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp);
        if (!f) return;
        char buf[128];
        std::snprintf(buf, sizeof buf, "# residual=%.17g iterations=%d\n", q.residual, q.iterations);
        f << buf;
        const auto& s = q.field.spectrum();
        const Grid& g = q.field.grid();
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.xi(i), s[i].real(), s[i].imag());
            f << buf;
        }
    }
    std::filesystem::rename(tmp, path, ec);
}

struct Attempt {
    std::vector<cplx> spec;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

Attempt petviashvili(const Grid& g, double beta, std::vector<cplx> spec, double omega, const QBetaOptions& opt)
{
    const std::size_t M = g.size();
    std::vector<double> L(M);
    for (std::size_t i = 0; i < M; ++i) L[i] = qbeta_symbol(beta, g.xi(i));
    Attempt a;
    double best = std::numeric_limits<double>::infinity();
    int since_best = 0;
    std::vector<cplx> r(M);
    for (int it = 0; it <= opt.max_iterations; ++it) {
        const auto q = SpectralField::from_spectrum(g, spec);
        const auto nl = cubic_product(q, 1.0, true);
        const auto& N = nl.spectrum();
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            num += L[i] * std::norm(spec[i]);
            den += std::real(std::conj(spec[i]) * N[i]);
            r[i] = L[i] * spec[i] - N[i];
        }
        const double qn = l2_of(g, spec);
        const double res = l2_of(g, r);
        a.iterations = it;
        a.residual = res;
        if (!std::isfinite(res) || !std::isfinite(qn) || qn < 1e-8 || !(den > 0.0)) return a;
        if (res <= opt.tol * qn) {
            a.converged = true;
            a.spec = std::move(spec);
            return a;
        }
        if (res < 0.999 * best) {
            best = res;
            since_best = 0;
        } else if (++since_best > 400 || res > 1e3 * best) {
            return a;
        }
        const double stab = std::pow(num / den, 1.5);
        for (std::size_t i = 0; i < M; ++i) spec[i] = (1.0 - omega) * spec[i] + omega * stab * N[i] / L[i];
    }
    return a;
}

} // namespace

double qbeta_symbol(double beta, double xi) { return (std::abs(xi) - beta * xi) / (1.0 - beta) + 1.0; }

double qbeta_residual(const SpectralField& q, double beta)
{
    const Grid& g = q.grid();
    const auto& s = q.spectrum();
    const auto nl = cubic_product(q, 1.0, true);
    const auto& N = nl.spectrum();
    std::vector<cplx> r(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) r[i] = qbeta_symbol(beta, g.xi(i)) * s[i] - N[i];
    return l2_of(g, r);
}

cplx evaluate_at(const SpectralField& q, double x)
{
    const Grid& g = q.grid();
    const auto& s = q.spectrum();
    cplx acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) acc += s[i] * std::polar(1.0, g.xi(i) * (x - g.center()));
    return acc / g.length();
}

SpectralField gauge_fix(const SpectralField& q)
{
    const Grid& g = q.grid();
    const auto& v = q.values();
    std::size_t jmax = 0;
    for (std::size_t j = 1; j < v.size(); ++j)
        if (std::abs(v[j]) > std::abs(v[jmax])) jmax = j;
    const double x0 = g.x(jmax), h = g.dx();
    auto neg = [&](double x) { return -std::norm(evaluate_at(q, x)); };
    const double xs = boost::math::tools::brent_find_minima(neg, x0 - h, x0 + h, 40).first;
    const cplx peak = evaluate_at(q, xs);
    const cplx rot = std::conj(peak) / std::abs(peak);
    const auto& s = q.spectrum();
    std::vector<cplx> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] * rot * std::polar(1.0, g.xi(i) * xs);
    return SpectralField::from_spectrum(g, std::move(out));
}

QBetaProfile solve_qbeta(double beta, const Grid& g, const QBetaOptions& opt)
{
    require(beta > 0.0 && beta < 1.0, ErrorCode::invalid_argument, "profile speed must lie in (0,1)");
    require(opt.tol > 0.0 && opt.max_iterations > 0, ErrorCode::invalid_argument, "bad solver options");
    const auto seed = eval_rational(RationalProfile::make(1.0, 0.5), 0.0, g);
    const double seed_norm = l2_of(g, seed.spectrum());
    Attempt a;
    int total = 0;
    for (double omega : {1.0, 0.5, 0.25, 0.125}) {
        a = petviashvili(g, beta, seed.spectrum(), omega, opt);
        total += a.iterations;
        if (a.converged) break;
    }
    require(a.converged, ErrorCode::non_convergence,
            "profile iteration did not converge (last residual " + format_number(a.residual) + ")");
    require(l2_of(g, a.spec) > 1e-6 * seed_norm, ErrorCode::non_convergence, "iteration collapsed to the zero profile");
    auto field = gauge_fix(SpectralField::from_spectrum(g, std::move(a.spec)));
    const double res = qbeta_residual(field, beta);
    return {beta, field, res, total};
}

QBetaProfile solve_qbeta(double beta, const Grid& g, double tol)
{
    QBetaOptions opt;
    opt.tol = tol;
    return solve_qbeta(beta, g, opt);
}

QBetaProfile solve_qbeta_cached(double beta, const Grid& g, const QBetaOptions& opt, const std::string& cache_dir)
{
    if (cache_dir.empty()) return solve_qbeta(beta, g, opt);
    const auto path = cache_path(cache_dir, beta, g, opt.tol);
    QBetaProfile q;
    if (load_cached(path, beta, g, q)) return q;
    q = solve_qbeta(beta, g, opt);
    store_cached(path, q);
    return q;
}

QPlusDistance qplus_distance(const QBetaProfile& q)
{
    const Grid& g = q.field.grid();
    const auto plus = eval_rational(RationalProfile::make(1.0, 0.5), 0.0, g);
    const auto& P = plus.spectrum();
    const auto& S = q.field.spectrum();
    const std::size_t M = S.size();
    std::vector<cplx> w(M);
    double nq = 0.0, np = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        const double weight = japanese(g.xi(i));
        w[i] = weight * std::conj(P[i]) * S[i];
        nq += weight * std::norm(S[i]);
        np += weight * std::norm(P[i]);
    }
    const double c = g.dk() / two_pi;
    // <Q(. + x0), Q+>_{H^{1/2}}
    auto inner = [&](double x0) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < M; ++i) acc += w[i] * std::polar(1.0, g.xi(i) * x0);
        return acc * c;
    };
    double best_x = 0.0, best = -1.0;
    for (double x0 = -20.0; x0 <= 20.0 + 1e-12; x0 += 0.1) {
        const double v = std::abs(inner(x0));
        if (v > best) best = v, best_x = x0;
    }
    const auto r = boost::math::tools::brent_find_minima([&](double x) { return -std::abs(inner(x)); }, best_x - 0.1,
                                                         best_x + 0.1, 40);
    const cplx ip = inner(r.first);
    const double d2 = std::max(0.0, (nq + np) * c - 2.0 * std::abs(ip));
    return {std::sqrt(d2), -r.first, std::arg(ip)};
}

double decay_constant(const QBetaProfile& q)
{
    const Grid& g = q.field.grid();
    const auto& v = q.field.values();
    double m = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double jx = japanese(g.x(j));
        m = std::max(m, std::abs(v[j]) * jx * (1.0 + (1.0 - q.beta_speed) * jx));
    }
    return m;
}

double kernel_k(double beta, double y)
{
    const double jy = japanese(y);
    return 1.0 / (jy * (1.0 + (1.0 - beta) * jy));
}

double kernel_convolution(double beta, double x)
{
    require(beta > 0.0 && beta < 1.0, ErrorCode::invalid_argument, "kernel speed must lie in (0,1)");
    auto f = [&](double y) { return kernel_k(beta, x - y) * kernel_k(beta, y); };
    const double R = std::abs(x) + 10.0 / (1.0 - beta) + 10.0;
    std::vector<double> pts{-R, -1.0, 0.0, 1.0, x - 1.0, x, x + 1.0, R};
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) acc += integrate_adaptive(f, pts[i], pts[i + 1], 1e-13);
    acc += integrate_half_line(f, R);
    acc += integrate_half_line([&](double y) { return f(-y); }, R);
    return acc;
}

KernelConvolution verify_kernel_convolution(double beta, const std::vector<double>& xs)
{
    KernelConvolution out;
    out.beta_speed = beta;
    const double lg = std::abs(std::log(1.0 - beta));
    for (double x : xs) {
        const double I = kernel_convolution(beta, x);
        out.x.push_back(x);
        out.integral.push_back(I);
        out.ratio.push_back(I / (lg * kernel_k(beta, x)));
        out.max_ratio = std::max(out.max_ratio, out.ratio.back());
    }
    for (std::size_t i = 0; i < out.x.size(); ++i)
        for (std::size_t j = 0; j < out.x.size(); ++j)
            if (out.x[j] == -out.x[i])
                out.symmetry_error =
                    std::max(out.symmetry_error, std::abs(out.integral[i] - out.integral[j]) / out.integral[i]);
    return out;
}

L2DistanceRun l2_distance_run(double eps, const Grid& g, const L2DistanceConfig& cfg)
{
    require(eps > 0.0 && eps < 1.0, ErrorCode::invalid_argument, "eps must lie in (0,1)");
    L2DistanceRun run;
    run.eps = eps;
    run.beta2 = cfg.beta2;
    run.beta1 = cfg.beta2 - std::pow(eps, cfg.gap_exponent) * (1.0 - cfg.beta2);
    require(run.beta1 > cfg.beta_star && cfg.beta2 < 1.0, ErrorCode::precondition,
            "speeds must lie above the threshold speed");
    auto f1 = std::async(std::launch::async, [&] { return solve_qbeta_cached(run.beta1, g, cfg.solver, cfg.cache_dir); });
    const auto q2 = solve_qbeta_cached(run.beta2, g, cfg.solver, cfg.cache_dir);
    const auto q1 = f1.get();

    const double b1 = run.beta1, b2 = run.beta2;
    const double kappa = (1.0 - b1) / (1.0 - b2);
    run.t = 1.0 / (std::sqrt(eps) * (b2 - b1));
    const double delta = (b1 - b2) * run.t / (1.0 - b2);
    // in y = (x - beta_1 t)/(1 - beta_1), u_2(t) becomes Q_2(kappa y + delta)
    const auto g0 = dilate_translate(q2.field, g, 1.0 / kappa, 0.0, cfg.mass_tol);
    const auto gt = dilate_translate(q2.field, g, 1.0 / kappa, -delta / kappa, cfg.mass_tol);
    const double w = std::sqrt(1.0 - b1);
    run.d0 = w * norm(q1.field - g0, NormSpec::l2()).value;
    run.dt = w * norm(q1.field - gt, NormSpec::l2()).value;
    const auto& s1 = q1.field.spectrum();
    const auto& st = gt.spectrum();
    double re = 0.0;
    for (std::size_t i = 0; i < s1.size(); ++i) re += std::real(std::conj(s1[i]) * st[i]);
    run.B = 2.0 * (1.0 - b1) * re * g.dk() / two_pi;
    run.mass1 = (1.0 - b1) * std::pow(norm(q1.field, NormSpec::l2()).value, 2);
    run.mass2 = (1.0 - b2) * std::pow(norm(q2.field, NormSpec::l2()).value, 2);
    // the L^2 norm is invariant under eps^{-1} f(eps^{-2} x)
    run.t_rescaled = eps * eps * run.t;
    run.d0_rescaled = run.d0;
    run.dt_rescaled = run.dt;
    return run;
}

ExperimentReport l2_distance_experiment(const std::vector<double>& eps, const Grid& g, const L2DistanceConfig& cfg)
{
    require(!eps.empty(), ErrorCode::invalid_argument, "empty eps list");
    ExperimentReport rep;
    rep.experiment = "uc-l2";
    rep.grid_info = "L=" + format_number(g.length()) + " M=" + std::to_string(g.size());
    rep.add_config("beta2", cfg.beta2);
    rep.add_config("beta_star", cfg.beta_star);
    rep.add_config("gap_exponent", cfg.gap_exponent);
    rep.add_config("solver_tol", cfg.solver.tol);
    rep.add_config("solver_max_iterations", cfg.solver.max_iterations);
    rep.add_config("mass_tol", cfg.mass_tol);
    rep.columns = {"eps", "beta1", "beta2", "t", "d0", "dt", "B", "d0_over_eps", "kappa", "mass1", "mass2", "t_rescaled"};
    std::vector<L2DistanceRun> runs;
    for (double e : eps) runs.push_back(l2_distance_run(e, g, cfg));
    double lo_k = 1e300, hi_k = 0.0, lo_d = 1e300, hi_d = 0.0, maxB = 0.0;
    for (const auto& r : runs) {
        const double k = r.dt / std::sqrt(1.0 - r.beta1);
        rep.rows.push_back({r.eps, r.beta1, r.beta2, r.t, r.d0, r.dt, r.B, r.d0 / r.eps, k, r.mass1, r.mass2,
                            r.t_rescaled});
        lo_k = std::min(lo_k, k);
        hi_k = std::max(hi_k, k);
        lo_d = std::min(lo_d, r.d0 / r.eps);
        hi_d = std::max(hi_d, r.d0 / r.eps);
        maxB = std::max(maxB, std::abs(r.B));
    }
    const auto q2 = solve_qbeta_cached(cfg.beta2, g, cfg.solver, cfg.cache_dir);
    const auto close = qplus_distance(q2);
    const double qnorm = norm(q2.field, NormSpec::l2()).value;
    rep.add_metric("residual_beta2", q2.residual);
    rep.add_metric("qplus_distance_beta2", close.distance);
    rep.add_metric("qplus_constant_beta2", close.distance / std::pow(1.0 - cfg.beta2, 0.125));
    rep.add_metric("profile_l2_beta2", qnorm);
    rep.add_metric("kappa_min", lo_k);
    rep.add_metric("kappa_max", hi_k);
    rep.add_metric("d0_over_eps_max", hi_d);
    rep.add_metric("max_abs_B", maxB);

    auto& v1 = rep.add_verdict("initial distance", "d0/eps stays within a 4x bracket", "initial-data distance bound",
                               hi_d <= 4.0 * lo_d && std::isfinite(hi_d));
    v1.measured = {{"min", lo_d}, {"max", hi_d}};
    auto& v2 = rep.add_verdict("later distance", "dt >= kappa sqrt(1 - beta1), kappa stable within 1.5x",
                               "separation of the traveling waves", lo_k > 0.1 && hi_k <= 1.5 * lo_k);
    v2.measured = {{"kappa_min", lo_k}, {"kappa_max", hi_k}};
    auto& v3 = rep.add_verdict("interference term", "|B| <= 0.1 (1 - beta2)", "decay of the overlap integral",
                               maxB <= 0.1 * (1.0 - cfg.beta2));
    v3.measured = {{"max_abs_B", maxB}};
    auto& v4 = rep.add_verdict("profile mass", "||Q_beta2||_{L^2} >= sqrt(pi/2)", "profile mass lower bound",
                               qnorm >= std::sqrt(std::numbers::pi / 2.0));
    v4.measured = {{"l2", qnorm}};
    auto& v5 = rep.add_verdict("profile residual", "residual <= tol ||Q||", "profile equation",
                               q2.residual <= 10.0 * cfg.solver.tol * qnorm);
    v5.measured = {{"residual", q2.residual}};
    return rep;
}

} // namespace illpose
