#include "evolution.hpp"

#include "error.hpp"
#include "quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace illpose {

namespace {

const cplx I(0.0, 1.0);

cplx phase(long double theta)
{
    constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const long double r = std::fmod(theta, two_pi);
    return {static_cast<double>(std::cos(r)), static_cast<double>(std::sin(r))};
}

std::vector<long double> symbol(const Grid& g, double beta)
{
    std::vector<long double> L(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        L[i] = std::pow(static_cast<long double>(std::abs(g.xi(i))), static_cast<long double>(beta));
    return L;
}

// spectrum times e^{-i tau L}
void propagate(std::vector<cplx>& s, const std::vector<long double>& L, double tau)
{
    if (tau == 0.0) return;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= phase(-static_cast<long double>(tau) * L[i]);
}

std::vector<cplx> padded_values(const Grid& big, const std::vector<cplx>& spec)
{
    const std::size_t M = spec.size();
    std::vector<cplx> pad(2 * M);
    std::copy(spec.begin(), spec.end(), pad.begin() + static_cast<std::ptrdiff_t>(M / 2));
    return inverse_transform(big, pad);
}

std::vector<cplx> truncated_spectrum(const Grid& big, const std::vector<cplx>& vals)
{
    const std::size_t M = vals.size() / 2;
    auto S = forward_transform(big, vals);
    return std::vector<cplx>(S.begin() + static_cast<std::ptrdiff_t>(M / 2), S.begin() + static_cast<std::ptrdiff_t>(M / 2 + M));
}

void check_finite(const std::vector<cplx>& v)
{
    for (const auto& x : v)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
            fail(ErrorCode::blowup, "non-finite values during time stepping (suspected focusing blow-up)");
}

// Nonlinear term mu Pi(|u|^2 u) as a spectrum, dealiased on request.
std::vector<cplx> nonlinear_spectrum(const SpectralField& u, const IntegratorConfig& cfg)
{
    auto N = cubic_product(u, cfg.mu * cfg.mu_scale, cfg.dealias);
    auto s = N.spectrum();
    if (cfg.szego) {
        const Grid& g = u.grid();
        for (std::size_t i = 0; i < s.size(); ++i)
            if (g.mode(i) < 0) s[i] = 0.0;
    }
    return s;
}

std::vector<cplx> rotate(const Grid& g, std::vector<cplx> s, const IntegratorConfig& cfg, double dt)
{
    const double k = cfg.mu * cfg.mu_scale * dt;
    if (k == 0.0) return s;
    if (cfg.dealias) {
        const Grid big(g.length(), 2 * g.size(), g.center());
        auto v = padded_values(big, s);
        for (auto& x : v) x *= std::exp(-I * (k * std::norm(x)));
        return truncated_spectrum(big, v);
    }
    auto v = inverse_transform(g, s);
    for (auto& x : v) x *= std::exp(-I * (k * std::norm(x)));
    return forward_transform(g, v);
}

SpectralField strang(const SpectralField& u, const IntegratorConfig& cfg, double dt)
{
    const Grid& g = u.grid();
    const auto L = symbol(g, cfg.beta);
    auto s = u.spectrum();
    propagate(s, L, 0.5 * dt);
    s = rotate(g, std::move(s), cfg, dt);
    propagate(s, L, 0.5 * dt);
    check_finite(s);
    return SpectralField::from_spectrum(g, std::move(s));
}

SpectralField rk4(const SpectralField& u, const IntegratorConfig& cfg, double dt)
{
    const Grid& g = u.grid();
    const std::size_t M = g.size();
    std::vector<long double> L = cfg.szego ? std::vector<long double>(M, 0.0L) : symbol(g, cfg.beta);
    const auto& v0 = u.spectrum();
    // F(tau, v) = -i e^{i tau L} N(e^{-i tau L} v)
    auto F = [&](double tau, const std::vector<cplx>& v) {
        std::vector<cplx> w = v;
        propagate(w, L, tau);
        auto n = nonlinear_spectrum(SpectralField::from_spectrum(g, std::move(w)), cfg);
        propagate(n, L, -tau);
        for (auto& x : n) x *= -I;
        return n;
    };
    auto axpy = [&](const std::vector<cplx>& a, const std::vector<cplx>& b, double c) {
        std::vector<cplx> r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    auto k1 = F(0.0, v0);
    auto k2 = F(0.5 * dt, axpy(v0, k1, 0.5 * dt));
    auto k3 = F(0.5 * dt, axpy(v0, k2, 0.5 * dt));
    auto k4 = F(dt, axpy(v0, k3, dt));
    std::vector<cplx> out(M);
    for (std::size_t i = 0; i < M; ++i) out[i] = v0[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    propagate(out, L, dt);
    check_finite(out);
    return SpectralField::from_spectrum(g, std::move(out));
}

} // namespace

double max_populated_frequency(const SpectralField& u)
{
    const auto& s = u.spectrum();
    double peak = 0.0;
    for (const auto& v : s) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    double m = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (std::abs(s[i]) > 1e-12 * peak) m = std::max(m, std::abs(u.grid().xi(i)));
    return m;
}

SpectralField nonlinear_substep(const SpectralField& v, const IntegratorConfig& cfg, double dt)
{
    return SpectralField::from_spectrum(v.grid(), rotate(v.grid(), v.spectrum(), cfg, dt));
}

SpectralField step(const SpectralField& u, const IntegratorConfig& cfg) { return step(u, cfg, cfg.dt); }

SpectralField step(const SpectralField& u, const IntegratorConfig& cfg, double dt)
{
    require(cfg.beta > 0.0, ErrorCode::invalid_argument, "dispersion exponent must be positive");
    require(dt > 0.0, ErrorCode::invalid_argument, "time step must be positive");
    require(!(cfg.szego && cfg.scheme == Scheme::strang_split), ErrorCode::invalid_argument,
            "the projected nonlinear flow has no exact solution; use the interaction-picture scheme");
    if (!cfg.szego) {
        const double kmax = max_populated_frequency(u);
        require(dt * std::pow(kmax, cfg.beta) <= cfg.cfl_limit, ErrorCode::precondition,
                "time step violates the phase-resolution constraint");
    }
    return cfg.scheme == Scheme::strang_split ? strang(u, cfg, dt) : rk4(u, cfg, dt);
}

std::vector<Snapshot> evolve(const SpectralField& u0, const IntegratorConfig& cfg, double t_final,
                             const std::vector<double>& sample_times)
{
    require(t_final >= 0.0, ErrorCode::invalid_argument, "final time must be nonnegative");
    std::vector<double> samples = sample_times;
    for (double s : samples)
        require(s >= 0.0 && s <= t_final, ErrorCode::invalid_argument, "sample time outside [0, t_final]");
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

    double peak0 = 0.0;
    for (const auto& v : u0.values()) peak0 = std::max(peak0, std::abs(v));

    std::vector<Snapshot> out;
    SpectralField u = u0;
    double t = 0.0;
    std::size_t next = 0;
    while (next < samples.size() && samples[next] <= 0.0) out.push_back({0.0, u}), ++next;
    const double eps_t = 1e-12 * t_final;
    while (t < t_final - eps_t) {
        const double target = next < samples.size() ? samples[next] : t_final;
        double h = std::min(cfg.dt, target - t);
        // avoid a sliver step right before a target
        if (target - t - h < 1e-9 * cfg.dt) h = target - t;
        u = step(u, cfg, h);
        t = (std::abs(t + h - target) <= eps_t) ? target : t + h;
        if (cfg.mu < 0.0 && peak0 > 0.0) {
            double peak = 0.0;
            for (const auto& v : u.values()) peak = std::max(peak, std::abs(v));
            if (peak > 1e6 * peak0) fail(ErrorCode::blowup, "amplitude exceeded 1e6 times its initial maximum");
        }
        while (next < samples.size() && std::abs(samples[next] - t) <= eps_t) out.push_back({t, u}), ++next;
    }
    while (next < samples.size()) out.push_back({t, u}), ++next;
    return out;
}

std::string snapshots_csv(const std::vector<Snapshot>& snaps, bool spectral)
{
    std::string out = spectral ? "t,xi,re,im\n" : "t,x,re,im\n";
    char buf[128];
    for (const auto& s : snaps) {
        const Grid& g = s.field.grid();
        const auto& v = spectral ? s.field.spectrum() : s.field.values();
        for (std::size_t j = 0; j < v.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.t, spectral ? g.xi(j) : g.x(j), v[j].real(),
                          v[j].imag());
            out += buf;
        }
    }
    return out;
}

double mass(const SpectralField& u)
{
    const double n = norm(u, NormSpec::l2()).value;
    return n * n;
}

double energy(const SpectralField& u, double beta, double mu)
{
    const Grid& g = u.grid();
    const auto& s = u.spectrum();
    double kin = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) kin += std::pow(std::abs(g.xi(i)), beta) * std::norm(s[i]);
    kin *= g.dk() / (2.0 * std::numbers::pi);
    const Grid big(g.length(), 2 * g.size(), g.center());
    auto v = padded_values(big, s);
    double quart = 0.0;
    for (const auto& x : v) quart += std::norm(x) * std::norm(x);
    quart *= big.dx();
    return 0.5 * kin + 0.25 * mu * quart;
}

const SpectralField& PicardTree::at(int k) const
{
    require(k >= 1 && k % 2 == 1 && k <= order_cap, ErrorCode::invalid_argument, "requested Picard order is not stored");
    return iterates[static_cast<std::size_t>((k - 1) / 2)];
}

SpectralField PicardTree::partial_sum() const
{
    SpectralField acc = iterates.front();
    for (std::size_t i = 1; i < iterates.size(); ++i) acc = acc + iterates[i];
    return acc;
}

double picard_tstar(const SpectralField& phi, double A, double C3)
{
    const double m = norm(phi, NormSpec::modulation(A)).value;
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return C3 / (A * m * m);
}

namespace {

// S_ij = int_0^{tau_i} l_j, i over the nodes plus the endpoint t.
std::vector<std::vector<double>> integration_matrix(const GaussRule& r, double t)
{
    const std::size_t n = r.nodes.size();
    std::vector<double> pts = r.nodes;
    pts.push_back(1.0);
    std::vector<std::vector<double>> S(n + 1, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i <= n; ++i) {
        const double x = pts[i];
        std::vector<double> Im(n);
        for (std::size_t m = 0; m < n; ++m) {
            const unsigned mm = static_cast<unsigned>(m);
            Im[m] = (m == 0) ? x + 1.0
                             : (boost::math::legendre_p(static_cast<int>(mm + 1), x) - boost::math::legendre_p(static_cast<int>(mm - 1), x)) /
                                   (2.0 * m + 1.0);
        }
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t m = 0; m < n; ++m)
                acc += r.weights[j] * boost::math::legendre_p(static_cast<int>(m), r.nodes[j]) * (2.0 * m + 1.0) / 2.0 * Im[m];
            S[i][j] = 0.5 * t * acc;
        }
    }
    return S;
}

void check_picard_band(const SpectralField& phi, int K)
{
    const Grid& g = phi.grid();
    const auto& s = phi.spectrum();
    double peak = 0.0;
    for (const auto& v : s) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::abs(s[i]) <= 1e-14 * peak) continue;
        const double xi = g.xi(i);
        if (first) lo = hi = xi, first = false;
        lo = std::min(lo, xi - 0.5 * g.dk());
        hi = std::max(hi, xi + 0.5 * g.dk());
    }
    const double j = 0.5 * (K - 1);
    const double top = (j + 1.0) * hi - j * lo, bottom = (j + 1.0) * lo - j * hi;
    require(top < g.nyquist() && bottom > -g.nyquist(), ErrorCode::resolution,
            "Picard iterates would populate frequencies beyond the grid's Nyquist limit");
}

} // namespace

PicardTree picard_iterates(const SpectralField& phi, const IntegratorConfig& cfg, const PicardConfig& pc, double t)
{
    const int K = pc.order_cap;
    require(K >= 1 && K % 2 == 1, ErrorCode::invalid_argument, "Picard order cap must be odd and positive");
    require(K <= 15, ErrorCode::invalid_argument, "Picard recursion past the order cap");
    require(t >= 0.0, ErrorCode::invalid_argument, "Picard time must be nonnegative");
    require(!cfg.szego, ErrorCode::invalid_argument, "Picard iterates are defined for the dispersive equation");
    const Grid& g = phi.grid();
    const std::size_t M = g.size();
    check_picard_band(phi, K);

    PicardTree tree;
    tree.order_cap = K;
    tree.t = t;
    if (pc.A > 0.0) {
        tree.tstar = picard_tstar(phi, pc.A, pc.C3);
        if (pc.enforce_tstar)
            require(t <= tree.tstar, ErrorCode::precondition, "Picard time exceeds the measured contraction window T*");
    }

    const auto L = symbol(g, cfg.beta);
    const auto& phihat = phi.spectrum();
    auto u1_at = [&](double tau) {
        std::vector<cplx> s = phihat;
        propagate(s, L, tau);
        return s;
    };
    tree.iterates.push_back(SpectralField::from_spectrum(g, u1_at(t)));

    const double mu = cfg.mu * cfg.mu_scale;
    if (K == 1 || t == 0.0 || mu == 0.0) {
        for (int k = 3; k <= K; k += 2) tree.iterates.push_back(SpectralField::zeros(g));
    } else {
        const auto& rule = gauss_legendre(pc.nodes);
        const std::size_t n = rule.nodes.size();
        std::vector<double> tau(n);
        for (std::size_t j = 0; j < n; ++j) tau[j] = 0.5 * t * (rule.nodes[j] + 1.0);
        const auto S = integration_matrix(rule, t);
        const Grid big(g.length(), 2 * M, g.center());

        // stored[(k-3)/2][j]: spectrum of U_k at node j, for 3 <= k <= K-2
        std::vector<std::vector<std::vector<cplx>>> stored;
        for (int k = 3; k <= K; k += 2) {
            const bool top = (k == K);
            std::vector<std::vector<cplx>> X(top ? 0 : n);
            std::vector<cplx> endpoint(M);
            for (std::size_t j = 0; j < n; ++j) {
                // physical values of U_1 .. U_{k-2} at node j on the padded grid
                std::vector<std::vector<cplx>> U;
                U.push_back(padded_values(big, u1_at(tau[j])));
                for (int kk = 3; kk <= k - 2; kk += 2) U.push_back(padded_values(big, stored[(kk - 3) / 2][j]));
                const std::size_t P = 2 * M;
                std::vector<cplx> prod(P);
                for (int k2 = 1; k2 <= k - 2; k2 += 2) {
                    const int m = k - k2;
                    std::vector<cplx> Q(P);
                    for (int k1 = 1; k1 <= m - 1; k1 += 2) {
                        const auto& a = U[(k1 - 1) / 2];
                        const auto& b = U[(m - k1 - 1) / 2];
                        for (std::size_t q = 0; q < P; ++q) Q[q] += a[q] * b[q];
                    }
                    const auto& c = U[(k2 - 1) / 2];
                    for (std::size_t q = 0; q < P; ++q) prod[q] += std::conj(c[q]) * Q[q];
                }
                auto Xj = truncated_spectrum(big, prod);
                propagate(Xj, L, -tau[j]);
                if (top) {
                    for (std::size_t i = 0; i < M; ++i) endpoint[i] += S[n][j] * Xj[i];
                } else {
                    X[j] = std::move(Xj);
                }
            }
            const cplx c = -I * mu;
            if (top) {
                for (auto& v : endpoint) v *= c;
            } else {
                std::vector<cplx> col(n);
                for (std::size_t i = 0; i < M; ++i) {
                    for (std::size_t j = 0; j < n; ++j) col[j] = X[j][i];
                    for (std::size_t r = 0; r < n; ++r) {
                        cplx acc = 0.0;
                        for (std::size_t j = 0; j < n; ++j) acc += S[r][j] * col[j];
                        X[r][i] = c * acc;
                    }
                    cplx acc = 0.0;
                    for (std::size_t j = 0; j < n; ++j) acc += S[n][j] * col[j];
                    endpoint[i] = c * acc;
                }
                for (std::size_t j = 0; j < n; ++j) propagate(X[j], L, tau[j]);
                stored.push_back(std::move(X));
            }
            propagate(endpoint, L, t);
            check_finite(endpoint);
            tree.iterates.push_back(SpectralField::from_spectrum(g, std::move(endpoint)));
        }
    }
    if (pc.A > 0.0)
        for (const auto& u : tree.iterates) tree.norms_ma.push_back(norm(u, NormSpec::modulation(pc.A)).value);
    return tree;
}

std::vector<double> picard_series_coefficients(int kmax)
{
    require(kmax >= 1, ErrorCode::invalid_argument, "series length must be positive");
    std::vector<double> a(static_cast<std::size_t>(kmax) + 1, 0.0);
    a[1] = 1.0;
    for (int k = 2; k <= kmax; ++k) {
        double acc = 0.0;
        for (int k1 = 1; k1 <= k - 2; ++k1)
            for (int k2 = 1; k1 + k2 <= k - 1; ++k2) acc += a[k1] * a[k2] * a[k - k1 - k2];
        a[k] = 2.0 / (k - 1) * acc;
    }
    return a;
}

double series_constant_c4(double C)
{
    const double pi = std::numbers::pi;
    return pi * pi / 6.0 * std::sqrt(9.0 * C);
}

double lemma_tail_bound(double t, double A, double phi_ma, double C2, int K, int kmax)
{
    const auto a = picard_series_coefficients(kmax);
    const double rho = C2 * std::sqrt(t * A) * phi_ma;
    double acc = 0.0;
    for (int k = K + 2; k <= kmax; k += 2) acc += a[static_cast<std::size_t>(k)] * std::pow(rho, k - 1) * phi_ma;
    return acc;
}

double fitted_iterate_constant(const PicardTree& tree, double A)
{
    require(!tree.norms_ma.empty(), ErrorCode::invalid_argument, "Picard tree carries no modulation norms");
    const auto a = picard_series_coefficients(tree.order_cap);
    const double phi = tree.norms_ma.front();
    double c2 = 0.0;
    for (int k = 3; k <= tree.order_cap; k += 2) {
        const double nk = tree.norms_ma[static_cast<std::size_t>((k - 1) / 2)];
        const double shape = a[static_cast<std::size_t>(k)] * std::pow(tree.t, 0.5 * (k - 1)) * std::pow(std::sqrt(A) * phi, k - 1) * phi;
        if (shape > 0.0 && nk > 0.0) c2 = std::max(c2, std::pow(nk / shape, 1.0 / (k - 1)));
    }
    return c2;
}

double geometric_tail(const std::vector<double>& norms)
{
    if (norms.size() < 2) return std::numeric_limits<double>::infinity();
    const double last = norms.back(), prev = norms[norms.size() - 2];
    if (last == 0.0) return 0.0;
    const double r = last / prev;
    if (!(r < 1.0)) return std::numeric_limits<double>::infinity();
    return last * r / (1.0 - r);
}

SupportInfo support_count(const SpectralField& f, double threshold)
{
    const auto& s = f.spectrum();
    SupportInfo info;
    bool inside = false;
    for (const auto& v : s) {
        const bool on = std::abs(v) > threshold;
        if (on) info.measure += f.grid().dk();
        if (on && !inside) ++info.intervals;
        inside = on;
    }
    return info;
}

} // namespace illpose
