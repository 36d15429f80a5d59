#include "closed_forms.hpp"

#include "error.hpp"
#include "quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>

namespace illpose {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

void check_window(const RationalProfile& prof, double t, const Grid& g)
{
    const double pole = prof.c * t - prof.shift_a;
    require(std::abs(pole - g.center()) < 0.25 * g.length(), ErrorCode::window_overflow,
            "traveling wave drifted too close to the window boundary");
}

} // namespace

RationalProfile RationalProfile::make(double alpha, double p, double shift_a, double phase_phi)
{
    require(p > 0.0 && std::isfinite(p), ErrorCode::invalid_argument, "pole height must be positive");
    require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::invalid_argument, "amplitude must be positive");
    RationalProfile r;
    r.alpha = alpha;
    r.p = p;
    r.c = alpha * alpha / (2.0 * p);
    r.omega = alpha * alpha / (4.0 * p * p);
    r.shift_a = shift_a;
    r.phase_phi = phase_phi;
    return r;
}

cplx RationalProfile::value(double t, double x) const
{
    return alpha * std::exp(I * (phase_phi - omega * t)) / cplx(x - c * t + shift_a, p);
}

cplx RationalProfile::fourier(double t, double xi) const
{
    return alpha * std::exp(I * (phase_phi - omega * t)) * std::exp(I * shift_a * xi) * cauchy_fourier(c, p, t, xi);
}

RationalProfile RationalProfile::rescaled(double lambda) const
{
    require(lambda > 0.0, ErrorCode::invalid_argument, "scaling factor must be positive");
    return make(alpha / std::sqrt(lambda), p / lambda, shift_a / lambda, phase_phi);
}

WavePair WavePair::basic(double eps)
{
    require(eps > 0.0 && eps < 1.0, ErrorCode::invalid_argument, "construction parameter must lie in (0, 1)");
    const double d = 1.0 / std::sqrt(std::abs(std::log(eps)));
    return {RationalProfile::make(eps, 1.0), RationalProfile::make(eps * (1.0 + d), 1.0), eps};
}

WavePair WavePair::l2(double eps)
{
    require(eps > 0.0 && eps < 1.0, ErrorCode::invalid_argument, "construction parameter must lie in (0, 1)");
    const double d = 1.0 / std::sqrt(std::abs(std::log(eps)));
    const double a = std::sqrt(eps);
    return {RationalProfile::make(a, eps), RationalProfile::make(a * (1.0 + d), eps), eps};
}

SpectralField eval_rational(const RationalProfile& prof, double t, const Grid& g)
{
    check_window(prof, t, g);
    const double L = g.length();
    const cplx amp = prof.alpha * std::exp(I * (prof.phase_phi - prof.omega * t));
    return SpectralField::sample(g, [&](double x) {
        const cplx z(x - prof.c * t + prof.shift_a, prof.p);
        return amp * (pi / L) / std::sin(pi * z / L);
    });
}

SpectralField eval_rational_dt(const RationalProfile& prof, double t, const Grid& g)
{
    check_window(prof, t, g);
    const double L = g.length();
    const cplx amp = prof.alpha * std::exp(I * (prof.phase_phi - prof.omega * t));
    return SpectralField::sample(g, [&](double x) {
        const cplx z(x - prof.c * t + prof.shift_a, prof.p);
        const cplx sn = std::sin(pi * z / L), cs = std::cos(pi * z / L);
        const cplx k = (pi / L) / sn;
        const cplx dk = -(pi / L) * (pi / L) * cs / (sn * sn);
        return amp * (-I * prof.omega * k - prof.c * dk);
    });
}

cplx cauchy_fourier(double c, double p, double t, double xi)
{
    require(p > 0.0, ErrorCode::invalid_argument, "pole height must be positive");
    if (xi < 0.0) return 0.0;
    if (xi == 0.0) return -pi * I;
    return -2.0 * pi * I * std::exp(-I * (c * t * xi)) * std::exp(-p * xi);
}

double cauchy_hs_norm(double p, double s)
{
    require(p > 0.0, ErrorCode::invalid_argument, "pole height must be positive");
    require(s > -0.5, ErrorCode::invalid_argument, "homogeneous norm of the Cauchy kernel diverges for s <= -1/2");
    return std::sqrt(2.0 * pi * boost::math::tgamma(2.0 * s + 1.0)) / std::pow(2.0 * p, s + 0.5);
}

SpectralField rescale(const SpectralField& f, double lambda, double beta)
{
    require(lambda > 0.0 && beta > 0.0, ErrorCode::invalid_argument, "scaling parameters must be positive");
    if (lambda == 1.0) return SpectralField::from_spectrum(f.grid(), f.spectrum());
    auto g = dilate_translate(f, f.grid(), 1.0 / lambda, 0.0);
    return g.scaled(std::pow(lambda, 0.5 * beta));
}

double interference_closed_form(const RationalProfile& v1, const RationalProfile& v2, double s, double t)
{
    require(v1.p == v2.p, ErrorCode::invalid_argument, "interference closed form needs equal pole heights");
    const double q = 2.0 * s + 1.0;
    const cplx denom(2.0 * v1.p, -((v2.c - v1.c) * t - (v2.shift_a - v1.shift_a)));
    const cplx shift_phase = std::exp(I * (v1.phase_phi - v2.phase_phi));
    const cplx val = std::exp(I * ((v2.omega - v1.omega) * t)) * shift_phase * boost::math::tgamma(q) / std::pow(denom, q);
    return 4.0 * pi * v1.alpha * v2.alpha * val.real();
}

namespace {

double half_line_spectral(const std::function<double(double)>& integrand, double p)
{
    // substitute eta = 2 p xi so the exponential decay has unit scale
    auto g = [&](double eta) { return integrand(eta / (2.0 * p)) / (2.0 * p); };
    return integrate_half_line(g, 0.0, 1e-12);
}

} // namespace

double interference_quadrature(const RationalProfile& v1, const RationalProfile& v2, double s, double t)
{
    auto f = [&](double xi) {
        if (xi <= 0.0) return 0.0;
        return 2.0 * std::pow(xi, 2.0 * s) * (v1.fourier(t, xi) * std::conj(v2.fourier(t, xi))).real();
    };
    return half_line_spectral(f, std::min(v1.p, v2.p)) / (2.0 * pi);
}

double profile_norm(const RationalProfile& v, double s, double t, bool homogeneous)
{
    auto f = [&](double xi) {
        if (xi <= 0.0) return 0.0;
        const double w = homogeneous ? std::pow(xi, 2.0 * s) : std::exp(2.0 * s * std::log(std::hypot(1.0, xi)));
        return w * std::norm(v.fourier(t, xi));
    };
    return std::sqrt(half_line_spectral(f, v.p) / (2.0 * pi));
}

double profile_distance(const RationalProfile& v1, const RationalProfile& v2, double s, double t, bool homogeneous)
{
    auto f = [&](double xi) {
        if (xi <= 0.0) return 0.0;
        const double w = homogeneous ? std::pow(xi, 2.0 * s) : std::exp(2.0 * s * std::log(std::hypot(1.0, xi)));
        return w * std::norm(v1.fourier(t, xi) - v2.fourier(t, xi));
    };
    return std::sqrt(half_line_spectral(f, std::min(v1.p, v2.p)) / (2.0 * pi));
}

cplx cubic_kernel_fourier(double eps, double xi)
{
    if (xi > 0.0) return -2.0 * pi * I * std::exp(-eps * xi) * (1.0 / (4.0 * eps * eps) + xi / (2.0 * eps));
    if (xi < 0.0) return -(1.0 / (4.0 * eps * eps)) * 2.0 * pi * I * std::exp(eps * xi);
    return 0.0;
}

cplx trilinear_integrand(double eps, double t, double tau, double xi)
{
    return std::exp(-I * ((t - tau) * std::abs(xi) + tau * xi)) * cubic_kernel_fourier(eps, xi);
}

TrilinearResult trilinear_halfwave(double eps, double t, const Grid& g)
{
    require(eps > 0.0 && t > 0.0 && t <= 1.0, ErrorCode::invalid_argument, "trilinear term needs eps > 0 and t in (0, 1]");
    require(eps >= 8.0 * g.dx(), ErrorCode::resolution, "grid does not resolve the kernel width");
    require(std::exp(-eps * g.nyquist()) * g.nyquist() / eps < 1e-14, ErrorCode::resolution,
            "kernel spectrum is not resolved below the Nyquist frequency");
    const std::size_t M = g.size();
    std::vector<cplx> plus(M), minus(M);
    for (std::size_t i = 0; i < M; ++i) {
        const double xi = g.xi(i);
        if (xi > 0.0) {
            plus[i] = t * std::exp(-I * (xi * t)) * cubic_kernel_fourier(eps, xi);
        } else {
            // 2 pi e^{it xi} (1 - e^{-2it xi}) / (2 xi) e^{eps xi}, times -1/(4 eps^2)
            const double x = t * xi;
            const cplx one_minus(2.0 * std::sin(x) * std::sin(x), std::sin(2.0 * x));
            const cplx quot = (std::abs(x) < 1e-8) ? cplx(0.0, t) : one_minus / (2.0 * xi);
            minus[i] = -(1.0 / (4.0 * eps * eps)) * 2.0 * pi * std::exp(I * x) * quot * std::exp(eps * xi);
        }
    }
    TrilinearResult r;
    r.plus_part = SpectralField::from_spectrum(g, plus);
    r.minus_part = SpectralField::from_spectrum(g, minus);
    std::vector<cplx> tot(M);
    for (std::size_t i = 0; i < M; ++i) tot[i] = plus[i] + minus[i];
    r.field = SpectralField::from_spectrum(g, std::move(tot));
    r.plus_norm = norm(r.plus_part, NormSpec::l2()).value;
    r.minus_norm = norm(r.minus_part, NormSpec::l2()).value;
    r.l2_value = norm(r.field, NormSpec::l2()).value;
    return r;
}

SpectralField halfwave_traveling_wave(const SpectralField& profile, double beta_speed, double t, const Grid& target,
                                      double mass_tol)
{
    require(beta_speed > 0.0 && beta_speed < 1.0, ErrorCode::invalid_argument, "speed must lie in (0, 1)");
    require(std::abs(beta_speed * t - target.center()) < 0.25 * target.length(), ErrorCode::window_overflow,
            "traveling wave drifted too close to the window boundary");
    auto u = dilate_translate(profile, target, 1.0 - beta_speed, beta_speed * t, mass_tol);
    return u.scaled(std::exp(I * t));
}

} // namespace illpose
