#pragma once

#include "spectral.hpp"

namespace illpose {

// alpha e^{i phi} e^{-i omega t} / (x - c t + a + i p), a traveling wave of the
// Szegő equation when c = alpha^2 / (2p) and omega = alpha^2 / (4p^2).
struct RationalProfile {
    double alpha = 1.0;
    double p = 1.0;
    double c = 0.5;
    double omega = 0.25;
    double shift_a = 0.0;
    double phase_phi = 0.0;

    static RationalProfile make(double alpha, double p, double shift_a = 0.0, double phase_phi = 0.0);

    cplx value(double t, double x) const;
    cplx fourier(double t, double xi) const;
    // lambda^{1/2} V(lambda t, lambda x)
    RationalProfile rescaled(double lambda) const;
};

struct WavePair {
    RationalProfile first;
    RationalProfile second;
    double epsilon = 0.0;

    // p = 1, alpha_1 = eps, alpha_2 = eps (1 + |log eps|^{-1/2})
    static WavePair basic(double eps);
    // p = eps, alpha_1 = eps^{1/2}, alpha_2 = eps^{1/2} (1 + |log eps|^{-1/2})
    static WavePair l2(double eps);
};

// Samples of the antiperiodic image of the profile on the grid.
SpectralField eval_rational(const RationalProfile& prof, double t, const Grid& g);
// Analytic time derivative of eval_rational.
SpectralField eval_rational_dt(const RationalProfile& prof, double t, const Grid& g);

cplx cauchy_fourier(double c, double p, double t, double xi);
double cauchy_hs_norm(double p, double s);

// lambda^{beta/2} f(lambda x) on the same grid.
SpectralField rescale(const SpectralField& f, double lambda, double beta);

// 4 pi alpha_1 alpha_2 Re(e^{i(omega_2 - omega_1) t} Gamma(2s+1) / (2p - i(c_2 - c_1) t)^{2s+1})
double interference_closed_form(const RationalProfile& v1, const RationalProfile& v2, double s, double t);
// Same cross term by quadrature of the exact spectra with |xi|^{2s}.
double interference_quadrature(const RationalProfile& v1, const RationalProfile& v2, double s, double t);
// ||V(t)|| in H^s or the homogeneous norm, by quadrature.
double profile_norm(const RationalProfile& v, double s, double t, bool homogeneous);
// ||V1(t) - V2(t)|| in H^s (homogeneous = false) or the homogeneous norm, by quadrature.
double profile_distance(const RationalProfile& v1, const RationalProfile& v2, double s, double t, bool homogeneous);

struct TrilinearResult {
    SpectralField field;
    SpectralField plus_part;
    SpectralField minus_part;
    double l2_value = 0.0;
    double plus_norm = 0.0;
    double minus_norm = 0.0;
};

// Closed-form third-order half-wave Duhamel term for f = 1/(x + i eps).
TrilinearResult trilinear_halfwave(double eps, double t, const Grid& g);
// Spectrum of |f|^2 f for f = 1/(x + i eps) on the line.
cplx cubic_kernel_fourier(double eps, double xi);
// Integrand of the same Duhamel term at time tau, frequency xi.
cplx trilinear_integrand(double eps, double t, double tau, double xi);

// Q((x - beta t)/(1 - beta)) e^{it} resampled onto `target`.
SpectralField halfwave_traveling_wave(const SpectralField& profile, double beta_speed, double t, const Grid& target,
                                      double mass_tol = 1e-12);

} // namespace illpose
