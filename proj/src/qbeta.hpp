#pragma once

#include "report.hpp"
#include "spectral.hpp"

#include <string>
#include <vector>

namespace illpose {

// Solution of ((|D| - beta D)/(1 - beta) + 1) Q = |Q|^2 Q.
struct QBetaProfile {
    double beta_speed = 0.0;
    SpectralField field;
    // || L Q - |Q|^2 Q ||_{L^2}
    double residual = 0.0;
    int iterations = 0;
};

struct QBetaOptions {
    int max_iterations = 6000;
    // stop once residual <= tol * ||Q||_{L^2}
    double tol = 1e-9;
};

// L(xi) = (|xi| - beta xi)/(1 - beta) + 1
double qbeta_symbol(double beta, double xi);
double qbeta_residual(const SpectralField& q, double beta);

// Shift the maximum of |Q| to x = 0 and rotate Q(0) onto the positive axis.
SpectralField gauge_fix(const SpectralField& q);
// Trigonometric interpolant of the field at an arbitrary point.
cplx evaluate_at(const SpectralField& q, double x);

// Petviashvili iteration from Q+ = 2/(2x + i). Falls back to damped updates
// when the plain iteration stalls or diverges.
QBetaProfile solve_qbeta(double beta_speed, const Grid& g, const QBetaOptions& opt = {});
QBetaProfile solve_qbeta(double beta_speed, const Grid& g, double tol);
// Same, reusing <cache_dir>/qbeta_*.csv when present. An empty dir disables the cache.
QBetaProfile solve_qbeta_cached(double beta_speed, const Grid& g, const QBetaOptions& opt, const std::string& cache_dir);

struct QPlusDistance {
    double distance = 0.0;
    double shift = 0.0;
    double phase = 0.0;
};

// min over x0, gamma of || Q(. - x0) - e^{i gamma} Q+ ||_{H^{1/2}}
QPlusDistance qplus_distance(const QBetaProfile& q);
// max over the grid of |Q(x)| <x> (1 + (1 - beta) <x>)
double decay_constant(const QBetaProfile& q);

struct KernelConvolution {
    double beta_speed = 0.0;
    std::vector<double> x;
    std::vector<double> integral;
    // integral / (|log(1 - beta)| K(x))
    std::vector<double> ratio;
    double max_ratio = 0.0;
    // max |I(x) - I(-x)| / I(x) over samples whose mirror was also requested
    double symmetry_error = 0.0;
};

double kernel_k(double beta, double y);
double kernel_convolution(double beta, double x);
KernelConvolution verify_kernel_convolution(double beta_speed, const std::vector<double>& x_samples);

struct L2DistanceConfig {
    double beta2 = 0.95;
    double beta_star = 0.9;
    // beta_2 - beta_1 = eps^{gap_exponent} (1 - beta_2)
    double gap_exponent = 7.0 / 6.0;
    QBetaOptions solver;
    std::string cache_dir;
    double mass_tol = 1e-5;
};

struct L2DistanceRun {
    double eps = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double t = 0.0;
    double d0 = 0.0;
    double dt = 0.0;
    // 2 (1 - beta_1) Re int conj(Q_1(y)) Q_2(kappa y + delta) dy
    double B = 0.0;
    double mass1 = 0.0;
    double mass2 = 0.0;
    // time of the pair eps^{-1} u(eps^{-2} t, eps^{-2} x)
    double t_rescaled = 0.0;
    double d0_rescaled = 0.0;
    double dt_rescaled = 0.0;
};

// u_beta(t, x) = Q_beta((x - beta t)/(1 - beta)) e^{it} for two nearby speeds.
L2DistanceRun l2_distance_run(double eps, const Grid& g, const L2DistanceConfig& cfg);
ExperimentReport l2_distance_experiment(const std::vector<double>& eps, const Grid& g, const L2DistanceConfig& cfg);

} // namespace illpose
