#pragma once

#include "spectral.hpp"

#include <string>
#include <utility>
#include <vector>

namespace illpose {

enum class Scheme { strang_split, rk4_interaction_picture };

struct IntegratorConfig {
    double beta = 1.0;
    double mu = 1.0;
    double dt = 1e-3;
    Scheme scheme = Scheme::strang_split;
    bool dealias = true;
    // i V_t = mu Pi_+(|V|^2 V); no dispersion
    bool szego = false;
    // multiplies the nonlinearity; 0 gives the free flow
    double mu_scale = 1.0;
    double cfl_limit = 0.5;
};

// Largest |xi| with |u^| above 1e-12 of the peak.
double max_populated_frequency(const SpectralField& u);

// Exact pointwise flow v e^{-i mu |v|^2 dt} of the splitting scheme.
SpectralField nonlinear_substep(const SpectralField& v, const IntegratorConfig& cfg, double dt);

SpectralField step(const SpectralField& u, const IntegratorConfig& cfg);
SpectralField step(const SpectralField& u, const IntegratorConfig& cfg, double dt);

struct Snapshot {
    double t = 0.0;
    SpectralField field;
};

// Rows (t, x_j, Re u, Im u), or (t, xi_k, Re u^, Im u^) when `spectral` is set.
std::string snapshots_csv(const std::vector<Snapshot>& snaps, bool spectral);

std::vector<Snapshot> evolve(const SpectralField& u0, const IntegratorConfig& cfg, double t_final,
                             const std::vector<double>& sample_times);

double mass(const SpectralField& u);
// (1/2) || |D|^{beta/2} u ||^2 + (mu/4) int |u|^4
double energy(const SpectralField& u, double beta, double mu);

struct PicardConfig {
    int order_cap = 5;
    int nodes = 32;
    // modulation window for T* and M_A norms; 0 disables both
    double A = 0.0;
    double C3 = 8.0;
    bool enforce_tstar = true;
};

struct PicardTree {
    int order_cap = 0;
    double t = 0.0;
    // U_k(t) for odd k, index (k - 1) / 2
    std::vector<SpectralField> iterates;
    std::vector<double> norms_ma;
    double tstar = 0.0;

    const SpectralField& at(int k) const;
    SpectralField partial_sum() const;
};

double picard_tstar(const SpectralField& phi, double A, double C3);

PicardTree picard_iterates(const SpectralField& phi, const IntegratorConfig& cfg, const PicardConfig& pc, double t);

// a_1 = 1, a_k = (2/(k-1)) sum_{k1+k2+k3=k} a_{k1} a_{k2} a_{k3}; even entries vanish.
std::vector<double> picard_series_coefficients(int kmax);
// (pi^2/6) (9 C)^{1/2}
double series_constant_c4(double C);

// Sum over odd k in (K, kmax] of a_k t^{(k-1)/2} (C2 A^{1/2} |phi|)^{k-1} |phi|.
double lemma_tail_bound(double t, double A, double phi_ma, double C2, int K, int kmax = 61);
// Smallest C2 with |U_k|_{M_A} <= a_k t^{(k-1)/2} (C2 A^{1/2} |phi|)^{k-1} |phi| for all stored k >= 3.
double fitted_iterate_constant(const PicardTree& tree, double A);
// |U_K| r / (1 - r) with r = |U_K| / |U_{K-2}|; infinity when r >= 1.
double geometric_tail(const std::vector<double>& norms);

struct SupportInfo {
    double measure = 0.0;
    int intervals = 0;
};

SupportInfo support_count(const SpectralField& f, double threshold);

} // namespace illpose
