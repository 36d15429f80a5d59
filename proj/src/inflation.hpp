#pragma once

#include "evolution.hpp"
#include "report.hpp"
#include "spectral.hpp"

#include <vector>

namespace illpose {

// phi^(xi) = R (1_{N + I_A}(xi) + 1_{2N + I_A}(xi)), I_A = [-A/2, A/2)
struct TwoBumpData {
    double R = 1.0;
    double N = 0.0;
    double A = 0.0;
    double s = -0.5;
};

struct TwoBumpField {
    SpectralField field;
    double hs_norm = 0.0;
    double ma_norm = 0.0;
};

// Needs N / dk integer, A / dk even, A < N/4 and 3N + 2A below Nyquist.
TwoBumpField make_two_bump(const TwoBumpData& data, const Grid& g);

struct U3Window {
    // U_3(t) restricted to the lattice nodes in [0, A/8)
    SpectralField field;
    double hs_lower = 0.0;
};

// Exact lattice convolution of the indicator data against (e^{it Phi} - 1)/(i Phi).
U3Window u3_lower_bound(const TwoBumpData& data, const Grid& g, double beta, double t, double mu = 1.0);
// Number of lattice pairs (xi_1, xi_3) in the first bump with xi_1 + xi_3 - xi in the second.
double indicator_measure(const TwoBumpData& data, const Grid& g, double xi);

// || <xi>^s 1_{[0, A/8)} ||_{L^2}, cell-integrated on the lattice of spacing h.
double window_indicator_norm(double A, double s, double h);

// R A^{1/2} = N^theta, T = N^a, R = N^b, A = N^{2 theta - 2b}. The log-corrected
// form uses T = 1/(N^2 (log N)^{1/6}), R = 1, A = N/(log N)^{1/12}.
struct InflationBudget {
    double theta = 0.0;
    double a = 0.0;
    double b = 0.0;
    double beta = 1.0;
    double s = -0.5;
    bool log_corrected = false;

    double R(double N) const;
    double T(double N) const;
    double A(double N) const;
};

// Checks the budget against the exponent system of the feasibility module.
bool budget_feasible(const InflationBudget& b);

enum class InflationMode { series, integrator, both };

struct InflationConfig {
    InflationBudget budget;
    // A / dk, even
    int cells_per_bump = 8;
    std::size_t points = 1u << 20;
    int picard_order = 5;
    int picard_nodes = 8;
    int integrator_steps = 64;
    double dominance = 10.0;
    double mu = 1.0;
    bool enforce_tstar = true;
    InflationMode mode = InflationMode::both;
};

struct InflationRun {
    double N = 0.0, A = 0.0, R = 0.0, T = 0.0, dk = 0.0;
    double norm_phi_hs = 0.0;
    double norm_u1 = 0.0;
    double norm_u3 = 0.0;
    double norm_u3_lower = 0.0;
    double norm_u5 = 0.0;
    double tail_bound = 0.0;
    double norm_u_series = 0.0;
    double norm_u_integrator = -1.0;
    double series_gap = -1.0;
    double norm_u_final = 0.0;
    double tstar = 0.0;
    double support_u3 = 0.0;
    bool feasible = false;
    bool verdict_8 = false, verdict_9 = false, verdict_10 = false;
    double ratio() const { return norm_phi_hs > 0.0 ? norm_u_final / norm_phi_hs : 0.0; }
};

struct InflationSetup {
    TwoBumpData data;
    Grid grid;
    double T = 0.0;
};

// Aligns the lattice to the budget at carrier frequency near N: dk = A(N) / cells,
// N rounded to a multiple of dk, L = 2 pi / dk.
InflationSetup inflation_setup(const InflationConfig& cfg, double N);

InflationRun inflation_run(const InflationConfig& cfg, double N);

struct DominanceVerdict {
    bool u3_over_u1 = false;
    bool u3_over_tail = false;
    bool u3_over_one = false;
    bool all() const { return u3_over_u1 && u3_over_tail && u3_over_one; }
};

DominanceVerdict dominance_check(const InflationRun& run, double factor = 10.0);
// Uses the last row of an inflation report.
DominanceVerdict dominance_check(const ExperimentReport& report, double factor = 10.0);

struct SupportFit {
    // measure of supp U_k / A for odd k = 1, 3, ..., order
    std::vector<double> measure_over_A;
    // smallest C with measure_k <= C^k A for every stored k
    double C = 0.0;
};

// Picard iterates of the two-bump datum up to `order`, supports counted above
// 1e-12 of each iterate's peak.
SupportFit support_fit(const TwoBumpData& data, const Grid& g, double beta, double t, int order);

// Runs are ordered by N. The report is independent of the order of `Ns`.
ExperimentReport inflation_experiment(const InflationConfig& cfg, std::vector<double> Ns);

} // namespace illpose
