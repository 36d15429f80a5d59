#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace illpose {

using Rational = boost::multiprecision::cpp_rational;

// Nearest rational with denominator <= 10^6 when it lies within 1e-12 of x,
// otherwise the exact binary value of x.
Rational snap_rational(double x);
double to_double(const Rational& q);

enum class SystemCase { halfwave, frac_low_s, frac_mid_s };

// c_a a + c_b b + c_0 < 0, or > 0 when `greater` is set
struct Inequality {
    Rational ca, cb, c0;
    bool greater = false;

    Rational value(const Rational& a, const Rational& b) const { return ca * a + cb * b + c0; }
    bool holds(const Rational& a, const Rational& b) const;
    bool holds(double a, double b, double margin = 1e-12) const;
};

struct ExponentSystem {
    SystemCase kind = SystemCase::halfwave;
    Rational theta, s, beta;
    std::vector<Inequality> inequalities;
    // theta < -s, plus theta > 0 (the parameterization needs R A^{1/2} = N^theta >> 1)
    bool theta_admissible = false;

    bool contains(const Rational& a, const Rational& b) const;
    bool contains(double a, double b, double margin = 1e-12) const;
};

ExponentSystem build_system(SystemCase kind, const Rational& theta, const Rational& s, const Rational& beta);
ExponentSystem build_system(SystemCase kind, double theta, double s, double beta);
// Which system governs (beta, s); throws for s >= 0.
SystemCase system_for(const Rational& beta, const Rational& s);

struct Vertex {
    Rational a, b;
};

// Closure of the open region, vertices counterclockwise. Empty when the open
// region is empty.
struct Region2D {
    std::vector<Vertex> vertices;
    bool open = true;
    bool empty() const { return vertices.size() < 3; }
    // strict interior membership
    bool contains(const Rational& a, const Rational& b) const;
    Vertex centroid() const;
};

Region2D solve_region(const ExponentSystem& sys);

struct FeasibilityVerdict {
    double beta = 0.0;
    double s = 0.0;
    bool feasible = false;
    // set for the log-corrected choice at beta = 2, s = -1/2
    bool log_corrected = false;
    double theta = 0.0, a = 0.0, b = 0.0;
};

// Candidate theta values: analytic thresholds, midpoints between them, and a
// uniform grid over (0, max(1, -s)).
std::vector<double> theta_candidates(double beta, double s, int grid_points = 512);
FeasibilityVerdict classify_point(double beta, double s, int grid_points = 512);
std::vector<FeasibilityVerdict> inflation_region_map(const std::vector<double>& beta_grid,
                                                     const std::vector<double>& s_grid);

enum class BoundaryCase { frac_crit, frac_sixth };

// Exponents of T, R, A, N in a monomial.
struct Monomial {
    Rational t, r, a, n;
    bool operator==(const Monomial& o) const { return t == o.t && r == o.r && a == o.a && n == o.n; }
};

struct BoundaryCertificate {
    BoundaryCase kind = BoundaryCase::frac_crit;
    Rational beta, s;
    std::string quantity;
    std::string identity;
    Monomial lhs, rhs;
    // exponents of E = A/N, F = T N^beta, and G = R A^{1/2} N^s (frac_crit) or H = T R^3 A^2 (frac_sixth)
    Rational e_exp, f_exp, third_exp;
    // frac_crit: every factor is << 1 with a positive exponent; frac_sixth: E, F enter with negative and H with positive exponents
    bool identity_holds = false;
    bool forced = false;
    std::string conclusion;
};

BoundaryCertificate boundary_infeasibility(BoundaryCase kind, const Rational& beta);
BoundaryCertificate boundary_infeasibility(BoundaryCase kind, double beta);

Rational scaling_critical_index(const Rational& beta);
double scaling_critical_index(double beta);

struct MonteCarloResult {
    std::size_t samples = 0;
    std::size_t inside = 0;
    std::size_t mismatches = 0;
};

// Samples (a, b) around the region and compares polygon membership with the
// inequality list, both in exact arithmetic.
MonteCarloResult monte_carlo_check(const ExponentSystem& sys, const Region2D& region, std::size_t samples,
                                   std::uint64_t seed);

} // namespace illpose
