#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "error.hpp"
#include "feasibility.hpp"
#include "inflation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace illpose;
constexpr double pi = std::numbers::pi;

static InflationBudget halfwave_budget()
{
    return {0.4985, -1.936, 0.0295, 1.0, -0.5, false};
}

// Lattice with dk = 1: N = n, A = r.
static TwoBumpData unit_data(double R, long n, long r, double s = -0.5)
{
    return {R, static_cast<double>(n), static_cast<double>(r), s};
}

static const Grid unit_grid(2.0 * pi, 1u << 11);

// Midpoint count of (x1, x3) in (N + I_A)^2 with x1 + x3 - xi in 2N + I_A, on a
// sub-lattice `sub` times finer than the mode lattice. sub = 1 is the discrete
// convolution on the mode lattice itself.
static double brute_measure(double N, double A, double xi, int sub)
{
    const double d = 1.0 / sub;
    const long cells = static_cast<long>(A * sub);
    long count = 0;
    for (long i = 0; i < cells; ++i)
        for (long j = 0; j < cells; ++j) {
            const double x1 = N - A / 2 + (i + 0.5) * d, x3 = N - A / 2 + (j + 0.5) * d;
            const double x2 = x1 + x3 - xi;
            if (x2 >= 2 * N - A / 2 && x2 < 2 * N + A / 2) ++count;
        }
    return count * d * d;
}

TEST_CASE("two-bump spectrum is the indicator sum")
{
    const auto d = unit_data(3.0, 96, 16);
    const auto phi = make_two_bump(d, unit_grid);
    const auto& s = phi.field.spectrum();
    int on = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double xi = unit_grid.xi(i);
        const bool first = xi >= 96 - 8 && xi < 96 + 8;
        const bool second = xi >= 192 - 8 && xi < 192 + 8;
        CHECK(s[i] == cplx((first || second) ? 3.0 : 0.0));
        on += first || second;
    }
    CHECK(on == 32);
    CHECK(phi.ma_norm == doctest::Approx(2.0 * 3.0 * std::sqrt(16.0)).epsilon(1e-12));
    const double scale = std::sqrt(2.0) * 3.0 * std::sqrt(16.0) * std::pow(96.0, -0.5) / std::sqrt(2.0 * pi);
    CHECK(phi.hs_norm >= std::pow(2.0, -0.5) * scale);
    CHECK(phi.hs_norm <= 2.0 * std::pow(3.0, 0.5) * scale);
}

TEST_CASE("zero amplitude gives the zero field")
{
    const auto phi = make_two_bump(unit_data(0.0, 100, 16), unit_grid);
    for (const auto& v : phi.field.spectrum()) CHECK(v == cplx(0.0));
    CHECK(phi.hs_norm == 0.0);
}

TEST_CASE("misaligned two-bump data is rejected")
{
    CHECK_THROWS_AS(make_two_bump({1.0, 100.5, 16.0, -0.5}, unit_grid), Error);
    CHECK_THROWS_AS(make_two_bump(unit_data(1.0, 100, 15), unit_grid), Error);
    CHECK_THROWS_AS(make_two_bump(unit_data(1.0, 60, 16), unit_grid), Error);
    CHECK_THROWS_AS(make_two_bump(unit_data(1.0, 340, 16), unit_grid), Error);
}

TEST_CASE("indicator measure matches brute-force integration")
{
    const auto d = unit_data(1.0, 100, 16);
    CHECK(indicator_measure(d, unit_grid, 0.5) == doctest::Approx(0.75 * 16 * 16));
    for (double xi : {0.5, 1.5, 3.5, 7.5}) {
        CHECK(indicator_measure(d, unit_grid, xi) == brute_measure(100, 16, xi, 1));
        // the continuum area differs by at most a perimeter's worth of cells
        CHECK(std::abs(indicator_measure(d, unit_grid, xi) - brute_measure(100, 16, xi, 16)) <= 4.0 * 16);
    }
}

TEST_CASE("half-wave window of U3 equals the Picard iterate")
{
    const auto d = unit_data(2.0, 200, 32);
    const double t = 1e-3;
    const auto w = u3_lower_bound(d, unit_grid, 1.0, t);
    const auto phi = make_two_bump(d, unit_grid);
    IntegratorConfig ic;
    PicardConfig pc;
    pc.order_cap = 3;
    pc.nodes = 8;
    const auto tree = picard_iterates(phi.field, ic, pc, t);
    const auto& p = tree.at(3).spectrum();
    const auto& e = w.field.spectrum();
    int nodes = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double xi = unit_grid.xi(i);
        if (xi < 0.0 || xi >= 4.0) {
            CHECK(e[i] == cplx(0.0));
            continue;
        }
        ++nodes;
        const double m = brute_measure(200, 32, xi, 1);
        const cplx oracle = cplx(0.0, -1.0) * std::exp(cplx(0.0, -t * xi)) * t * 8.0 * m / (4.0 * pi * pi);
        CHECK(std::abs(e[i] - oracle) <= 1e-12 * std::abs(oracle));
        CHECK(std::abs(p[i] - oracle) <= 1e-8 * std::abs(oracle));
    }
    CHECK(nodes == 4);
    CHECK(std::abs(e[unit_grid.index_of_mode(0)]) ==
          doctest::Approx(t * 8.0 * 0.75 * 32 * 32 / (4.0 * pi * pi)).epsilon(1e-12));
    CHECK(std::abs(e[unit_grid.index_of_mode(0)]) >= t * 8.0 * 8 * 8 / (4.0 * pi * pi));
    CHECK(w.hs_lower <= norm(tree.at(3), NormSpec::sobolev(-0.5)).value);
}

TEST_CASE("window bound vanishes at t = 0")
{
    const auto w = u3_lower_bound(unit_data(2.0, 200, 32), unit_grid, 1.0, 0.0);
    CHECK(w.hs_lower == 0.0);
}

TEST_CASE("fractional window keeps the oscillatory factor")
{
    const double beta = 1.5;
    const auto d = unit_data(2.0, 100, 16);
    CHECK_THROWS_AS(u3_lower_bound(d, unit_grid, beta, 1e-3, 1.0), Error);
    const double t = 0.1 * std::pow(100.0, -beta);
    const auto w = u3_lower_bound(d, unit_grid, beta, t);
    IntegratorConfig ic;
    ic.beta = beta;
    PicardConfig pc;
    pc.order_cap = 3;
    pc.nodes = 16;
    const auto tree = picard_iterates(make_two_bump(d, unit_grid).field, ic, pc, t);
    for (long k = 0; k < 2; ++k) {
        const auto i = unit_grid.index_of_mode(k);
        const cplx a = w.field.spectrum()[i], b = tree.at(3).spectrum()[i];
        CHECK(std::abs(a - b) <= 1e-8 * std::abs(b));
        // |(e^{ix} - 1)/(ix)| >= 1/2 once |x| is small
        CHECK(std::abs(a) >= 0.5 * t * 8.0 * indicator_measure(d, unit_grid, unit_grid.xi(i)) / (4.0 * pi * pi));
    }
}

static double slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TEST_CASE("window norm regimes")
{
    std::vector<double> lA, llA, n25, n50, n75;
    for (double A = 8e4; A <= 8e5 * 1.0001; A *= std::pow(10.0, 0.25)) {
        const double a = 8.0 * std::round(A / 8.0);
        lA.push_back(std::log(a));
        llA.push_back(std::log(std::log(a)));
        n25.push_back(std::log(window_indicator_norm(a, -0.25, 1.0)));
        n50.push_back(std::log(window_indicator_norm(a, -0.5, 1.0)));
        n75.push_back(window_indicator_norm(a, -0.75, 1.0));
    }
    CHECK(std::abs(slope(lA, n25) - 0.25) <= 0.2 * 0.25);
    CHECK(std::abs(slope(llA, n50) - 0.5) <= 0.2 * 0.5);
    const auto [lo, hi] = std::minmax_element(n75.begin(), n75.end());
    CHECK(*hi <= 1.2 * *lo);
    // the bounded regime converges to the full-line integral
    CHECK(*hi <= std::sqrt(std::tgamma(0.5) * std::tgamma(0.25) / std::tgamma(0.75) / 2.0 / (2.0 * pi)));
}

TEST_CASE("budget feasibility")
{
    const double th = 0.25;
    for (auto [a, b] : {std::pair{-0.7, 0.2}, std::pair{-0.85, 0.1}, std::pair{-0.6, 0.22}})
        CHECK(budget_feasible({th, a, b, 1.0, -0.5, false}));
    CHECK_FALSE(budget_feasible({th, 0.1, 0.1, 1.0, -0.5, false}));
    CHECK_FALSE(budget_feasible({th, -1.0, 0.0, 1.0, -0.5, false}));
    CHECK(budget_feasible(halfwave_budget()));
    CHECK(budget_feasible({0, 0, 0, 2.0, -0.5, true}));
    CHECK_FALSE(budget_feasible({0, 0, 0, 2.0, -0.4, true}));
    int hits = 0;
    for (int i = 1; i < 40; ++i)
        for (int j = -80; j < 0; ++j)
            for (int k = 0; k < 40; ++k) hits += budget_feasible({0.025 * i, 0.05 * j, 0.025 * k, 1.5, -0.25, false});
    CHECK(hits == 0);
}

TEST_CASE("log-corrected budget scalings")
{
    const InflationBudget bud{0, 0, 0, 2.0, -0.5, true};
    for (double lnN : {20.0, 50.0, 150.0}) {
        const double N = std::exp(lnN);
        const double T = bud.T(N), R = bud.R(N), A = bud.A(N);
        CHECK(T * R * R * A * A == doctest::Approx(std::pow(lnN, -1.0 / 3.0)).epsilon(1e-9));
        const double big = T * R * R * R * A * A * std::sqrt(std::log(A));
        CHECK(big / std::pow(lnN, 1.0 / 6.0) == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("zero datum fails every dominance condition")
{
    const auto v = dominance_check(InflationRun{});
    CHECK_FALSE(v.u3_over_u1);
    CHECK_FALSE(v.u3_over_tail);
    CHECK_FALSE(v.u3_over_one);
}

static InflationConfig small_config()
{
    InflationConfig c;
    c.budget = halfwave_budget();
    c.points = 1u << 12;
    c.integrator_steps = 64;
    return c;
}

TEST_CASE("setup aligns the lattice to the budget")
{
    const auto c = small_config();
    const auto s = inflation_setup(c, std::exp(30.0));
    const double h = s.grid.dk();
    CHECK(s.data.A / h == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(std::abs(s.data.N / h - std::round(s.data.N / h)) <= 1e-9 * s.data.N / h);
    CHECK(s.data.N == doctest::Approx(std::exp(30.0)).epsilon(0.1));
    CHECK(s.T == doctest::Approx(std::pow(s.data.N, -1.936)).epsilon(1e-12));
}

TEST_CASE("small inflation run is internally consistent")
{
    const auto r = inflation_run(small_config(), std::exp(30.0));
    CHECK(r.feasible);
    CHECK(r.norm_u1 == doctest::Approx(r.norm_phi_hs).epsilon(1e-12));
    CHECK(r.norm_u3_lower > 0.0);
    CHECK(r.norm_u3_lower <= r.norm_u3);
    CHECK(r.norm_u5 < r.norm_u3);
    CHECK(r.series_gap <= r.tail_bound);
    CHECK(r.T <= r.tstar);
}

TEST_CASE("infeasible budget fails dominance")
{
    auto c = small_config();
    c.budget.a = 0.1;
    c.mode = InflationMode::series;
    c.enforce_tstar = false;
    const auto r = inflation_run(c, std::exp(30.0));
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(dominance_check(r).all());
    CHECK_THROWS_AS(inflation_experiment(c, {std::exp(30.0)}), Error);
}

TEST_CASE("experiment rows are sorted and independent of input order")
{
    auto c = small_config();
    c.mode = InflationMode::series;
    const auto a = inflation_experiment(c, {std::exp(31.0), std::exp(30.0)});
    const auto b = inflation_experiment(c, {std::exp(30.0), std::exp(31.0)});
    CHECK(report_csv(a) == report_csv(b));
    const auto N = a.column("N");
    CHECK(N[0] < N[1]);
    CHECK(a.columns.size() >= 15);
    CHECK(std::equal(a.columns.begin(), a.columns.begin() + 15,
                     std::vector<std::string>{"beta", "s", "N", "A", "R", "T", "norm_phi_hs", "norm_u1", "norm_u3",
                                              "norm_u3_lower", "tail_bound", "norm_u_final", "verdict_8",
                                              "verdict_9", "verdict_10"}
                         .begin()));
    const auto v = dominance_check(a);
    CHECK(v.u3_over_u1 == (a.column("verdict_8").back() == 1.0));
}

TEST_CASE("support of the iterates grows like C^k A independently of N")
{
    std::vector<double> C;
    for (long n : {64L, 128L, 256L}) {
        const Grid g(2.0 * pi, 1u << 13);
        const auto fit = support_fit(unit_data(1.0, n, 8), g, 1.0, 1e-3, 7);
        CHECK(fit.measure_over_A[0] == doctest::Approx(2.0));
        for (std::size_t i = 0; i < fit.measure_over_A.size(); ++i)
            CHECK(fit.measure_over_A[i] <= std::pow(fit.C, 2 * i + 1) * (1.0 + 1e-12));
        C.push_back(fit.C);
    }
    const auto [lo, hi] = std::minmax_element(C.begin(), C.end());
    CHECK(*hi <= 1.2 * *lo);
}
