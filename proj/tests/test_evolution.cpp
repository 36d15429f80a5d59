#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "closed_forms.hpp"
#include "error.hpp"
#include "evolution.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace illpose;
constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

static double rel_l2(const SpectralField& a, const SpectralField& b)
{
    return norm(a - b, NormSpec::l2()).value / norm(b, NormSpec::l2()).value;
}

static SpectralField two_bump(const Grid& g, double R, long n, long r)
{
    std::vector<cplx> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const long k = g.mode(i);
        if ((k >= n - r / 2 && k < n + r / 2) || (k >= 2 * n - r / 2 && k < 2 * n + r / 2)) s[i] = R;
    }
    return SpectralField::from_spectrum(g, s);
}

TEST_CASE("szego traveling wave is reproduced by the projected integrator")
{
    Grid g(4000.0, 1u << 15);
    auto v = RationalProfile::make(1.0, 1.0);
    IntegratorConfig cfg;
    cfg.szego = true;
    cfg.scheme = Scheme::rk4_interaction_picture;
    cfg.dealias = false;
    cfg.dt = 1e-3;
    auto snaps = evolve(szego_project(eval_rational(v, 0.0, g)), cfg, 0.2, {0.2});
    REQUIRE(snaps.size() == 1);
    CHECK(rel_l2(snaps[0].field, eval_rational(v, 0.2, g)) < 1e-6);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.mode(i) < 0) CHECK(snaps[0].field.spectrum()[i] == cplx(0.0));
}

TEST_CASE("szego flag rejects the splitting scheme")
{
    Grid g(100.0, 256);
    IntegratorConfig cfg;
    cfg.szego = true;
    CHECK_THROWS_AS(step(SpectralField::zeros(g), cfg), Error);
}

TEST_CASE("zero datum stays zero")
{
    Grid g(100.0, 256);
    for (auto sch : {Scheme::strang_split, Scheme::rk4_interaction_picture}) {
        IntegratorConfig cfg;
        cfg.scheme = sch;
        auto u = step(SpectralField::zeros(g), cfg);
        for (auto v : u.values()) CHECK(v == cplx(0.0));
    }
}

TEST_CASE("nonlinear sub-flow is conjugation symmetric under mu -> -mu")
{
    Grid g(60.0, 512);
    auto u = SpectralField::sample(g, [](double x) { return cplx(0.1 * std::exp(-x * x), 0.05 * x * std::exp(-x * x)); });
    std::vector<cplx> conj_vals(u.values().size());
    for (std::size_t j = 0; j < conj_vals.size(); ++j) conj_vals[j] = std::conj(u.values()[j]);
    auto ubar = SpectralField::from_values(g, conj_vals);
    for (bool dealias : {false, true}) {
        IntegratorConfig plus, minus;
        plus.mu = 1.0;
        minus.mu = -1.0;
        plus.dealias = minus.dealias = dealias;
        auto a = nonlinear_substep(u, minus, 0.01);
        auto b = nonlinear_substep(ubar, plus, 0.01);
        double err = 0.0, inc = 0.0, amp = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const cplx inc_a = a.values()[j] - u.values()[j];
            const cplx inc_b = std::conj(b.values()[j] - ubar.values()[j]);
            err = std::max(err, std::abs(inc_a - inc_b));
            inc = std::max(inc, std::abs(inc_a));
            amp = std::max(amp, std::abs(u.values()[j]));
        }
        CHECK(inc > 0.0);
        CHECK(err <= 1e-12 * amp);
    }
}

TEST_CASE("free flow equals the dispersion multiplier")
{
    Grid g(80.0, 1024);
    auto u0 = SpectralField::sample(g, [](double x) { return cplx(std::exp(-x * x), 0.2 * std::sin(x) * std::exp(-x * x)); });
    for (auto sch : {Scheme::strang_split, Scheme::rk4_interaction_picture}) {
        IntegratorConfig cfg;
        cfg.scheme = sch;
        cfg.mu_scale = 0.0;
        cfg.dt = 0.01;
        auto out = evolve(u0, cfg, 1.0, {1.0});
        auto ref = apply_dispersion(u0, 1.0, 1.0);
        double err = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) err = std::max(err, std::abs(out[0].field.values()[j] - ref.values()[j]));
        CHECK(err < 1e-12);
    }
}

TEST_CASE("phase-resolution constraint and non-finite data are rejected")
{
    Grid g(10.0, 1024);
    auto u = SpectralField::sample(g, [](double x) { return cplx(std::exp(-x * x)); });
    IntegratorConfig cfg;
    cfg.dt = 1.0;
    CHECK_THROWS_AS(step(u, cfg), Error);
    auto bad = u.values();
    bad[3] = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    IntegratorConfig ok;
    ok.dt = 1e-3;
    try {
        step(SpectralField::from_values(g, bad), ok);
        CHECK(false);
    } catch (const Error& e) {
        CHECK((e.code() == ErrorCode::blowup || e.code() == ErrorCode::precondition));
    }
}

TEST_CASE("evolve returns the requested snapshots deterministically")
{
    Grid g(40.0, 256);
    auto u0 = SpectralField::sample(g, [](double x) { return cplx(0.3 * std::exp(-x * x)); });
    IntegratorConfig cfg;
    cfg.dt = 0.02;
    auto a = evolve(u0, cfg, 1.0, {0.0, 0.25, 0.5, 1.0});
    auto b = evolve(u0, cfg, 1.0, {1.0, 0.5, 0.25, 0.0});
    REQUIRE(a.size() == 4);
    CHECK(a[0].t == 0.0);
    CHECK(a[1].t == 0.25);
    CHECK(a[3].t == 1.0);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < g.size(); ++j) CHECK(a[k].field.values()[j] == b[k].field.values()[j]);
    CHECK_THROWS_AS(evolve(u0, cfg, 1.0, {2.0}), Error);

    const auto csv = snapshots_csv(a, false);
    CHECK(csv == snapshots_csv(b, false));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 256);
    CHECK(csv.rfind("t,x,re,im\n0,-20,", 0) == 0);
    const auto spec = snapshots_csv({a[0]}, true);
    CHECK(spec.rfind("t,xi,re,im\n", 0) == 0);
    CHECK(std::count(spec.begin(), spec.end(), '\n') == 1 + 256);
}

TEST_CASE("strang splitting conserves mass per step and converges at second order")
{
    Grid g(40.0, 256);
    auto u0 = SpectralField::sample(g, [](double x) { return cplx(0.8 * std::exp(-x * x), 0.3 * x * std::exp(-x * x)); });
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    const double m0 = mass(u0);
    auto u1 = step(u0, cfg);
    CHECK(std::abs(mass(u1) - m0) <= 1e-10 * m0);

    const double T = 0.5;
    auto run = [&](double dt) {
        IntegratorConfig c = cfg;
        c.dt = dt;
        return evolve(u0, c, T, {T}).back().field;
    };
    const double dt0 = 0.02;
    auto ref = run(dt0 / 8.0);
    const double e1 = norm(run(dt0) - ref, NormSpec::l2()).value;
    const double e2 = norm(run(dt0 / 2.0) - ref, NormSpec::l2()).value;
    CHECK(std::log2(e1 / e2) >= 1.9);
}

TEST_CASE("conservation of mass and energy for the half-wave flow")
{
    Grid g(80.0, 1024);
    auto u0 = SpectralField::sample(g, [](double x) { return cplx(0.5 * std::exp(-0.5 * x * x), 0.2 * x * std::exp(-0.5 * x * x)); });
    IntegratorConfig cfg;
    cfg.dt = 2e-3;
    const double m0 = mass(u0), e0 = energy(u0, 1.0, 1.0);
    auto out = evolve(u0, cfg, 10.0, {10.0});
    CHECK(std::abs(mass(out[0].field) - m0) <= 1e-8 * m0);
    CHECK(std::abs(energy(out[0].field, 1.0, 1.0) - e0) <= 1e-6 * std::abs(e0));
}

TEST_CASE("series coefficients")
{
    auto a = picard_series_coefficients(9);
    CHECK(a[1] == 1.0);
    CHECK(a[2] == 0.0);
    CHECK(a[3] == doctest::Approx(1.0));
    CHECK(a[4] == 0.0);
    CHECK(a[5] == doctest::Approx(1.5));
    CHECK(a[6] == 0.0);
    auto big = picard_series_coefficients(61);
    double worst = 0.0;
    for (int k = 3; k <= 61; k += 2) worst = std::max(worst, std::pow(big[k], 1.0 / (k - 1)));
    CHECK(worst < series_constant_c4(1.0));
}

TEST_CASE("picard U3 matches the lattice convolution with exact time factor")
{
    Grid g(2.0 * pi * 8.0, 64);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    std::vector<cplx> s(64);
    for (std::size_t i = 0; i < 64; ++i)
        if (std::abs(g.mode(i)) < 6) s[i] = cplx(nd(rng), nd(rng)) * 0.2;
    auto phi = SpectralField::from_spectrum(g, s);
    const double beta = 1.5, t = 0.3, mu = -1.0;
    IntegratorConfig cfg;
    cfg.beta = beta;
    cfg.mu = mu;
    PicardConfig pc;
    pc.order_cap = 3;
    auto tree = picard_iterates(phi, cfg, pc, t);
    CHECK(norm(tree.at(1) - apply_dispersion(phi, beta, t), NormSpec::l2()).value < 1e-14);
    const double h = g.dk();
    auto Lf = [&](double xi) { return std::pow(std::abs(xi), beta); };
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < 64; ++i) {
        const long k = g.mode(i);
        const double xi = g.xi(i);
        cplx acc = 0.0;
        for (long k1 = -32; k1 < 32; ++k1)
            for (long k2 = -32; k2 < 32; ++k2) {
                const long k3 = k - k1 + k2;
                if (k3 < -32 || k3 >= 32) continue;
                const cplx a = s[g.index_of_mode(k1)] * std::conj(s[g.index_of_mode(k2)]) * s[g.index_of_mode(k3)];
                if (a == cplx(0.0)) continue;
                const double phase = Lf(xi) - Lf((k1 + 0.5) * h) + Lf((k2 + 0.5) * h) - Lf((k3 + 0.5) * h);
                const cplx tf = std::abs(phase) < 1e-14 ? cplx(t) : (std::exp(I * (t * phase)) - 1.0) / (I * phase);
                acc += a * tf;
            }
        const cplx ref = -I * mu * std::exp(-I * (t * Lf(xi))) * std::pow(h / (2.0 * pi), 2) * acc;
        err = std::max(err, std::abs(tree.at(3).spectrum()[i] - ref));
        scale = std::max(scale, std::abs(ref));
    }
    CHECK(err <= 1e-12 * scale);
}

TEST_CASE("picard at t = 0 and even orders")
{
    Grid g(2.0 * pi * 16.0, 256);
    auto phi = two_bump(g, 1.0, 16, 4);
    PicardConfig pc;
    pc.order_cap = 5;
    auto tree = picard_iterates(phi, IntegratorConfig{}, pc, 0.0);
    CHECK(norm(tree.at(1) - phi, NormSpec::l2()).value == 0.0);
    CHECK(norm(tree.at(3), NormSpec::l2()).value == 0.0);
    CHECK_THROWS_AS(tree.at(2), Error);
    CHECK_THROWS_AS(tree.at(7), Error);
    PicardConfig bad;
    bad.order_cap = 4;
    CHECK_THROWS_AS(picard_iterates(phi, IntegratorConfig{}, bad, 0.1), Error);
}

TEST_CASE("support of two-bump data and of U3")
{
    const long n = 64, r = 8;
    Grid g(2.0 * pi * 8.0, 1024);
    const double h = g.dk(), A = r * h;
    auto phi = two_bump(g, 1.0, n, r);
    auto sp = support_count(phi, 1e-12);
    CHECK(sp.intervals == 2);
    CHECK(sp.measure == doctest::Approx(2.0 * A));
    auto z = support_count(SpectralField::zeros(g), 0.0);
    CHECK(z.measure == 0.0);
    CHECK(z.intervals == 0);

    PicardConfig pc;
    pc.order_cap = 3;
    pc.A = A;
    auto tree = picard_iterates(phi, IntegratorConfig{}, pc, 0.01);
    const auto& s3 = tree.at(3).spectrum();
    double peak = 0.0;
    for (auto v : s3) peak = std::max(peak, std::abs(v));
    auto info = support_count(tree.at(3), 1e-10 * peak);
    CHECK(info.intervals <= 8);
    CHECK(info.measure <= 24.0 * A + 1e-9);
}

TEST_CASE("partial picard sum tracks the integrator within the tail bound")
{
    const long n = 64, r = 8;
    Grid g(2.0 * pi * 2.0, 2048);
    const double A = r * g.dk();
    auto phi = two_bump(g, 0.5, n, r);
    PicardConfig pc;
    pc.order_cap = 5;
    pc.A = A;
    const double tstar = picard_tstar(phi, A, pc.C3);
    const double t = 0.25 * tstar;
    auto tree = picard_iterates(phi, IntegratorConfig{}, pc, t);
    IntegratorConfig cfg;
    cfg.scheme = Scheme::rk4_interaction_picture;
    cfg.dt = t / 200.0;
    auto u = evolve(phi, cfg, t, {t}).back().field;
    const double diff = norm(tree.partial_sum() - u, NormSpec::l2()).value;
    const double c2 = fitted_iterate_constant(tree, A);
    const double tail = lemma_tail_bound(t, A, tree.norms_ma.front(), c2, 5) / std::sqrt(2.0 * pi);
    CHECK(std::isfinite(tail));
    CHECK(diff <= 2.0 * tail);
}
