#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "error.hpp"
#include "feasibility.hpp"

#include <algorithm>
#include <cmath>

using namespace illpose;
using Q = Rational;

static bool has_vertex(const Region2D& r, const Q& a, const Q& b)
{
    return std::any_of(r.vertices.begin(), r.vertices.end(), [&](const Vertex& v) { return v.a == a && v.b == b; });
}

// The four bullets of the fractional NLS theorem.
static bool theorem_region(double beta, double s)
{
    const double sc = (1.0 - beta) / 2.0;
    if (beta < 1.0) return s < 0.0;
    if (beta < 2.0) return s < sc;
    if (beta == 2.0) return s <= sc;
    return s < (1.0 - 2.0 * beta) / 6.0;
}

TEST_CASE("rational snapping")
{
    CHECK(snap_rational(0.25) == Q(1, 4));
    CHECK(snap_rational(-5.0 / 6.0) == Q(-5, 6));
    CHECK(snap_rational(1.0 / 3.0) == Q(1, 3));
    CHECK(snap_rational(0.1) == Q(1, 10));
    CHECK(snap_rational(3.0) == Q(3));
    const double odd = 0.1234567890123;
    CHECK(to_double(snap_rational(odd)) == odd);
}

TEST_CASE("half-wave system at theta = 1/4")
{
    const auto sys = build_system(SystemCase::halfwave, Q(1, 4), Q(-1, 2), Q(1));
    REQUIRE(sys.inequalities.size() == 5);
    const auto& q = sys.inequalities;
    // a < 0
    CHECK((q[0].ca == 1 && q[0].cb == 0 && q[0].c0 == 0 && !q[0].greater));
    // b > 0
    CHECK((q[1].ca == 0 && q[1].cb == 1 && q[1].c0 == 0 && q[1].greater));
    // b < 1/4
    CHECK((q[2].cb == 1 && q[2].c0 == Q(-1, 4) && !q[2].greater));
    // a - 2b + 1 < 0
    CHECK((q[3].ca == 1 && q[3].cb == -2 && q[3].c0 == 1 && !q[3].greater));
    // a - b + 1 > 0
    CHECK((q[4].ca == 1 && q[4].cb == -1 && q[4].c0 == 1 && q[4].greater));
}

TEST_CASE("fractional systems")
{
    const auto low = build_system(SystemCase::frac_low_s, Q(1, 2), Q(-1), Q(3));
    CHECK((low.inequalities[0].ca == 1 && low.inequalities[0].c0 == 3 && !low.inequalities[0].greater));
    const auto mid = build_system(SystemCase::frac_mid_s, Q(1, 10), Q(-1, 4), Q(1, 2));
    const auto& last = mid.inequalities.back();
    CHECK(last.greater);
    CHECK(last.ca == 1);
    CHECK(last.cb == Q(-3, 2));
    CHECK(last.c0 == Q(9, 2) * Q(1, 10));
}

TEST_CASE("case and parameter mismatches are rejected")
{
    CHECK_THROWS_AS(build_system(SystemCase::halfwave, Q(1, 4), Q(-1, 2), Q(2)), Error);
    CHECK_THROWS_AS(build_system(SystemCase::frac_low_s, Q(1, 4), Q(-1, 4), Q(2)), Error);
    CHECK_THROWS_AS(build_system(SystemCase::frac_mid_s, Q(1, 4), Q(-1), Q(2)), Error);
    CHECK_THROWS_AS(build_system(SystemCase::frac_mid_s, Q(1, 4), Q(0), Q(2)), Error);
}

TEST_CASE("half-wave triangle vertices")
{
    for (const Q theta : {Q(1, 4), Q(1, 10), Q(2, 5), Q(499, 1000)}) {
        const auto r = solve_region(build_system(SystemCase::halfwave, theta, Q(-1, 2), Q(1)));
        REQUIRE(r.vertices.size() == 3);
        CHECK(has_vertex(r, -4 * theta, Q(0)));
        CHECK(has_vertex(r, -3 * theta, theta));
        CHECK(has_vertex(r, -2 * theta, theta));
    }
}

TEST_CASE("half-wave region collapses at the ends of the theta interval")
{
    for (const Q s : {Q(-1, 4), Q(-1, 2)}) {
        CHECK(solve_region(build_system(SystemCase::halfwave, Q(0), s, Q(1))).empty());
        CHECK(solve_region(build_system(SystemCase::halfwave, -s, s, Q(1))).empty());
        for (int k = 1; k < 20; ++k)
            CHECK_FALSE(solve_region(build_system(SystemCase::halfwave, -s * Q(k, 20), s, Q(1))).empty());
    }
}

TEST_CASE("quadrilateral for theta >= 1/2")
{
    const Q theta(3, 4), beta(1, 2);
    // beta small enough that a < -beta does not clip
    const auto r = solve_region(build_system(SystemCase::frac_low_s, theta, Q(-1), beta));
    REQUIRE(r.vertices.size() == 4);
    CHECK(has_vertex(r, -3 * theta, theta));
    CHECK(has_vertex(r, -2 * theta, theta));
    CHECK(has_vertex(r, -2 * theta - 1, theta - Q(1, 2)));
    CHECK(has_vertex(r, -3 * theta - Q(1, 2), theta - Q(1, 2)));
    // clipping by a < -beta keeps only the part left of the line
    const auto clipped = solve_region(build_system(SystemCase::frac_low_s, theta, Q(-1), Q(5, 2)));
    REQUIRE_FALSE(clipped.empty());
    for (const auto& v : clipped.vertices) CHECK(v.a <= Q(-5, 2));
    CHECK(has_vertex(clipped, -3 * theta - Q(1, 2), theta - Q(1, 2)));
}

TEST_CASE("middle system triangle and emptiness for theta <= 0")
{
    const Q s(-1, 4), theta(1, 10);
    const auto r = solve_region(build_system(SystemCase::frac_mid_s, theta, s, Q(1, 10)));
    REQUIRE(r.vertices.size() == 3);
    CHECK(has_vertex(r, (1 - 2 * s) / s * theta, (1 + 2 * s) / (2 * s) * theta));
    CHECK(has_vertex(r, -3 * theta, theta));
    CHECK(has_vertex(r, -2 * theta, theta));
    CHECK(solve_region(build_system(SystemCase::frac_mid_s, Q(0), s, Q(1, 10))).empty());
    CHECK(solve_region(build_system(SystemCase::frac_mid_s, Q(-1, 10), s, Q(1, 10))).empty());
}

TEST_CASE("polygon vertices are tight on at least two constraints and satisfy all")
{
    const std::vector<ExponentSystem> systems{
        build_system(SystemCase::halfwave, Q(1, 4), Q(-1, 2), Q(1)),
        build_system(SystemCase::frac_low_s, Q(3, 4), Q(-1), Q(5, 2)),
        build_system(SystemCase::frac_low_s, Q(2, 5), Q(-1), Q(1, 2)),
        build_system(SystemCase::frac_mid_s, Q(1, 10), Q(-1, 4), Q(1, 10)),
    };
    for (const auto& sys : systems) {
        const auto r = solve_region(sys);
        REQUIRE_FALSE(r.empty());
        for (const auto& v : r.vertices) {
            int tight = 0;
            for (const auto& q : sys.inequalities) {
                const Q val = q.value(v.a, v.b);
                if (val == 0) ++tight;
                CHECK((q.greater ? val >= 0 : val <= 0));
            }
            CHECK(tight >= 2);
        }
        CHECK(sys.contains(r.centroid().a, r.centroid().b));
    }
}

TEST_CASE("monte carlo membership agrees with the polygon")
{
    const std::vector<ExponentSystem> systems{
        build_system(SystemCase::halfwave, Q(1, 4), Q(-1, 2), Q(1)),
        build_system(SystemCase::frac_low_s, Q(3, 4), Q(-1), Q(5, 2)),
        build_system(SystemCase::frac_mid_s, Q(1, 10), Q(-1, 4), Q(1, 10)),
        build_system(SystemCase::frac_mid_s, Q(0), Q(-1, 4), Q(1, 10)),
    };
    std::uint64_t seed = 7;
    for (const auto& sys : systems) {
        const auto mc = monte_carlo_check(sys, solve_region(sys), 20000, seed++);
        CHECK(mc.mismatches == 0);
        if (!solve_region(sys).empty()) CHECK(mc.inside > 0);
    }
}

TEST_CASE("region map point verdicts")
{
    CHECK(classify_point(1.0, -0.1).feasible);
    CHECK_FALSE(classify_point(3.0, -0.8).feasible);
    CHECK(classify_point(3.0, -0.9).feasible);
    const auto c2 = classify_point(2.0, -0.5);
    CHECK(c2.feasible);
    CHECK(c2.log_corrected);
    CHECK_FALSE(classify_point(1.5, -0.25).feasible);
    CHECK_FALSE(classify_point(3.0, -5.0 / 6.0).feasible);
    CHECK(classify_point(0.5, -0.001).feasible);
    CHECK_FALSE(classify_point(1.0, 0.0).feasible);
}

TEST_CASE("witnesses lie inside their systems")
{
    for (double beta : {0.5, 1.0, 1.5, 2.5})
        for (double s : {-0.1, -0.6, -1.5}) {
            const auto v = classify_point(beta, s);
            if (!v.feasible) continue;
            const auto kind = system_for(snap_rational(beta), snap_rational(s));
            CHECK(build_system(kind, Q(v.theta), snap_rational(s), snap_rational(beta)).contains(v.a, v.b, 0.0));
        }
}

TEST_CASE("region map reproduces the theorem on a grid")
{
    std::vector<double> betas, ss;
    for (int i = 0; i <= 38; ++i) betas.push_back(0.2 + 0.1 * i);
    for (int j = 0; j <= 44; ++j) ss.push_back(-2.0 + 0.05 * j);
    int mismatches = 0;
    for (const auto& v : inflation_region_map(betas, ss)) mismatches += v.feasible != theorem_region(v.beta, v.s);
    CHECK(mismatches == 0);
}

TEST_CASE("beta = 1 column equals s < 0")
{
    for (int j = -100; j <= 10; ++j) {
        const double s = 0.01 * j;
        CHECK(classify_point(1.0, s).feasible == (s < 0.0));
    }
}

TEST_CASE("boundary certificates")
{
    const auto c = boundary_infeasibility(BoundaryCase::frac_crit, Q(3, 2));
    CHECK(c.s == Q(-1, 4));
    CHECK(c.identity_holds);
    CHECK(c.forced);
    CHECK(c.rhs.n == 0);
    const auto d = boundary_infeasibility(BoundaryCase::frac_sixth, Q(3));
    CHECK(d.s == Q(-5, 6));
    CHECK(d.identity_holds);
    CHECK(d.forced);
    for (double b : {1.2, 1.7, 1.99}) CHECK(boundary_infeasibility(BoundaryCase::frac_crit, b).identity_holds);
    for (double b : {2.1, 4.0, 7.5}) CHECK(boundary_infeasibility(BoundaryCase::frac_sixth, b).identity_holds);
    CHECK_THROWS_AS(boundary_infeasibility(BoundaryCase::frac_crit, Q(2)), Error);
    CHECK_THROWS_AS(boundary_infeasibility(BoundaryCase::frac_sixth, Q(2)), Error);
}

TEST_CASE("scaling critical index")
{
    CHECK(scaling_critical_index(Q(2)) == Q(-1, 2));
    CHECK(scaling_critical_index(1.0) == 0.0);
}
