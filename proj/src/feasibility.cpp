#include "feasibility.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace illpose {

namespace {

template <class T>
struct Line {
    T ca, cb, c0;
    bool greater;
};

template <class T>
T max_of(const T& x, const T& y)
{
    return x < y ? y : x;
}

template <class T>
std::vector<Line<T>> template_lines(SystemCase kind, const T& theta, const T& s, const T& beta)
{
    const T zero(0), one(1), two(2), four(4), half = T(1) / T(2);
    std::vector<Line<T>> out;
    // a < 0 (halfwave) or a < -beta
    out.push_back({one, zero, kind == SystemCase::halfwave ? zero : beta, false});
    // lower bound on b: max{0, theta - 1/2} for the first two systems, theta - 1/2 for the third
    const T lo = kind == SystemCase::frac_mid_s ? T(theta - half) : max_of(zero, T(theta - half));
    out.push_back({zero, one, T(-lo), true});
    out.push_back({zero, one, T(-theta), false});
    out.push_back({one, T(-two), T(four * theta), false});
    if (kind == SystemCase::frac_mid_s)
        out.push_back({one, T(-(two + two * s)), T((T(5) + two * s) * theta), true});
    else
        out.push_back({one, T(-one), T(four * theta), true});
    return out;
}

template <class T>
int sign_of(const T& v)
{
    return v > T(0) ? 1 : (v < T(0) ? -1 : 0);
}

// Vertices of the closed polygon cut out by the lines; `slack` widens each
// closed constraint in float mode.
template <class T>
std::vector<std::pair<T, T>> polygon(const std::vector<Line<T>>& lines, const T& slack)
{
    std::vector<std::pair<T, T>> pts;
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            const auto& p = lines[i];
            const auto& q = lines[j];
            const T det = p.ca * q.cb - q.ca * p.cb;
            if (det == T(0)) continue;
            const T a = (q.c0 * p.cb - p.c0 * q.cb) / det;
            const T b = (q.ca * p.c0 - p.ca * q.c0) / det;
            bool ok = true;
            for (const auto& l : lines) {
                const T v = l.ca * a + l.cb * b + l.c0;
                if ((l.greater && v < -slack) || (!l.greater && v > slack)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            bool dup = false;
            for (const auto& [x, y] : pts) {
                const T dx = x - a, dy = y - b;
                if ((dx < T(0) ? T(-dx) : dx) <= slack && (dy < T(0) ? T(-dy) : dy) <= slack) dup = true;
            }
            if (!dup) pts.emplace_back(a, b);
        }
    if (pts.size() < 3) return {};
    T ca(0), cb(0);
    for (const auto& [x, y] : pts) ca += x, cb += y;
    ca /= T(static_cast<int>(pts.size()));
    cb /= T(static_cast<int>(pts.size()));
    auto half = [&](const std::pair<T, T>& v) {
        const T dx = v.first - ca, dy = v.second - cb;
        return (dy > T(0) || (dy == T(0) && dx > T(0))) ? 0 : 1;
    };
    std::sort(pts.begin(), pts.end(), [&](const auto& u, const auto& v) {
        const int hu = half(u), hv = half(v);
        if (hu != hv) return hu < hv;
        const T cr = (u.first - ca) * (v.second - cb) - (u.second - cb) * (v.first - ca);
        return cr > T(0);
    });
    T area(0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& u = pts[i];
        const auto& v = pts[(i + 1) % pts.size()];
        area += u.first * v.second - v.first * u.second;
    }
    if (!(area > slack)) return {};
    return pts;
}

bool float_nonempty(SystemCase kind, double theta, double s, double beta)
{
    if (!(theta > 1e-12 && theta < -s - 1e-12)) return false;
    return !polygon<double>(template_lines<double>(kind, theta, s, beta), 1e-12).empty();
}

} // namespace

Rational snap_rational(double x)
{
    require(std::isfinite(x), ErrorCode::invalid_argument, "cannot snap a non-finite value");
    long double y = x;
    std::int64_t h1 = 1, h2 = 0, k1 = 0, k2 = 1;
    for (int it = 0; it < 40; ++it) {
        const long double fl = std::floor(y);
        if (std::abs(fl) > 1e15L) break;
        const auto ai = static_cast<std::int64_t>(fl);
        const std::int64_t h = ai * h1 + h2, k = ai * k1 + k2;
        if (k > 1000000) break;
        if (std::abs(static_cast<long double>(x) - static_cast<long double>(h) / k) <=
            1e-12L * std::max<long double>(1.0L, std::abs(static_cast<long double>(x))))
            return Rational(h, k);
        h2 = h1, h1 = h, k2 = k1, k1 = k;
        const long double frac = y - fl;
        if (frac == 0.0L) break;
        y = 1.0L / frac;
    }
    return Rational(x);
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

bool Inequality::holds(const Rational& a, const Rational& b) const
{
    const Rational v = value(a, b);
    return greater ? v > 0 : v < 0;
}

bool Inequality::holds(double a, double b, double margin) const
{
    const double v = to_double(ca) * a + to_double(cb) * b + to_double(c0);
    return greater ? v > margin : v < -margin;
}

bool ExponentSystem::contains(const Rational& a, const Rational& b) const
{
    if (!theta_admissible) return false;
    return std::all_of(inequalities.begin(), inequalities.end(), [&](const Inequality& q) { return q.holds(a, b); });
}

bool ExponentSystem::contains(double a, double b, double margin) const
{
    if (!theta_admissible) return false;
    return std::all_of(inequalities.begin(), inequalities.end(),
                       [&](const Inequality& q) { return q.holds(a, b, margin); });
}

SystemCase system_for(const Rational& beta, const Rational& s)
{
    require(beta > 0, ErrorCode::invalid_argument, "dispersion order must be positive");
    require(s < 0, ErrorCode::invalid_argument, "the exponent systems need s < 0");
    if (beta == 1) return SystemCase::halfwave;
    return s <= Rational(-1, 2) ? SystemCase::frac_low_s : SystemCase::frac_mid_s;
}

ExponentSystem build_system(SystemCase kind, const Rational& theta, const Rational& s, const Rational& beta)
{
    require(beta > 0, ErrorCode::invalid_argument, "dispersion order must be positive");
    switch (kind) {
    case SystemCase::halfwave:
        require(beta == 1, ErrorCode::invalid_argument, "the half-wave system needs beta = 1");
        require(s < 0, ErrorCode::invalid_argument, "the half-wave system needs s < 0");
        break;
    case SystemCase::frac_low_s:
        require(s <= Rational(-1, 2), ErrorCode::invalid_argument, "this system needs s <= -1/2");
        break;
    case SystemCase::frac_mid_s:
        require(s > Rational(-1, 2) && s < 0, ErrorCode::invalid_argument, "this system needs -1/2 < s < 0");
        break;
    }
    ExponentSystem sys;
    sys.kind = kind;
    sys.theta = theta;
    sys.s = s;
    sys.beta = beta;
    sys.theta_admissible = theta > 0 && theta < -s;
    for (const auto& l : template_lines<Rational>(kind, theta, s, beta))
        sys.inequalities.push_back({l.ca, l.cb, l.c0, l.greater});
    return sys;
}

ExponentSystem build_system(SystemCase kind, double theta, double s, double beta)
{
    return build_system(kind, snap_rational(theta), snap_rational(s), snap_rational(beta));
}

bool Region2D::contains(const Rational& a, const Rational& b) const
{
    if (empty()) return false;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const auto& u = vertices[i];
        const auto& v = vertices[(i + 1) % vertices.size()];
        const Rational cr = (v.a - u.a) * (b - u.b) - (v.b - u.b) * (a - u.a);
        if (!(cr > 0)) return false;
    }
    return true;
}

Vertex Region2D::centroid() const
{
    require(!empty(), ErrorCode::precondition, "empty region has no centroid");
    Rational a(0), b(0);
    for (const auto& v : vertices) a += v.a, b += v.b;
    const Rational n(static_cast<int>(vertices.size()));
    return {a / n, b / n};
}

Region2D solve_region(const ExponentSystem& sys)
{
    Region2D r;
    if (!sys.theta_admissible) return r;
    std::vector<Line<Rational>> lines;
    for (const auto& q : sys.inequalities) lines.push_back({q.ca, q.cb, q.c0, q.greater});
    for (auto& [a, b] : polygon<Rational>(lines, Rational(0))) r.vertices.push_back({a, b});
    return r;
}

std::vector<double> theta_candidates(double beta, double s, int grid_points)
{
    const double upper = std::max(1.0, -s);
    std::vector<double> marks{0.0, upper, -s, 0.5, beta / 4.0, (2.0 * beta - 1.0) / 6.0, beta * s / (2.0 * s - 1.0)};
    std::erase_if(marks, [&](double t) { return !(t >= 0.0 && t <= upper); });
    std::sort(marks.begin(), marks.end());
    std::vector<double> out(marks.begin(), marks.end());
    for (std::size_t i = 0; i + 1 < marks.size(); ++i) out.push_back(0.5 * (marks[i] + marks[i + 1]));
    for (int k = 1; k <= grid_points; ++k) out.push_back(upper * k / (grid_points + 1.0));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

FeasibilityVerdict classify_point(double beta, double s, int grid_points)
{
    FeasibilityVerdict v;
    v.beta = beta;
    v.s = s;
    const Rational qb = snap_rational(beta), qs = snap_rational(s);
    if (!(qs < 0) || !(qb > 0)) return v;
    if (qb == 2 && qs == Rational(-1, 2)) {
        v.feasible = true;
        v.log_corrected = true;
        return v;
    }
    const SystemCase kind = system_for(qb, qs);
    for (double theta : theta_candidates(beta, s, grid_points)) {
        if (!float_nonempty(kind, theta, s, beta)) continue;
        const auto sys = build_system(kind, Rational(theta), qs, qb);
        const auto region = solve_region(sys);
        if (region.empty()) continue;
        const auto c = region.centroid();
        v.feasible = true;
        v.theta = theta;
        v.a = to_double(c.a);
        v.b = to_double(c.b);
        return v;
    }
    return v;
}

std::vector<FeasibilityVerdict> inflation_region_map(const std::vector<double>& beta_grid,
                                                     const std::vector<double>& s_grid)
{
    std::vector<FeasibilityVerdict> out;
    out.reserve(beta_grid.size() * s_grid.size());
    for (double b : beta_grid)
        for (double s : s_grid) out.push_back(classify_point(b, s));
    return out;
}

Rational scaling_critical_index(const Rational& beta) { return (Rational(1) - beta) / 2; }

double scaling_critical_index(double beta) { return (1.0 - beta) / 2.0; }

BoundaryCertificate boundary_infeasibility(BoundaryCase kind, const Rational& beta)
{
    BoundaryCertificate c;
    c.kind = kind;
    c.beta = beta;
    const Rational half(1, 2);
    if (kind == BoundaryCase::frac_crit) {
        require(beta > 1 && beta < 2, ErrorCode::invalid_argument, "the critical boundary case needs 1 < beta < 2");
        c.s = scaling_critical_index(beta);
        c.quantity = "T R^3 A^{5/2+s}";
        c.identity = "T R^3 A^{5/2+s} = E^{1+s} F G^3";
        c.lhs = {1, 3, Rational(5, 2) + c.s, 0};
        c.e_exp = 1 + c.s;
        c.f_exp = 1;
        c.third_exp = 3;
        // E = A/N, F = T N^beta, G = R A^{1/2} N^s
        c.rhs = {c.f_exp, c.third_exp, c.e_exp + half * c.third_exp, -c.e_exp + beta * c.f_exp + c.s * c.third_exp};
        c.forced = c.e_exp > 0 && c.f_exp > 0 && c.third_exp > 0;
        c.conclusion = "forced << 1 while the method needs it >> 1";
    } else {
        require(beta > 2, ErrorCode::invalid_argument, "the sixth boundary case needs beta > 2");
        c.s = (1 - 2 * beta) / 6;
        c.quantity = "R A^{1/2} N^{(1-2beta)/6}";
        c.identity = "R A^{1/2} N^{(1-2beta)/6} = E^{-1/6} F^{-1/3} H^{1/3}";
        c.lhs = {0, 1, half, c.s};
        c.e_exp = Rational(-1, 6);
        c.f_exp = Rational(-1, 3);
        c.third_exp = Rational(1, 3);
        // H = T R^3 A^2
        c.rhs = {c.f_exp + c.third_exp, 3 * c.third_exp, c.e_exp + 2 * c.third_exp, -c.e_exp + beta * c.f_exp};
        c.forced = c.e_exp < 0 && c.f_exp < 0 && c.third_exp > 0;
        c.conclusion = "forced >> 1 while the method needs it << 1";
    }
    c.identity_holds = c.lhs == c.rhs;
    return c;
}

BoundaryCertificate boundary_infeasibility(BoundaryCase kind, double beta)
{
    return boundary_infeasibility(kind, snap_rational(beta));
}

MonteCarloResult monte_carlo_check(const ExponentSystem& sys, const Region2D& region, std::size_t samples,
                                   std::uint64_t seed)
{
    double alo = -5.0, ahi = 1.0, blo = -1.0, bhi = 2.0;
    if (!region.empty()) {
        alo = blo = 1e300;
        ahi = bhi = -1e300;
        for (const auto& v : region.vertices) {
            alo = std::min(alo, to_double(v.a));
            ahi = std::max(ahi, to_double(v.a));
            blo = std::min(blo, to_double(v.b));
            bhi = std::max(bhi, to_double(v.b));
        }
        const double wa = std::max(ahi - alo, 1e-3), wb = std::max(bhi - blo, 1e-3);
        alo -= 0.5 * wa, ahi += 0.5 * wa, blo -= 0.5 * wb, bhi += 0.5 * wb;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> da(alo, ahi), db(blo, bhi);
    MonteCarloResult r;
    r.samples = samples;
    for (std::size_t i = 0; i < samples; ++i) {
        const Rational a(da(rng)), b(db(rng));
        const bool in_poly = region.contains(a, b);
        const bool in_sys = sys.contains(a, b);
        r.inside += in_sys;
        r.mismatches += in_poly != in_sys;
    }
    return r;
}

} // namespace illpose
