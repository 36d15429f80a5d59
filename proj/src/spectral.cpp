#include "spectral.hpp"

#include "error.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

namespace illpose {

namespace {

constexpr double pi = std::numbers::pi;

// exp(-i theta) with theta given in long double, reduced before rounding.
cplx unit_phase(long double theta)
{
    constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    long double r = std::fmod(theta, two_pi);
    return {static_cast<double>(std::cos(r)), static_cast<double>(-std::sin(r))};
}

// e^{-i xi_k x0} for the stored modes; x0 = center - L/2 splits into an exact
// (k+1/2)pi part and a center part.
std::vector<cplx> offset_phases(const Grid& g)
{
    std::vector<cplx> ph(g.size());
    const long double dk = 2.0L * std::numbers::pi_v<long double> / static_cast<long double>(g.length());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const long k = g.mode(i);
        const cplx half_turns = (k % 2 == 0) ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
        const long double xi = (static_cast<long double>(k) + 0.5L) * dk;
        ph[i] = half_turns * (g.center() == 0.0 ? cplx(1.0, 0.0) : unit_phase(xi * g.center()));
    }
    return ph;
}

std::vector<cplx> sample_phases(std::size_t M)
{
    // (-1)^j e^{-i pi j / M}
    std::vector<cplx> ph(M);
    for (std::size_t j = 0; j < M; ++j) {
        const cplx s = (j % 2 == 0) ? 1.0 : -1.0;
        ph[j] = s * unit_phase(std::numbers::pi_v<long double> * static_cast<long double>(j) / static_cast<long double>(M));
    }
    return ph;
}

struct PhaseTables {
    std::vector<cplx> offset;
    std::vector<cplx> sample;
};

const PhaseTables& phase_tables(const Grid& g)
{
    static std::mutex m;
    static std::map<std::tuple<double, std::size_t, double>, PhaseTables> cache;
    std::lock_guard<std::mutex> lock(m);
    auto key = std::make_tuple(g.length(), g.size(), g.center());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (cache.size() > 32) cache.clear();
    return cache.emplace(key, PhaseTables{offset_phases(g), sample_phases(g.size())}).first->second;
}

} // namespace

Grid::Grid(double length, std::size_t points, double center) : L_(length), M_(points), center_(center)
{
    require(std::isfinite(length) && length > 0.0, ErrorCode::invalid_argument, "grid length must be positive");
    require(is_pow2(points) && points >= 16, ErrorCode::invalid_argument, "grid size must be a power of two >= 16");
    require(std::isfinite(center), ErrorCode::invalid_argument, "grid center must be finite");
}

double Grid::dk() const { return 2.0 * pi / L_; }
double Grid::nyquist() const { return pi * static_cast<double>(M_) / L_; }

std::vector<cplx> forward_transform(const Grid& g, const std::vector<cplx>& values)
{
    require(values.size() == g.size(), ErrorCode::invalid_argument, "sample count does not match grid");
    const auto& tab = phase_tables(g);
    std::vector<cplx> buf(values.size());
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] = values[j] * tab.sample[j];
    dft_inplace(buf, -1);
    const double w = g.dx();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= w * tab.offset[i];
    return buf;
}

std::vector<cplx> inverse_transform(const Grid& g, const std::vector<cplx>& spectrum)
{
    require(spectrum.size() == g.size(), ErrorCode::invalid_argument, "spectrum size does not match grid");
    const auto& tab = phase_tables(g);
    std::vector<cplx> buf(spectrum.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = spectrum[i] * std::conj(tab.offset[i]);
    dft_inplace(buf, +1);
    const double w = 1.0 / g.length();
    for (std::size_t j = 0; j < buf.size(); ++j) buf[j] *= w * std::conj(tab.sample[j]);
    return buf;
}

SpectralField SpectralField::from_values(const Grid& g, std::vector<cplx> values)
{
    require(values.size() == g.size(), ErrorCode::invalid_argument, "sample count does not match grid");
    SpectralField f;
    f.grid_ = g;
    f.state_ = std::make_shared<State>();
    f.state_->values = std::move(values);
    return f;
}

SpectralField SpectralField::from_spectrum(const Grid& g, std::vector<cplx> spectrum)
{
    require(spectrum.size() == g.size(), ErrorCode::invalid_argument, "spectrum size does not match grid");
    SpectralField f;
    f.grid_ = g;
    f.state_ = std::make_shared<State>();
    f.state_->spectrum = std::move(spectrum);
    return f;
}

SpectralField SpectralField::zeros(const Grid& g)
{
    SpectralField f;
    f.grid_ = g;
    f.state_ = std::make_shared<State>();
    f.state_->values = std::vector<cplx>(g.size());
    f.state_->spectrum = std::vector<cplx>(g.size());
    return f;
}

const std::vector<cplx>& SpectralField::values() const
{
    require(static_cast<bool>(state_), ErrorCode::invalid_argument, "empty field");
    std::lock_guard<std::mutex> lock(state_->m);
    if (!state_->values) state_->values = inverse_transform(grid_, *state_->spectrum);
    return *state_->values;
}

const std::vector<cplx>& SpectralField::spectrum() const
{
    require(static_cast<bool>(state_), ErrorCode::invalid_argument, "empty field");
    std::lock_guard<std::mutex> lock(state_->m);
    if (!state_->spectrum) state_->spectrum = forward_transform(grid_, *state_->values);
    return *state_->spectrum;
}

bool SpectralField::values_current() const
{
    if (!state_) return false;
    std::lock_guard<std::mutex> lock(state_->m);
    return state_->values.has_value();
}

bool SpectralField::spectrum_current() const
{
    if (!state_) return false;
    std::lock_guard<std::mutex> lock(state_->m);
    return state_->spectrum.has_value();
}

SpectralField SpectralField::scaled(cplx c) const
{
    if (spectrum_current()) {
        auto s = spectrum();
        for (auto& v : s) v *= c;
        return from_spectrum(grid_, std::move(s));
    }
    auto v = values();
    for (auto& x : v) x *= c;
    return from_values(grid_, std::move(v));
}

SpectralField SpectralField::operator+(const SpectralField& o) const
{
    require(grid_ == o.grid_, ErrorCode::invalid_argument, "fields live on different grids");
    if (spectrum_current() && o.spectrum_current()) {
        auto s = spectrum();
        const auto& t = o.spectrum();
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += t[i];
        return from_spectrum(grid_, std::move(s));
    }
    auto v = values();
    const auto& w = o.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += w[i];
    return from_values(grid_, std::move(v));
}

SpectralField SpectralField::operator-(const SpectralField& o) const { return *this + o.scaled(-1.0); }

SpectralField forward_transform(const SpectralField& f)
{
    return SpectralField::from_spectrum(f.grid(), f.spectrum());
}

SpectralField apply_dispersion(const SpectralField& f, double beta, double t)
{
    require(beta > 0.0, ErrorCode::invalid_argument, "dispersion exponent must be positive");
    auto s = f.spectrum();
    if (t == 0.0) return SpectralField::from_spectrum(f.grid(), std::move(s));
    const Grid& g = f.grid();
    for (std::size_t i = 0; i < s.size(); ++i) {
        const long double ph = static_cast<long double>(t) * std::pow(static_cast<long double>(std::abs(g.xi(i))), static_cast<long double>(beta));
        s[i] *= unit_phase(ph);
    }
    return SpectralField::from_spectrum(g, std::move(s));
}

SpectralField szego_project(const SpectralField& f)
{
    auto s = f.spectrum();
    const Grid& g = f.grid();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (g.mode(i) < 0) s[i] = 0.0;
    return SpectralField::from_spectrum(g, std::move(s));
}

SpectralField anti_szego_project(const SpectralField& f)
{
    auto s = f.spectrum();
    const Grid& g = f.grid();
    for (std::size_t i = 0; i < s.size(); ++i)
        if (g.mode(i) >= 0) s[i] = 0.0;
    return SpectralField::from_spectrum(g, std::move(s));
}

namespace {

// Cell integrals of the frequency weight over [nh, (n+1)h] against
// (xi - m)^0, (xi - m)^1, (xi - m)^2 about the node m = (n+1/2)h, indexed by n >= 0.
struct CellWeights {
    std::vector<double> w0;
    std::vector<double> w1;
    std::vector<double> w2;
    bool singular_center = false;
};

double weight_fn(NormKind kind, double s, double xi)
{
    if (kind == NormKind::homogeneous_hs) return std::pow(xi, 2.0 * s);
    return std::exp(2.0 * s * std::log(std::hypot(1.0, xi)));
}

double gl_cell(NormKind kind, double s, double a, double b, double node, int order)
{
    const auto& r = gauss_legendre(8);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t q = 0; q < r.nodes.size(); ++q) {
        const double x = mid + half * r.nodes[q];
        acc += r.weights[q] * weight_fn(kind, s, x) * std::pow(x - node, order);
    }
    return acc * half;
}

// int_0^h (1 + xi^2)^s (xi - h/2)^order
double sobolev_first_cell(double s, double h, int order)
{
    auto f = [s, h, order](double x) { return std::exp(s * std::log1p(x * x)) * std::pow(x - 0.5 * h, order); };
    if (h <= 2.0) return integrate_adaptive(f, 0.0, h);
    const double head = integrate_adaptive(f, 0.0, 1.0);
    auto g = [s, h, order](double u) {
        const double e = std::exp(u);
        return std::exp(2.0 * s * std::log(std::hypot(1.0, e))) * std::pow(e - 0.5 * h, order) * e;
    };
    if (order == 0 && s == -0.5) return std::asinh(h);
    return head + integrate_adaptive(g, 0.0, std::log(h));
}

CellWeights build_weights(NormKind kind, double s, double h, std::size_t cells)
{
    CellWeights cw;
    cw.w0.assign(cells, 0.0);
    cw.w1.assign(cells, 0.0);
    cw.w2.assign(cells, 0.0);
    if (kind == NormKind::l2) {
        std::fill(cw.w0.begin(), cw.w0.end(), h);
        return cw;
    }
    if (kind == NormKind::homogeneous_hs) {
        const double q = 2.0 * s + 1.0;
        if (q <= 0.0) {
            cw.singular_center = true;
        } else {
            const double hq = std::pow(h, q);
            cw.w0[0] = hq / q;
            cw.w1[0] = hq * h * (1.0 / (q + 1.0) - 0.5 / q);
            cw.w2[0] = hq * h * h * (1.0 / (q + 2.0) - 1.0 / (q + 1.0) + 0.25 / q);
        }
        for (std::size_t n = 1; n < cells; ++n) {
            const double nn = static_cast<double>(n);
            const double l = std::log1p(1.0 / nn);
            const double e = (q == 0.0) ? l : std::expm1(q * l) / q;
            cw.w0[n] = std::exp(q * std::log(h * nn)) * e;
            cw.w1[n] = gl_cell(kind, s, nn * h, (nn + 1.0) * h, (nn + 0.5) * h, 1);
            cw.w2[n] = gl_cell(kind, s, nn * h, (nn + 1.0) * h, (nn + 0.5) * h, 2);
        }
        return cw;
    }
    cw.w0[0] = sobolev_first_cell(s, h, 0);
    cw.w1[0] = sobolev_first_cell(s, h, 1);
    cw.w2[0] = sobolev_first_cell(s, h, 2);
    for (std::size_t n = 1; n < cells; ++n) {
        const double nn = static_cast<double>(n);
        cw.w0[n] = gl_cell(kind, s, nn * h, (nn + 1.0) * h, (nn + 0.5) * h, 0);
        cw.w1[n] = gl_cell(kind, s, nn * h, (nn + 1.0) * h, (nn + 0.5) * h, 1);
        cw.w2[n] = gl_cell(kind, s, nn * h, (nn + 1.0) * h, (nn + 0.5) * h, 2);
    }
    return cw;
}

std::shared_ptr<const CellWeights> cell_weights(NormKind kind, double s, double h, std::size_t cells)
{
    static std::mutex m;
    static std::map<std::tuple<int, double, double, std::size_t>, std::shared_ptr<const CellWeights>> cache;
    auto key = std::make_tuple(static_cast<int>(kind), s, h, cells);
    {
        std::lock_guard<std::mutex> lock(m);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto w = std::make_shared<const CellWeights>(build_weights(kind, s, h, cells));
    std::lock_guard<std::mutex> lock(m);
    if (cache.size() > 64) cache.clear();
    cache.emplace(key, w);
    return w;
}

} // namespace

long modulation_window_cells(const Grid& g, double A)
{
    require(A > 0.0, ErrorCode::invalid_argument, "modulation window must be positive");
    const double r = A / g.dk();
    const double rr = std::round(r);
    require(std::abs(r - rr) <= 1e-9 * std::max(1.0, r) && rr >= 2.0 && std::fmod(rr, 2.0) == 0.0,
            ErrorCode::invalid_argument, "modulation window is not an even multiple of the lattice spacing");
    return static_cast<long>(rr);
}

NormResult norm_of_spectrum(const Grid& g, const std::vector<cplx>& spec, const NormSpec& ns)
{
    require(spec.size() == g.size(), ErrorCode::invalid_argument, "spectrum size does not match grid");
    const double h = g.dk();
    const std::size_t M = g.size();
    if (ns.kind == NormKind::modulation_ma) {
        const long r = modulation_window_cells(g, ns.A);
        std::map<long, double> windows;
        for (std::size_t i = 0; i < M; ++i) {
            const double a2 = std::norm(spec[i]);
            if (a2 == 0.0) continue;
            const long k = g.mode(i);
            const long shifted = k + r / 2;
            const long j = shifted >= 0 ? shifted / r : -((-shifted + r - 1) / r);
            windows[j] += a2 * h;
        }
        double acc = 0.0;
        for (const auto& [j, m2] : windows) acc += std::sqrt(m2);
        return {acc, true};
    }
    std::vector<double> g2(M);
    double peak = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        g2[i] = std::norm(spec[i]);
        peak = std::max(peak, std::abs(spec[i]));
    }
    if (ns.kind == NormKind::l2) {
        double acc = 0.0;
        for (double v : g2) acc += v;
        return {std::sqrt(acc * h / (2.0 * pi)), true};
    }
    auto cw = cell_weights(ns.kind, ns.s, h, M / 2);
    NormResult res;
    double acc = 0.0;
    if (cw->singular_center) {
        // Central cells under a singular weight: fit g ~ C xi^nu through the
        // nodes h/2 and 3h/2 on each side and integrate the model exactly.
        const double thr2 = 1e-24 * peak * peak;
        const double q = 2.0 * ns.s + 1.0;
        for (int side : {-1, 1}) {
            const std::size_t i0 = side > 0 ? M / 2 : M / 2 - 1;
            const std::size_t i1 = side > 0 ? M / 2 + 1 : M / 2 - 2;
            const double g0 = g2[i0], g1 = g2[i1];
            if (g0 <= thr2) continue;
            const double nu = (g1 > 0.0) ? std::log(g1 / g0) / std::log(3.0) : 60.0;
            const double e = q + nu;
            if (e <= 0.05) {
                res.convergent = false;
                continue;
            }
            const double C = g0 / std::pow(0.5 * h, nu);
            acc += C * std::pow(h, e) / e;
        }
    }
    for (std::size_t i = 0; i < M; ++i) {
        if (g2[i] == 0.0 && (i == 0 || g2[i - 1] == 0.0) && (i + 1 == M || g2[i + 1] == 0.0)) continue;
        const long k = g.mode(i);
        const std::size_t n = static_cast<std::size_t>(k >= 0 ? k : -k - 1);
        if (cw->singular_center && n == 0) continue;
        const double sign = k >= 0 ? 1.0 : -1.0;
        double slope = 0.0, curv = 0.0;
        if (i + 1 < M && i > 0) {
            const double right = (g2[i + 1] - g2[i]) / h, left = (g2[i] - g2[i - 1]) / h;
            const double lo = std::min(std::abs(left), std::abs(right)), hi = std::max(std::abs(left), std::abs(right));
            if (hi > 8.0 * lo) {
                slope = std::abs(right) < std::abs(left) ? right : left;
            } else {
                slope = 0.5 * (left + right);
                curv = (right - left) / h;
            }
        }
        acc += cw->w0[n] * g2[i] + sign * cw->w1[n] * slope + 0.5 * cw->w2[n] * curv;
    }
    res.value = std::sqrt(std::max(acc, 0.0) / (2.0 * pi));
    return res;
}

NormResult norm(const SpectralField& f, const NormSpec& spec) { return norm_of_spectrum(f.grid(), f.spectrum(), spec); }

SpectralField pointwise_cubic(const SpectralField& f, double mu)
{
    auto v = f.values();
    for (auto& x : v) x *= mu * std::norm(x);
    return SpectralField::from_values(f.grid(), std::move(v));
}

SpectralField cubic_product(const SpectralField& f, double mu, bool dealias)
{
    if (!dealias) {
        auto out = pointwise_cubic(f, mu);
        return SpectralField::from_spectrum(f.grid(), out.spectrum());
    }
    const Grid& g = f.grid();
    const std::size_t M = g.size();
    const Grid big(g.length(), 2 * M, g.center());
    const auto& s = f.spectrum();
    std::vector<cplx> pad(2 * M);
    for (std::size_t i = 0; i < M; ++i) pad[i + M / 2] = s[i];
    auto v = inverse_transform(big, pad);
    for (auto& x : v) x *= mu * std::norm(x);
    auto S = forward_transform(big, v);
    std::vector<cplx> out(M);
    for (std::size_t i = 0; i < M; ++i) out[i] = S[i + M / 2];
    return SpectralField::from_spectrum(g, std::move(out));
}

std::vector<cplx> dtft(const Grid& g, const std::vector<cplx>& values, double eta0, double deta, std::size_t count)
{
    const std::size_t M = values.size();
    require(M == g.size(), ErrorCode::invalid_argument, "sample count does not match grid");
    if (count == 0) return {};
    const std::size_t P = next_pow2(M + count - 1);
    const long double dx = static_cast<long double>(g.length()) / static_cast<long double>(M);
    const long double w = static_cast<long double>(deta) * dx;
    std::vector<cplx> a(P), b(P);
    for (std::size_t j = 0; j < M; ++j) {
        const long double jj = static_cast<long double>(j);
        a[j] = values[j] * unit_phase(static_cast<long double>(eta0) * jj * dx + 0.5L * w * jj * jj);
    }
    for (std::size_t n = 0; n < count; ++n) {
        const long double nn = static_cast<long double>(n);
        b[n] = std::conj(unit_phase(0.5L * w * nn * nn));
    }
    for (std::size_t n = 1; n < M; ++n) {
        const long double nn = static_cast<long double>(n);
        b[P - n] = std::conj(unit_phase(0.5L * w * nn * nn));
    }
    dft_inplace(a, -1);
    dft_inplace(b, -1);
    for (std::size_t i = 0; i < P; ++i) a[i] *= b[i];
    dft_inplace(a, +1);
    std::vector<cplx> out(count);
    const long double x0 = static_cast<long double>(g.x0());
    const double scale = static_cast<double>(dx) / static_cast<double>(P);
    for (std::size_t q = 0; q < count; ++q) {
        const long double qq = static_cast<long double>(q);
        const long double eta = static_cast<long double>(eta0) + qq * static_cast<long double>(deta);
        out[q] = scale * a[q] * unit_phase(eta * x0 + 0.5L * w * qq * qq);
    }
    return out;
}

SpectralField dilate_translate(const SpectralField& f, const Grid& target, double sigma, double shift, double mass_tol)
{
    require(sigma > 0.0, ErrorCode::invalid_argument, "dilation factor must be positive");
    const Grid& src = f.grid();
    const auto& spec = f.spectrum();
    double total = 0.0, lost = 0.0;
    const double reach = sigma * target.nyquist();
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double m2 = std::norm(spec[i]);
        total += m2;
        if (std::abs(src.xi(i)) > reach) lost += m2;
    }
    require(lost <= mass_tol * total, ErrorCode::bandwidth_overflow, "dilated field exceeds the target bandwidth");
    const auto& vals = f.values();
    const double lo = (target.x0() - shift) / sigma, hi = (target.x0() + target.length() - shift) / sigma;
    double outside = 0.0, vtotal = 0.0;
    for (std::size_t j = 0; j < vals.size(); ++j) {
        const double m2 = std::norm(vals[j]);
        vtotal += m2;
        const double y = src.x(j);
        if (y < lo || y >= hi) outside += m2;
    }
    require(outside <= mass_tol * vtotal, ErrorCode::window_overflow, "dilated field exceeds the target window");
    const std::size_t Mt = target.size();
    const double h = target.dk();
    auto F = dtft(src, vals, sigma * target.xi(0), sigma * h, Mt);
    std::vector<cplx> out(Mt);
    const double nyq = src.nyquist();
    for (std::size_t i = 0; i < Mt; ++i) {
        const double xi = target.xi(i);
        if (std::abs(sigma * xi) >= nyq) continue;
        out[i] = sigma * F[i] * unit_phase(static_cast<long double>(xi) * shift);
    }
    return SpectralField::from_spectrum(target, std::move(out));
}

} // namespace illpose
