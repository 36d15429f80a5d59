#pragma once

#include "fft.hpp"

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace illpose {

// Uniform grid on a window of length L around `center`. Samples sit at
// x_j = center - L/2 + jL/M. Fields are stored as the antiperiodic image of
// the line function, so the frequency lattice is xi_k = (k + 1/2) 2pi/L for
// k in [-M/2, M/2), stored in ascending order.
class Grid {
public:
    Grid() = default;
    Grid(double length, std::size_t points, double center = 0.0);

    double length() const { return L_; }
    std::size_t size() const { return M_; }
    double center() const { return center_; }
    double dx() const { return L_ / static_cast<double>(M_); }
    double dk() const;
    double x0() const { return center_ - 0.5 * L_; }
    double x(std::size_t j) const { return x0() + static_cast<double>(j) * dx(); }
    long mode(std::size_t i) const { return static_cast<long>(i) - static_cast<long>(M_ / 2); }
    double xi(std::size_t i) const { return (static_cast<double>(mode(i)) + 0.5) * dk(); }
    std::size_t index_of_mode(long k) const { return static_cast<std::size_t>(k + static_cast<long>(M_ / 2)); }
    double nyquist() const;

    bool operator==(const Grid& o) const { return L_ == o.L_ && M_ == o.M_ && center_ == o.center_; }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    double L_ = 0.0;
    std::size_t M_ = 0;
    double center_ = 0.0;
};

std::vector<cplx> forward_transform(const Grid& g, const std::vector<cplx>& values);
std::vector<cplx> inverse_transform(const Grid& g, const std::vector<cplx>& spectrum);

// Immutable field with lazily materialized physical samples and spectrum.
// Readers on different threads may share one instance.
class SpectralField {
public:
    SpectralField() = default;

    static SpectralField from_values(const Grid& g, std::vector<cplx> values);
    static SpectralField from_spectrum(const Grid& g, std::vector<cplx> spectrum);
    static SpectralField zeros(const Grid& g);

    template <class F>
    static SpectralField sample(const Grid& g, F&& f)
    {
        std::vector<cplx> v(g.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(g.x(j));
        return from_values(g, std::move(v));
    }

    template <class F>
    static SpectralField sample_spectrum(const Grid& g, F&& f)
    {
        std::vector<cplx> v(g.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.xi(i));
        return from_spectrum(g, std::move(v));
    }

    bool empty() const { return !state_; }
    const Grid& grid() const { return grid_; }
    const std::vector<cplx>& values() const;
    const std::vector<cplx>& spectrum() const;
    bool values_current() const;
    bool spectrum_current() const;

    SpectralField scaled(cplx c) const;
    SpectralField operator+(const SpectralField& o) const;
    SpectralField operator-(const SpectralField& o) const;

private:
    struct State {
        std::mutex m;
        std::optional<std::vector<cplx>> values;
        std::optional<std::vector<cplx>> spectrum;
    };
    Grid grid_;
    std::shared_ptr<State> state_;
};

SpectralField forward_transform(const SpectralField& f);
SpectralField apply_dispersion(const SpectralField& f, double beta, double t);
SpectralField szego_project(const SpectralField& f);
SpectralField anti_szego_project(const SpectralField& f);

enum class NormKind { sobolev_hs, homogeneous_hs, l2, modulation_ma };

struct NormSpec {
    NormKind kind = NormKind::l2;
    double s = 0.0;
    double A = 0.0;

    static NormSpec sobolev(double s) { return {NormKind::sobolev_hs, s, 0.0}; }
    static NormSpec homogeneous(double s) { return {NormKind::homogeneous_hs, s, 0.0}; }
    static NormSpec l2() { return {NormKind::l2, 0.0, 0.0}; }
    static NormSpec modulation(double A) { return {NormKind::modulation_ma, 0.0, A}; }
};

struct NormResult {
    double value = 0.0;
    bool convergent = true;
};

NormResult norm(const SpectralField& f, const NormSpec& spec);
NormResult norm_of_spectrum(const Grid& g, const std::vector<cplx>& spectrum, const NormSpec& spec);

// Even integer r with A = r * dk, or throws.
long modulation_window_cells(const Grid& g, double A);

SpectralField pointwise_cubic(const SpectralField& f, double mu);
// mu |f|^2 f, with 2x zero padding when dealias is set.
SpectralField cubic_product(const SpectralField& f, double mu, bool dealias);

// (L/M) sum_j v_j exp(-i eta_q x_j) for eta_q = eta0 + q deta, via chirp-z.
std::vector<cplx> dtft(const Grid& g, const std::vector<cplx>& values, double eta0, double deta, std::size_t count);

// g(x) = f((x - shift) / sigma) sampled on `target`.
SpectralField dilate_translate(const SpectralField& f, const Grid& target, double sigma, double shift,
                               double mass_tol = 1e-12);

} // namespace illpose
