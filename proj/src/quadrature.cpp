#include "quadrature.hpp"

#include "error.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>

namespace illpose {

namespace {

template <unsigned N>
GaussRule make_rule()
{
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    GaussRule r;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            r.nodes.push_back(0.0);
            r.weights.push_back(w[i]);
            continue;
        }
        r.nodes.push_back(x[i]);
        r.weights.push_back(w[i]);
        r.nodes.push_back(-x[i]);
        r.weights.push_back(w[i]);
    }
    std::vector<std::size_t> idx(r.nodes.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return r.nodes[a] < r.nodes[b]; });
    GaussRule s;
    for (auto i : idx) {
        s.nodes.push_back(r.nodes[i]);
        s.weights.push_back(r.weights[i]);
    }
    return s;
}

} // namespace

const GaussRule& gauss_legendre(int n)
{
    static std::mutex m;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GaussRule r;
    switch (n) {
    case 4: r = make_rule<4>(); break;
    case 8: r = make_rule<8>(); break;
    case 16: r = make_rule<16>(); break;
    case 20: r = make_rule<20>(); break;
    case 32: r = make_rule<32>(); break;
    case 64: r = make_rule<64>(); break;
    default: fail(ErrorCode::invalid_argument, "unsupported Gauss-Legendre order " + std::to_string(n));
    }
    return cache.emplace(n, std::move(r)).first->second;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol)
{
    if (a == b) return 0.0;
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &err);
    return v;
}

double integrate_half_line(const std::function<double(double)>& f, double a, double tol)
{
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate(f, a, std::numeric_limits<double>::infinity(), tol);
}

} // namespace illpose
