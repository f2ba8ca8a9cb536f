// quadrature.hpp — Adaptive Gauss-Kronrod integration on finite and semi-infinite ranges

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

#include "qslab/errors.hpp"

namespace qslab::quad {

struct Options {
    double abs_tol{1e-12};
    // Floor relative to |I|; keeps large-magnitude integrals out of the roundoff regime.
    double rel_tol{1e-14};
    std::size_t max_intervals{20000};
};

template <class T>
struct Result {
    T value{};
    double error{0.0};
    std::size_t intervals{0};
};

namespace detail {

// Kronrod 15-point abscissae (descending), Kronrod weights, and the embedded Gauss 7-point weights.
inline constexpr std::array<double, 8> xgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
inline double magnitude(const T& v) { return std::abs(v); }

template <class T>
struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class T, class F>
Panel<T> kronrod15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const T fc = f(center);
    T kronrod = fc * wgk[7];
    T gauss = fc * wg[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        const T f1 = f(center - dx);
        const T f2 = f(center + dx);
        kronrod += (f1 + f2) * wgk[j];
        if (j % 2 == 1) gauss += (f1 + f2) * wg[j / 2];
    }
    return {a, b, kronrod * half, magnitude(T((kronrod - gauss) * half))};
}

} // namespace detail

// Globally adaptive bisection (QAG-style): always splits the panel with the largest error.
// Endpoints are never evaluated, so integrable endpoint singularities are handled by refinement.
template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {}) {
    using T = std::decay_t<decltype(f(a))>;
    if (a == b) return Result<T>{T{}, 0.0, 0};
    std::priority_queue<detail::Panel<T>> heap;
    auto first = detail::kronrod15<T>(f, a, b);
    T total = first.value;
    double err = first.error;
    heap.push(first);
    std::size_t count = 1;
    while (err > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total))) {
        if (count >= opt.max_intervals) {
            throw AccuracyError("adaptive quadrature exhausted its interval budget", err);
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw AccuracyError("adaptive quadrature hit floating-point resolution", err);
        }
        auto left = detail::kronrod15<T>(f, worst.a, mid);
        auto right = detail::kronrod15<T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Re-sum to shed the drift of the running updates.
    T sum{};
    double esum = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    return Result<T>{sum, esum, count};
}

// ∫_lower^∞ f(ω) dω via ω = lower + scale·x/(1−x), x ∈ [0, 1).
template <class F>
auto integrate_to_infinity(F&& f, double lower, double scale, const Options& opt = {}) {
    using T = std::decay_t<decltype(f(lower))>;
    auto mapped = [&](double x) -> T {
        const double one_minus = 1.0 - x;
        const double omega = lower + scale * x / one_minus;
        const double jac = scale / (one_minus * one_minus);
        if (!std::isfinite(omega) || !std::isfinite(jac)) return T{};
        const T value = f(omega);
        if (detail::magnitude(value) == 0.0) return T{};
        return value * jac;
    };
    return integrate(mapped, 0.0, 1.0, opt);
}

template <class F>
auto integrate_half_line(F&& f, double scale, const Options& opt = {}) {
    return integrate_to_infinity(std::forward<F>(f), 0.0, scale, opt);
}

// Fixed 8-point Gauss-Legendre rule on [-1, 1]; used for per-step kernel moments.
struct GaussLegendre8 {
    static constexpr std::array<double, 8> nodes{
        -0.960289856497536231683560868569473, -0.796666477413626739591553936475830,
        -0.525532409916328985817739049189246, -0.183434642495649804939476142360184,
        0.183434642495649804939476142360184,  0.525532409916328985817739049189246,
        0.796666477413626739591553936475830,  0.960289856497536231683560868569473};
    static constexpr std::array<double, 8> weights{
        0.101228536290376259152531354309962, 0.222381034453374470544355994426241,
        0.313706645877887287337962201986601, 0.362683783378361982965150449277196,
        0.362683783378361982965150449277196, 0.313706645877887287337962201986601,
        0.222381034453374470544355994426241, 0.101228536290376259152531354309962};
};

} // namespace qslab::quad
