#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ktz {

inline constexpr double kPi = 3.14159265358979323846;

// Result of a monotone inversion.  `extrapolated` is set when the requested
// level lies beyond the trusted part of the domain, in which case `eps` is
// clamped to the domain edge.
struct InverseResult {
    double eps = 0.0;
    bool extrapolated = false;
};

// Logarithmically spaced grid on [lo, hi], `pts_per_decade` points per decade,
// both endpoints included exactly.
inline std::vector<double> log_grid(double lo, double hi, int pts_per_decade) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_grid: need 0 < lo < hi");
    if (pts_per_decade < 2) throw std::invalid_argument("log_grid: pts_per_decade < 2");
    const double decades = std::log10(hi / lo);
    const int n = static_cast<int>(std::ceil(decades * pts_per_decade)) + 1;
    std::vector<double> g(static_cast<std::size_t>(n) + 1);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i <= n; ++i) g[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / n);
    g.front() = lo;
    g.back() = hi;
    return g;
}

// Smallest eps in [lo, hi] with f(eps) <= s, for non-increasing f.  Bisection
// in log space, relative tolerance 1e-12, 200-iteration cap.
template <class F>
InverseResult invert_nonincreasing(F&& f, double s, double lo, double hi) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("invert_nonincreasing: bad bracket");
    const double fhi = f(hi);
    if (s < fhi && (fhi - s) > 1e-14 * std::abs(fhi))
        throw std::domain_error("invert_nonincreasing: target below the minimum over the domain");
    const double flo = f(lo);
    if (flo <= s) return {lo, flo < s};
    for (int it = 0; it < 200 && (hi / lo - 1.0) > 1e-12; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (f(mid) <= s)
            hi = mid;
        else
            lo = mid;
    }
    return {hi, false};
}

// Golden-section maximization of f on [a, b] (a < b), returning the refined
// maximum value.  Runs until the bracket shrinks below rel_tol; per-step value
// improvement is not a safe stop (it decays geometrically long before the
// bracket has collapsed onto the maximizer).
template <class F>
double golden_max(F&& f, double a, double b, double rel_tol = 1e-12) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    double best = std::max(f1, f2);
    for (int it = 0; it < 200; ++it) {
        if (b - a <= rel_tol * (std::abs(a) + std::abs(b))) break;
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
        best = std::max(best, std::max(f1, f2));
    }
    return best;
}

template <class F>
double golden_min(F&& f, double a, double b, double rel_tol = 1e-12) {
    return -golden_max([&](double x) { return -f(x); }, a, b, rel_tol);
}

// Ordinary least squares for y ~ c0 + c1 x; returns {c0, c1}.
inline std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-300) throw std::runtime_error("linear_fit: degenerate abscissae");
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;
    return {intercept, slope};
}

}  // namespace ktz
