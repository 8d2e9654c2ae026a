#include "ktz/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ktz {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kModulusTol = 1e-12;

}  // namespace

Density Density::from_coefficients(std::vector<double> prefix, double tail_mass_bound) {
    Density d;
    d.prefix_ = std::move(prefix);
    d.tail_ = tail_mass_bound;
    d.form_ = tail_mass_bound == 0.0 ? ClosedForm::Finite : ClosedForm::None;
    d.validate();
    return d;
}

Density Density::point_mass(std::size_t k) {
    Density d;
    d.prefix_.assign(k + 1, 0.0);
    d.prefix_[k] = 1.0;
    d.form_ = ClosedForm::Finite;
    return d;
}

Density Density::lazy_bernoulli(double p) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("lazy_bernoulli: need p in (0,1)");
    Density d;
    d.prefix_ = {1.0 - p, p};
    d.form_ = ClosedForm::Finite;
    return d;
}

Density Density::geometric(double r, std::size_t prefix_len) {
    if (!(r > 0.0) || !(r < 1.0)) throw std::domain_error("geometric: need r in (0,1)");
    if (prefix_len < 1) throw std::domain_error("geometric: empty prefix");
    Density d;
    d.prefix_.resize(prefix_len + 1);
    double term = 1.0 - r;
    for (std::size_t n = 0; n <= prefix_len; ++n) {
        d.prefix_[n] = term;
        term *= r;
    }
    d.tail_ = std::pow(r, static_cast<double>(prefix_len) + 1.0);  // sum_{n>N} (1-r) r^n
    d.form_ = ClosedForm::Geometric;
    d.geo_r_ = r;
    return d;
}

Density Density::log_kernel(std::size_t prefix_len) {
    if (prefix_len < 2) throw std::domain_error("log_kernel: need prefix_len >= 2");
    Density d;
    d.prefix_.resize(prefix_len + 1, 0.0);
    for (std::size_t n = 2; n <= prefix_len; ++n)
        d.prefix_[n] = 1.0 / (static_cast<double>(n) * static_cast<double>(n - 1));
    d.tail_ = 1.0 / static_cast<double>(prefix_len);  // telescoping remainder
    d.form_ = ClosedForm::LogKernel;
    return d;
}

std::vector<std::size_t> Density::support() const {
    std::vector<std::size_t> s;
    for (std::size_t n = 0; n < prefix_.size(); ++n)
        if (prefix_[n] > 0.0) s.push_back(n);
    return s;
}

void Density::validate() const {
    for (std::size_t n = 0; n < prefix_.size(); ++n)
        if (prefix_[n] < 0.0)
            throw std::runtime_error("Density: negative coefficient at index " + std::to_string(n));
    const double mass = std::accumulate(prefix_.begin(), prefix_.end(), 0.0);
    // The prefix alone must not exceed unit mass; together with the tail bound
    // it must account for the whole mass.  The tail bound may over-cover (it
    // is a bound, not the exact remainder), e.g. after a convolution.
    if (mass > 1.0 + kMassTol)
        throw std::runtime_error("Density: prefix mass exceeds 1");
    if (mass + tail_ < 1.0 - kMassTol)
        throw std::runtime_error("Density: prefix mass plus tail bound below 1");
}

std::complex<double> Density::phi(std::complex<double> lambda) const {
    if (std::abs(lambda) > 1.0 + kModulusTol)
        throw std::domain_error("phi: |lambda| > 1");
    switch (form_) {
        case ClosedForm::Geometric:
            return (1.0 - geo_r_) / (1.0 - geo_r_ * lambda);
        case ClosedForm::LogKernel: {
            if (lambda == std::complex<double>(1.0, 0.0)) return {1.0, 0.0};
            const std::complex<double> one_minus = 1.0 - lambda;
            return lambda + one_minus * std::log(one_minus);
        }
        case ClosedForm::Finite:
        case ClosedForm::None: {
            // Horner partial sum; error radius <= tail_mass_bound.
            std::complex<double> acc = 0.0;
            for (auto it = prefix_.rbegin(); it != prefix_.rend(); ++it) acc = acc * lambda + *it;
            return acc;
        }
    }
    throw std::logic_error("Density: unknown closed form");
}

Density::AperiodicityReport Density::aperiodicity() const {
    AperiodicityReport rep;
    const std::vector<std::size_t> supp = support();
    if (supp.empty()) {
        rep.reason = "empty support";
        return rep;
    }
    if (supp.size() == 1 && supp[0] == 0 && tail_ == 0.0)
        throw std::invalid_argument("aperiodicity: point mass at 0 (identity symbol)");
    if (supp.size() == 1) {
        rep.reason = "singleton support";
        return rep;
    }
    std::size_t g = 0;
    for (std::size_t i = 1; i < supp.size(); ++i) g = std::gcd(g, supp[i] - supp[i - 1]);
    rep.aperiodic = (g == 1);
    rep.reason = rep.aperiodic ? "support differences have gcd 1"
                               : "support differences have gcd " + std::to_string(g);
    for (std::size_t i = 1; i < supp.size(); ++i) {
        if (supp[i] == supp[i - 1] + 1) {
            rep.consecutive_witness = true;
            rep.witness_index = supp[i - 1];
            break;
        }
    }
    return rep;
}

Density convolve(const Density& a, const Density& b) {
    a.validate();
    b.validate();
    const auto& pa = a.prefix();
    const auto& pb = b.prefix();
    std::vector<double> out(pa.size() + pb.size() - 1, 0.0);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (pa[i] == 0.0) continue;
        for (std::size_t j = 0; j < pb.size(); ++j) out[i + j] += pa[i] * pb[j];
    }
    const double tail = a.tail_mass_bound() + b.tail_mass_bound() +
                        a.tail_mass_bound() * b.tail_mass_bound();
    return Density::from_coefficients(std::move(out), tail);
}

Density builtin_family(std::string_view name, std::optional<double> param,
                       std::optional<std::size_t> prefix_len) {
    if (name == "point_mass") {
        const double k = param.value_or(0.0);
        if (k < 0.0 || k != std::floor(k)) throw std::domain_error("point_mass: index must be a non-negative integer");
        return Density::point_mass(static_cast<std::size_t>(k));
    }
    if (name == "lazy_bernoulli") return Density::lazy_bernoulli(param.value_or(0.5));
    if (name == "geometric") {
        if (prefix_len) return Density::geometric(param.value_or(0.5), *prefix_len);
        return Density::geometric(param.value_or(0.5));
    }
    if (name == "log_example" || name == "log_kernel") {
        if (prefix_len) return Density::log_kernel(*prefix_len);
        return Density::log_kernel();
    }
    throw std::domain_error("builtin_family: unknown family '" + std::string(name) + "'");
}

}  // namespace ktz
