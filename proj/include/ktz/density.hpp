#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ktz {

// A probability density on the non-negative integers: a finite coefficient
// prefix plus a rigorous bound on the truncated mass, and optionally a closed
// form for the generating function phi_a.
class Density {
public:
    enum class ClosedForm {
        None,       // prefix only; phi is a partial sum with error <= tail_mass_bound
        Finite,     // the prefix is the whole density (tail is exactly zero)
        Geometric,  // a_n = (1-r) r^n, phi(z) = (1-r)/(1-rz)
        LogKernel,  // a_0 = a_1 = 0, a_n = 1/(n(n-1)); phi(z) = z + (1-z)log(1-z)
    };

    static Density from_coefficients(std::vector<double> prefix, double tail_mass_bound = 0.0);

    // Built-in families.
    static Density point_mass(std::size_t k);
    static Density lazy_bernoulli(double p);  // (1-p, p, 0, 0, ...)
    static Density geometric(double r, std::size_t prefix_len = 64);
    // a_n = 1/(n(n-1)) for n >= 2, truncated after index n = prefix_len with
    // tail mass exactly 1/prefix_len.
    static Density log_kernel(std::size_t prefix_len = 1024);

    const std::vector<double>& prefix() const { return prefix_; }
    double tail_mass_bound() const { return tail_; }
    ClosedForm closed_form() const { return form_; }
    bool has_closed_form_phi() const { return form_ != ClosedForm::None; }
    double geometric_ratio() const { return geo_r_; }

    // Indices with a_n > 0 within the prefix.
    std::vector<std::size_t> support() const;

    // Throws std::runtime_error when a coefficient is negative or the total
    // mass is off.
    void validate() const;

    // Generating function phi_a(lambda) for |lambda| <= 1.
    std::complex<double> phi(std::complex<double> lambda) const;

    struct AperiodicityReport {
        bool aperiodic = false;
        bool consecutive_witness = false;              // some n with a_n, a_{n+1} > 0
        std::optional<std::size_t> witness_index;
        std::string reason;
    };
    // Support-difference gcd test; also reports the sufficient witness of two
    // consecutive positive coefficients when present.  Throws for the point
    // mass at 0 (the identity symbol has no aperiodicity question).
    AperiodicityReport aperiodicity() const;

private:
    Density() = default;
    std::vector<double> prefix_;
    double tail_ = 0.0;
    ClosedForm form_ = ClosedForm::Finite;
    double geo_r_ = 0.0;
};

Density convolve(const Density& a, const Density& b);

// name in {point_mass, lazy_bernoulli, geometric, log_example}; `param` is the
// point-mass index, the Bernoulli weight or the geometric ratio.
Density builtin_family(std::string_view name, std::optional<double> param = std::nullopt,
                       std::optional<std::size_t> prefix_len = std::nullopt);

}  // namespace ktz
