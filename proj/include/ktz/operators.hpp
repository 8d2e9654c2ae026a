#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "ktz/density.hpp"
#include "ktz/ratefun.hpp"

namespace ktz {

// Grid policy for boundary-curve sampling and sup/inf sweeps.
struct GridConfig {
    int pts_per_decade = 64;    // logarithmic density of parameter and theta grids
    double param_min = 1e-12;   // finest boundary-parameter scale resolved near 1
    double theta_min = 1e-6;    // smallest trusted frequency for envelope sweeps
    double refine_rel_tol = 1e-9;
};

void set_thread_count(int threads);
int thread_count();

// A quasi-multiplication operator described by its spectrum: a finite point
// set, a parametrized boundary curve on [-pi, pi], or the boundary image of a
// Toeplitz symbol phi_a.  All built-in models are contractive (power bound 1).
class OperatorModel {
public:
    enum class Kind { Diagonal, Curve, Toeplitz };

    static OperatorModel diagonal(std::vector<std::complex<double>> points);
    static OperatorModel identity();
    // lambda(0) must equal 1.
    static OperatorModel curve(std::function<std::complex<double>(double)> lambda,
                               GridConfig cfg = {});
    static OperatorModel toeplitz(Density a, GridConfig cfg = {});

    Kind kind() const { return kind_; }
    bool contains_one() const { return contains_one_; }
    double power_bound() const { return 1.0; }
    const GridConfig& grid() const { return cfg_; }
    const std::vector<std::complex<double>>& points() const { return points_; }
    const Density* density() const { return density_ ? density_.get() : nullptr; }

    // Boundary value at parameter t: lambda(t) for curves, phi_a(e^{it}) for
    // Toeplitz models.
    std::complex<double> boundary(double t) const;

    // Precomputed boundary samples on a signed logarithmic parameter grid
    // (parameters ascending; includes 0 exactly).
    const std::vector<double>& sample_params() const { return sample_params_; }
    const std::vector<std::complex<double>>& sample_values() const { return sample_values_; }

private:
    OperatorModel() = default;
    void build_samples();
    void validate_spectrum() const;

    Kind kind_ = Kind::Diagonal;
    bool contains_one_ = false;
    GridConfig cfg_;
    std::vector<std::complex<double>> points_;
    std::function<std::complex<double>(double)> curve_;
    std::shared_ptr<const Density> density_;
    std::vector<double> sample_params_;
    std::vector<std::complex<double>> sample_values_;
};

// min over the spectrum of |e^{i theta} - lambda|; 0 when theta = 0 and the
// model contains 1.
double spectrum_distance(const OperatorModel& T, double theta);

// 1 / spectrum_distance; throws when the spectrum touches e^{i theta}.
double resolvent_norm(const OperatorModel& T, double theta);

// max over eps <= |theta| <= pi of resolvent_norm.
double resolvent_envelope(const OperatorModel& T, double eps);

// Envelope swept over a logarithmic eps-grid, returned as a sampled
// RateFunction (suffix maxima over the same grid, hence non-increasing).
RateFunction resolvent_envelope_table(const OperatorModel& T, double eps_min);

enum class NormMethod { SymbolExact, GridSup, FiniteSection };

struct DecayEntry {
    long n = 0;
    double value = 0.0;
    NormMethod method = NormMethod::GridSup;
    double error_budget = 0.0;
};

struct DecayProfile {
    std::vector<DecayEntry> entries;
};

// sup over the spectrum of |lambda|^n |1 - lambda|.
double decay_norm(const OperatorModel& T, long n);

// Batch wrapper; entries are forced non-increasing in n (contractive models),
// improving each lower estimate by later ones.
DecayProfile decay_profile(const OperatorModel& T, const std::vector<long>& n_list);

// N x N lower-triangular Toeplitz truncation of the convolution operator
// x -> a * x.
class FiniteSection {
public:
    FiniteSection(const Density& a, std::size_t dimension);
    std::size_t dimension() const { return dim_; }
    const std::vector<double>& first_column() const { return column_; }
    double entry(std::size_t i, std::size_t j) const {
        return i >= j ? column_[i - j] : 0.0;
    }
    // Plain-text numeric dump, one row per line.
    void write(std::ostream& os) const;

private:
    std::size_t dim_;
    std::vector<double> column_;
};

// Spectral norm of S^n (I - S).
// Largest singular value of S^n (I - S) via Lanczos on the Gram operator
// (FFT-accelerated matrix applies); stops when the Ritz value moves by less
// than rel_tol between checks, throws on non-convergence.  Trustworthy while
// n stays well below dimension/8, but the truncation bias is symbol-dependent:
// slowly decaying coefficient tails need dimension >= ~64 n for percent-level
// agreement with the symbol norm.
double section_decay_norm(const FiniteSection& S, long n, double rel_tol = 1e-10,
                          long max_iter = 200000);

}  // namespace ktz
