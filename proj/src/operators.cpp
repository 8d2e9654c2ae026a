#include "ktz/operators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace ktz {

namespace {

constexpr double kModulusTol = 1e-12;
constexpr double kOneTol = 1e-9;
// Parameter scale beyond which the spectrum must stay strictly inside the
// unit circle (numerical reflection of sigma(T) meeting the circle only at 1).
constexpr double kSpectrumGapTheta = 1e-3;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::atomic<int> g_threads{1};

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int nt = std::min<int>(g_threads.load(), static_cast<int>(count));
    if (nt <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

void set_thread_count(int threads) { g_threads.store(std::max(1, threads)); }
int thread_count() { return g_threads.load(); }

OperatorModel OperatorModel::diagonal(std::vector<std::complex<double>> points) {
    if (points.empty()) throw std::invalid_argument("diagonal: empty spectrum");
    OperatorModel m;
    m.kind_ = Kind::Diagonal;
    m.points_ = std::move(points);
    for (const auto& p : m.points_)
        if (std::abs(p - 1.0) <= kModulusTol) m.contains_one_ = true;
    m.validate_spectrum();
    return m;
}

OperatorModel OperatorModel::identity() { return diagonal({{1.0, 0.0}}); }

OperatorModel OperatorModel::curve(std::function<std::complex<double>(double)> lambda, GridConfig cfg) {
    if (!lambda) throw std::invalid_argument("curve: null map");
    OperatorModel m;
    m.kind_ = Kind::Curve;
    m.cfg_ = cfg;
    m.curve_ = std::move(lambda);
    m.contains_one_ = std::abs(m.curve_(0.0) - 1.0) <= kOneTol;
    m.build_samples();
    m.validate_spectrum();
    return m;
}

OperatorModel OperatorModel::toeplitz(Density a, GridConfig cfg) {
    a.validate();
    OperatorModel m;
    m.kind_ = Kind::Toeplitz;
    m.cfg_ = cfg;
    m.density_ = std::make_shared<const Density>(std::move(a));
    m.contains_one_ = true;  // phi_a(1) = 1 for every density
    m.build_samples();
    m.validate_spectrum();
    return m;
}

std::complex<double> OperatorModel::boundary(double t) const {
    switch (kind_) {
        case Kind::Curve:
            return curve_(t);
        case Kind::Toeplitz:
            return density_->phi(std::exp(std::complex<double>(0.0, t)));
        case Kind::Diagonal:
            break;
    }
    throw std::logic_error("boundary: point-set model has no boundary curve");
}

void OperatorModel::build_samples() {
    const std::vector<double> half = log_grid(cfg_.param_min, kPi, cfg_.pts_per_decade);
    sample_params_.reserve(2 * half.size() + 1);
    for (auto it = half.rbegin(); it != half.rend(); ++it) sample_params_.push_back(-*it);
    sample_params_.push_back(0.0);
    for (double t : half) sample_params_.push_back(t);
    sample_values_.resize(sample_params_.size());
    for (std::size_t i = 0; i < sample_params_.size(); ++i)
        sample_values_[i] = boundary(sample_params_[i]);
}

void OperatorModel::validate_spectrum() const {
    auto check_point = [&](std::complex<double> p, bool gap_applies) {
        if (std::abs(p) > 1.0 + kModulusTol)
            throw std::runtime_error("OperatorModel: spectrum leaves the closed unit disk");
        if (gap_applies && std::abs(p - 1.0) > kModulusTol && std::abs(p) >= 1.0 - kModulusTol)
            throw std::runtime_error("OperatorModel: spectrum meets the unit circle away from 1");
    };
    if (kind_ == Kind::Diagonal) {
        for (const auto& p : points_) check_point(p, true);
        return;
    }
    if (contains_one_ && std::abs(boundary(0.0) - 1.0) > kOneTol)
        throw std::runtime_error("OperatorModel: boundary curve does not pass through 1 at t=0");
    for (std::size_t i = 0; i < sample_params_.size(); ++i)
        check_point(sample_values_[i], std::abs(sample_params_[i]) >= kSpectrumGapTheta);
}

namespace {

// Max over the sampled boundary of logf(lambda(t)), golden-refined around
// every local discrete maximum (fresh boundary evaluations inside brackets).
double sup_log_over_boundary(const OperatorModel& T,
                             const std::function<double(std::complex<double>)>& logf,
                             double* refinement_gain = nullptr) {
    const auto& params = T.sample_params();
    const auto& values = T.sample_values();
    std::vector<double> fv(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) fv[i] = logf(values[i]);
    double grid_best = kNegInf;
    for (double v : fv) grid_best = std::max(grid_best, v);
    double best = grid_best;
    for (std::size_t i = 0; i < fv.size(); ++i) {
        if (fv[i] == kNegInf) continue;
        const bool left_ok = (i == 0) || fv[i] >= fv[i - 1];
        const bool right_ok = (i + 1 == fv.size()) || fv[i] >= fv[i + 1];
        if (!(left_ok && right_ok)) continue;
        const double a = params[i > 0 ? i - 1 : 0];
        const double b = params[std::min(i + 1, fv.size() - 1)];
        if (b > a) {
            const double refined =
                golden_max([&](double t) { return logf(T.boundary(t)); }, a, b, 1e-13);
            best = std::max(best, refined);
        }
    }
    if (refinement_gain) *refinement_gain = (grid_best == kNegInf) ? 0.0 : best - grid_best;
    return best;
}

double boundary_distance(const OperatorModel& T, std::complex<double> z) {
    const double neg_log = sup_log_over_boundary(
        T, [&](std::complex<double> lam) { return -std::log(std::abs(z - lam)); });
    return std::exp(-neg_log);
}

}  // namespace

double spectrum_distance(const OperatorModel& T, double theta) {
    if (std::abs(theta) > kPi * (1.0 + 1e-12))
        throw std::domain_error("spectrum_distance: |theta| > pi");
    if (theta == 0.0 && T.contains_one()) return 0.0;
    const std::complex<double> z = std::exp(std::complex<double>(0.0, theta));
    if (T.kind() == OperatorModel::Kind::Diagonal) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : T.points()) best = std::min(best, std::abs(z - p));
        return best;
    }
    return boundary_distance(T, z);
}

double resolvent_norm(const OperatorModel& T, double theta) {
    if (theta == 0.0 && T.contains_one())
        throw std::domain_error("resolvent_norm: e^{i theta} lies in the spectrum");
    const double d = spectrum_distance(T, theta);
    if (!(d > 0.0)) throw std::domain_error("resolvent_norm: spectrum touches e^{i theta}");
    return 1.0 / d;
}

namespace {

double resolvent_two_sided(const OperatorModel& T, double theta) {
    return std::max(resolvent_norm(T, theta), resolvent_norm(T, -theta));
}

}  // namespace

double resolvent_envelope(const OperatorModel& T, double eps) {
    if (!(eps > 0.0) || eps > kPi * (1.0 + 1e-12))
        throw std::domain_error("resolvent_envelope: eps outside (0, pi]");
    const std::vector<double> grid = log_grid(std::min(eps, kPi * (1 - 1e-15)), kPi, T.grid().pts_per_decade);
    std::vector<double> rv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) rv[i] = resolvent_two_sided(T, grid[i]);
    double best = 0.0;
    for (std::size_t i = 0; i < rv.size(); ++i) {
        best = std::max(best, rv[i]);
        const bool left_ok = (i == 0) || rv[i] >= rv[i - 1];
        const bool right_ok = (i + 1 == rv.size()) || rv[i] >= rv[i + 1];
        if (!(left_ok && right_ok)) continue;
        const double a = grid[i > 0 ? i - 1 : 0];
        const double b = grid[std::min(i + 1, rv.size() - 1)];
        if (b > a) {
            best = std::max(best, golden_max([&](double u) { return resolvent_two_sided(T, std::exp(u)); },
                                             std::log(a), std::log(b), 1e-12));
        }
    }
    return best;
}

RateFunction resolvent_envelope_table(const OperatorModel& T, double eps_min) {
    if (!(eps_min > 0.0) || !(eps_min < kPi))
        throw std::domain_error("resolvent_envelope_table: eps_min outside (0, pi)");
    const std::vector<double> grid = log_grid(eps_min, kPi, T.grid().pts_per_decade);
    std::vector<double> rv(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { rv[i] = resolvent_two_sided(T, grid[i]); });
    // Suffix maxima over theta >= eps make the table exactly non-increasing.
    for (std::size_t i = rv.size() - 1; i-- > 0;) rv[i] = std::max(rv[i], rv[i + 1]);
    return RateFunction::from_table(grid, rv);
}

double decay_norm(const OperatorModel& T, long n) {
    if (n < 0) throw std::domain_error("decay_norm: n must be non-negative");
    const double dn = static_cast<double>(n);
    auto logf = [dn](std::complex<double> lam) {
        const double r = std::abs(lam);
        const double gap = std::abs(1.0 - lam);
        if (gap == 0.0) return kNegInf;
        if (r == 0.0) return dn > 0.0 ? kNegInf : std::log(gap);
        return dn * std::log(r) + std::log(gap);
    };
    if (T.kind() == OperatorModel::Kind::Diagonal) {
        double best = kNegInf;
        for (const auto& p : T.points()) best = std::max(best, logf(p));
        return best == kNegInf ? 0.0 : std::exp(best);
    }
    const double best = sup_log_over_boundary(T, logf);
    return best == kNegInf ? 0.0 : std::exp(best);
}

DecayProfile decay_profile(const OperatorModel& T, const std::vector<long>& n_list) {
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] < n_list[i - 1]) throw std::invalid_argument("decay_profile: n_list not ascending");
    DecayProfile profile;
    profile.entries.resize(n_list.size());
    const double tail = T.kind() == OperatorModel::Kind::Toeplitz && !T.density()->has_closed_form_phi()
                            ? T.density()->tail_mass_bound()
                            : 0.0;
    parallel_for(n_list.size(), [&](std::size_t i) {
        DecayEntry e;
        e.n = n_list[i];
        if (T.kind() == OperatorModel::Kind::Diagonal) {
            e.value = decay_norm(T, e.n);
            e.method = NormMethod::SymbolExact;
            e.error_budget = 0.0;
        } else {
            const double dn = static_cast<double>(e.n);
            auto logf = [dn](std::complex<double> lam) {
                const double r = std::abs(lam);
                const double gap = std::abs(1.0 - lam);
                if (gap == 0.0 || (r == 0.0 && dn > 0.0)) return kNegInf;
                return (r == 0.0 ? 0.0 : dn * std::log(r)) + std::log(gap);
            };
            double gain = 0.0;
            const double best = sup_log_over_boundary(T, logf, &gain);
            e.value = best == kNegInf ? 0.0 : std::exp(best);
            e.method = NormMethod::GridSup;
            // Symbol truncation enters through |d p_n / d lambda| <= 2n+1 on
            // the closed disk; the refinement gain bounds the grid term.
            e.error_budget = (2.0 * dn + 1.0) * tail + std::abs(gain) * e.value;
        }
        profile.entries[i] = e;
    });
    // The true sequence is non-increasing for contractive models and every
    // estimate errs low, so later entries sharpen earlier ones.
    for (std::size_t i = profile.entries.size(); i-- > 1;)
        profile.entries[i - 1].value = std::max(profile.entries[i - 1].value, profile.entries[i].value);
    return profile;
}

FiniteSection::FiniteSection(const Density& a, std::size_t dimension) : dim_(dimension) {
    if (dimension == 0) throw std::invalid_argument("FiniteSection: dimension must be >= 1");
    a.validate();
    column_.assign(dim_, 0.0);
    const auto& p = a.prefix();
    for (std::size_t i = 0; i < dim_ && i < p.size(); ++i) column_[i] = p[i];
}

void FiniteSection::write(std::ostream& os) const {
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t j = 0; j < dim_; ++j) {
            if (j) os << ' ';
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", entry(i, j));
            os << buf;
        }
        os << '\n';
    }
}

namespace {

// Iterative radix-2 FFT, in place; size must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool invert) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (invert ? -1.0 : 1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (invert)
        for (auto& z : a) z /= static_cast<double>(n);
}

std::size_t pow2_at_least(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

constexpr std::size_t kFftCutoff = 64;

// First N coefficients of the linear convolution u * v (both length N); exact
// for prefixes of lower-triangular Toeplitz products.
std::vector<double> prefix_convolve(const std::vector<double>& u, const std::vector<double>& v) {
    const std::size_t N = u.size();
    std::vector<double> out(N, 0.0);
    if (N < kFftCutoff) {
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) acc += u[i - j] * v[j];
            out[i] = acc;
        }
        return out;
    }
    const std::size_t M = pow2_at_least(2 * N);
    std::vector<std::complex<double>> fu(M), fv(M);
    for (std::size_t i = 0; i < N; ++i) fu[i] = u[i];
    for (std::size_t i = 0; i < N; ++i) fv[i] = v[i];
    fft(fu, false);
    fft(fv, false);
    for (std::size_t i = 0; i < M; ++i) fu[i] *= fv[i];
    fft(fu, true);
    for (std::size_t i = 0; i < N; ++i) out[i] = fu[i].real();
    return out;
}

// Applies the lower-triangular Toeplitz matrix with first column c (or its
// transpose) via direct sums for small dimensions and padded FFTs otherwise.
class ToeplitzApplier {
  public:
    explicit ToeplitzApplier(const std::vector<double>& c)
        : col_(c), N_(c.size()), use_fft_(N_ >= kFftCutoff) {
        if (!use_fft_) return;
        M_ = pow2_at_least(2 * N_);
        fcol_.assign(M_, 0.0);
        for (std::size_t i = 0; i < N_; ++i) fcol_[i] = col_[i];
        fft(fcol_, false);
        buf_.resize(M_);
    }

    void apply(const std::vector<double>& x, std::vector<double>& y, bool transpose) {
        if (!use_fft_) {
            if (!transpose) {
                for (std::size_t i = 0; i < N_; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j <= i; ++j) acc += col_[i - j] * x[j];
                    y[i] = acc;
                }
            } else {
                for (std::size_t i = 0; i < N_; ++i) {
                    double acc = 0.0;
                    for (std::size_t j = i; j < N_; ++j) acc += col_[j - i] * x[j];
                    y[i] = acc;
                }
            }
            return;
        }
        std::fill(buf_.begin(), buf_.end(), std::complex<double>(0.0, 0.0));
        for (std::size_t i = 0; i < N_; ++i) buf_[i] = x[i];
        fft(buf_, false);
        if (!transpose)
            for (std::size_t i = 0; i < M_; ++i) buf_[i] *= fcol_[i];
        else
            for (std::size_t i = 0; i < M_; ++i) buf_[i] *= std::conj(fcol_[i]);
        fft(buf_, true);
        // Padded length >= 2N keeps bins [0, N) free of circular wraparound for
        // both the convolution (T x) and the correlation (T^t x).
        for (std::size_t i = 0; i < N_; ++i) y[i] = buf_[i].real();
    }

  private:
    const std::vector<double>& col_;
    std::size_t N_;
    bool use_fft_;
    std::size_t M_ = 0;
    std::vector<std::complex<double>> fcol_;
    std::vector<std::complex<double>> buf_;
};

// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal d and
// off-diagonal e, by bisection on the Sturm sequence count.
double tridiag_max_eig(const std::vector<double>& d, const std::vector<double>& e) {
    const std::size_t k = d.size();
    double hi = 0.0, lo = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double r = (i ? std::abs(e[i - 1]) : 0.0) + (i + 1 < k ? std::abs(e[i]) : 0.0);
        hi = std::max(hi, d[i] + r);
        lo = std::min(lo, d[i] - r);
    }
    auto all_below = [&](double x) {
        double q = 1.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double ei2 = i ? e[i - 1] * e[i - 1] : 0.0;
            q = d[i] - x - (q != 0.0 ? ei2 / q : ei2 / 1e-300);
            if (q >= 0.0) return false;  // some eigenvalue >= x remains
        }
        return true;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (all_below(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double section_decay_norm(const FiniteSection& S, long n, double rel_tol, long max_iter) {
    if (n < 0) throw std::domain_error("section_decay_norm: n must be non-negative");
    const std::size_t N = S.dimension();
    const std::vector<double>& a = S.first_column();
    // Products of lower-triangular Toeplitz sections are again sections of the
    // product, so S^n (I - S) is the section with first column a^{*n} * (e0 - a).
    std::vector<double> b(N, 0.0);
    b[0] = 1.0 - a[0];
    for (std::size_t i = 1; i < N; ++i) b[i] = -a[i];
    for (long k = 0; k < n; ++k) b = prefix_convolve(a, b);

    // Deterministic pseudo-random start vector.
    std::vector<double> q(N), qprev(N, 0.0), w(N), tmp(N);
    std::uint64_t state = 0x9E3779B97F4A7C15ull;
    for (std::size_t i = 0; i < N; ++i) {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        q[i] = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }
    auto norm2 = [](const std::vector<double>& x) {
        double s = 0.0;
        for (double xi : x) s += xi * xi;
        return std::sqrt(s);
    };
    const double nq = norm2(q);
    for (double& qi : q) qi /= nq;

    // Lanczos on the Gram operator B^t B.  The top singular values of these
    // sections cluster tightly (the symbol is flat around its maximizer), so
    // plain power iteration needs O(N^2) sweeps; Lanczos reaches the same
    // Ritz value in a few hundred.  Without reorthogonalization the extreme
    // Ritz value still converges to the true extreme eigenvalue; ghost copies
    // only duplicate it.
    ToeplitzApplier B(b);
    std::vector<double> diag, offdiag;
    double beta = 0.0, prev_lam = -1.0;
    for (long it = 0; it < max_iter; ++it) {
        B.apply(q, tmp, false);
        B.apply(tmp, w, true);
        for (std::size_t i = 0; i < N; ++i) w[i] -= beta * qprev[i];
        double alpha = 0.0;
        for (std::size_t i = 0; i < N; ++i) alpha += w[i] * q[i];
        for (std::size_t i = 0; i < N; ++i) w[i] -= alpha * q[i];
        diag.push_back(alpha);
        const double nb = norm2(w);
        const bool breakdown = nb < 1e-300;
        if (breakdown || (it + 1) % 25 == 0) {
            const double lam = tridiag_max_eig(diag, offdiag);
            if (breakdown || (prev_lam >= 0.0 && std::abs(lam - prev_lam) <= rel_tol * lam))
                return std::sqrt(std::max(lam, 0.0));
            prev_lam = lam;
        }
        offdiag.push_back(nb);
        beta = nb;
        qprev.swap(q);
        for (std::size_t i = 0; i < N; ++i) q[i] = w[i] / nb;
    }
    throw std::runtime_error("section_decay_norm: Lanczos iteration did not converge");
}

}  // namespace ktz
