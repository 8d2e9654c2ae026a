#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ktz/numeric.hpp"

namespace ktz {

// A continuous non-increasing majorant m on (0, pi], either in closed form
// (power law C*eps^-alpha, or power-log C*eps^-alpha*|log eps|^beta) or as a
// monotone sample table interpolated log-log linearly.
//
// For the power-log form the logarithmic factor is floored at 1 so that the
// function stays positive and non-increasing on all of (0, pi]; the floor is
// inactive for eps <= 1/e, which is where these majorants are used.
class RateFunction {
public:
    enum class Form { PowerLaw, PowerLog, Table };

    static RateFunction power_law(double C, double alpha, double domain_min = 1e-12);
    static RateFunction power_log(double C, double alpha, double beta, double domain_min = 1e-12);
    // eps strictly monotone (either direction), values positive and
    // non-increasing in eps.  The table is trusted on [min eps, max eps].
    static RateFunction from_table(std::vector<double> eps, std::vector<double> values);

    Form form() const { return form_; }
    double domain_min() const { return domain_min_; }
    double coefficient() const { return C_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    // eval_m
    double operator()(double eps) const;

    std::optional<double> power_bound_hint;

private:
    RateFunction() = default;
    Form form_ = Form::PowerLaw;
    double C_ = 1.0, alpha_ = 1.0, beta_ = 0.0;
    double domain_min_ = 1e-12;
    std::vector<double> log_eps_, log_val_;  // ascending in eps
};

// Right-inverse m^-1(s) = inf{eps in (0, pi] : m(eps) <= s}.  Requires
// s >= m(pi); levels above m(domain_min) report the domain edge with the
// `extrapolated` flag set.
InverseResult right_inverse(const RateFunction& m, double s);

// m(eps) * log(1 + m(eps)/eps)
double m_log(const RateFunction& m, double eps);

// Right-inverse of eps -> m_log(m, eps).
InverseResult m_log_inverse(const RateFunction& m, double s);

// max over theta in [eps, pi] of m(theta) * log(theta/eps), computed on a
// logarithmic grid with golden-section refinement around every local discrete
// maximum.  m_max(pi) = 0.
double m_max(const RateFunction& m, double eps, int pts_per_decade = 64);

// inf{eps : m_max(eps) <= s}; s = 0 maps to pi.
InverseResult m_max_inverse(const RateFunction& m, double s, int pts_per_decade = 64);

struct PositiveIncreaseReport {
    bool holds = false;
    double c_hat = 0.0;      // in (0, 1]
    double alpha_hat = 0.0;  // fitted exponent
    double eps0 = 0.0;       // upper end of the examined window
    double window_lo = 0.0;  // smallest eps sampled
    double window_hi = 0.0;
    double inf_ratio = 0.0;  // smallest sampled m(eps/t)/m(eps)
    double t = 0.0;
};

// Finite-window diagnostic for m(eps/t)/m(eps) >= c * t^alpha.  Samples the
// ratio on a dyadic eps-grid spanning at least `decades` decades below
// window_max (default pi).  The verdict requires the worst sampled ratio to
// exceed t^0.05, i.e. an effective exponent bounded away from zero; the
// examined window is recorded so downstream checks can state applicability.
PositiveIncreaseReport positive_increase_diagnostic(const RateFunction& m, double t = 2.0,
                                                    int decades = 2,
                                                    std::optional<double> window_max = std::nullopt);

}  // namespace ktz
