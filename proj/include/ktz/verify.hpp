#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ktz/operators.hpp"
#include "ktz/ratefun.hpp"

namespace ktz {

enum class Verdict { Pass, Fail, HypothesisNotSatisfied };

struct NRange {
    long lo = 100;
    long hi = 10000;
};

struct ApplicabilityWindow {
    double eps_lo = 0.0;
    double eps_hi = 0.0;
    long n_lo = 0;
    long n_hi = 0;
};

struct SubCheck {
    std::string name;
    Verdict verdict = Verdict::Pass;
    std::string reason;
    double margin_min = 0.0;
    double margin_max = 0.0;
};

struct VerificationReport {
    std::string claim_id;
    NRange n_range;
    std::vector<std::pair<std::string, double>> constants;  // fixed insertion order
    std::vector<std::pair<double, double>> margins;         // (n, margin)
    std::vector<SubCheck> subchecks;
    Verdict verdict = Verdict::Fail;
    ApplicabilityWindow window;
    std::string detail;
};

// Geometric integer sample of [r.lo, r.hi], deduplicated, endpoints included.
std::vector<long> sample_n_grid(NRange r, int per_decade = 16);

// Upper bound with the log-transformed rate: decay(n) vs m_log^-1(c n),
// c in (0,1).  Pass iff the ratio shows no upward trend across the top decade
// (log-log slope <= 0.05); the fitted leading constant is reported as C.
VerificationReport check_upper_mlog(const OperatorModel& T, const RateFunction& m, double c,
                                    NRange nr);

// Optimal upper bound under reciprocally positive increase: decay(n) vs
// m^-1(n).  The positive-increase hypothesis is verified first.
VerificationReport check_upper_posinc(const OperatorModel& T, const RateFunction& m, NRange nr);

// Lower threshold: for each c, the top-decade maximum of
// decay(n) / m^-1(c n) must stay above 1e-3.  The resolvent hypothesis
// (liminf of theta * ||R|| beyond the power bound) is estimated on the
// smallest trusted theta-decade first.
VerificationReport check_lower(const OperatorModel& T, const RateFunction& m,
                               const std::vector<double>& c_list, NRange nr);

// Smallest delta such that the min-window spectral distance stays below
// delta * eps on the sampled small-eps tail.
double delta_estimate(const OperatorModel& T, const std::vector<double>& eps_grid);

// Two-sided m_max bounds for quasi-multiplication models:
//   (i)  decay(n) <= (1+delta)  * m_max^-1(n)
//   (ii) decay(n) >= (1-delta') * m_max^-1(c n),  delta' in (delta,1), c > 1.
// Part (ii) is skipped when delta_prime is not supplied.
VerificationReport check_sandwich_quasimult(const OperatorModel& T, double delta,
                                            std::optional<double> delta_prime, double c, NRange nr,
                                            double eps_min = 1e-5);

// Comparison inequalities between the three inverse rates, for a rate
// function bounded below by a power law of exponent alpha:
//   1. m_max^-1(n) <= m_log^-1(c n)          for c in (0, 1+alpha)
//   2. m_max^-1(n) = O(m^-1(n))              under positive increase
//   3. m_max^-1(c n) >= e^{-c/c'} m^-1(c' n)
VerificationReport check_comparisons(const RateFunction& m, double alpha, double c, double c_prime,
                                     NRange nr);

// Consistency check: when the resolvent envelope is comparable to m
// (delta * m <= p <= m) and the m^-1(cn) decay bound is observed, m must show
// positive increase; a failure is flagged as an inconsistency.
VerificationReport necessity_diagnostic(const OperatorModel& T, const RateFunction& m, double c,
                                        double delta, NRange nr);

struct RateFit {
    double a = 0.0;  // exponent of n^-a
    double b = 0.0;  // exponent of log(n)^b
    double residual = 0.0;
};

// Least squares of log(value) against (1, log n, log log n); residual is the
// worst relative deviation over the top decade.
RateFit fit_rate(const DecayProfile& profile);

}  // namespace ktz
