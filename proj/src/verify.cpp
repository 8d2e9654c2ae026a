#include "ktz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ktz {

namespace {

// Finite-sample surrogate for O(.) claims: the log-log slope of the margin
// sequence across the top decade of n must not trend upward.
constexpr double kSlopeThreshold = 0.05;
// Finite-sample surrogate for limsup > 0 claims.
constexpr double kLimsupFloor = 1e-3;
// Resolvent lower-bound hypothesis must beat the power bound by this factor.
constexpr double kLiminfMargin = 1.1;
// Slack for inequalities that are tight (attained with equality) on power laws.
constexpr double kTightSlack = 1e-6;

double slope_top_decade(const std::vector<std::pair<double, double>>& margins, double n_hi) {
    std::vector<double> x, y;
    for (const auto& [n, mar] : margins) {
        if (n >= n_hi / 10.0 && mar > 0.0) {
            x.push_back(std::log(n));
            y.push_back(std::log(mar));
        }
    }
    if (x.size() < 2) return 0.0;  // flat or identically zero margins
    return linear_fit(x, y).second;
}

double max_margin(const std::vector<std::pair<double, double>>& margins) {
    double m = 0.0;
    for (const auto& [n, mar] : margins) m = std::max(m, mar);
    return m;
}

// Curves/symbols are sampled down to param_min only; decay maximizers live at
// scale ~1/n, so n beyond 1/(10*param_min) is outside the trusted window.
void require_resolution(const OperatorModel& T, NRange nr, const char* who) {
    if (T.kind() == OperatorModel::Kind::Diagonal) return;
    if (static_cast<double>(nr.hi) > 1.0 / (10.0 * T.grid().param_min))
        throw std::invalid_argument(std::string(who) +
                                    ": n range exceeds spectral resolution (need param_min <= 1/(10*n_max))");
}

// m must dominate the resolvent norm for the checks to mean anything; sample
// the envelope on the small-eps window and compare.
bool majorizes_envelope(const OperatorModel& T, const RateFunction& m, double& bad_eps) {
    const double lo = std::max(m.domain_min(), T.grid().theta_min);
    const double hi = 0.1;
    if (!(lo < hi)) return true;
    for (double eps : log_grid(lo, hi, 8)) {
        if (resolvent_envelope(T, eps) > m(eps) * 1.05) {
            bad_eps = eps;
            return false;
        }
    }
    return true;
}

}  // namespace

std::vector<long> sample_n_grid(NRange r, int per_decade) {
    if (r.lo < 1 || r.hi < r.lo) throw std::invalid_argument("sample_n_grid: bad range");
    std::vector<long> out;
    const double ratio = std::pow(10.0, 1.0 / per_decade);
    for (double x = static_cast<double>(r.lo); x < static_cast<double>(r.hi); x *= ratio) {
        const long n = std::lround(x);
        if (out.empty() || n > out.back()) out.push_back(n);
    }
    if (out.empty() || out.back() != r.hi) out.push_back(r.hi);
    return out;
}

VerificationReport check_upper_mlog(const OperatorModel& T, const RateFunction& m, double c,
                                    NRange nr) {
    if (!(c > 0.0) || !(c < 1.0)) throw std::invalid_argument("check_upper_mlog: need c in (0,1)");
    require_resolution(T, nr, "check_upper_mlog");
    VerificationReport rep;
    rep.claim_id = "upper_mlog";
    rep.n_range = nr;
    rep.window = {m.domain_min(), kPi, nr.lo, nr.hi};
    double bad_eps = 0.0;
    if (!majorizes_envelope(T, m, bad_eps)) {
        rep.verdict = Verdict::HypothesisNotSatisfied;
        rep.detail = "hypothesis not satisfied: m does not majorize the resolvent envelope near eps=" +
                     std::to_string(bad_eps);
        return rep;
    }
    const std::vector<long> ns = sample_n_grid(nr);
    const DecayProfile profile = decay_profile(T, ns);
    long extrapolated = 0;
    for (const auto& e : profile.entries) {
        const InverseResult inv = m_log_inverse(m, c * static_cast<double>(e.n));
        if (inv.extrapolated) {
            ++extrapolated;
            continue;
        }
        rep.margins.emplace_back(static_cast<double>(e.n), e.value / inv.eps);
    }
    if (rep.margins.empty())
        throw std::runtime_error("check_upper_mlog: n-range entirely beyond the trusted rate window");
    const double slope = slope_top_decade(rep.margins, static_cast<double>(nr.hi));
    rep.constants = {{"C", max_margin(rep.margins)},
                     {"c", c},
                     {"slope", slope},
                     {"slope_threshold", kSlopeThreshold}};
    rep.verdict = slope <= kSlopeThreshold ? Verdict::Pass : Verdict::Fail;
    if (extrapolated > 0)
        rep.detail = std::to_string(extrapolated) + " sample(s) dropped: rate window exhausted (extrapolated)";
    return rep;
}

VerificationReport check_upper_posinc(const OperatorModel& T, const RateFunction& m, NRange nr) {
    require_resolution(T, nr, "check_upper_posinc");
    VerificationReport rep;
    rep.claim_id = "upper_posinc";
    rep.n_range = nr;
    rep.window = {m.domain_min(), kPi, nr.lo, nr.hi};
    const PositiveIncreaseReport diag = positive_increase_diagnostic(m, 2.0, 2, 0.1);
    if (!diag.holds) {
        rep.verdict = Verdict::HypothesisNotSatisfied;
        rep.detail = "hypothesis not satisfied: m lacks reciprocally positive increase on the window";
        return rep;
    }
    double bad_eps = 0.0;
    if (!majorizes_envelope(T, m, bad_eps)) {
        rep.verdict = Verdict::HypothesisNotSatisfied;
        rep.detail = "hypothesis not satisfied: m does not majorize the resolvent envelope near eps=" +
                     std::to_string(bad_eps);
        return rep;
    }
    const std::vector<long> ns = sample_n_grid(nr);
    const DecayProfile profile = decay_profile(T, ns);
    long extrapolated = 0;
    for (const auto& e : profile.entries) {
        const InverseResult inv = right_inverse(m, static_cast<double>(e.n));
        if (inv.extrapolated) {
            ++extrapolated;
            continue;
        }
        rep.margins.emplace_back(static_cast<double>(e.n), e.value / inv.eps);
    }
    if (rep.margins.empty())
        throw std::runtime_error("check_upper_posinc: n-range entirely beyond the trusted rate window");
    const double slope = slope_top_decade(rep.margins, static_cast<double>(nr.hi));
    rep.constants = {{"C", max_margin(rep.margins)},
                     {"alpha_hat", diag.alpha_hat},
                     {"c_hat", diag.c_hat},
                     {"slope", slope},
                     {"slope_threshold", kSlopeThreshold}};
    rep.verdict = slope <= kSlopeThreshold ? Verdict::Pass : Verdict::Fail;
    if (extrapolated > 0)
        rep.detail = std::to_string(extrapolated) + " sample(s) dropped: rate window exhausted (extrapolated)";
    return rep;
}

VerificationReport check_lower(const OperatorModel& T, const RateFunction& m,
                               const std::vector<double>& c_list, NRange nr) {
    if (c_list.empty()) throw std::invalid_argument("check_lower: empty c list");
    require_resolution(T, nr, "check_lower");
    VerificationReport rep;
    rep.claim_id = "lower";
    rep.n_range = nr;
    const double theta_lo = std::max(T.grid().theta_min, m.domain_min());
    rep.window = {theta_lo, kPi, nr.lo, nr.hi};

    // Resolvent hypothesis: liminf of theta * ||R(e^{i theta})|| (either sign)
    // must exceed the power bound; estimated as the minimum over the smallest
    // trusted theta-decade.
    const double K = T.power_bound();
    double liminf_est = std::numeric_limits<double>::infinity();
    double nontrivial = 0.0;
    for (double th : log_grid(theta_lo, theta_lo * 10.0, 16)) {
        const double r = std::max(resolvent_norm(T, th), resolvent_norm(T, -th));
        liminf_est = std::min(liminf_est, th * r);
        nontrivial = std::max(nontrivial, r / m(th));
    }
    rep.constants = {{"K", K}, {"liminf_theta_R", liminf_est}, {"limsup_R_over_m", nontrivial}};
    if (!(liminf_est > K * kLiminfMargin)) {
        rep.verdict = Verdict::HypothesisNotSatisfied;
        rep.detail = "hypothesis not satisfied: liminf of theta*||R|| does not exceed the power bound";
        return rep;
    }
    if (!(nontrivial >= kLimsupFloor)) {
        rep.verdict = Verdict::HypothesisNotSatisfied;
        rep.detail = "hypothesis not satisfied: ||R||/m vanishes on the trusted window";
        return rep;
    }

    const std::vector<long> ns = sample_n_grid({std::max(nr.lo, nr.hi / 10), nr.hi});
    const DecayProfile profile = decay_profile(T, ns);
    bool all_pass = true;
    for (double c : c_list) {
        SubCheck sub;
        sub.name = "c=" + std::to_string(c);
        double sup = 0.0;
        for (const auto& e : profile.entries) {
            const InverseResult inv = right_inverse(m, c * static_cast<double>(e.n));
            if (inv.extrapolated) continue;
            const double ratio = e.value / inv.eps;
            sup = std::max(sup, ratio);
            if (c == c_list.front()) rep.margins.emplace_back(static_cast<double>(e.n), ratio);
        }
        sub.margin_min = sub.margin_max = sup;
        sub.verdict = sup >= kLimsupFloor ? Verdict::Pass : Verdict::Fail;
        if (sub.verdict == Verdict::Fail) {
            all_pass = false;
            sub.reason = "top-decade supremum below the limsup floor";
        }
        rep.constants.emplace_back("sup[c=" + std::to_string(c) + "]", sup);
        rep.subchecks.push_back(std::move(sub));
    }
    rep.verdict = all_pass ? Verdict::Pass : Verdict::Fail;
    return rep;
}

double delta_estimate(const OperatorModel& T, const std::vector<double>& eps_grid) {
    if (!T.contains_one()) throw std::invalid_argument("delta_estimate: model must contain 1 in its spectrum");
    if (eps_grid.empty()) throw std::invalid_argument("delta_estimate: empty eps grid");
    double dhat = 0.0;
    for (double eps : eps_grid) {
        const std::vector<double> grid = log_grid(eps, kPi, 32);
        std::vector<double> dv(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            dv[i] = std::min(spectrum_distance(T, grid[i]), spectrum_distance(T, -grid[i]));
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < dv.size(); ++i) {
            dmin = std::min(dmin, dv[i]);
            const bool left_ok = (i == 0) || dv[i] <= dv[i - 1];
            const bool right_ok = (i + 1 == dv.size()) || dv[i] <= dv[i + 1];
            if (!(left_ok && right_ok)) continue;
            const double a = grid[i > 0 ? i - 1 : 0];
            const double b = grid[std::min(i + 1, dv.size() - 1)];
            if (b > a) {
                dmin = std::min(dmin, golden_min(
                                          [&](double u) {
                                              const double th = std::exp(u);
                                              return std::min(spectrum_distance(T, th),
                                                              spectrum_distance(T, -th));
                                          },
                                          std::log(a), std::log(b)));
            }
        }
        dhat = std::max(dhat, dmin / eps);
    }
    return dhat;
}

VerificationReport check_sandwich_quasimult(const OperatorModel& T, double delta,
                                            std::optional<double> delta_prime, double c, NRange nr,
                                            double eps_min) {
    if (!(delta > 0.0) || !(delta <= 1.0))
        throw std::invalid_argument("check_sandwich_quasimult: need delta in (0,1]");
    if (delta_prime && (!(*delta_prime > delta) || !(*delta_prime < 1.0)))
        throw std::invalid_argument("check_sandwich_quasimult: need delta_prime in (delta,1)");
    if (!(c > 1.0)) throw std::invalid_argument("check_sandwich_quasimult: need c > 1");
    require_resolution(T, nr, "check_sandwich_quasimult");

    VerificationReport rep;
    rep.claim_id = "sandwich_quasimult";
    rep.n_range = nr;
    rep.window = {eps_min, kPi, nr.lo, nr.hi};

    const double tail_lo = std::max(eps_min, 1e-5);
    const double dhat = delta_estimate(T, log_grid(tail_lo, 1e-2, 8));
    rep.constants = {{"delta", delta}, {"delta_hat", dhat}, {"c", c}};
    if (delta_prime) rep.constants.emplace_back("delta_prime", *delta_prime);

    SubCheck upper{"upper(i)", Verdict::Pass, "", 0.0, 0.0};
    SubCheck lower{"lower(ii)", Verdict::Pass, "", 0.0, 0.0};
    bool hyp_fail = false;
    if (dhat > delta) {
        upper.verdict = Verdict::HypothesisNotSatisfied;
        upper.reason = "hypothesis not satisfied: min-window distance exceeds delta*eps (delta_hat > delta)";
        hyp_fail = true;
    }
    if (!delta_prime) {
        lower.reason = "skipped: delta_prime not supplied";
    } else if (dhat >= *delta_prime) {
        lower.verdict = Verdict::HypothesisNotSatisfied;
        lower.reason =
            "hypothesis not satisfied: min-window distance is not o(eps) at level delta_prime "
            "(delta_hat >= delta_prime); no non-trivial lower bound";
        hyp_fail = true;
    }
    if (hyp_fail) {
        rep.verdict = Verdict::HypothesisNotSatisfied;
        rep.subchecks = {upper, lower};
        rep.detail = upper.reason.empty() ? lower.reason : upper.reason + (lower.reason.empty() ? "" : "; " + lower.reason);
        return rep;
    }

    const RateFunction m = resolvent_envelope_table(T, eps_min);
    const long n_half = std::max(nr.lo, static_cast<long>(std::sqrt(static_cast<double>(nr.lo) *
                                                                    static_cast<double>(nr.hi))));
    const std::vector<long> ns = sample_n_grid({n_half, nr.hi});
    const DecayProfile profile = decay_profile(T, ns);
    upper.margin_min = lower.margin_min = std::numeric_limits<double>::infinity();
    bool ok_upper = true, ok_lower = true;
    for (const auto& e : profile.entries) {
        const double n = static_cast<double>(e.n);
        const double inv_n = m_max_inverse(m, n).eps;
        const double mu = e.value / ((1.0 + delta) * inv_n);
        upper.margin_min = std::min(upper.margin_min, mu);
        upper.margin_max = std::max(upper.margin_max, mu);
        rep.margins.emplace_back(n, mu);
        if (mu > 1.0) ok_upper = false;
        if (delta_prime) {
            const double inv_cn = m_max_inverse(m, c * n).eps;
            if (!(e.value > 0.0)) {
                ok_lower = false;
                continue;
            }
            const double ml = (1.0 - *delta_prime) * inv_cn / e.value;
            lower.margin_min = std::min(lower.margin_min, ml);
            lower.margin_max = std::max(lower.margin_max, ml);
            if (ml > 1.0) ok_lower = false;
        }
    }
    if (!ok_upper) {
        upper.verdict = Verdict::Fail;
        upper.reason = "decay exceeds (1+delta) * m_max^-1(n)";
    }
    if (delta_prime && !ok_lower) {
        lower.verdict = Verdict::Fail;
        lower.reason = "decay falls below (1-delta') * m_max^-1(c n)";
    }
    rep.subchecks = {upper, lower};
    rep.verdict = (ok_upper && (!delta_prime || ok_lower)) ? Verdict::Pass : Verdict::Fail;
    return rep;
}

VerificationReport check_comparisons(const RateFunction& m, double alpha, double c, double c_prime,
                                     NRange nr) {
    if (!(alpha >= 1.0)) throw std::invalid_argument("check_comparisons: need alpha >= 1");
    if (!(c > 0.0) || !(c_prime > 0.0)) throw std::invalid_argument("check_comparisons: need c, c' > 0");
    VerificationReport rep;
    rep.claim_id = "comparisons";
    rep.n_range = nr;
    rep.window = {m.domain_min(), kPi, nr.lo, nr.hi};
    rep.constants = {{"alpha", alpha}, {"c", c}, {"c_prime", c_prime}};
    const std::vector<long> ns = sample_n_grid(nr);

    // 1. m_max^-1(n) <= m_log^-1(c n), valid for c in (0, 1 + alpha).
    SubCheck s1{"mmax_inv_le_mlog_inv", Verdict::Pass, "", std::numeric_limits<double>::infinity(), 0.0};
    if (!(c < 1.0 + alpha)) {
        s1.reason = "skipped: c outside (0, 1+alpha)";
        s1.margin_min = s1.margin_max = 0.0;
    } else {
        long used = 0, dropped = 0;
        for (long n : ns) {
            const InverseResult lhs = m_max_inverse(m, static_cast<double>(n));
            const InverseResult rhs = m_log_inverse(m, c * static_cast<double>(n));
            if (lhs.extrapolated || rhs.extrapolated) {
                ++dropped;
                continue;
            }
            ++used;
            const double margin = lhs.eps / rhs.eps;
            s1.margin_min = std::min(s1.margin_min, margin);
            s1.margin_max = std::max(s1.margin_max, margin);
            rep.margins.emplace_back(static_cast<double>(n), margin);
            if (margin > 1.0 + kTightSlack) s1.verdict = Verdict::Fail;
        }
        if (used == 0) {
            s1.reason = "skipped: rate window exhausted (all samples extrapolated)";
            s1.margin_min = s1.margin_max = 0.0;
        } else if (dropped > 0) {
            s1.reason = std::to_string(dropped) + " sample(s) dropped as extrapolated";
        }
        if (s1.verdict == Verdict::Fail) s1.reason = "inequality violated inside the trusted window";
    }
    rep.subchecks.push_back(s1);

    // 2. m_max^-1(n) = O(m^-1(n)) under positive increase.
    SubCheck s2{"mmax_inv_bounded_by_m_inv", Verdict::Pass, "", std::numeric_limits<double>::infinity(), 0.0};
    PositiveIncreaseReport diag;
    try {
        diag = positive_increase_diagnostic(m, 2.0, 2, 0.1);
    } catch (const std::runtime_error&) {
        diag.holds = false;  // domain too narrow to examine the hypothesis
    }
    if (!diag.holds) {
        s2.reason = "skipped: positive increase not verified";
        s2.margin_min = s2.margin_max = 0.0;
    } else {
        std::vector<std::pair<double, double>> ratios;
        for (long n : ns) {
            const InverseResult lhs = m_max_inverse(m, static_cast<double>(n));
            const InverseResult rhs = right_inverse(m, static_cast<double>(n));
            if (lhs.extrapolated || rhs.extrapolated) continue;
            const double r = lhs.eps / rhs.eps;
            ratios.emplace_back(static_cast<double>(n), r);
            s2.margin_min = std::min(s2.margin_min, r);
            s2.margin_max = std::max(s2.margin_max, r);
        }
        if (ratios.empty()) {
            s2.reason = "skipped: rate window exhausted (all samples extrapolated)";
            s2.margin_min = s2.margin_max = 0.0;
        } else {
            const double slope = slope_top_decade(ratios, static_cast<double>(nr.hi));
            rep.constants.emplace_back("ratio_slope", slope);
            if (slope > kSlopeThreshold) {
                s2.verdict = Verdict::Fail;
                s2.reason = "ratio trends upward across the top decade";
            }
        }
    }
    rep.subchecks.push_back(s2);

    // 3. m_max^-1(c n) >= e^{-c/c'} m^-1(c' n).
    SubCheck s3{"mmax_inv_ge_scaled_m_inv", Verdict::Pass, "", std::numeric_limits<double>::infinity(), 0.0};
    {
        long used = 0;
        const double scale = std::exp(-c / c_prime);
        for (long n : ns) {
            const InverseResult lhs = m_max_inverse(m, c * static_cast<double>(n));
            const InverseResult rhs = right_inverse(m, c_prime * static_cast<double>(n));
            if (lhs.extrapolated || rhs.extrapolated) continue;
            ++used;
            const double margin = lhs.eps / (scale * rhs.eps);
            s3.margin_min = std::min(s3.margin_min, margin);
            s3.margin_max = std::max(s3.margin_max, margin);
            if (margin < 1.0 - kTightSlack) s3.verdict = Verdict::Fail;
        }
        if (used == 0) {
            s3.reason = "skipped: rate window exhausted (all samples extrapolated)";
            s3.margin_min = s3.margin_max = 0.0;
        }
        if (s3.verdict == Verdict::Fail) s3.reason = "inequality violated inside the trusted window";
    }
    rep.subchecks.push_back(s3);

    rep.verdict = Verdict::Pass;
    for (const auto& s : rep.subchecks)
        if (s.verdict == Verdict::Fail) rep.verdict = Verdict::Fail;
    return rep;
}

VerificationReport necessity_diagnostic(const OperatorModel& T, const RateFunction& m, double c,
                                        double delta, NRange nr) {
    if (!(delta > 0.0) || !(delta <= 1.0))
        throw std::invalid_argument("necessity_diagnostic: need delta in (0,1]");
    require_resolution(T, nr, "necessity_diagnostic");
    VerificationReport rep;
    rep.claim_id = "necessity";
    rep.n_range = nr;
    const double lo = std::max(m.domain_min(), T.grid().theta_min * 10.0);
    const double hi = 0.1;
    rep.window = {lo, hi, nr.lo, nr.hi};
    rep.constants = {{"c", c}, {"delta", delta}};
    if (!(lo < hi)) throw std::invalid_argument("necessity_diagnostic: empty eps window");

    for (double eps : log_grid(lo, hi, 8)) {
        const double p = resolvent_envelope(T, eps);
        const double mv = m(eps);
        if (p > mv * 1.05) {
            rep.verdict = Verdict::HypothesisNotSatisfied;
            rep.detail = "hypothesis not satisfied: envelope exceeds m at eps=" + std::to_string(eps);
            return rep;
        }
        if (p < delta * mv * 0.95) {
            rep.verdict = Verdict::HypothesisNotSatisfied;
            rep.detail = "hypothesis not satisfied: envelope falls below delta*m at eps=" + std::to_string(eps);
            return rep;
        }
    }

    const std::vector<long> ns = sample_n_grid(nr);
    const DecayProfile profile = decay_profile(T, ns);
    for (const auto& e : profile.entries) {
        const InverseResult inv = right_inverse(m, c * static_cast<double>(e.n));
        if (inv.extrapolated) continue;
        rep.margins.emplace_back(static_cast<double>(e.n), e.value / inv.eps);
    }
    const double slope = slope_top_decade(rep.margins, static_cast<double>(nr.hi));
    rep.constants.emplace_back("decay_bound_slope", slope);
    if (slope > kSlopeThreshold) {
        rep.verdict = Verdict::HypothesisNotSatisfied;
        rep.detail = "hypothesis not satisfied: the m^-1(cn) decay bound is not observed on this range";
        return rep;
    }

    const PositiveIncreaseReport diag = positive_increase_diagnostic(m, 2.0, 2, hi);
    rep.constants.emplace_back("alpha_hat", diag.alpha_hat);
    rep.constants.emplace_back("c_hat", diag.c_hat);
    if (diag.holds) {
        rep.verdict = Verdict::Pass;
        rep.detail = "consistent: decay bound observed and positive increase holds";
    } else {
        rep.verdict = Verdict::Fail;
        rep.detail =
            "inconsistency-flag: decay bound observed but the positive-increase diagnostic fails";
    }
    return rep;
}

RateFit fit_rate(const DecayProfile& profile) {
    std::vector<double> ln, lln, lv, nv, vv;
    double n_min = std::numeric_limits<double>::infinity(), n_max = 0.0;
    for (const auto& e : profile.entries) {
        if (e.n < 3 || !(e.value > 0.0)) continue;
        const double n = static_cast<double>(e.n);
        ln.push_back(std::log(n));
        lln.push_back(std::log(std::log(n)));
        lv.push_back(std::log(e.value));
        nv.push_back(n);
        vv.push_back(e.value);
        n_min = std::min(n_min, n);
        n_max = std::max(n_max, n);
    }
    if (lv.empty()) throw std::runtime_error("fit_rate: degenerate (all-zero) profile");
    if (lv.size() < 5 || n_max / n_min < 100.0)
        throw std::invalid_argument("fit_rate: need at least two decades of n");

    // Normal equations for y ~ b0 + b1*log n + b2*loglog n.
    double A[3][3] = {};
    double rhs[3] = {};
    for (std::size_t i = 0; i < lv.size(); ++i) {
        const double row[3] = {1.0, ln[i], lln[i]};
        for (int r = 0; r < 3; ++r) {
            for (int cc = 0; cc < 3; ++cc) A[r][cc] += row[r] * row[cc];
            rhs[r] += row[r] * lv[i];
        }
    }
    // Gaussian elimination with partial pivoting.
    int piv[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(A[piv[r]][col]) > std::abs(A[piv[best]][col])) best = r;
        std::swap(piv[col], piv[best]);
        if (std::abs(A[piv[col]][col]) < 1e-300) throw std::runtime_error("fit_rate: singular system");
        for (int r = col + 1; r < 3; ++r) {
            const double f = A[piv[r]][col] / A[piv[col]][col];
            for (int cc = col; cc < 3; ++cc) A[piv[r]][cc] -= f * A[piv[col]][cc];
            rhs[piv[r]] -= f * rhs[piv[col]];
        }
    }
    double beta[3];
    for (int col = 2; col >= 0; --col) {
        double acc = rhs[piv[col]];
        for (int cc = col + 1; cc < 3; ++cc) acc -= A[piv[col]][cc] * beta[cc];
        beta[col] = acc / A[piv[col]][col];
    }

    RateFit fit;
    fit.a = -beta[1];
    fit.b = beta[2];
    for (std::size_t i = 0; i < lv.size(); ++i) {
        if (nv[i] < n_max / 10.0) continue;
        const double pred = std::exp(beta[0] + beta[1] * ln[i] + beta[2] * lln[i]);
        fit.residual = std::max(fit.residual, std::abs(pred - vv[i]) / vv[i]);
    }
    return fit;
}

}  // namespace ktz
