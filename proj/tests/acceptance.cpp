// End-to-end acceptance suite: one line per criterion, nonzero exit on any
// failure.  Criteria exercise the public API the way the CLI does, plus
// byte-level determinism of emitted artifacts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ktz/cli.hpp"
#include "ktz/operators.hpp"
#include "ktz/ratefun.hpp"
#include "ktz/verify.hpp"

using namespace ktz;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    std::printf("criterion %d: %s — %s\n", criterion, pass ? "PASS" : "FAIL", what.c_str());
    if (!pass) ++g_failures;
}

OperatorModel parabola() {
    return OperatorModel::curve([](double t) {
        const double s = std::clamp(t, -1.0, 1.0);
        return (1.0 - s * s) * std::exp(std::complex<double>(0.0, s));
    });
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// 1. Log-kernel symbol: decay follows n^-1 log(n) over n in [1e3, 1e5], under
//    two minutes single-threaded.  The power exponent comes from the
//    least-squares fit; the log factor is pinned by decade ratios of the decay
//    (value(n)/value(10n) -> 10 log(n)/log(10n) for n^-1 log n).  The raw log
//    exponent from the (1, log n, log log n) basis is biased low over a
//    two-decade window (the additive constant inside the logarithm is
//    comparable to log n there and the basis is nearly collinear), so it gets
//    a wide plausibility band rather than a tight one.
void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const OperatorModel T = OperatorModel::toeplitz(Density::log_kernel());
    const RateFit fit = fit_rate(decay_profile(T, sample_n_grid({1000, 100000})));
    const double y3 = decay_norm(T, 1000), y4 = decay_norm(T, 10000), y5 = decay_norm(T, 100000);
    const double r1 = (y3 / y4) / (10.0 * std::log(1e3) / std::log(1e4));
    const double r2 = (y4 / y5) / (10.0 * std::log(1e4) / std::log(1e5));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = std::abs(fit.a - 1.0) <= 0.05 && fit.b > 0.4 && fit.b < 1.2 &&
                      r1 >= 0.9 && r1 <= 1.1 && r2 >= 0.9 && r2 <= 1.1 && secs < 120.0;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "log-kernel decay fit a=%.4f (1±0.05), b=%.4f (0.4..1.2), decade ratios "
                  "%.4f %.4f (1±0.1), %.1fs (<120s)",
                  fit.a, fit.b, r1, r2, secs);
    report(1, pass, buf);
}

// 2. Log-kernel resolvent approaches 2 log(1/theta) / (pi theta).  The
//    leading-order form is approached only at rate loglog/log: the exact
//    distance to the boundary curve is (pi/2) t* with t* (1 + log(1/t*)) =
//    theta, so the ratio against 2 log(1/theta)/(pi theta) is still 1.33-1.51
//    at theta in [1e-5, 1e-3] (confirmed by an independent brute-force scan of
//    the curve).  The check therefore divides by the asymptote including its
//    second-order term, (2/(pi theta)) (L + log L + 1) with L = log(1/theta),
//    which the exact resolvent approaches monotonically at these scales.
void criterion2() {
    const OperatorModel T = OperatorModel::toeplitz(Density::log_kernel());
    bool pass = true;
    double prev_dev = 1e300;
    std::string detail = "resolvent/asymptote ratios:";
    for (double th : {1e-3, 1e-4, 1e-5}) {
        const double L = std::log(1.0 / th);
        const double ratio =
            resolvent_norm(T, th) / (2.0 * (L + std::log(L) + 1.0) / (kPi * th));
        char buf[48];
        std::snprintf(buf, sizeof buf, " %.4f", ratio);
        detail += buf;
        if (ratio < 0.85 || ratio > 1.15) pass = false;
        const double dev = std::abs(ratio - 1.0);
        if (dev > prev_dev) pass = false;  // must approach 1 monotonically
        prev_dev = dev;
    }
    report(2, pass, detail);
}

// 3. Half-coin decay sharpness: decay(n) * sqrt(n+1) -> e^{-1/2}.
void criterion3() {
    const OperatorModel T = OperatorModel::toeplitz(Density::lazy_bernoulli(0.5));
    const long n = 10000;
    const double scaled = decay_norm(T, n) * std::sqrt(static_cast<double>(n + 1));
    const double ratio = scaled / std::exp(-0.5);
    char buf[96];
    std::snprintf(buf, sizeof buf, "decay(1e4)*sqrt(n+1)/e^{-1/2} = %.6f (1±0.01)", ratio);
    report(3, ratio >= 0.99 && ratio <= 1.01, buf);
}

// 4. Curve model: optimal upper bound passes against its own envelope and the
//    decay exponent is -1/2.
void criterion4() {
    const OperatorModel T = parabola();
    const RateFunction m = resolvent_envelope_table(T, 1e-5);
    const VerificationReport rep = check_upper_posinc(T, m, {100, 10000});
    const RateFit fit = fit_rate(decay_profile(T, sample_n_grid({100, 10000})));
    const bool pass = rep.verdict == Verdict::Pass && std::abs(fit.a - 0.5) <= 0.025;
    char buf[128];
    std::snprintf(buf, sizeof buf, "curve upper check %s, decay exponent %.4f (0.5±0.025)",
                  rep.verdict == Verdict::Pass ? "passes" : "fails", fit.a);
    report(4, pass, buf);
}

// 5. Two-sided sandwich on the curve; identity must trip the lower-part
//    hypothesis instead of failing.
void criterion5() {
    const VerificationReport curve_rep =
        check_sandwich_quasimult(parabola(), 0.1, 0.2, 1.5, {1000, 100000});
    const VerificationReport id_rep =
        check_sandwich_quasimult(OperatorModel::identity(), 0.5, 0.9, 1.5, {1000, 100000});
    const bool id_ok = id_rep.verdict == Verdict::HypothesisNotSatisfied &&
                       id_rep.subchecks.size() == 2 &&
                       id_rep.subchecks[1].verdict == Verdict::HypothesisNotSatisfied;
    const bool pass = curve_rep.verdict == Verdict::Pass && id_ok;
    report(5, pass,
           std::string("curve sandwich (delta=0.1, delta'=0.2, c=1.5) ") +
               (curve_rep.verdict == Verdict::Pass ? "passes" : "fails") +
               "; identity lower part " + (id_ok ? "reports hypothesis error" : "misbehaves"));
}

// 6. Finite sections agree with symbol-exact norms within 2% for n <= 64 on
//    both built-in densities.  N=512 is enough for the finitely supported
//    half-coin density, but the slowly decaying log-kernel coefficients leave
//    the N=512 section 24% short of the symbol norm at n=64 (confirmed by a
//    dense SVD); percent-level agreement there needs N >= ~64 n, so the sweep
//    runs at N=4096 with the coefficient prefix extended to match.
void criterion6() {
    bool pass = true;
    double worst = 0.0;
    for (const Density& a : {Density::lazy_bernoulli(0.5), Density::log_kernel(4096)}) {
        const OperatorModel T = OperatorModel::toeplitz(a);
        const FiniteSection S(a, 4096);
        for (long n = 0; n <= 64; ++n) {
            const double exact = decay_norm(T, n);
            const double sect = section_decay_norm(S, n);
            const double rel = exact > 0.0 ? std::abs(sect - exact) / exact : std::abs(sect);
            worst = std::max(worst, rel);
            if (rel > 0.02) pass = false;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "section vs symbol norms, worst relative gap %.4f (<0.02)", worst);
    report(6, pass, buf);
}

// 7. 1e4 randomized property trials of the rate-calculus identities.
void criterion7() {
    std::mt19937 rng(123456789u);
    std::uniform_real_distribution<double> ua(0.5, 3.0), uC(0.5, 4.0), u01(0.0, 1.0);
    std::uniform_real_distribution<double> ule(std::log(1e-7), std::log(1e-1));
    long violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int which = trial % 5;
        if (which == 0) {  // m(m^-1(s)) <= s
            const RateFunction m = RateFunction::power_law(uC(rng), ua(rng));
            const double s = m(std::exp(ule(rng)));
            const InverseResult inv = right_inverse(m, s);
            if (!inv.extrapolated && m(inv.eps) > s * (1.0 + 1e-10)) ++violations;
        } else if (which == 1) {  // m^-1(m(eps)) <= eps
            const RateFunction m = RateFunction::power_log(uC(rng), ua(rng), u01(rng));
            const double eps = std::exp(ule(rng));
            if (right_inverse(m, m(eps)).eps > eps * (1.0 + 1e-10)) ++violations;
        } else if (which == 2) {  // m_max non-increasing
            const RateFunction m = RateFunction::power_law(uC(rng), ua(rng));
            const double e1 = std::exp(ule(rng));
            const double e2 = e1 * (1.0 + 3.0 * u01(rng));
            if (m_max(m, e1, 16) < m_max(m, std::min(e2, kPi), 16) * (1.0 - 1e-9)) ++violations;
        } else if (which == 3) {  // grid refinement never loses mass
            const RateFunction m = RateFunction::power_log(uC(rng), ua(rng), u01(rng));
            const double eps = std::exp(ule(rng));
            if (m_max(m, eps, 32) < m_max(m, eps, 16) * (1.0 - 1e-9)) ++violations;
        } else {  // comparison inequalities for eps^-1 and eps^-2
            const double alpha = (trial % 2 == 0) ? 1.0 : 2.0;
            const RateFunction m = RateFunction::power_law(1.0, alpha);
            const double eps = std::exp(ule(rng));
            const double c = (0.05 + 0.9 * u01(rng)) * (1.0 + alpha);
            if (m_max(m, eps, 16) > m_log(m, eps) / c * (1.0 + 1e-6)) ++violations;
            if (m_max(m, eps, 16) > m(eps) / (alpha * std::exp(1.0)) * (1.0 + 1e-6)) ++violations;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "10000 randomized rate-calculus trials, %ld violations", violations);
    report(7, violations == 0, buf);
}

// 8. Positive-increase diagnostic calibration.
void criterion8() {
    std::mt19937 rng(55555u);
    std::uniform_real_distribution<double> ua(0.5, 3.0);
    bool pass = true;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double alpha = ua(rng);
        const PositiveIncreaseReport rep =
            positive_increase_diagnostic(RateFunction::power_law(1.0, alpha));
        worst = std::max(worst, std::abs(rep.alpha_hat - alpha));
        if (!rep.holds || std::abs(rep.alpha_hat - alpha) >= 1e-9) pass = false;
    }
    const bool holds_powlog =
        positive_increase_diagnostic(RateFunction::power_log(1.0, 1.0, 1.0), 2.0, 2, 1e-3).holds;
    const bool rejects_slow =
        !positive_increase_diagnostic(RateFunction::power_log(1.0, 0.0, 1.0)).holds;
    pass = pass && holds_powlog && rejects_slow;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "power-law exponent recovery error %.2e (<1e-9); holds on eps^-1|log eps|: %s; "
                  "rejects |log eps|: %s",
                  worst, holds_powlog ? "yes" : "no", rejects_slow ? "yes" : "no");
    report(8, pass, buf);
}

// 9. Determinism: identical jobs write byte-identical CSV artifacts.
void criterion9() {
    const std::string base =
        "[operator]\nkind = toeplitz\nfamily = log_example\nprefix_len = 4096\n"
        "[task]\nname = rates\nn_min = 100\nn_max = 10000\n"
        "[output]\ndir = ";
    const std::string env_base =
        "[operator]\nkind = toeplitz\nfamily = lazy_bernoulli\nparam = 0.5\n"
        "[task]\nname = envelope\neps_min = 1e-4\n"
        "[output]\ndir = ";
    bool pass = true;
    std::ostringstream log;
    for (int round = 0; round < 2; ++round) {
        const fs::path d = fs::path("acceptance_out") / ("run" + std::to_string(round));
        fs::remove_all(d);
        fs::create_directories(d);
        if (run(parse_spec(base + d.string() + "\n"), log) != 0) pass = false;
        if (run(parse_spec(env_base + d.string() + "\n"), log) != 0) pass = false;
    }
    const fs::path r0 = fs::path("acceptance_out") / "run0";
    const fs::path r1 = fs::path("acceptance_out") / "run1";
    for (const char* name : {"rates.csv", "envelope.csv"}) {
        const std::string a = slurp(r0 / name), b = slurp(r1 / name);
        if (a.empty() || a != b) pass = false;
    }
    report(9, pass, "consecutive runs produce byte-identical rates.csv and envelope.csv");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    if (g_failures == 0) std::printf("all criteria passed\n");
    return g_failures == 0 ? 0 : 1;
}
