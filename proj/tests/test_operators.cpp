#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ktz/operators.hpp"

using namespace ktz;
using cplx = std::complex<double>;

namespace {

OperatorModel parabola(GridConfig cfg = {}) {
    return OperatorModel::curve(
        [](double t) {
            const double s = std::clamp(t, -1.0, 1.0);
            return (1.0 - s * s) * std::exp(cplx(0.0, s));
        },
        cfg);
}

// Closed-form decay for the half-coin symbol cos(t/2) e^{it/2}:
// max over x of cos^n(x) sin(x) = n^{n/2} / (n+1)^{(n+1)/2}.
double lazy_decay_exact(long n) {
    if (n == 0) return 1.0;
    const double dn = static_cast<double>(n);
    return std::exp(0.5 * dn * std::log(dn) - 0.5 * (dn + 1.0) * std::log(dn + 1.0));
}

}  // namespace

TEST_CASE("diagonal model basics") {
    const OperatorModel id = OperatorModel::identity();
    CHECK(id.contains_one());
    CHECK(id.power_bound() == 1.0);
    CHECK(spectrum_distance(id, 0.7) == doctest::Approx(2.0 * std::sin(0.35)).epsilon(1e-12));
    CHECK(spectrum_distance(id, 0.0) == 0.0);
    CHECK(resolvent_norm(id, kPi) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(resolvent_norm(id, 0.0), std::domain_error);
    CHECK(decay_norm(id, 5) == 0.0);

    const OperatorModel two = OperatorModel::diagonal({{1.0, 0.0}, {0.5, 0.0}});
    CHECK(spectrum_distance(two, kPi) == doctest::Approx(1.5).epsilon(1e-12));
    const OperatorModel geo = OperatorModel::diagonal({{1.0, 0.0}, {0.9, 0.0}});
    CHECK(decay_norm(geo, 10) == doctest::Approx(std::pow(0.9, 10) * 0.1).epsilon(1e-12));
    const OperatorModel zero_one = OperatorModel::diagonal({{0.0, 0.0}, {1.0, 0.0}});
    CHECK(decay_norm(zero_one, 1) == 0.0);
    CHECK(decay_norm(zero_one, 0) == doctest::Approx(1.0));
}

TEST_CASE("spectrum validation") {
    CHECK_THROWS_AS(OperatorModel::diagonal({{1.2, 0.0}}), std::runtime_error);
    CHECK_THROWS_AS(OperatorModel::diagonal({{0.0, 1.0}}), std::runtime_error);  // i on the circle
    CHECK_THROWS_AS(OperatorModel::curve([](double t) { return cplx(1.0 + t * t, 0.0); }),
                    std::runtime_error);
    CHECK_NOTHROW(OperatorModel::diagonal({{1.0, 0.0}, {0.0, 0.5}}));
}

TEST_CASE("diagonal resolvent envelope") {
    const OperatorModel id = OperatorModel::identity();
    for (double eps : {1e-4, 1e-2, 0.5}) {
        CHECK(resolvent_envelope(id, eps) ==
              doctest::Approx(1.0 / (2.0 * std::sin(eps / 2.0))).epsilon(1e-9));
    }
}

TEST_CASE("half-coin Toeplitz model") {
    const OperatorModel T = OperatorModel::toeplitz(Density::lazy_bernoulli(0.5));
    CHECK(T.contains_one());
    // Spectrum is the disk |z - 1/2| <= 1/2; distance from -1 is 1.
    CHECK(spectrum_distance(T, kPi) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(resolvent_norm(T, kPi) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(decay_norm(T, 1) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(decay_norm(T, 4) == doctest::Approx(16.0 / std::pow(5.0, 2.5)).epsilon(1e-9));
    for (long n : {2L, 8L, 32L, 100L})
        CHECK(decay_norm(T, n) == doctest::Approx(lazy_decay_exact(n)).epsilon(1e-8));
}

TEST_CASE("boundary sup dominates interior samples (maximum modulus)") {
    const OperatorModel T = OperatorModel::toeplitz(Density::lazy_bernoulli(0.5));
    const Density& a = *T.density();
    std::mt19937 rng(5150u);
    std::uniform_real_distribution<double> ur(0.0, 1.0), uth(-kPi, kPi);
    for (long n : {3L, 10L, 40L}) {
        const double boundary_sup = decay_norm(T, n);
        for (int trial = 0; trial < 300; ++trial) {
            const cplx z = std::sqrt(ur(rng)) * std::exp(cplx(0.0, uth(rng)));
            const cplx lam = a.phi(z);
            const double interior = std::pow(std::abs(lam), static_cast<double>(n)) * std::abs(1.0 - lam);
            CHECK(interior <= boundary_sup * (1.0 + 1e-9) + 1e-12);
        }
    }
}

TEST_CASE("parabola curve model") {
    const OperatorModel T = parabola();
    CHECK(T.contains_one());
    // dist(e^{i theta}, spectrum) ~ theta^2, so the envelope grows like eps^-2.
    std::vector<double> lx, ly;
    for (double eps = 1e-4; eps <= 1.1e-2; eps *= 2.0) {
        lx.push_back(std::log(eps));
        ly.push_back(std::log(resolvent_envelope(T, eps)));
    }
    const auto [b0, slope] = linear_fit(lx, ly);
    (void)b0;
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.05));
    // decay ~ e^{-1/2} (2n)^{-1/2}.
    for (long n : {1000L, 10000L}) {
        const double expected = std::exp(-0.5) / std::sqrt(2.0 * static_cast<double>(n));
        CHECK(decay_norm(T, n) == doctest::Approx(expected).epsilon(0.05));
    }
}

TEST_CASE("resolvent lower bound 1/theta when 1 lies in the spectrum") {
    for (const OperatorModel& T :
         {OperatorModel::identity(), OperatorModel::toeplitz(Density::lazy_bernoulli(0.5)), parabola()}) {
        for (double th : {1e-4, 1e-3, 1e-2, 0.3})
            CHECK(resolvent_norm(T, th) >= 1.0 / th * (1.0 - 1e-9));
    }
}

TEST_CASE("monotonicity invariants") {
    const OperatorModel T = OperatorModel::toeplitz(Density::log_kernel());
    std::vector<long> ns;
    for (long n = 1; n <= 4096; n *= 2) ns.push_back(n);
    const DecayProfile p = decay_profile(T, ns);
    for (std::size_t i = 1; i < p.entries.size(); ++i)
        CHECK(p.entries[i].value <= p.entries[i - 1].value * (1.0 + 1e-12));
    for (const auto& e : p.entries) {
        CHECK(e.method == NormMethod::GridSup);
        CHECK(e.error_budget >= 0.0);
    }
    // The envelope table is non-increasing by construction.
    const RateFunction env = resolvent_envelope_table(T, 1e-4);
    double prev = env(1e-4);
    for (double e = 1.3e-4; e < kPi; e *= 1.3) {
        CHECK(env(e) <= prev * (1.0 + 1e-12));
        prev = env(e);
    }
}

TEST_CASE("doubling grid density never loses sup mass") {
    GridConfig coarse, fine;
    coarse.pts_per_decade = 32;
    fine.pts_per_decade = 64;
    const OperatorModel Tc = parabola(coarse), Tf = parabola(fine);
    for (long n : {10L, 100L, 1000L})
        CHECK(decay_norm(Tf, n) >= decay_norm(Tc, n) * (1.0 - 1e-9));
    for (double eps : {1e-3, 1e-2})
        CHECK(resolvent_envelope(Tf, eps) >= resolvent_envelope(Tc, eps) * (1.0 - 1e-9));
}

TEST_CASE("finite sections") {
    const FiniteSection ident(Density::point_mass(0), 3);
    CHECK(ident.entry(0, 0) == 1.0);
    CHECK(ident.entry(1, 1) == 1.0);
    CHECK(ident.entry(1, 0) == 0.0);
    CHECK(section_decay_norm(ident, 3) == 0.0);

    const FiniteSection lb(Density::lazy_bernoulli(0.5), 2);
    CHECK(lb.entry(0, 0) == 0.5);
    CHECK(lb.entry(1, 0) == 0.5);
    CHECK(lb.entry(1, 1) == 0.5);
    CHECK(lb.entry(0, 1) == 0.0);
    std::ostringstream os;
    lb.write(os);
    CHECK(os.str() == "0.5 0\n0.5 0.5\n");

    const FiniteSection lk(Density::log_kernel(64), 4);
    CHECK(lk.first_column()[0] == 0.0);
    CHECK(lk.first_column()[1] == 0.0);
    CHECK(lk.first_column()[2] == doctest::Approx(0.5));
    CHECK(lk.first_column()[3] == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("section norms approximate symbol norms from below") {
    const OperatorModel T = OperatorModel::toeplitz(Density::lazy_bernoulli(0.5));
    const FiniteSection S512(Density::lazy_bernoulli(0.5), 512);
    CHECK(section_decay_norm(S512, 1) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(section_decay_norm(S512, 4) == doctest::Approx(16.0 / std::pow(5.0, 2.5)).epsilon(0.02));
    const FiniteSection S128(Density::lazy_bernoulli(0.5), 128);
    for (long n : {1L, 4L, 10L}) {
        const double s128 = section_decay_norm(S128, n);
        const double s512 = section_decay_norm(S512, n);
        CHECK(s512 >= s128 * (1.0 - 1e-8));          // non-decreasing in dimension
        CHECK(s512 <= decay_norm(T, n) * (1.0 + 1e-8));  // dominated by the full operator
    }
}

TEST_CASE("thread count does not change results") {
    const OperatorModel T = OperatorModel::toeplitz(Density::lazy_bernoulli(0.5));
    std::vector<long> ns = {1, 3, 7, 20, 55};
    set_thread_count(1);
    const DecayProfile p1 = decay_profile(T, ns);
    set_thread_count(4);
    const DecayProfile p4 = decay_profile(T, ns);
    set_thread_count(1);
    for (std::size_t i = 0; i < ns.size(); ++i) CHECK(p1.entries[i].value == p4.entries[i].value);
}
