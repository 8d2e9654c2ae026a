#include "ktz/ratefun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ktz {

namespace {

constexpr double kDomainSlack = 1e-12;
// Effective-exponent floor below which a sampled ratio family is treated as
// slowly varying rather than of positive increase.
constexpr double kAlphaFloor = 0.05;

void check_domain(double eps, double domain_min) {
    if (!(eps > 0.0) || eps < domain_min * (1.0 - kDomainSlack) || eps > kPi * (1.0 + kDomainSlack))
        throw std::domain_error("RateFunction: eps outside [domain_min, pi]");
}

}  // namespace

RateFunction RateFunction::power_law(double C, double alpha, double domain_min) {
    if (!(C > 0.0) || !(alpha >= 0.0)) throw std::invalid_argument("power_law: need C > 0, alpha >= 0");
    if (!(domain_min > 0.0) || !(domain_min < kPi)) throw std::invalid_argument("power_law: bad domain_min");
    RateFunction m;
    m.form_ = Form::PowerLaw;
    m.C_ = C;
    m.alpha_ = alpha;
    m.domain_min_ = domain_min;
    return m;
}

RateFunction RateFunction::power_log(double C, double alpha, double beta, double domain_min) {
    RateFunction m = power_law(C, alpha, domain_min);
    m.form_ = Form::PowerLog;
    m.beta_ = beta;
    return m;
}

RateFunction RateFunction::from_table(std::vector<double> eps, std::vector<double> values) {
    if (eps.size() != values.size() || eps.size() < 2)
        throw std::invalid_argument("from_table: need >= 2 matching samples");
    if (eps.front() > eps.back()) {
        std::reverse(eps.begin(), eps.end());
        std::reverse(values.begin(), values.end());
    }
    RateFunction m;
    m.form_ = Form::Table;
    m.log_eps_.reserve(eps.size());
    m.log_val_.reserve(values.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || !(values[i] > 0.0))
            throw std::invalid_argument("from_table: eps and values must be positive");
        if (i > 0) {
            if (!(eps[i] > eps[i - 1])) throw std::invalid_argument("from_table: eps grid not strictly monotone");
            if (values[i] > values[i - 1] * (1.0 + 1e-12))
                throw std::invalid_argument("from_table: values must be non-increasing in eps");
        }
        m.log_eps_.push_back(std::log(eps[i]));
        m.log_val_.push_back(std::log(values[i]));
    }
    m.domain_min_ = eps.front();
    return m;
}

double RateFunction::operator()(double eps) const {
    check_domain(eps, domain_min_);
    switch (form_) {
        case Form::PowerLaw:
            return C_ * std::pow(eps, -alpha_);
        case Form::PowerLog: {
            const double lg = std::max(std::abs(std::log(eps)), 1.0);
            return C_ * std::pow(eps, -alpha_) * std::pow(lg, beta_);
        }
        case Form::Table: {
            const double le = std::log(std::clamp(eps, std::exp(log_eps_.front()), std::exp(log_eps_.back())));
            auto it = std::upper_bound(log_eps_.begin(), log_eps_.end(), le);
            std::size_t hi = static_cast<std::size_t>(it - log_eps_.begin());
            if (hi == 0) hi = 1;
            if (hi == log_eps_.size()) hi = log_eps_.size() - 1;
            const std::size_t lo = hi - 1;
            const double w = (le - log_eps_[lo]) / (log_eps_[hi] - log_eps_[lo]);
            return std::exp(log_val_[lo] + w * (log_val_[hi] - log_val_[lo]));
        }
    }
    throw std::logic_error("RateFunction: unknown form");
}

InverseResult right_inverse(const RateFunction& m, double s) {
    if (!(s > 0.0)) throw std::domain_error("right_inverse: s must be positive");
    return invert_nonincreasing([&](double e) { return m(e); }, s, m.domain_min(), kPi);
}

double m_log(const RateFunction& m, double eps) {
    const double v = m(eps);
    return v * std::log1p(v / eps);
}

InverseResult m_log_inverse(const RateFunction& m, double s) {
    if (!(s > 0.0)) throw std::domain_error("m_log_inverse: s must be positive");
    return invert_nonincreasing([&](double e) { return m_log(m, e); }, s, m.domain_min(), kPi);
}

double m_max(const RateFunction& m, double eps, int pts_per_decade) {
    check_domain(eps, m.domain_min());
    if (eps >= kPi * (1.0 - 1e-15)) return 0.0;
    auto g = [&](double th) { return m(th) * std::log(th / eps); };
    const std::vector<double> grid = log_grid(eps, kPi, pts_per_decade);
    std::vector<double> gv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) gv[i] = g(grid[i]);
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        best = std::max(best, gv[i]);
        const bool left_ok = (i == 0) || gv[i] >= gv[i - 1];
        const bool right_ok = (i + 1 == grid.size()) || gv[i] >= gv[i + 1];
        if (!(left_ok && right_ok)) continue;
        const double a = grid[i > 0 ? i - 1 : 0];
        const double b = grid[std::min(i + 1, grid.size() - 1)];
        if (b > a) {
            const double refined = golden_max([&](double u) { return g(std::exp(u)); }, std::log(a),
                                              std::log(b), 1e-13);
            best = std::max(best, refined);
        }
    }
    return best;
}

InverseResult m_max_inverse(const RateFunction& m, double s, int pts_per_decade) {
    if (!(s >= 0.0)) throw std::domain_error("m_max_inverse: s must be non-negative");
    if (s == 0.0) return {kPi, false};
    return invert_nonincreasing([&](double e) { return m_max(m, e, pts_per_decade); }, s,
                                m.domain_min(), kPi);
}

PositiveIncreaseReport positive_increase_diagnostic(const RateFunction& m, double t, int decades,
                                                    std::optional<double> window_max) {
    if (!(t >= 2.0)) throw std::invalid_argument("positive_increase_diagnostic: need t >= 2");
    if (decades < 2) throw std::invalid_argument("positive_increase_diagnostic: need decades >= 2");
    const double hi = std::min(window_max.value_or(kPi), kPi);
    const double lo_limit = m.domain_min() * t;
    if (!(hi / lo_limit >= std::pow(10.0, decades)))
        throw std::runtime_error("positive_increase_diagnostic: domain spans fewer decades than requested");

    double inf_ratio = std::numeric_limits<double>::infinity();
    double sum_log_ratio = 0.0;
    std::size_t count = 0;
    double eps_lo = hi;
    for (double e = hi; e >= lo_limit * (1.0 - 1e-12); e /= 2.0) {
        const double ratio = m(e / t) / m(e);
        inf_ratio = std::min(inf_ratio, ratio);
        sum_log_ratio += std::log(ratio);
        eps_lo = e;
        ++count;
    }
    PositiveIncreaseReport rep;
    rep.t = t;
    rep.eps0 = hi;
    rep.window_lo = eps_lo;
    rep.window_hi = hi;
    rep.inf_ratio = inf_ratio;
    rep.alpha_hat = sum_log_ratio / (static_cast<double>(count) * std::log(t));
    rep.c_hat = std::min(inf_ratio / std::pow(t, rep.alpha_hat), 1.0);
    rep.holds = inf_ratio >= std::pow(t, kAlphaFloor);
    return rep;
}

}  // namespace ktz
