#include "ktz/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ktz {

namespace {

std::string fmt(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}
std::string fmt17(double v) { return fmt(v, "%.17g"); }
std::string fmt9(double v) { return fmt(v, "%.9g"); }
std::string fmt4(double v) { return fmt(v, "%.4g"); }

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw std::runtime_error("parse error: line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) parse_fail(line, "trailing characters in number '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        parse_fail(line, "not a number: '" + s + "'");
    } catch (const std::out_of_range&) {
        parse_fail(line, "number out of range: '" + s + "'");
    }
}

long to_long(const std::string& s, int line) {
    const double v = to_double(s, line);
    if (v != std::floor(v)) parse_fail(line, "expected an integer, got '" + s + "'");
    return static_cast<long>(v);
}

bool to_bool(const std::string& s, int line) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    parse_fail(line, "expected a boolean, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string& raw, int line) {
    std::string s = trim(raw);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') parse_fail(line, "unterminated list");
        s = s.substr(1, s.size() - 2);
    }
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Accepts "x", "xi", or "x+yi" / "x-yi" (also trailing 'j').
std::complex<double> to_complex(const std::string& s, int line) {
    const char* p = s.c_str();
    char* end = nullptr;
    double first = std::strtod(p, &end);
    if (end == p) parse_fail(line, "not a complex number: '" + s + "'");
    if (*end == '\0') return {first, 0.0};
    if ((*end == 'i' || *end == 'j') && end[1] == '\0') return {0.0, first};
    const char* q = end;
    char* end2 = nullptr;
    double second = std::strtod(q, &end2);
    if (end2 == q || !(*end2 == 'i' || *end2 == 'j') || end2[1] != '\0')
        parse_fail(line, "not a complex number: '" + s + "'");
    return {first, second};
}

const std::set<std::string> kTasks = {"rates", "resolvent", "envelope", "verify", "compare", "fit"};
const std::set<std::string> kClaims = {"upper_mlog", "upper_posinc", "lower",
                                       "sandwich",   "comparisons",  "necessity"};

const char* method_name(NormMethod m) {
    switch (m) {
        case NormMethod::SymbolExact: return "symbol_exact";
        case NormMethod::GridSup: return "grid_sup";
        case NormMethod::FiniteSection: return "finite_section";
    }
    return "?";
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::HypothesisNotSatisfied: return "HYPOTHESIS-NOT-SATISFIED";
    }
    return "?";
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file " + p.string());
    os << content;
}

std::filesystem::path out_path(const JobSpec& job, const std::string& name) {
    return std::filesystem::path(job.output.dir) / (job.output.prefix + name);
}

}  // namespace

JobSpec parse_spec(const std::string& text) {
    JobSpec job;
    std::string section;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    bool saw_delta_prime = false;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = trim(raw);
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(lineno, "unterminated section header");
            section = line.substr(1, line.size() - 2);
            if (section != "operator" && section != "rate" && section != "task" &&
                section != "output")
                parse_fail(lineno, "unknown section [" + section + "]");
            if (section == "rate" && !job.rate) job.rate = RateDescriptor{};
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) parse_fail(lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty()) parse_fail(lineno, "key '" + key + "' outside any section");
        if (val.empty()) parse_fail(lineno, "empty value for key '" + key + "'");

        if (section == "operator") {
            auto& op = job.op;
            if (key == "kind") op.kind = val;
            else if (key == "points") {
                for (const auto& tok : split_list(val, lineno))
                    op.points.push_back(to_complex(tok, lineno));
            } else if (key == "family") op.family = val;
            else if (key == "param") op.param = to_double(val, lineno);
            else if (key == "prefix_len") op.prefix_len = static_cast<std::size_t>(to_long(val, lineno));
            else if (key == "coefficients") {
                for (const auto& tok : split_list(val, lineno))
                    op.coefficients.push_back(to_double(tok, lineno));
            } else if (key == "tail") op.tail = to_double(val, lineno);
            else if (key == "name") op.curve_name = val;
            else parse_fail(lineno, "unknown key '" + key + "' in [operator]");
        } else if (section == "rate") {
            auto& r = *job.rate;
            if (key == "form") r.form = val;
            else if (key == "C") r.C = to_double(val, lineno);
            else if (key == "alpha") r.alpha = to_double(val, lineno);
            else if (key == "beta") r.beta = to_double(val, lineno);
            else if (key == "eps_min") r.eps_min = to_double(val, lineno);
            else parse_fail(lineno, "unknown key '" + key + "' in [rate]");
        } else if (section == "task") {
            auto& p = job.params;
            if (key == "name") {
                if (!kTasks.count(val)) parse_fail(lineno, "unknown task '" + val + "'");
                job.task = val;
            } else if (key == "claim") {
                if (!kClaims.count(val)) parse_fail(lineno, "unknown claim '" + val + "'");
                p.claim = val;
            } else if (key == "c") p.c = to_double(val, lineno);
            else if (key == "delta") p.delta = to_double(val, lineno);
            else if (key == "delta_prime") {
                p.delta_prime = to_double(val, lineno);
                saw_delta_prime = true;
            } else if (key == "c_prime") p.c_prime = to_double(val, lineno);
            else if (key == "alpha") p.alpha = to_double(val, lineno);
            else if (key == "c_list") {
                for (const auto& tok : split_list(val, lineno))
                    p.c_list.push_back(to_double(tok, lineno));
            } else if (key == "n_min") p.n_range.lo = to_long(val, lineno);
            else if (key == "n_max") p.n_range.hi = to_long(val, lineno);
            else if (key == "eps_min") p.eps_min = to_double(val, lineno);
            else if (key == "eps_max") p.eps_max = to_double(val, lineno);
            else if (key == "n_per_decade") p.n_per_decade = static_cast<int>(to_long(val, lineno));
            else if (key == "grid_per_decade") p.grid.pts_per_decade = static_cast<int>(to_long(val, lineno));
            else if (key == "param_min") p.grid.param_min = to_double(val, lineno);
            else if (key == "theta_min") p.grid.theta_min = to_double(val, lineno);
            else parse_fail(lineno, "unknown key '" + key + "' in [task]");
        } else {  // output
            auto& o = job.output;
            if (key == "dir") o.dir = val;
            else if (key == "prefix") o.prefix = val;
            else if (key == "plot") o.plot = to_bool(val, lineno);
            else parse_fail(lineno, "unknown key '" + key + "' in [output]");
        }
    }

    if (job.task.empty()) throw std::runtime_error("parse error: no task name given");
    if (job.task == "verify" && job.params.claim.empty())
        throw std::runtime_error("parse error: task verify requires a claim");
    if (job.op.kind.empty() && job.task != "compare")
        throw std::runtime_error("parse error: task '" + job.task + "' requires an [operator] section");
    const auto& p = job.params;
    if (p.n_range.lo < 1 || p.n_range.hi < p.n_range.lo)
        throw std::runtime_error("rejected: n_range must satisfy 1 <= n_min <= n_max");
    if (!(p.eps_min > 0.0) || !(p.eps_max > p.eps_min) || p.eps_max > kPi + 1e-12)
        throw std::runtime_error("rejected: need 0 < eps_min < eps_max <= pi");
    if (job.task == "verify" && p.claim == "sandwich" && saw_delta_prime) {
        const double d = p.delta.value_or(1.0);
        if (!(*p.delta_prime > d) || !(*p.delta_prime < 1.0))
            throw std::runtime_error("rejected: sandwich requires delta_prime in (delta, 1)");
    }
    // Spectral-resolution rule: the boundary grid near 1 must resolve the
    // scale 1/n of the decay maximizer.
    if (static_cast<double>(p.n_range.hi) > 1.0 / (10.0 * p.grid.param_min))
        throw std::runtime_error(
            "rejected: spectral resolution rule violated (need param_min <= 1/(10*n_max))");
    return job;
}

OperatorModel build_operator(const OperatorDescriptor& d, const GridConfig& cfg) {
    if (d.kind == "identity") return OperatorModel::identity();
    if (d.kind == "diagonal") {
        if (d.points.empty()) throw std::runtime_error("diagonal operator needs points");
        return OperatorModel::diagonal(d.points);
    }
    if (d.kind == "curve") {
        if (d.curve_name == "parabola" || d.curve_name.empty())
            // (1 - t^2) e^{it}, parameter clamped so the curve stays inside the
            // closed unit disk (|t| > 1 collapses onto the point 0).
            return OperatorModel::curve(
                [](double t) {
                    const double s = std::clamp(t, -1.0, 1.0);
                    return (1.0 - s * s) * std::exp(std::complex<double>(0.0, s));
                },
                cfg);
        throw std::runtime_error("unknown curve name '" + d.curve_name + "'");
    }
    if (d.kind == "toeplitz") {
        if (!d.coefficients.empty())
            return OperatorModel::toeplitz(Density::from_coefficients(d.coefficients, d.tail), cfg);
        if (d.family.empty()) throw std::runtime_error("toeplitz operator needs family= or coefficients=");
        return OperatorModel::toeplitz(builtin_family(d.family, d.param, d.prefix_len), cfg);
    }
    throw std::runtime_error("unknown operator kind '" + d.kind + "'");
}

RateFunction build_rate(const JobSpec& job, const OperatorModel& T) {
    if (!job.rate || job.rate->form == "envelope")
        return resolvent_envelope_table(T, job.rate ? job.rate->eps_min : job.params.eps_min);
    const auto& r = *job.rate;
    if (r.form == "power_law") return RateFunction::power_law(r.C, r.alpha);
    if (r.form == "power_log") return RateFunction::power_log(r.C, r.alpha, r.beta);
    throw std::runtime_error("unknown rate form '" + r.form + "'");
}

std::string render_report(const VerificationReport& rep) {
    std::ostringstream os;
    os << "claim: " << rep.claim_id << "\n";
    os << "verdict: " << verdict_name(rep.verdict) << "\n";
    os << "n_range: " << rep.n_range.lo << ".." << rep.n_range.hi << "\n";
    os << "window: eps in [" << fmt9(rep.window.eps_lo) << ", " << fmt9(rep.window.eps_hi)
       << "], n in [" << rep.window.n_lo << ", " << rep.window.n_hi << "]\n";
    for (const auto& [k, v] : rep.constants) os << "constant " << k << " = " << fmt9(v) << "\n";
    if (!rep.margins.empty()) {
        double lo = rep.margins.front().second, hi = lo;
        for (const auto& [n, m] : rep.margins) {
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        os << "margin min = " << fmt9(lo) << "\n";
        os << "margin max = " << fmt9(hi) << "\n";
    }
    for (const auto& s : rep.subchecks) {
        os << "subcheck " << s.name << ": " << verdict_name(s.verdict);
        if (s.margin_max > 0.0)
            os << " [margin " << fmt9(s.margin_min) << " .. " << fmt9(s.margin_max) << "]";
        if (!s.reason.empty()) os << " (" << s.reason << ")";
        os << "\n";
    }
    if (!rep.detail.empty()) os << "detail: " << rep.detail << "\n";
    return os.str();
}

std::string render_fit(const RateFit& fit) {
    std::ostringstream os;
    os << "fit: value ~ n^-a * log(n)^b\n";
    os << "a = " << fmt4(fit.a) << "\n";
    os << "b = " << fmt4(fit.b) << "\n";
    os << "residual = " << fmt4(fit.residual) << "\n";
    return os.str();
}

namespace {

std::string rates_csv(const DecayProfile& profile) {
    std::string csv = "n,value,method,error_budget\n";
    for (const auto& e : profile.entries)
        csv += std::to_string(e.n) + "," + fmt17(e.value) + "," + method_name(e.method) + "," +
               fmt17(e.error_budget) + "\n";
    return csv;
}

std::string plot_series(const std::vector<std::pair<double, double>>& xy) {
    std::string out;
    for (const auto& [x, y] : xy) out += fmt9(x) + " " + fmt9(y) + "\n";
    return out;
}

int run_verify(const JobSpec& job, std::ostream& log) {
    const auto& p = job.params;
    if (!kClaims.count(p.claim)) throw std::runtime_error("verify: missing or unknown claim");
    VerificationReport rep;
    if (p.claim == "comparisons") {
        RateFunction m = job.rate && job.rate->form != "envelope"
                             ? build_rate(job, OperatorModel::identity())
                             : build_rate(job, build_operator(job.op, p.grid));
        rep = check_comparisons(m, p.alpha.value_or(1.0), p.c.value_or(1.0),
                                p.c_prime.value_or(2.0), p.n_range);
    } else {
        const OperatorModel T = build_operator(job.op, p.grid);
        if (p.claim == "sandwich") {
            rep = check_sandwich_quasimult(T, p.delta.value_or(1.0), p.delta_prime,
                                           p.c.value_or(1.5), p.n_range, p.eps_min);
        } else {
            const RateFunction m = build_rate(job, T);
            if (p.claim == "upper_mlog")
                rep = check_upper_mlog(T, m, p.c.value_or(0.5), p.n_range);
            else if (p.claim == "upper_posinc")
                rep = check_upper_posinc(T, m, p.n_range);
            else if (p.claim == "lower")
                rep = check_lower(T, m, p.c_list.empty() ? std::vector<double>{0.5} : p.c_list,
                                  p.n_range);
            else  // necessity
                rep = necessity_diagnostic(T, m, p.c.value_or(1.0), p.delta.value_or(0.5),
                                           p.n_range);
        }
    }
    const std::string text = render_report(rep);
    write_file(out_path(job, p.claim + "_report.txt"), text);
    std::string csv = "n,margin\n";
    for (const auto& [n, m] : rep.margins) csv += fmt17(n) + "," + fmt17(m) + "\n";
    write_file(out_path(job, p.claim + "_margins.csv"), csv);
    log << text;
    if (rep.verdict == Verdict::Pass) return 0;
    return rep.verdict == Verdict::HypothesisNotSatisfied ? 2 : 1;
}

}  // namespace

int run(const JobSpec& job, std::ostream& log) {
    try {
        std::filesystem::create_directories(job.output.dir);
        const auto& p = job.params;
        if (job.task == "rates" || job.task == "fit") {
            const OperatorModel T = build_operator(job.op, p.grid);
            const DecayProfile profile = decay_profile(T, sample_n_grid(p.n_range, p.n_per_decade));
            write_file(out_path(job, "rates.csv"), rates_csv(profile));
            if (job.output.plot) {
                std::vector<std::pair<double, double>> xy;
                for (const auto& e : profile.entries)
                    xy.emplace_back(static_cast<double>(e.n), e.value);
                write_file(out_path(job, "rates.dat"), plot_series(xy));
            }
            if (job.task == "fit") {
                const RateFit fit = fit_rate(profile);
                const std::string text = render_fit(fit);
                write_file(out_path(job, "fit_report.txt"), text);
                log << text;
            } else {
                log << "rates: " << profile.entries.size() << " samples written\n";
            }
            return 0;
        }
        if (job.task == "resolvent" || job.task == "envelope") {
            const OperatorModel T = build_operator(job.op, p.grid);
            const bool env = job.task == "envelope";
            const RateFunction table =
                env ? resolvent_envelope_table(T, p.eps_min) : RateFunction::power_law(1.0, 1.0);
            std::string csv = env ? "eps,value,method,error_budget\n" : "theta,value,method,error_budget\n";
            std::vector<std::pair<double, double>> xy;
            const double tail = T.density() ? T.density()->tail_mass_bound() : 0.0;
            for (double x : log_grid(p.eps_min, p.eps_max, p.grid.pts_per_decade)) {
                const double v = env ? table(x)
                                     : std::max(resolvent_norm(T, x), resolvent_norm(T, -x));
                const char* method = T.kind() == OperatorModel::Kind::Diagonal ? "symbol_exact" : "grid_sup";
                const double budget = v * p.grid.refine_rel_tol + v * v * tail;
                csv += fmt17(x) + "," + fmt17(v) + "," + method + "," + fmt17(budget) + "\n";
                xy.emplace_back(x, v);
            }
            write_file(out_path(job, job.task + ".csv"), csv);
            if (job.output.plot) write_file(out_path(job, job.task + ".dat"), plot_series(xy));
            log << job.task << ": " << xy.size() << " samples written\n";
            return 0;
        }
        if (job.task == "compare") {
            RateFunction m = job.rate && job.rate->form != "envelope"
                                 ? build_rate(job, OperatorModel::identity())
                                 : build_rate(job, build_operator(job.op, p.grid));
            std::string csv = "n,m_inv,m_log_inv,m_max_inv\n";
            for (long n : sample_n_grid(p.n_range, p.n_per_decade)) {
                const double s = static_cast<double>(n);
                csv += std::to_string(n) + "," + fmt17(right_inverse(m, s).eps) + "," +
                       fmt17(m_log_inverse(m, s).eps) + "," + fmt17(m_max_inverse(m, s).eps) + "\n";
            }
            write_file(out_path(job, "compare.csv"), csv);
            log << "compare: table written\n";
            return 0;
        }
        if (job.task == "verify") return run_verify(job, log);
        throw std::runtime_error("unknown task '" + job.task + "'");
    } catch (const std::exception& ex) {
        log << "error: " << ex.what() << "\n";
        return 1;
    }
}

}  // namespace ktz
