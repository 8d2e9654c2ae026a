#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ktz/operators.hpp"
#include "ktz/ratefun.hpp"
#include "ktz/verify.hpp"

namespace ktz {

// Declarative job description read from a sectioned key=value spec file.
// Sections: [operator], [rate] (optional), [task], [output] (optional).

struct OperatorDescriptor {
    std::string kind;  // diagonal | identity | curve | toeplitz
    std::vector<std::complex<double>> points;
    std::string family;  // toeplitz: point_mass | lazy_bernoulli | geometric | log_example
    std::optional<double> param;
    std::optional<std::size_t> prefix_len;
    std::vector<double> coefficients;  // explicit toeplitz coefficients
    double tail = 0.0;
    std::string curve_name;  // curve: parabola -> (1 - t^2) e^{it}
};

struct RateDescriptor {
    std::string form;  // power_law | power_log | envelope
    double C = 1.0;
    double alpha = 1.0;
    double beta = 0.0;
    double eps_min = 1e-5;  // envelope sweep floor
};

struct TaskParams {
    std::string claim;  // verify: upper_mlog | upper_posinc | lower | sandwich | comparisons | necessity
    std::optional<double> c, delta, delta_prime, c_prime, alpha;
    std::vector<double> c_list;
    NRange n_range{100, 10000};
    double eps_min = 1e-5;
    double eps_max = kPi;
    int n_per_decade = 16;
    GridConfig grid;
};

struct OutputConfig {
    std::string dir = ".";
    std::string prefix;
    bool plot = false;
};

struct JobSpec {
    OperatorDescriptor op;
    std::optional<RateDescriptor> rate;
    std::string task;  // rates | resolvent | envelope | verify | compare | fit
    TaskParams params;
    OutputConfig output;
};

// Throws std::runtime_error with a "line N:" diagnostic on schema violations
// and named-rule rejections.
JobSpec parse_spec(const std::string& text);

OperatorModel build_operator(const OperatorDescriptor& d, const GridConfig& cfg);

// Rate from the descriptor, or from the resolvent envelope when the form is
// "envelope" (or when no [rate] section is given and the task needs one).
RateFunction build_rate(const JobSpec& job, const OperatorModel& T);

std::string render_report(const VerificationReport& rep);
std::string render_fit(const RateFit& fit);

// Executes the job, writing artifacts under output.dir.
// Exit contract: 0 pass, 2 hypothesis-not-satisfied, 1 error/failed check.
int run(const JobSpec& job, std::ostream& log);

}  // namespace ktz
