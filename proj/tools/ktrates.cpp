// Command-line driver: decay rates, resolvent envelopes, and verification
// jobs described by sectioned key=value spec files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ktz/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ktrates: decay-rate and resolvent-growth computations for contractive operator models"};
    std::string verb;
    std::string spec_path;
    std::string out_dir;
    long n_max = 0;
    int grid_per_decade = 0;
    bool show_config = false;
    app.add_option("verb", verb, "task override: rates|resolvent|envelope|verify|compare|fit");
    app.add_option("--spec", spec_path, "job spec file ([operator]/[rate]/[task]/[output] sections)");
    app.add_option("--n-max", n_max, "override the upper end of the n range");
    app.add_option("--grid-per-decade", grid_per_decade, "override boundary-grid density");
    app.add_option("--out", out_dir, "override the output directory");
    app.add_flag("--show-config", show_config, "print the default configuration and exit");
    CLI11_PARSE(app, argc, argv);

    if (show_config) {
        ktz::TaskParams d;
        std::cout << "n_range = " << d.n_range.lo << ".." << d.n_range.hi << "\n"
                  << "n_per_decade = " << d.n_per_decade << "\n"
                  << "grid_per_decade = " << d.grid.pts_per_decade << "\n"
                  << "param_min = " << d.grid.param_min << "\n"
                  << "theta_min = " << d.grid.theta_min << "\n"
                  << "refine_rel_tol = " << d.grid.refine_rel_tol << "\n"
                  << "eps_min = " << d.eps_min << "\n"
                  << "eps_max = " << d.eps_max << "\n"
                  << "threads = KTRATES_THREADS (default 1)\n";
        return 0;
    }
    if (spec_path.empty()) {
        std::cerr << "error: --spec is required\n";
        return 1;
    }

    if (const char* env = std::getenv("KTRATES_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) ktz::set_thread_count(t);
    }

    std::ifstream in(spec_path);
    if (!in) {
        std::cerr << "error: cannot read spec file " << spec_path << "\n";
        return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();

    try {
        ktz::JobSpec job = ktz::parse_spec(buf.str());
        if (!verb.empty()) job.task = verb;
        if (n_max > 0) job.params.n_range.hi = n_max;
        if (grid_per_decade > 0) job.params.grid.pts_per_decade = grid_per_decade;
        if (!out_dir.empty()) job.output.dir = out_dir;
        return ktz::run(job, std::cout);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
