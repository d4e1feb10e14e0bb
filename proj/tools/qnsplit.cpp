#include <filesystem>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "qnsplit/bench.hpp"
#include "qnsplit/oracle.hpp"

using namespace qnsplit;

namespace {

enum Exit { ok = 0, config_error = 2, solver_failure = 3, io_error = 4 };

void print_summary(const RunSummary& s) {
    std::cout << "experiment " << s.name << " (" << to_string(s.family) << ")\n";
    std::cout << "reference primal " << std::setprecision(12) << s.reference.primal;
    if (s.reference.dual) std::cout << "  dual " << *s.reference.dual;
    std::cout << (s.reference.from_cache ? "  [cached]" : "") << '\n';
    std::cout << "initial gap " << s.initial_gap << '\n';
    std::cout << std::left << std::setprecision(6) << std::setw(10) << "algorithm" << std::setw(8) << "iters"
              << std::setw(14) << "final gap" << std::setw(14) << "final pd_gap" << std::setw(10) << "rate q" << "csv\n";
    for (const auto& r : s.runs) {
        std::cout << std::setw(10) << to_string(r.algorithm) << std::setw(8) << r.iter.size() << std::setw(14)
                  << (r.gap.empty() ? 0.0 : r.gap.back()) << std::setw(14)
                  << (r.pd_gap.empty() ? 0.0 : r.pd_gap.back()) << std::setw(10);
        if (r.rate) std::cout << *r.rate;
        else std::cout << "-";
        std::cout << r.csv.string() << '\n';
    }
}

template <class F>
int guarded(F&& f) {
    try {
        f();
        return ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return io_error;
    } catch (const PgmError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return io_error;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return io_error;
    } catch (const SolverError& e) {
        std::cerr << "solver failure at iteration " << e.iteration() << ": " << e.what() << '\n';
        return solver_failure;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return solver_failure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasi-Newton forward-backward splitting experiments"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
    run->add_option("--config", config_path, "experiment config")->required();

    std::string family = "deconvolution", algs = "fbs,ifbs,qn-fbs,rqn-fbs,iqn-fbs", out_dir = "out";
    long iters = 500, size = 0, ref_iters = 0;
    std::uint64_t seed = 1;
    auto* compare = app.add_subcommand("compare", "run the algorithm roster on a preset problem");
    compare->add_option("--problem", family, "deconvolution | infconv | denoising")->required();
    compare->add_option("--algs", algs, "comma separated subset of fbs,ifbs,qn-fbs,rqn-fbs,iqn-fbs");
    compare->add_option("--iters", iters, "iteration budget")->required();
    compare->add_option("--out", out_dir, "output directory")->required();
    compare->add_option("--size", size, "image side length (default 64)");
    compare->add_option("--seed", seed, "noise seed");
    compare->add_option("--reference-iters", ref_iters, "plain PDHG iterations for the reference value");

    std::string ref_config;
    auto* reference = app.add_subcommand("reference", "compute the reference optimal value of a config");
    reference->add_option("--config", ref_config, "experiment config")->required();

    auto* selftest = app.add_subcommand("selftest", "run the oracle-equivalence checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    const auto cache = cache_dir_from_env();
    if (*run) {
        return guarded([&] { print_summary(run_experiment(load_config(config_path), cache)); });
    }
    if (*compare) {
        return guarded([&] {
            ExperimentConfig c = preset(parse_image_family(family));
            c.name = family;
            c.algorithms = parse_algorithm_list(algs);
            if (iters < 1) throw ConfigError("--iters must be at least 1");
            c.iterations = iters;
            c.output_dir = out_dir;
            c.problem.seed = seed;
            if (size > 0) c.problem.rows = c.problem.cols = size;
            if (ref_iters > 0) c.reference_iterations = ref_iters;
            print_summary(run_experiment(c, cache));
        });
    }
    if (*reference) {
        return guarded([&] {
            const ExperimentConfig c = load_config(ref_config);
            const ImageProblem p = build_problem(c.problem);
            const ReferenceValue r = reference_gap(p, c.reference_iterations, cache);
            std::cout << std::setprecision(17) << "primal " << r.primal << '\n';
            if (r.dual) std::cout << "dual " << *r.dual << "\ncertificate " << *r.certificate() << '\n';
            std::cout << "iterations " << r.iterations << (r.from_cache ? " (cached)" : "") << '\n';
        });
    }
    if (*selftest) {
        int code = ok;
        const int g = guarded([&] {
            if (!run_selftest(std::cout)) code = solver_failure;
        });
        return g != ok ? g : code;
    }
    return config_error;
}
