#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnsplit/imaging.hpp"

namespace qnsplit {

inline constexpr const char* kConfigSchema = "qnsplit.experiment/1";
inline constexpr const char* kCsvHeader = "iter,time_ms,primal,gap,pd_gap,step_param,root_iters,metric_sign,diff_norm";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Algorithm { fbs, ifbs, qn_fbs, rqn_fbs, iqn_fbs };
std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);
std::vector<Algorithm> parse_algorithm_list(const std::string& csv);
const std::vector<Algorithm>& all_algorithms();

struct ProblemSpec {
    ImageFamily family = ImageFamily::deconvolution;
    long rows = 64;
    long cols = 64;
    Phantom phantom = Phantom::shapes;
    std::string image;  // optional PGM path replacing the phantom
    double noise_sigma = 10.0;
    std::uint64_t seed = 1;
    double mu = 0.001;
    double tau = 0.09;
    double sigma = 0.9;
    int kernel_size = 5;
    double kernel_sigma = 1.5;
    double weight_scale = 10.0;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ProblemSpec problem;
    std::vector<Algorithm> algorithms;
    long iterations = 500;
    MetricRule metric;
    AlphaSchedule alpha;
    RootConfig root;
    bool root_tol_schedule = true;
    long reference_iterations = 10000;
    long rate_window_begin = 50;
    long rate_window_end = 500;
    std::string output_dir = "out";
    bool timing = true;
};

/// Caption parameters of the three experiment families: steps, mu, gamma
/// rule and inertial schedule.
ExperimentConfig preset(ImageFamily family);

/// Strict parser: the schema field must match kConfigSchema and unknown keys
/// are rejected. Missing keys take the family preset. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& c);

/// Noisy (and for deconvolution blurred) observation plus assembled problem.
ImageProblem build_problem(const ProblemSpec& spec);

struct ReferenceValue {
    double primal = 0.0;
    std::optional<double> dual;  // denoising only: best dual value
    long iterations = 0;
    bool from_cache = false;

    std::optional<double> certificate() const {
        return dual ? std::optional<double>(primal - *dual) : std::nullopt;
    }
};

/// Stable FNV-1a hash of the problem data and the iteration budget.
std::string problem_hash(const ImageProblem& p, long n_iters);

/// Running minimum of the primal objective along n_iters plain PDHG steps
/// from the initial point. With a cache directory the value is read from or
/// written to <dir>/reference-<hash>.json.
ReferenceValue reference_gap(const ImageProblem& p, long n_iters,
                             const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

/// QNSPLIT_CACHE_DIR when set and nonempty.
std::optional<std::filesystem::path> cache_dir_from_env();

/// Solver settings of one roster entry.
SolverConfig solver_config_for(Algorithm a, const ExperimentConfig& c);

struct AlgorithmRun {
    Algorithm algorithm = Algorithm::fbs;
    std::vector<long> iter;
    std::vector<double> time_ms;
    std::vector<double> primal;
    std::vector<double> gap;
    std::vector<double> pd_gap;
    std::optional<double> rate;
    std::filesystem::path csv;

    /// First iteration with `series[k] <= threshold`, if any.
    static std::optional<long> first_below(const std::vector<double>& series, double threshold);
};

struct RunSummary {
    std::string name;
    ImageFamily family = ImageFamily::deconvolution;
    ReferenceValue reference;
    double initial_primal = 0.0;
    double initial_gap = 0.0;
    std::vector<AlgorithmRun> runs;

    std::string to_json() const;
};

/// Runs every roster entry. With `write_csv` one CSV per algorithm lands in
/// config.output_dir together with summary.json.
RunSummary run_experiment(const ExperimentConfig& c,
                          const std::optional<std::filesystem::path>& cache_dir = std::nullopt,
                          bool write_csv = true);

/// exp of the least-squares slope of log(gap) against k over [begin, end].
/// Values <= floor (at least the nonpositive ones) and nonfinite values are
/// skipped; fewer than 3 points gives nullopt.
std::optional<double> fit_linear_rate(const std::vector<double>& gaps, long begin, long end, double floor = 0.0);

/// Round-off level of objective differences at the scale of `value`.
double gap_floor(double value);

}  // namespace qnsplit
