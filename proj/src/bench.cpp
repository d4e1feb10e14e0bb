#include "qnsplit/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qnsplit {

using nlohmann::json;

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::ifbs: return "ifbs";
        case Algorithm::qn_fbs: return "qn-fbs";
        case Algorithm::rqn_fbs: return "rqn-fbs";
        case Algorithm::iqn_fbs: return "iqn-fbs";
        default: return "fbs";
    }
}

const std::vector<Algorithm>& all_algorithms() {
    static const std::vector<Algorithm> all{Algorithm::fbs, Algorithm::ifbs, Algorithm::qn_fbs, Algorithm::rqn_fbs,
                                            Algorithm::iqn_fbs};
    return all;
}

Algorithm parse_algorithm(const std::string& s) {
    for (auto a : all_algorithms())
        if (to_string(a) == s) return a;
    throw ConfigError("unknown algorithm '" + s + "'");
}

std::vector<Algorithm> parse_algorithm_list(const std::string& csv) {
    std::vector<Algorithm> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_algorithm(item));
    if (out.empty()) throw ConfigError("algorithm list is empty");
    return out;
}

ExperimentConfig preset(ImageFamily family) {
    ExperimentConfig c;
    c.name = to_string(family);
    c.problem.family = family;
    c.algorithms = all_algorithms();
    c.metric.mode = MetricMode::fixed;
    switch (family) {
        case ImageFamily::deconvolution:
            c.problem.mu = 0.001;
            c.problem.tau = 0.09;
            c.problem.sigma = 0.9;
            c.metric.gamma_hat = 5.0;
            c.alpha.kind = AlphaKind::fig1;
            break;
        case ImageFamily::infconv:
            c.problem.mu = 0.01;
            c.problem.tau = 0.1;
            c.problem.sigma = 0.1;
            c.metric.gamma_hat = 2.0;
            c.alpha.kind = AlphaKind::fig2;
            break;
        case ImageFamily::denoising:
            c.problem.mu = 0.1;
            c.problem.tau = 0.1;
            c.problem.sigma = 0.1;
            c.metric.gamma_hat = 2.0;
            c.alpha.kind = AlphaKind::fig3;
            break;
    }
    return c;
}

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "' in " + where + ": " + e.what());
    }
}

template <class F>
auto wrap(F&& f) {
    try {
        return f();
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j, {"schema", "name", "problem", "algorithms", "iterations", "metric", "alpha", "root",
                       "reference_iterations", "rate_window", "output_dir", "timing"},
                   "config");
    if (!j.contains("schema") || !j["schema"].is_string() || j["schema"].get<std::string>() != kConfigSchema)
        throw ConfigError(std::string("config schema must be \"") + kConfigSchema + "\"");
    if (!j.contains("problem")) throw ConfigError("config needs a problem section");
    const json& jp = j["problem"];
    reject_unknown(jp, {"family", "rows", "cols", "phantom", "image", "noise_sigma", "seed", "mu", "tau", "sigma",
                        "kernel_size", "kernel_sigma", "weight_scale"},
                   "problem");
    std::string family = "deconvolution";
    read(jp, "family", family, "problem");
    ExperimentConfig c = preset(wrap([&] { return parse_image_family(family); }));
    read(j, "name", c.name, "config");

    ProblemSpec& p = c.problem;
    read(jp, "rows", p.rows, "problem");
    read(jp, "cols", p.cols, "problem");
    std::string phantom = to_string(p.phantom);
    read(jp, "phantom", phantom, "problem");
    p.phantom = wrap([&] { return parse_phantom(phantom); });
    read(jp, "image", p.image, "problem");
    read(jp, "noise_sigma", p.noise_sigma, "problem");
    read(jp, "seed", p.seed, "problem");
    read(jp, "mu", p.mu, "problem");
    read(jp, "tau", p.tau, "problem");
    read(jp, "sigma", p.sigma, "problem");
    read(jp, "kernel_size", p.kernel_size, "problem");
    read(jp, "kernel_sigma", p.kernel_sigma, "problem");
    read(jp, "weight_scale", p.weight_scale, "problem");
    if (p.rows < 1 || p.cols < 1) throw ConfigError("image size must be positive");
    if (!(p.mu > 0.0) || !(p.tau > 0.0) || !(p.sigma > 0.0)) throw ConfigError("mu, tau and sigma must be positive");

    if (j.contains("algorithms")) {
        if (!j["algorithms"].is_array()) throw ConfigError("algorithms must be an array");
        c.algorithms.clear();
        for (const auto& a : j["algorithms"]) {
            if (!a.is_string()) throw ConfigError("algorithm names must be strings");
            c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
        }
        if (c.algorithms.empty()) throw ConfigError("algorithm list is empty");
    }
    read(j, "iterations", c.iterations, "config");
    if (c.iterations < 1) throw ConfigError("iterations must be at least 1");

    if (j.contains("metric")) {
        const json& jm = j["metric"];
        reject_unknown(jm, {"mode", "gamma_hat", "c", "eta0", "spd_cap"}, "metric");
        std::string mode = to_string(c.metric.mode);
        read(jm, "mode", mode, "metric");
        c.metric.mode = wrap([&] { return parse_metric_mode(mode); });
        read(jm, "gamma_hat", c.metric.gamma_hat, "metric");
        read(jm, "c", c.metric.c, "metric");
        read(jm, "eta0", c.metric.eta0, "metric");
        read(jm, "spd_cap", c.metric.spd_cap, "metric");
    }
    if (j.contains("alpha")) {
        const json& ja = j["alpha"];
        reject_unknown(ja, {"kind", "value", "lambda"}, "alpha");
        std::string kind = to_string(c.alpha.kind);
        read(ja, "kind", kind, "alpha");
        c.alpha.kind = wrap([&] { return parse_alpha_kind(kind); });
        read(ja, "value", c.alpha.value, "alpha");
        read(ja, "lambda", c.alpha.lambda, "alpha");
        if (!(c.alpha.lambda > 0.0)) throw ConfigError("alpha lambda must be positive");
    }
    if (j.contains("root")) {
        const json& jr = j["root"];
        reject_unknown(jr, {"residual_tol", "width_rel", "newton_max", "bisection_max", "switch_width",
                            "newton_eta", "tolerance_schedule"},
                       "root");
        read(jr, "residual_tol", c.root.residual_tol, "root");
        read(jr, "width_rel", c.root.width_rel, "root");
        read(jr, "newton_max", c.root.newton_max, "root");
        read(jr, "bisection_max", c.root.bisection_max, "root");
        read(jr, "switch_width", c.root.switch_width, "root");
        read(jr, "newton_eta", c.root.newton_eta, "root");
        read(jr, "tolerance_schedule", c.root_tol_schedule, "root");
    }
    read(j, "reference_iterations", c.reference_iterations, "config");
    if (c.reference_iterations < 1) throw ConfigError("reference_iterations must be at least 1");
    if (j.contains("rate_window")) {
        const json& w = j["rate_window"];
        if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() || !w[1].is_number_integer())
            throw ConfigError("rate_window must be [begin, end]");
        c.rate_window_begin = w[0].get<long>();
        c.rate_window_end = w[1].get<long>();
        if (c.rate_window_begin < 0 || c.rate_window_end < c.rate_window_begin)
            throw ConfigError("rate_window must satisfy 0 <= begin <= end");
    }
    read(j, "output_dir", c.output_dir, "config");
    read(j, "timing", c.timing, "config");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["schema"] = kConfigSchema;
    j["name"] = c.name;
    const ProblemSpec& p = c.problem;
    j["problem"] = {{"family", to_string(p.family)},
                    {"rows", p.rows},
                    {"cols", p.cols},
                    {"phantom", to_string(p.phantom)},
                    {"image", p.image},
                    {"noise_sigma", p.noise_sigma},
                    {"seed", p.seed},
                    {"mu", p.mu},
                    {"tau", p.tau},
                    {"sigma", p.sigma},
                    {"kernel_size", p.kernel_size},
                    {"kernel_sigma", p.kernel_sigma},
                    {"weight_scale", p.weight_scale}};
    j["algorithms"] = json::array();
    for (auto a : c.algorithms) j["algorithms"].push_back(to_string(a));
    j["iterations"] = c.iterations;
    j["metric"] = {{"mode", to_string(c.metric.mode)},
                   {"gamma_hat", c.metric.gamma_hat},
                   {"c", c.metric.c},
                   {"eta0", c.metric.eta0},
                   {"spd_cap", c.metric.spd_cap}};
    j["alpha"] = {{"kind", to_string(c.alpha.kind)}, {"value", c.alpha.value}, {"lambda", c.alpha.lambda}};
    j["root"] = {{"residual_tol", c.root.residual_tol},   {"width_rel", c.root.width_rel},
                 {"newton_max", c.root.newton_max},       {"bisection_max", c.root.bisection_max},
                 {"switch_width", c.root.switch_width},   {"newton_eta", c.root.newton_eta},
                 {"tolerance_schedule", c.root_tol_schedule}};
    j["reference_iterations"] = c.reference_iterations;
    j["rate_window"] = {c.rate_window_begin, c.rate_window_end};
    j["output_dir"] = c.output_dir;
    j["timing"] = c.timing;
    return j.dump(2);
}

ImageProblem build_problem(const ProblemSpec& spec) {
    return wrap([&] {
        Image clean;
        if (!spec.image.empty()) {
            try {
                clean = read_pgm(spec.image);
            } catch (const PgmError& e) {
                throw IoError(e.what());
            }
        } else {
            clean = make_phantom(spec.phantom, spec.rows, spec.cols);
        }
        Matrix kernel;
        if (spec.family != ImageFamily::denoising) kernel = gaussian_kernel(spec.kernel_size, spec.kernel_sigma);
        Image observed = clean;
        if (kernel.size() > 0)
            observed.pixels = build_blur_op(kernel, clean.rows, clean.cols)->apply(clean.pixels);
        observed = add_gaussian_noise(observed, spec.noise_sigma, spec.seed);
        switch (spec.family) {
            case ImageFamily::deconvolution:
                return build_deconvolution(observed, spec.mu, spec.tau, spec.sigma, kernel);
            case ImageFamily::infconv:
                return build_infconv(observed, spec.mu, edge_weights(observed, spec.weight_scale), spec.tau,
                                     spec.sigma, kernel);
            default:
                return build_denoising(observed, spec.mu, edge_weights(observed, spec.weight_scale), spec.tau,
                                       spec.sigma);
        }
    });
}

namespace {

struct Fnv {
    std::uint64_t h = 1469598103934665603ull;
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 1099511628211ull;
        }
    }
    void num(double v) { bytes(&v, sizeof v); }
    void num(long v) { bytes(&v, sizeof v); }
    void vec(const Vector& v) {
        num(static_cast<long>(v.size()));
        bytes(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
    }
};

}  // namespace

std::string problem_hash(const ImageProblem& p, long n_iters) {
    Fnv f;
    const std::string fam = to_string(p.family);
    f.bytes(fam.data(), fam.size());
    f.num(static_cast<long>(p.b.rows));
    f.num(static_cast<long>(p.b.cols));
    f.vec(p.b.pixels);
    f.num(p.mu);
    f.num(p.tau);
    f.num(p.sigma);
    f.vec(p.w);
    // The data operator is fingerprinted through its action on a probe.
    Vector probe(p.b.pixels.size());
    for (Eigen::Index i = 0; i < probe.size(); ++i) probe[i] = std::sin(0.37 * static_cast<double>(i) + 0.1);
    f.vec(p.a->apply(probe));
    f.num(n_iters);
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << f.h;
    return os.str();
}

std::optional<std::filesystem::path> cache_dir_from_env() {
    const char* v = std::getenv("QNSPLIT_CACHE_DIR");
    if (!v || !*v) return std::nullopt;
    return std::filesystem::path(v);
}

ReferenceValue reference_gap(const ImageProblem& p, long n_iters,
                             const std::optional<std::filesystem::path>& cache_dir) {
    if (n_iters < 1) throw ParameterError("reference needs at least one iteration");
    std::filesystem::path file;
    if (cache_dir) {
        file = *cache_dir / ("reference-" + problem_hash(p, n_iters) + ".json");
        std::ifstream in(file);
        if (in) {
            try {
                json j = json::parse(in);
                ReferenceValue r;
                r.primal = j.at("primal").get<double>();
                if (j.contains("dual") && !j["dual"].is_null()) r.dual = j["dual"].get<double>();
                r.iterations = j.at("iterations").get<long>();
                r.from_cache = true;
                return r;
            } catch (const json::exception&) {
                // unreadable cache entries are recomputed and overwritten
            }
        }
    }
    ReferenceValue r;
    r.primal = std::numeric_limits<double>::infinity();
    if (p.has_dual()) r.dual = -std::numeric_limits<double>::infinity();
    r.iterations = n_iters;
    SolverConfig cfg;
    cfg.max_iter = n_iters;
    cfg.stop_tol = 0.0;
    const Eigen::Index n = p.saddle.primal_dim(), d = p.saddle.dual_dim();
    run_iqn_pdhg(p.saddle, p.metric(), p.initial_point(), cfg,
                 [&](const IterateRecord&, const Vector& z, const Vector&) {
                     r.primal = std::min(r.primal, primal_value(p, z.head(n)));
                     if (r.dual) r.dual = std::max(*r.dual, dual_value(p, z.tail(d)));
                 });
    if (cache_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*cache_dir, ec);
        if (ec) throw IoError("cannot create cache directory " + cache_dir->string() + ": " + ec.message());
        json j;
        j["primal"] = r.primal;
        j["dual"] = r.dual ? json(*r.dual) : json(nullptr);
        j["iterations"] = n_iters;
        std::ofstream out(file);
        if (!out) throw IoError("cannot write cache file " + file.string());
        out << std::setprecision(17) << j.dump(2) << '\n';
    }
    return r;
}

SolverConfig solver_config_for(Algorithm a, const ExperimentConfig& c) {
    SolverConfig s;
    s.max_iter = c.iterations;
    s.stop_tol = 0.0;
    s.root = c.root;
    s.root_tol_schedule = c.root_tol_schedule;
    const bool metric = a == Algorithm::qn_fbs || a == Algorithm::rqn_fbs || a == Algorithm::iqn_fbs;
    const bool inertia = a == Algorithm::ifbs || a == Algorithm::iqn_fbs;
    s.variant = a == Algorithm::rqn_fbs ? SolverVariant::relaxed : SolverVariant::inertial;
    if (metric) s.metric = c.metric;
    if (inertia) s.alpha = c.alpha;
    return s;
}

std::optional<long> AlgorithmRun::first_below(const std::vector<double>& series, double threshold) {
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series[i] <= threshold) return static_cast<long>(i);
    return std::nullopt;
}

double gap_floor(double value) { return 1e-12 * (1.0 + std::abs(value)); }

std::optional<double> fit_linear_rate(const std::vector<double>& gaps, long begin, long end, double floor) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    const long last = std::min<long>(end, static_cast<long>(gaps.size()) - 1);
    for (long k = std::max<long>(begin, 0); k <= last; ++k) {
        const double g = gaps[static_cast<std::size_t>(k)];
        if (!(g > std::max(floor, 0.0)) || !std::isfinite(g)) continue;
        const double x = static_cast<double>(k), y = std::log(g);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3) return std::nullopt;
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    return std::exp((n * sxy - sx * sy) / denom);
}

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

std::string RunSummary::to_json() const {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["name"] = name;
    j["family"] = to_string(family);
    j["reference_primal"] = num(reference.primal);
    j["reference_dual"] = reference.dual ? num(*reference.dual) : json(nullptr);
    j["initial_primal"] = num(initial_primal);
    j["initial_gap"] = num(initial_gap);
    j["runs"] = json::array();
    for (const auto& r : runs) {
        json jr;
        jr["algorithm"] = to_string(r.algorithm);
        jr["iterations"] = r.iter.size();
        jr["final_primal"] = r.primal.empty() ? json(nullptr) : num(r.primal.back());
        jr["final_gap"] = r.gap.empty() ? json(nullptr) : num(r.gap.back());
        jr["final_pd_gap"] = r.pd_gap.empty() ? json(nullptr) : num(r.pd_gap.back());
        jr["rate"] = r.rate ? json(*r.rate) : json(nullptr);
        double total = 0.0;
        for (double t : r.time_ms) total += t;
        jr["time_ms"] = total;
        jr["csv"] = r.csv.string();
        j["runs"].push_back(jr);
    }
    return j.dump(2);
}

RunSummary run_experiment(const ExperimentConfig& c, const std::optional<std::filesystem::path>& cache_dir,
                          bool write_csv) {
    if (c.algorithms.empty()) throw ConfigError("no algorithms selected");
    if (c.iterations < 1) throw ConfigError("iterations must be at least 1");
    if (c.alpha.kind == AlphaKind::fig2 &&
        std::find_if(c.algorithms.begin(), c.algorithms.end(), [](Algorithm a) {
            return a == Algorithm::ifbs || a == Algorithm::iqn_fbs;
        }) != c.algorithms.end())
        std::cerr << "warning: alpha schedule fig2 keeps alpha_k >= 1 and is not summable\n";

    const ImageProblem p = build_problem(c.problem);
    RunSummary summary;
    summary.name = c.name;
    summary.family = p.family;
    summary.reference = reference_gap(p, c.reference_iterations, cache_dir);
    summary.initial_primal = primal_value(p, p.b.pixels);
    summary.initial_gap = summary.initial_primal - summary.reference.primal;

    const std::filesystem::path out_dir(c.output_dir);
    if (write_csv) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
    }
    const Eigen::Index n = p.saddle.primal_dim(), d = p.saddle.dual_dim();
    const PdhgMetric metric = p.metric();

    for (Algorithm alg : c.algorithms) {
        AlgorithmRun run;
        run.algorithm = alg;
        std::ofstream csv;
        if (write_csv) {
            run.csv = out_dir / (to_string(alg) + ".csv");
            csv.open(run.csv);
            if (!csv) throw IoError("cannot write " + run.csv.string());
            csv << kCsvHeader << '\n';
        }
        const SolverConfig sc = solver_config_for(alg, c);
        auto observer = [&](const IterateRecord& rec, const Vector&, const Vector& fb) {
            const GapReport g = pd_gap(p, fb.head(n), fb.tail(d), summary.reference.primal);
            const double t = c.timing ? rec.time_ms : 0.0;
            run.iter.push_back(rec.k);
            run.time_ms.push_back(t);
            run.primal.push_back(g.primal);
            run.gap.push_back(g.gap);
            run.pd_gap.push_back(g.pd_gap);
            if (write_csv)
                csv << rec.k << ',' << fmt(t) << ',' << fmt(g.primal) << ',' << fmt(g.gap) << ',' << fmt(g.pd_gap)
                    << ',' << fmt(rec.step_param) << ',' << rec.root_iterations << ','
                    << to_string(rec.metric_sign) << ',' << fmt(rec.diff_norm) << '\n';
        };
        if (sc.variant == SolverVariant::relaxed) run_rqn_pdhg(p.saddle, metric, p.initial_point(), sc, observer);
        else run_iqn_pdhg(p.saddle, metric, p.initial_point(), sc, observer);
        if (write_csv && !csv) throw IoError("failed writing " + run.csv.string());
        run.rate = fit_linear_rate(p.has_dual() ? run.pd_gap : run.gap, c.rate_window_begin, c.rate_window_end,
                                   gap_floor(summary.reference.primal));
        summary.runs.push_back(std::move(run));
    }
    if (write_csv) {
        std::ofstream js(out_dir / "summary.json");
        if (!js) throw IoError("cannot write summary.json");
        js << summary.to_json() << '\n';
    }
    return summary;
}

}  // namespace qnsplit
