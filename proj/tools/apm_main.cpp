#include "apm/associated.hpp"
#include "apm/classify.hpp"
#include "apm/geometry.hpp"
#include "apm/search.hpp"
#include "apm/specfile.hpp"
#include "apm/theorems.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitSpecError = 2;
constexpr int kExitNumericError = 3;

std::vector<double> parse_csv_vector(const std::string& csv, int dim, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw apm::SpecError(what + ": cannot parse '" + item + "' as a number");
        }
    }
    if (static_cast<int>(out.size()) != dim)
        throw apm::SpecError(what + ": expected " + std::to_string(dim) + " components, got " +
                             std::to_string(out.size()));
    return out;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw apm::SpecError("cannot write output file '" + out_path + "'");
    out << text;
}

long elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 start)
        .count();
}

struct CommonFlags {
    int points = -1;
    std::uint64_t seed = 0;
    std::string format = "text";
    std::string out_path;
    bool timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--points", flags.points, "sample points (chart default 20, lie_group 1)");
    cmd->add_option("--seed", flags.seed, "root seed for all randomness");
    cmd->add_option("--format", flags.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--out", flags.out_path, "write the report to this file instead of stdout");
    cmd->add_flag("--timing", flags.timing,
                  "measure wall time into timing_ms (off keeps reports byte-stable)");
}

int run_classify(const std::string& file, const CommonFlags& flags, double tol) {
    const auto start = std::chrono::steady_clock::now();
    const apm::ManifoldSpec spec = apm::load_spec_file(file);
    apm::SampleConfig config;
    if (flags.points > 0) config.points = flags.points;
    else if (!spec.is_lie()) config.points = 20;
    else config.points = 1;
    config.seed = flags.seed;
    config.tolerance = tol;
    const apm::ClassificationReport report = apm::classify(spec, config);
    apm::ReportMeta meta{flags.seed, flags.timing ? elapsed_ms(start) : 0};
    emit(flags.format == "json" ? apm::classification_to_json(spec.name, report, meta)
                                : apm::classification_to_text(spec.name, report),
         flags.out_path);
    return kExitOk;
}

int run_verify(const std::string& file, const CommonFlags& flags, const std::string& suite,
               int tuples) {
    const auto start = std::chrono::steady_clock::now();
    const apm::ManifoldSpec spec = apm::load_spec_file(file);
    apm::SuiteConfig config;
    config.points = flags.points;
    config.seed = flags.seed;
    config.tuples = tuples;
    if (suite != "all") {
        std::stringstream ss(suite);
        std::string id;
        while (std::getline(ss, id, ',')) config.only.push_back(id);
    }
    const apm::TheoremReport report = apm::run_suite(spec, config);
    apm::ReportMeta meta{flags.seed, flags.timing ? elapsed_ms(start) : 0};
    emit(flags.format == "json" ? apm::report_to_json(report, meta)
                                : apm::report_to_text(report),
         flags.out_path);
    return report.any_fail ? kExitNumericError : kExitOk;
}

int run_search(int dim, const std::string& target, double floor, long budget,
               std::uint64_t seed, const std::string& out_path, bool fd_gradient) {
    apm::SearchProblem problem;
    problem.dim = dim;
    problem.target = apm::parse_target(target);
    problem.floor_f2 = floor;
    problem.fd_gradient = fd_gradient;
    const apm::SearchResult result = apm::synthesize(problem, budget, seed);

    apm::ManifoldSpec spec;
    std::string name = out_path;
    if (const auto slash = name.find_last_of('/'); slash != std::string::npos)
        name = name.substr(slash + 1);
    if (const auto dot = name.find_last_of('.'); dot != std::string::npos)
        name = name.substr(0, dot);
    spec.name = name.empty() ? "searched" : name;
    spec.backend = result.best_spec;
    apm::write_spec_file(spec, out_path);

    nlohmann::ordered_json sidecar;
    sidecar["target"] = target;
    sidecar["dim"] = dim;
    sidecar["seed"] = seed;
    sidecar["budget"] = budget;
    sidecar["iterations"] = result.iterations;
    sidecar["converged"] = result.converged;
    sidecar["best_start"] = result.best_start;
    sidecar["penalties"] = {{"jacobi", result.terms.jacobi},
                            {"class_w3", result.terms.class_w3},
                            {"compat", result.terms.compat},
                            {"f_norm2", result.terms.f2},
                            {"floor_gap", result.terms.floor_gap},
                            {"target_extra", result.terms.target_extra},
                            {"objective", result.terms.objective}};
    std::ofstream side(out_path + ".result.json", std::ios::binary);
    if (!side) throw apm::SpecError("cannot write sidecar next to '" + out_path + "'");
    side << sidecar.dump(2) << "\n";

    std::fprintf(stderr, "search %s: %s (objective %.3e, ||F||^2 %.4f, %ld evaluations)\n",
                 target.c_str(), result.converged ? "converged" : "budget exhausted",
                 result.terms.objective, result.terms.f2, result.iterations);
    return result.converged ? kExitOk : kExitNotConverged;
}

int run_eval(const std::string& file, const std::string& point_csv, const std::string& quantity,
             const std::string& vectors_csv, std::uint64_t seed) {
    (void)seed;
    const apm::ManifoldSpec spec = apm::load_spec_file(file);
    const int d = spec.dim();
    std::vector<double> point(static_cast<std::size_t>(d), 0.0);
    if (!point_csv.empty()) point = parse_csv_vector(point_csv, d, "--point");

    const apm::PointFrame frame = apm::frame_at(spec, point);
    const apm::ConnectionAtPoint conn = apm::levi_civita(frame);
    const apm::CurvatureAtPoint curv = apm::curvature_package(frame, conn);

    std::vector<std::vector<double>> vectors;
    if (!vectors_csv.empty()) {
        std::stringstream ss(vectors_csv);
        std::string one;
        while (std::getline(ss, one, ';'))
            vectors.push_back(parse_csv_vector(one, d, "--vectors"));
    }

    const auto print_scalar = [](double v) { std::printf("%.17g\n", v); };
    if (quantity == "tau") {
        print_scalar(curv.tau);
    } else if (quantity == "taustar") {
        print_scalar(curv.tau_star);
    } else if (quantity == "taustarstar") {
        print_scalar(curv.tau_star_star);
    } else if (quantity == "normnablaP") {
        print_scalar(curv.norm_nabla_P);
    } else if (quantity == "F") {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    std::printf("F[%d][%d][%d] = %.17g\n", i + 1, j + 1, k + 1, curv.F(i, j, k));
    } else if (quantity == "R") {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l)
                        std::printf("R[%d][%d][%d][%d] = %.17g\n", i + 1, j + 1, k + 1, l + 1,
                                    curv.R(i, j, k, l));
    } else if (quantity == "rho") {
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                std::printf("rho[%d][%d] = %.17g\n", i + 1, j + 1, curv.rho(i, j));
    } else if (quantity == "h") {
        if (vectors.size() != 2)
            throw apm::SpecError("--quantity h needs --vectors \"x1,..,xd;y1,..,yd\"");
        print_scalar(apm::bisectional(frame, curv, vectors[0], vectors[1]));
    } else if (quantity == "k") {
        if (vectors.size() != 2)
            throw apm::SpecError("--quantity k needs --vectors \"x1,..,xd;y1,..,yd\"");
        print_scalar(apm::sectional(frame, curv, vectors[0], vectors[1]));
    } else if (quantity == "theta") {
        for (int i = 0; i < d; ++i) std::printf("theta[%d] = %.17g\n", i + 1, curv.theta(i));
    } else {
        throw apm::SpecError("unknown quantity '" + quantity +
                             "' (expected F|R|rho|theta|tau|taustar|taustarstar|normnablaP|k|h)");
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for Riemannian almost product manifolds"};
    app.require_subcommand(1);

    // classify
    auto* classify_cmd =
        app.add_subcommand("classify", "class membership (W0 / W1+W2 / W3) of a manifold spec");
    std::string classify_file;
    CommonFlags classify_flags;
    double classify_tol = -1.0;
    classify_cmd->add_option("file", classify_file, "manifold spec file")->required();
    add_common(classify_cmd, classify_flags);
    classify_cmd->add_option("--tol", classify_tol, "classification tolerance (normalized)");

    // verify
    auto* verify_cmd =
        app.add_subcommand("verify", "run the identity/theorem battery against a manifold spec");
    std::string verify_file, verify_suite = "all";
    CommonFlags verify_flags;
    int verify_tuples = 50;
    verify_cmd->add_option("file", verify_file, "manifold spec file")->required();
    add_common(verify_cmd, verify_flags);
    verify_cmd->add_option("--suite", verify_suite, "all or comma-separated check ids");
    verify_cmd->add_option("--tuples", verify_tuples, "random vector tuples per identity");

    // search
    auto* search_cmd = app.add_subcommand(
        "search", "synthesize an invariant-frame example by penalty minimization");
    int search_dim = 4;
    std::string search_target = "w3", search_out = "searched.json";
    double search_floor = 0.1;
    long search_budget = 200000;
    std::uint64_t search_seed = 0;
    bool search_fd = false;
    search_cmd->add_option("--dim", search_dim, "dimension (even, >= 4)");
    search_cmd->add_option("--target", search_target, "w0|w3|s-zero|l-zero");
    search_cmd->add_option("--floor", search_floor, "required ||F||^2 lower bound");
    search_cmd->add_option("--budget", search_budget, "objective evaluation budget");
    search_cmd->add_option("--seed", search_seed, "root seed");
    search_cmd->add_option("--out", search_out, "output spec file (sidecar gets .result.json)");
    search_cmd->add_flag("--fd-grad", search_fd, "finite-difference gradient polish stage");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "print one geometric quantity at a point");
    std::string eval_file, eval_point, eval_quantity = "tau", eval_vectors;
    std::uint64_t eval_seed = 0;
    eval_cmd->add_option("file", eval_file, "manifold spec file")->required();
    eval_cmd->add_option("--point", eval_point, "comma-separated chart coordinates");
    eval_cmd->add_option("--quantity", eval_quantity,
                         "F|R|rho|theta|tau|taustar|taustarstar|normnablaP|k|h");
    eval_cmd->add_option("--vectors", eval_vectors,
                         "semicolon-separated comma vectors (for k and h)");
    eval_cmd->add_option("--seed", eval_seed, "root seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitSpecError;
    }

    try {
        if (classify_cmd->parsed()) return run_classify(classify_file, classify_flags, classify_tol);
        if (verify_cmd->parsed())
            return run_verify(verify_file, verify_flags, verify_suite, verify_tuples);
        if (search_cmd->parsed())
            return run_search(search_dim, search_target, search_floor, search_budget, search_seed,
                              search_out, search_fd);
        if (eval_cmd->parsed())
            return run_eval(eval_file, eval_point, eval_quantity, eval_vectors, eval_seed);
    } catch (const apm::SpecError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return kExitSpecError;
    } catch (const apm::ParseError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return kExitSpecError;
    } catch (const apm::NumericError& err) {
        std::fprintf(stderr, "numeric error: %s\n", err.what());
        return kExitNumericError;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "internal error: %s\n", err.what());
        return kExitNumericError;
    }
    return kExitOk;
}
