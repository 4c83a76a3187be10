#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "udisc/io.hpp"
#include "udisc/scenarios.hpp"
#include "udisc/solver.hpp"

namespace {

using namespace udisc;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt_vector(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt(v(i));
    }
    return out;
}

double kkt_tolerance() {
    const char* env = std::getenv("UDISC_TOL");
    if (env == nullptr || *env == '\0') return kKktTol;
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(tol > 0.0))
        throw ValidationError("UDISC_TOL", "UDISC_TOL must be a positive number");
    return tol;
}

/// Resolves a scenario name or ensemble file path. File priors, when
/// present, become the default priors.
Scenario resolve_source(const std::string& source,
                        std::optional<Eigen::VectorXd>& file_priors) {
    if (auto id = parse_scenario(source)) return builtin_scenario(*id);
    if (!std::filesystem::exists(source))
        throw UnknownScenario(
            "'" + source +
            "' is neither a built-in scenario (example1, example2, four-state, "
            "orthonormal-demo) nor an existing file");
    LoadedEnsemble loaded = load_ensemble(source);
    file_priors = loaded.ensemble.priors();
    return Scenario{source, loaded.ensemble.states(), loaded.space};
}

Eigen::VectorXd resolve_priors(const Scenario& scenario,
                               const std::optional<Eigen::VectorXd>& file_priors,
                               const std::vector<double>& prior_list,
                               const std::vector<double>& prior_ab, bool uniform) {
    if (!prior_list.empty())
        return Eigen::Map<const Eigen::VectorXd>(prior_list.data(),
                                                 static_cast<Eigen::Index>(prior_list.size()));
    if (!prior_ab.empty()) return two_parameter_priors(prior_ab[0], prior_ab[1]);
    if (!uniform && file_priors) return *file_priors;
    const auto n = static_cast<Eigen::Index>(scenario.states.size());
    return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

nlohmann::json matrix_json(const Eigen::MatrixXcd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json verdict_json(const NlweVerdict& v) {
    nlohmann::json doc;
    doc["verdict"] = to_string(v.verdict);
    doc["spans_full_space"] = v.assumptions.spans_full_space;
    doc["product_reciprocal_indices"] = nlohmann::json::array();
    for (int i : v.assumptions.product_reciprocal_indices)
        doc["product_reciprocal_indices"].push_back(i + 1);
    if (v.product_index) doc["product_index"] = *v.product_index + 1;
    if (v.margins.size() > 0)
        doc["margins"] = std::vector<double>(v.margins.begin(), v.margins.end());
    if (v.witness_priors)
        doc["witness_priors"] =
            std::vector<double>(v.witness_priors->begin(), v.witness_priors->end());
    if (v.witness_violating)
        doc["witness_violating"] =
            std::vector<double>(v.witness_violating->begin(), v.witness_violating->end());
    if (v.witness_zero_index) doc["witness_zero_index"] = *v.witness_zero_index + 1;
    return doc;
}

void print_report(const ScenarioReport& report, double tol) {
    std::cout << "scenario: " << report.name << '\n';
    std::cout << "states: " << report.ensemble.size() << "  dim: " << report.ensemble.dim();
    if (report.space) {
        std::cout << "  parties:";
        for (size_t k = 0; k < report.space->dims.size(); ++k)
            std::cout << (k ? "x" : " ") << report.space->dims[k];
    }
    std::cout << '\n';
    std::cout << "priors: " << fmt_vector(report.ensemble.priors()) << '\n';
    std::cout << "P_max: " << fmt(report.solution.p_max) << '\n';
    std::cout << "p*: " << fmt_vector(report.solution.p_star) << '\n';
    std::cout << "success caps: " << fmt_vector(success_caps(report.ensemble)) << '\n';
    std::cout << "newton iterations: " << report.solution.iterations << '\n';

    const KktReport& kkt = report.solution.kkt;
    std::cout << "KKT residuals: primal-sign " << fmt(kkt.primal_sign) << "  primal-spectral "
              << fmt(kkt.primal_spectral) << "  dual-psd " << fmt(kkt.dual_psd)
              << "  slackness " << fmt(kkt.dual_slackness) << "  stationarity "
              << fmt(kkt.stationarity) << "  detection " << fmt(kkt.dual_feasibility) << '\n';
    std::cout << "certified optimal within " << fmt(tol) << ": "
              << (kkt.optimal(tol) ? "yes" : "no") << '\n';

    if (!report.space) return;
    std::cout << "reciprocal product flags:";
    for (bool flag : report.reciprocal_is_product) std::cout << ' ' << (flag ? 1 : 0);
    std::cout << '\n';
    std::cout << "LOCC verdict: " << to_string(report.verdict.verdict) << '\n';
    if (report.verdict.product_index)
        std::cout << "locally detectable state: " << *report.verdict.product_index + 1 << '\n';
    if (report.classification) {
        std::cout << "prior-free classification: " << to_string(report.classification->verdict)
                  << '\n';
        if (report.classification->witness_zero_index)
            std::cout << "vanishing reciprocal overlap with state: "
                      << *report.classification->witness_zero_index + 1 << '\n';
        if (report.classification->witness_priors)
            std::cout << "LOCC-achieving priors: "
                      << fmt_vector(*report.classification->witness_priors) << '\n';
        if (report.classification->witness_violating)
            std::cout << "LOCC-breaking priors: "
                      << fmt_vector(*report.classification->witness_violating) << '\n';
    }
    std::cout << "multi-detection for all priors: "
              << (report.multi_detection.for_all_priors ? "yes" : "no") << '\n';
}

void write_json_report(const ScenarioReport& report, double tol, const std::string& path) {
    nlohmann::json doc;
    doc["scenario"] = report.name;
    doc["n"] = report.ensemble.size();
    doc["dim"] = report.ensemble.dim();
    if (report.space) doc["dims"] = report.space->dims;
    doc["priors"] =
        std::vector<double>(report.ensemble.priors().begin(), report.ensemble.priors().end());
    doc["p_star"] =
        std::vector<double>(report.solution.p_star.begin(), report.solution.p_star.end());
    doc["p_max"] = report.solution.p_max;
    doc["iterations"] = report.solution.iterations;
    doc["certificate_span_basis"] = matrix_json(report.solution.certificate);

    const KktReport& kkt = report.solution.kkt;
    doc["kkt"] = {{"primal_sign", kkt.primal_sign},
                  {"primal_spectral", kkt.primal_spectral},
                  {"dual_psd", kkt.dual_psd},
                  {"dual_slackness", kkt.dual_slackness},
                  {"stationarity", kkt.stationarity},
                  {"dual_feasibility", kkt.dual_feasibility},
                  {"max_residual", kkt.max_residual()},
                  {"tolerance", tol},
                  {"optimal", kkt.optimal(tol)}};

    if (report.space) {
        doc["reciprocal_is_product"] = report.reciprocal_is_product;
        doc["locc"] = verdict_json(report.verdict);
        if (report.classification) doc["classification"] = verdict_json(*report.classification);
    }
    doc["multi_detection_for_all_priors"] = report.multi_detection.for_all_priors;
    nlohmann::json pairs = nlohmann::json::array();
    for (auto [j, k] : report.multi_detection.zero_pairs) pairs.push_back({j + 1, k + 1});
    doc["zero_overlap_pairs"] = std::move(pairs);

    std::ofstream out(path);
    if (!out) throw Error("cannot write JSON report to " + path);
    out << doc.dump(2) << '\n';
}

int run_command(const std::string& source, const std::vector<double>& prior_list,
                const std::vector<double>& prior_ab, bool uniform,
                const std::string& json_path) {
    std::optional<Eigen::VectorXd> file_priors;
    const Scenario scenario = resolve_source(source, file_priors);
    const Eigen::VectorXd priors =
        resolve_priors(scenario, file_priors, prior_list, prior_ab, uniform);
    const double tol = kkt_tolerance();

    const ScenarioReport report = run_scenario(scenario, priors);
    print_report(report, tol);
    if (!json_path.empty()) write_json_report(report, tol, json_path);
    return 0;
}

int scan_command(int a_steps, int b_steps, const std::string& csv_path,
                 const std::string& svg_path) {
    const RegionScanResult result = region_scan(RegionScanConfig{a_steps, b_steps});

    std::ofstream csv(csv_path);
    if (!csv) throw Error("cannot write CSV to " + csv_path);
    write_region_csv(result, csv);

    if (!svg_path.empty()) {
        std::ofstream svg(svg_path);
        if (!svg) throw Error("cannot write SVG to " + svg_path);
        write_region_svg(result, svg);
    }

    long long locc = 0;
    for (bool cell : result.locc) locc += cell ? 1 : 0;
    const long long total = static_cast<long long>(result.locc.size());
    std::cout << "scan: " << a_steps << "x" << b_steps << " grid, " << locc << " LOCC / "
              << (total - locc) << " NLWE cells\n";
    std::cout << "csv: " << csv_path << '\n';
    if (!svg_path.empty()) std::cout << "svg: " << svg_path << '\n';
    return 0;
}

int mc_command(const std::string& source, int target_1based, long long trials,
               std::uint64_t seed, const std::vector<double>& prior_list,
               const std::vector<double>& prior_ab, bool uniform) {
    std::optional<Eigen::VectorXd> file_priors;
    const Scenario scenario = resolve_source(source, file_priors);
    if (!scenario.space)
        throw ValidationError("dims", "Monte Carlo needs a multipartite tensor factorization");
    const Eigen::VectorXd priors =
        resolve_priors(scenario, file_priors, prior_list, prior_ab, uniform);

    const Ensemble ensemble(scenario.states, priors);
    if (target_1based < 1 || target_1based > ensemble.size())
        throw ValidationError("target", "target must be between 1 and " +
                                            std::to_string(ensemble.size()));
    const int target = target_1based - 1;

    const LoccProtocol protocol = build_locc_protocol(ensemble, *scenario.space, target);
    const LoccSimulation sim = simulate_locc(protocol, ensemble, trials, seed);

    const double analytic = priors(target) * success_caps(ensemble)(target);
    const double sigma = std::sqrt(analytic * (1.0 - analytic) /
                                   static_cast<double>(trials));
    std::cout << "scenario: " << scenario.name << '\n';
    std::cout << "target: " << target_1based << "  trials: " << trials << "  seed: " << seed
              << '\n';
    std::cout << "local measurement states:";
    for (const Ket& phi : protocol.local_states) std::cout << " [" << fmt_vector(phi.amplitudes.real()) << "]";
    std::cout << '\n';
    std::cout << "empirical success: " << fmt(sim.empirical_success) << '\n';
    std::cout << "analytic success: " << fmt(analytic) << '\n';
    std::cout << "z-score: " << fmt((sim.empirical_success - analytic) / sigma) << '\n';
    std::cout << "wrong-state conclusive events: " << sim.error_count << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "udisc: optimal unambiguous discrimination of linearly independent pure states.\n"
        "Certifies optimality through KKT residuals and, for multipartite product\n"
        "ensembles, decides whether the optimum is achievable with local measurements.\n"
        "UDISC_TOL overrides the KKT certification threshold (default 1e-6)."};
    app.require_subcommand(1);

    std::string source, json_path, csv_path, svg_path;
    std::vector<double> prior_list, prior_ab;
    bool uniform = false;
    int a_steps = 201, b_steps = 201, target = 1;
    long long trials = 1000000;
    std::uint64_t seed = 1;

    CLI::App* run = app.add_subcommand("run", "solve one ensemble and report all verdicts");
    run->add_option("source", source, "scenario name or ensemble JSON file")->required();
    auto* opt_priors =
        run->add_option("--priors", prior_list, "explicit priors p1,...,pn")->delimiter(',');
    auto* opt_ab = run->add_option("--priors-ab", prior_ab,
                                   "two-parameter prior family (six-state scenarios)")
                       ->expected(2);
    auto* opt_uniform = run->add_flag("--uniform", uniform, "uniform priors 1/n");
    opt_priors->excludes(opt_ab)->excludes(opt_uniform);
    opt_ab->excludes(opt_uniform);
    run->add_option("--json", json_path, "also write the full report as JSON");

    CLI::App* scan = app.add_subcommand(
        "scan", "LOCC/NLWE phase diagram of the six-state prior family");
    scan->add_option("--a-steps", a_steps, "grid steps along a")->check(CLI::Range(2, 100000));
    scan->add_option("--b-steps", b_steps, "grid steps along b")->check(CLI::Range(2, 100000));
    scan->add_option("--csv", csv_path, "output CSV path")->required();
    scan->add_option("--svg", svg_path, "optional SVG heatmap path");

    CLI::App* mc = app.add_subcommand(
        "mc", "Monte Carlo run of the local detection protocol for one target state");
    mc->add_option("source", source, "scenario name or ensemble JSON file")->required();
    mc->add_option("--target", target, "target state (1-based)");
    mc->add_option("--trials", trials, "number of simulated preparations")
        ->check(CLI::PositiveNumber);
    mc->add_option("--seed", seed, "RNG seed");
    auto* mc_priors =
        mc->add_option("--priors", prior_list, "explicit priors p1,...,pn")->delimiter(',');
    auto* mc_ab = mc->add_option("--priors-ab", prior_ab,
                                 "two-parameter prior family (six-state scenarios)")
                      ->expected(2);
    auto* mc_uniform = mc->add_flag("--uniform", uniform, "uniform priors 1/n");
    mc_priors->excludes(mc_ab)->excludes(mc_uniform);
    mc_ab->excludes(mc_uniform);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return run_command(source, prior_list, prior_ab, uniform, json_path);
        if (scan->parsed()) return scan_command(a_steps, b_steps, csv_path, svg_path);
        if (mc->parsed())
            return mc_command(source, target, trials, seed, prior_list, prior_ab, uniform);
    } catch (const NoConvergence& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
