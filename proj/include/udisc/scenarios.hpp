#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "udisc/ensemble.hpp"
#include "udisc/nlwe.hpp"
#include "udisc/solver.hpp"
#include "udisc/tensor.hpp"

namespace udisc {

enum class ScenarioId { Example1, Example2, FourState, OrthonormalDemo };

std::optional<ScenarioId> parse_scenario(std::string_view name);
std::string scenario_name(ScenarioId id);

/// States of a built-in scenario, hard-coded from integer-ratio amplitudes.
struct Scenario {
    std::string name;
    std::vector<Ket> states;
    std::optional<TensorSpace> space;
};

Scenario builtin_scenario(ScenarioId id);

/// Two-parameter prior family over the six-state scenarios:
/// ξ1 = ξ2 = 9a/143, ξ3 = 18(1-a)/143, ξ4 = 25b/143, ξ5 = 100b/143,
/// ξ6 = 125(1-b)/143, with a, b in (0, 1).
Eigen::VectorXd two_parameter_priors(double a, double b);

/// Everything `run` reports for one ensemble at fixed priors.
struct ScenarioReport {
    std::string name;
    Ensemble ensemble;
    std::optional<TensorSpace> space;
    std::vector<bool> reciprocal_is_product;  // empty when no tensor structure
    UdSolution solution;
    NlweVerdict verdict;                      // at the given priors
    std::optional<NlweVerdict> classification;  // prior-free, product bases only
    MultiDetectionReport multi_detection;
};

ScenarioReport run_scenario(const Scenario& scenario, const Eigen::VectorXd& priors);

struct RegionScanConfig {
    int a_steps = 2;
    int b_steps = 2;
};

/// Row-major grid of LOCC-achievability verdicts for the six-state
/// prior family, a varying fastest.
struct RegionScanResult {
    std::vector<double> a_values;
    std::vector<double> b_values;
    std::vector<bool> locc;  // size a_steps * b_steps, index = bi * a_steps + ai

    bool cell(int ai, int bi) const { return locc[static_cast<size_t>(bi) * a_values.size() + ai]; }
};

/// Evaluates the detect-only-one condition of the first scenario ensemble at
/// every grid point (a_i, b_j), a_i = i/(a_steps+1). Grid cells are
/// processed in parallel; output order is deterministic.
RegionScanResult region_scan(const RegionScanConfig& config);

/// CSV with header `a,b,verdict`, verdict in {LOCC, NLWE}. Byte-identical
/// for identical configs.
void write_region_csv(const RegionScanResult& result, std::ostream& out);

/// Flat two-color cell grid with the analytic boundary curves a = b and
/// a = (125/169)(1-b) overlaid.
void write_region_svg(const RegionScanResult& result, std::ostream& out);

}  // namespace udisc
