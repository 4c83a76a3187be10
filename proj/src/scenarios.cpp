#include "udisc/scenarios.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <thread>
#include <utility>

namespace udisc {

namespace {

Ket product_state(std::initializer_list<Complex> a, std::initializer_list<Complex> b) {
    return tensor(Ket(a), Ket(b));
}

// Amplitudes are integer ratios of the published states; the ensemble
// normalizes at construction, so positive prefactors are dropped.
std::vector<Ket> example1_states() {
    return {
        product_state({1, 1}, {4, 1, 1}), product_state({0, 1}, {2, 2, 1}),
        product_state({0, 1}, {2, 1, 2}), product_state({2, 1}, {0, 2, 1}),
        product_state({1, 2}, {0, 1, 2}), product_state({1, 1}, {0, 1, 1}),
    };
}

std::vector<Ket> example2_states() {
    std::vector<Ket> states = example1_states();
    states[0] = product_state({3, 4}, {1, 2, 2});
    return states;
}

std::vector<Ket> four_state_states() {
    return {
        Ket{1, 0, -1, -1},
        Ket{0, 1, -1, 1},
        Ket{0, 0, 1, 0},
        Ket{0, 0, 0, 1},
    };
}

std::vector<Ket> orthonormal_demo_states() {
    return {
        product_state({1, 0}, {1, 0}),
        product_state({1, 0}, {0, 1}),
        product_state({0, 1}, {1, 0}),
        product_state({0, 1}, {0, 1}),
    };
}

void append_pixel(std::string& out, const char* fmt, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, v);
    out += buf;
}

}  // namespace

std::optional<ScenarioId> parse_scenario(std::string_view name) {
    if (name == "example1") return ScenarioId::Example1;
    if (name == "example2") return ScenarioId::Example2;
    if (name == "four-state") return ScenarioId::FourState;
    if (name == "orthonormal-demo") return ScenarioId::OrthonormalDemo;
    return std::nullopt;
}

std::string scenario_name(ScenarioId id) {
    switch (id) {
        case ScenarioId::Example1: return "example1";
        case ScenarioId::Example2: return "example2";
        case ScenarioId::FourState: return "four-state";
        case ScenarioId::OrthonormalDemo: return "orthonormal-demo";
    }
    return "unknown";
}

Scenario builtin_scenario(ScenarioId id) {
    switch (id) {
        case ScenarioId::Example1:
            return {scenario_name(id), example1_states(), TensorSpace({2, 3})};
        case ScenarioId::Example2:
            return {scenario_name(id), example2_states(), TensorSpace({2, 3})};
        case ScenarioId::FourState:
            return {scenario_name(id), four_state_states(), std::nullopt};
        case ScenarioId::OrthonormalDemo:
            return {scenario_name(id), orthonormal_demo_states(), TensorSpace({2, 2})};
    }
    throw UnknownScenario("unknown scenario id");
}

Eigen::VectorXd two_parameter_priors(double a, double b) {
    if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0))
        throw ValidationError("priors", "prior family parameters must lie strictly inside (0,1)");
    Eigen::VectorXd xi(6);
    xi << 9.0 * a, 9.0 * a, 18.0 * (1.0 - a), 25.0 * b, 100.0 * b, 125.0 * (1.0 - b);
    return xi / 143.0;
}

ScenarioReport run_scenario(const Scenario& scenario, const Eigen::VectorXd& priors) {
    Ensemble ensemble(scenario.states, priors);

    std::vector<bool> product_flags;
    NlweVerdict verdict;
    std::optional<NlweVerdict> classification;
    if (scenario.space) {
        for (const Ket& reciprocal : ensemble.reciprocals().vectors)
            product_flags.push_back(is_product_vector(reciprocal, *scenario.space).is_product);
        verdict = locc_achievable(ensemble, *scenario.space);
        try {
            classification = classify(ensemble.states(), *scenario.space);
        } catch (const NotAllProduct&) {
            classification = std::nullopt;
        }
    }

    MultiDetectionReport multi_detection = multi_detection_condition(ensemble.states());
    UdSolution solution = solve(ensemble);

    return {scenario.name,
            std::move(ensemble),
            scenario.space,
            std::move(product_flags),
            std::move(solution),
            std::move(verdict),
            std::move(classification),
            std::move(multi_detection)};
}

RegionScanResult region_scan(const RegionScanConfig& config) {
    if (config.a_steps < 2 || config.b_steps < 2)
        throw ValidationError("grid", "region scan needs at least 2 steps per axis");

    // The detect-only-one margins depend on the priors only through ratios,
    // so the reciprocal overlaps are computed once for the whole grid.
    const Scenario scenario = builtin_scenario(ScenarioId::Example1);
    const Ensemble ensemble(scenario.states, Eigen::VectorXd::Constant(6, 1.0 / 6.0));
    const Eigen::MatrixXcd overlaps = ensemble.reciprocals().overlaps;
    const AssumptionReport assumptions = assumption_report(ensemble.states(), *scenario.space);
    if (!assumptions.exactly_one_product)
        throw Error("scenario does not have a unique product reciprocal");
    const int target = assumptions.product_index();

    RegionScanResult result;
    result.a_values.resize(static_cast<size_t>(config.a_steps));
    result.b_values.resize(static_cast<size_t>(config.b_steps));
    for (int i = 0; i < config.a_steps; ++i)
        result.a_values[static_cast<size_t>(i)] = (i + 1) / (config.a_steps + 1.0);
    for (int j = 0; j < config.b_steps; ++j)
        result.b_values[static_cast<size_t>(j)] = (j + 1) / (config.b_steps + 1.0);

    // Scratch buffer with one byte per cell: rows may share words in a
    // packed vector<bool>, which would race across threads.
    std::vector<unsigned char> cells(
        static_cast<size_t>(config.a_steps) * static_cast<size_t>(config.b_steps), 0);

    const auto scan_rows = [&](int row_begin, int row_end) {
        for (int bi = row_begin; bi < row_end; ++bi) {
            const double b = result.b_values[static_cast<size_t>(bi)];
            for (int ai = 0; ai < config.a_steps; ++ai) {
                const double a = result.a_values[static_cast<size_t>(ai)];
                const Eigen::VectorXd margins =
                    detail::detection_margins(overlaps, two_parameter_priors(a, b), target);
                cells[static_cast<size_t>(bi) * config.a_steps + ai] =
                    detail::margins_hold(margins) ? 1 : 0;
            }
        }
    };

    const int rows = config.b_steps;
    const int workers = std::max(
        1, std::min(static_cast<int>(std::thread::hardware_concurrency()), rows));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const int begin = rows * w / workers;
        const int end = rows * (w + 1) / workers;
        pool.emplace_back(scan_rows, begin, end);
    }
    for (std::thread& th : pool) th.join();

    result.locc.assign(cells.begin(), cells.end());
    return result;
}

void write_region_csv(const RegionScanResult& result, std::ostream& out) {
    out << "a,b,verdict\n";
    std::string line;
    for (size_t bi = 0; bi < result.b_values.size(); ++bi)
        for (size_t ai = 0; ai < result.a_values.size(); ++ai) {
            line.clear();
            append_pixel(line, "%.10g", result.a_values[ai]);
            line += ',';
            append_pixel(line, "%.10g", result.b_values[bi]);
            line += ',';
            line += result.cell(static_cast<int>(ai), static_cast<int>(bi)) ? "LOCC" : "NLWE";
            line += '\n';
            out << line;
        }
}

void write_region_svg(const RegionScanResult& result, std::ostream& out) {
    const double plot = 600.0, margin = 60.0;
    const double width = plot + 2 * margin, height = plot + 2 * margin;
    const size_t na = result.a_values.size(), nb = result.b_values.size();
    const double da = 1.0 / (static_cast<double>(na) + 1.0);
    const double db = 1.0 / (static_cast<double>(nb) + 1.0);

    const auto x_of = [&](double a) { return margin + a * plot; };
    const auto y_of = [&](double b) { return margin + (1.0 - b) * plot; };
    const auto rect = [&](double x, double y, double w, double h, const char* fill) {
        std::string s = "<rect x=\"";
        append_pixel(s, "%.2f", x);
        s += "\" y=\"";
        append_pixel(s, "%.2f", y);
        s += "\" width=\"";
        append_pixel(s, "%.2f", w);
        s += "\" height=\"";
        append_pixel(s, "%.2f", h);
        s += "\" fill=\"";
        s += fill;
        s += "\"/>\n";
        out << s;
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    rect(0, 0, width, height, "#ffffff");

    // Adjacent same-verdict cells merge into one rect per row.
    for (size_t bi = 0; bi < nb; ++bi) {
        const double b = result.b_values[bi];
        size_t ai = 0;
        while (ai < na) {
            size_t run_end = ai;
            const bool verdict = result.cell(static_cast<int>(ai), static_cast<int>(bi));
            while (run_end + 1 < na &&
                   result.cell(static_cast<int>(run_end + 1), static_cast<int>(bi)) == verdict)
                ++run_end;
            const double a_lo = result.a_values[ai] - da / 2;
            const double a_hi = result.a_values[run_end] + da / 2;
            rect(x_of(a_lo), y_of(b + db / 2), (a_hi - a_lo) * plot, db * plot,
                 verdict ? "#f5d742" : "#43a047");
            ai = run_end + 1;
        }
    }

    const auto line = [&](double x1, double y1, double x2, double y2) {
        std::string s = "<line x1=\"";
        append_pixel(s, "%.2f", x1);
        s += "\" y1=\"";
        append_pixel(s, "%.2f", y1);
        s += "\" x2=\"";
        append_pixel(s, "%.2f", x2);
        s += "\" y2=\"";
        append_pixel(s, "%.2f", y2);
        s += "\" stroke=\"#000000\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
        out << s;
    };
    line(x_of(0), y_of(0), x_of(1), y_of(1));                    // a = b
    line(x_of(125.0 / 169.0), y_of(0), x_of(0), y_of(1));        // a = (125/169)(1-b)

    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot
        << "\" height=\"" << plot << "\" fill=\"none\" stroke=\"#000000\"/>\n";
    out << "<text x=\"" << margin + plot / 2 << "\" y=\"" << height - margin / 3
        << "\" text-anchor=\"middle\" font-size=\"18\">a</text>\n";
    out << "<text x=\"" << margin / 3 << "\" y=\"" << margin + plot / 2
        << "\" text-anchor=\"middle\" font-size=\"18\">b</text>\n";
    out << "<text x=\"" << margin << "\" y=\"" << margin / 2
        << "\" font-size=\"14\">yellow: one-state detection optimal (LOCC); green: "
           "multi-state detection required (NLWE)</text>\n";
    out << "</svg>\n";
}

}  // namespace udisc
