#include "udisc/io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "udisc/errors.hpp"

namespace udisc {

namespace {

using nlohmann::json;

std::vector<int> parse_dims(const json& doc) {
    if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].empty())
        throw ValidationError("dims", "\"dims\" must be a nonempty array of positive integers");
    std::vector<int> dims;
    for (const json& d : doc["dims"]) {
        if (!d.is_number_integer() || d.get<long long>() < 1)
            throw ValidationError("dims", "\"dims\" entries must be positive integers");
        dims.push_back(d.get<int>());
    }
    return dims;
}

std::vector<Ket> parse_states(const json& doc, Eigen::Index total_dim) {
    if (!doc.contains("states") || !doc["states"].is_array() || doc["states"].empty())
        throw ValidationError("states", "\"states\" must be a nonempty array of amplitude lists");
    std::vector<Ket> states;
    for (const json& state : doc["states"]) {
        if (!state.is_array() || static_cast<Eigen::Index>(state.size()) != total_dim)
            throw ValidationError("states", "each state needs exactly " +
                                                std::to_string(total_dim) +
                                                " [re, im] amplitude pairs");
        Eigen::VectorXcd amps(total_dim);
        Eigen::Index k = 0;
        for (const json& amp : state) {
            if (!amp.is_array() || amp.size() != 2 || !amp[0].is_number() || !amp[1].is_number())
                throw ValidationError("states", "amplitudes must be [re, im] number pairs");
            amps(k++) = Complex(amp[0].get<double>(), amp[1].get<double>());
        }
        states.emplace_back(std::move(amps));
    }
    return states;
}

Eigen::VectorXd parse_priors(const json& doc, size_t n_states) {
    if (!doc.contains("priors") || !doc["priors"].is_array() ||
        doc["priors"].size() != n_states)
        throw ValidationError("priors", "\"priors\" must be an array of " +
                                            std::to_string(n_states) + " numbers");
    Eigen::VectorXd priors(static_cast<Eigen::Index>(n_states));
    Eigen::Index k = 0;
    for (const json& p : doc["priors"]) {
        if (!p.is_number()) throw ValidationError("priors", "priors must be numbers");
        priors(k++) = p.get<double>();
    }
    return priors;
}

}  // namespace

LoadedEnsemble parse_ensemble(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    if (!doc.is_object()) throw ParseError("top-level JSON value must be an object");

    const std::vector<int> dims = parse_dims(doc);
    Eigen::Index total_dim = 1;
    for (int d : dims) total_dim *= d;

    std::vector<Ket> states = parse_states(doc, total_dim);
    Eigen::VectorXd priors = parse_priors(doc, states.size());

    std::optional<TensorSpace> space;
    if (dims.size() > 1) space = TensorSpace(dims);
    return LoadedEnsemble{Ensemble(std::move(states), std::move(priors)), std::move(space)};
}

LoadedEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open ensemble file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_ensemble(buffer.str());
}

}  // namespace udisc
