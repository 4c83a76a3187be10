#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "udisc/ensemble.hpp"
#include "udisc/tensor.hpp"

namespace udisc {

/// Contents of an ensemble file:
///   { "dims": [d] or [d1, d2, ...],
///     "states": [ [ [re, im], ... ], ... ],
///     "priors": [ ... ] }
/// Amplitudes are row-major over the tensor-product index when dims has
/// several factors.
struct LoadedEnsemble {
    Ensemble ensemble;
    std::optional<TensorSpace> space;
};

/// Parses and validates an ensemble file. Throws ParseError for malformed
/// JSON (with position information) and ValidationError naming the violated
/// invariant ("dims", "states", "priors", "independence").
LoadedEnsemble load_ensemble(const std::string& path);

/// Same, from an in-memory JSON document.
LoadedEnsemble parse_ensemble(const std::string& text);

}  // namespace udisc
