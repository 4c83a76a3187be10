#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "udisc/ensemble.hpp"
#include "udisc/tensor.hpp"

namespace udisc {

/// Relative magnitude under which a reciprocal overlap counts as zero.
inline constexpr double kOverlapZeroTol = 1e-10;

enum class Verdict {
    LoccAchievable,
    NlweAtThesePriors,
    NlweAllPriors,
    PriorDependent,
    NotApplicable,
};

std::string to_string(Verdict v);

/// Hypotheses of the LOCC-achievability dichotomy: the states span the whole
/// multipartite space and exactly one reciprocal vector is a product vector.
struct AssumptionReport {
    bool spans_full_space = false;
    std::vector<int> product_reciprocal_indices;
    bool exactly_one_product = false;

    int product_index() const { return product_reciprocal_indices.front(); }
};

struct NlweVerdict {
    AssumptionReport assumptions;
    Verdict verdict = Verdict::NotApplicable;
    std::optional<int> product_index;                    // index t when assumptions hold
    Eigen::VectorXd margins;                             // per-state condition margins
    std::optional<Eigen::VectorXd> witness_priors;       // achieve LOCC (boundary_priors)
    std::optional<Eigen::VectorXd> witness_violating;    // break LOCC (violating_priors)
    std::optional<int> witness_zero_index;               // NLWE_ALL_PRIORS: ⟨Ψ̃_j|Ψ̃_t⟩ = 0
};

struct SingleDetectionReport {
    bool holds = false;
    Eigen::VectorXd margins;  // margins[k] = |⟨ψ̃_k|ψ̃_i⟩|²/|⟨ψ̃_i|ψ̃_i⟩|² - η_k/η_i
};

/// Does the optimal measurement detect only state `index`? Holds iff every
/// margin is nonnegative (boundary equality included).
SingleDetectionReport single_detection_condition(const Ensemble& ensemble, int index);

struct MultiDetectionReport {
    bool for_all_priors = false;
    std::vector<std::pair<int, int>> zero_pairs;  // (j, k) with ⟨ψ̃_j|ψ̃_k⟩ = 0
};

/// True iff the optimal measurement detects more than one state for every
/// choice of nonzero priors: each j must have some k with ⟨ψ̃_j|ψ̃_k⟩ = 0.
MultiDetectionReport multi_detection_condition(const std::vector<Ket>& states);

AssumptionReport assumption_report(const std::vector<Ket>& states, const TensorSpace& space);

/// LOCC achievability of globally optimal discrimination at the ensemble's
/// priors. NOT_APPLICABLE unless the states span the full space and exactly
/// one reciprocal is a product vector.
NlweVerdict locc_achievable(const Ensemble& ensemble, const TensorSpace& space);

/// Prior-free classification of a product basis: PRIOR_DEPENDENT when every
/// reciprocal overlaps the product reciprocal (with explicit witness priors
/// both ways), NLWE_ALL_PRIORS when some overlap vanishes. Throws
/// NotAllProduct if an input state is entangled.
NlweVerdict classify(const std::vector<Ket>& states, const TensorSpace& space);

/// Priors ξ_i = |⟨Ψ̃_i|Ψ̃_t⟩|² / Σ_j |⟨Ψ̃_j|Ψ̃_t⟩|², which satisfy the
/// detect-only-t condition with every margin zero. Throws ZeroOverlap when
/// some ⟨Ψ̃_i|Ψ̃_t⟩ vanishes.
Eigen::VectorXd boundary_priors(const std::vector<Ket>& states, int t);

/// The boundary construction with unit weight added to the first non-target
/// state's numerator and to the normalizer; breaks the detect-only-t
/// condition at exactly that state.
Eigen::VectorXd violating_priors(const std::vector<Ket>& states, int t);

namespace detail {
/// Margins of ξ_i/ξ_t <= |⟨Ψ̃_i|Ψ̃_t⟩|²/|⟨Ψ̃_t|Ψ̃_t⟩|² given the reciprocal
/// overlap matrix; shared by the detection-margin checks and the region scan.
Eigen::VectorXd detection_margins(const Eigen::MatrixXcd& reciprocal_overlaps,
                                  const Eigen::VectorXd& priors, int t);

/// Condition holds iff min margin >= -tolerance (relative to prior ratios).
bool margins_hold(const Eigen::VectorXd& margins);
}  // namespace detail

}  // namespace udisc
