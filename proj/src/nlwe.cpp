#include "udisc/nlwe.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace udisc {

namespace {

// Margin checks compare squared reciprocal overlaps of unit states, so raw
// inputs are normalized up front.
std::vector<Ket> normalized_states(const std::vector<Ket>& states) {
    std::vector<Ket> result;
    result.reserve(states.size());
    for (const Ket& s : states) result.push_back(s.normalized());
    return result;
}

bool overlap_is_zero(const Eigen::MatrixXcd& overlaps, int j, int k) {
    const double scale =
        std::sqrt(std::real(overlaps(j, j)) * std::real(overlaps(k, k)));
    return std::abs(overlaps(j, k)) <= kOverlapZeroTol * scale;
}

Eigen::VectorXd overlap_weights(const Eigen::MatrixXcd& overlaps, int t) {
    const int n = static_cast<int>(overlaps.rows());
    if (t < 0 || t >= n) throw std::out_of_range("target state index out of range");
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        if (overlap_is_zero(overlaps, i, t))
            throw ZeroOverlap("reciprocal overlap of states " + std::to_string(i + 1) +
                              " and " + std::to_string(t + 1) + " vanishes");
        w(i) = std::norm(overlaps(i, t));
    }
    return w;
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::LoccAchievable: return "LOCC_ACHIEVABLE";
        case Verdict::NlweAtThesePriors: return "NLWE_AT_THESE_PRIORS";
        case Verdict::NlweAllPriors: return "NLWE_ALL_PRIORS";
        case Verdict::PriorDependent: return "PRIOR_DEPENDENT";
        case Verdict::NotApplicable: return "NOT_APPLICABLE";
    }
    return "NOT_APPLICABLE";
}

namespace detail {

Eigen::VectorXd detection_margins(const Eigen::MatrixXcd& reciprocal_overlaps,
                                  const Eigen::VectorXd& priors, int t) {
    const int n = static_cast<int>(priors.size());
    if (t < 0 || t >= n) throw std::out_of_range("target state index out of range");
    const double self = std::real(reciprocal_overlaps(t, t));
    Eigen::VectorXd margins(n);
    for (int i = 0; i < n; ++i)
        margins(i) = std::norm(reciprocal_overlaps(i, t)) / (self * self) -
                     priors(i) / priors(t);
    return margins;
}

bool margins_hold(const Eigen::VectorXd& margins) {
    const double tol = 1e-12 * (1.0 + margins.cwiseAbs().maxCoeff());
    return margins.minCoeff() >= -tol;
}

}  // namespace detail

SingleDetectionReport single_detection_condition(const Ensemble& ensemble, int index) {
    SingleDetectionReport result;
    result.margins =
        detail::detection_margins(ensemble.reciprocals().overlaps, ensemble.priors(), index);
    result.holds = detail::margins_hold(result.margins);
    return result;
}

MultiDetectionReport multi_detection_condition(const std::vector<Ket>& states) {
    const Eigen::MatrixXcd overlaps = reciprocal_set(normalized_states(states)).overlaps;
    const int n = static_cast<int>(states.size());

    MultiDetectionReport result;
    result.for_all_priors = true;
    for (int j = 0; j < n; ++j) {
        bool has_zero = false;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            if (overlap_is_zero(overlaps, j, k)) {
                has_zero = true;
                if (j < k) result.zero_pairs.emplace_back(j, k);
            }
        }
        if (!has_zero) result.for_all_priors = false;
    }
    return result;
}

AssumptionReport assumption_report(const std::vector<Ket>& states, const TensorSpace& space) {
    AssumptionReport report;
    const std::vector<Ket> normalized = normalized_states(states);
    const IndependenceReport independence = independence_report(normalized);
    report.spans_full_space =
        independence.independent &&
        static_cast<Eigen::Index>(states.size()) == space.total_dim();
    if (!independence.independent) return report;

    const ReciprocalSet reciprocals = reciprocal_set(normalized);
    for (int i = 0; i < static_cast<int>(states.size()); ++i)
        if (is_product_vector(reciprocals.vectors[static_cast<size_t>(i)], space).is_product)
            report.product_reciprocal_indices.push_back(i);
    report.exactly_one_product = report.product_reciprocal_indices.size() == 1;
    return report;
}

NlweVerdict locc_achievable(const Ensemble& ensemble, const TensorSpace& space) {
    NlweVerdict result;
    result.assumptions = assumption_report(ensemble.states(), space);
    if (!result.assumptions.spans_full_space || !result.assumptions.exactly_one_product) {
        result.verdict = Verdict::NotApplicable;
        return result;
    }

    const int t = result.assumptions.product_index();
    result.product_index = t;
    result.margins =
        detail::detection_margins(ensemble.reciprocals().overlaps, ensemble.priors(), t);
    result.verdict = detail::margins_hold(result.margins) ? Verdict::LoccAchievable
                                                          : Verdict::NlweAtThesePriors;
    return result;
}

NlweVerdict classify(const std::vector<Ket>& states, const TensorSpace& space) {
    const std::vector<Ket> normalized = normalized_states(states);
    for (const Ket& state : normalized)
        if (!is_product_vector(state, space).is_product)
            throw NotAllProduct("input state is entangled across the given factorization");

    NlweVerdict result;
    result.assumptions = assumption_report(normalized, space);
    if (!result.assumptions.spans_full_space || !result.assumptions.exactly_one_product) {
        result.verdict = Verdict::NotApplicable;
        return result;
    }

    const int t = result.assumptions.product_index();
    result.product_index = t;

    const Eigen::MatrixXcd overlaps = reciprocal_set(normalized).overlaps;
    for (int j = 0; j < static_cast<int>(states.size()); ++j) {
        if (j == t) continue;
        if (overlap_is_zero(overlaps, j, t)) {
            result.verdict = Verdict::NlweAllPriors;
            result.witness_zero_index = j;
            return result;
        }
    }

    result.verdict = Verdict::PriorDependent;
    result.witness_priors = boundary_priors(normalized, t);
    result.witness_violating = violating_priors(normalized, t);
    result.margins = detail::detection_margins(overlaps, *result.witness_priors, t);
    return result;
}

Eigen::VectorXd boundary_priors(const std::vector<Ket>& states, int t) {
    const Eigen::MatrixXcd overlaps = reciprocal_set(normalized_states(states)).overlaps;
    const Eigen::VectorXd w = overlap_weights(overlaps, t);
    return w / w.sum();
}

Eigen::VectorXd violating_priors(const std::vector<Ket>& states, int t) {
    if (states.size() < 2) throw Error("violating priors need at least two states");
    const Eigen::MatrixXcd overlaps = reciprocal_set(normalized_states(states)).overlaps;
    Eigen::VectorXd w = overlap_weights(overlaps, t);
    w(t == 0 ? 1 : 0) += 1.0;
    return w / w.sum();
}

}  // namespace udisc
