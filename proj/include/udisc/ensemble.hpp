#pragma once

#include <vector>

#include <Eigen/Dense>

#include "udisc/errors.hpp"
#include "udisc/ket.hpp"

namespace udisc {

/// Relative eigenvalue floor below which a Gram matrix is treated as
/// singular, measured against its largest eigenvalue.
inline constexpr double kRankTol = 1e-9;

/// Pairwise-overlap matrix Ω with Ω(i,j) = ⟨ψ_i|ψ_j⟩ and its inverse.
struct GramMatrix {
    Eigen::MatrixXcd entries;
    Eigen::MatrixXcd inverse;
    Eigen::VectorXd eigenvalues;  // ascending

    double min_eigenvalue() const { return eigenvalues(0); }
    double max_eigenvalue() const { return eigenvalues(eigenvalues.size() - 1); }
};

/// Biorthogonal duals |ψ̃_i⟩ of a linearly independent family, satisfying
/// ⟨ψ̃_i|ψ_j⟩ = δ_ij. `overlaps` holds ⟨ψ̃_i|ψ̃_j⟩, which equals Ω⁻¹.
struct ReciprocalSet {
    std::vector<Ket> vectors;
    Eigen::MatrixXcd overlaps;
};

struct IndependenceReport {
    double min_gram_eigenvalue = 0.0;
    double max_gram_eigenvalue = 0.0;
    bool independent = false;
};

/// Gram matrix of the given states, inverted via Hermitian eigendecomposition.
/// Throws SingularGram if the smallest eigenvalue falls below the relative
/// rank tolerance, DimensionMismatch when the states disagree on dimension.
GramMatrix gram(const std::vector<Ket>& states);

/// Reciprocal vectors |ψ̃_i⟩ = Σ_j (Ω⁻¹)_ji |ψ_j⟩. Propagates SingularGram.
ReciprocalSet reciprocal_set(const std::vector<Ket>& states);

IndependenceReport independence_report(const std::vector<Ket>& states);

/// A discrimination instance: n linearly independent states with strictly
/// positive priors summing to one. Input amplitudes may be unnormalized;
/// they are normalized at construction and the factors recorded. Immutable
/// after construction.
class Ensemble {
public:
    Ensemble(std::vector<Ket> states, Eigen::VectorXd priors);

    int size() const { return static_cast<int>(states_.size()); }
    Eigen::Index dim() const { return states_.front().dim(); }

    const std::vector<Ket>& states() const { return states_; }
    const Eigen::VectorXd& priors() const { return priors_; }
    const Eigen::VectorXd& normalization_factors() const { return norm_factors_; }

    const GramMatrix& gram() const { return gram_; }
    const ReciprocalSet& reciprocals() const { return reciprocals_; }

    /// Orthonormal basis of the span H_S, as a dim() x size() matrix whose
    /// columns are the basis vectors. Deterministic for fixed input.
    const Eigen::MatrixXcd& span_basis() const { return span_basis_; }

    /// Coordinates of an ambient ket in the span basis. The ket must lie in
    /// H_S for the coordinates to represent it exactly.
    Eigen::VectorXcd span_coords(const Ket& v) const;

private:
    std::vector<Ket> states_;
    Eigen::VectorXd priors_;
    Eigen::VectorXd norm_factors_;
    GramMatrix gram_;
    ReciprocalSet reciprocals_;
    Eigen::MatrixXcd span_basis_;
};

}  // namespace udisc
