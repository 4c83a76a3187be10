#include "udisc/ensemble.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace udisc {

namespace {

void require_common_dim(const std::vector<Ket>& states) {
    if (states.empty()) throw DimensionMismatch("empty state list");
    const Eigen::Index d = states.front().dim();
    for (const Ket& s : states) {
        if (s.dim() != d)
            throw DimensionMismatch("states mix dimensions " + std::to_string(d) + " and " +
                                    std::to_string(s.dim()));
    }
}

Eigen::MatrixXcd overlap_matrix(const std::vector<Ket>& states) {
    const Eigen::Index n = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXcd omega(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        omega(i, i) = states[i].squared_norm();
        for (Eigen::Index j = i + 1; j < n; ++j) {
            omega(i, j) = states[i].amplitudes.dot(states[j].amplitudes);
            omega(j, i) = std::conj(omega(i, j));
        }
    }
    return omega;
}

}  // namespace

GramMatrix gram(const std::vector<Ket>& states) {
    require_common_dim(states);
    Eigen::MatrixXcd omega = overlap_matrix(states);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(omega);
    const Eigen::VectorXd evals = eig.eigenvalues();
    const double lambda_max = evals(evals.size() - 1);
    if (evals(0) <= kRankTol * lambda_max)
        throw SingularGram("Gram matrix singular: min eigenvalue " + std::to_string(evals(0)) +
                           " vs max " + std::to_string(lambda_max));

    Eigen::MatrixXcd inverse = eig.eigenvectors() * evals.cwiseInverse().asDiagonal() *
                               eig.eigenvectors().adjoint();
    return GramMatrix{std::move(omega), std::move(inverse), evals};
}

ReciprocalSet reciprocal_set(const std::vector<Ket>& states) {
    const GramMatrix g = gram(states);
    const Eigen::Index n = static_cast<Eigen::Index>(states.size());
    const Eigen::Index d = states.front().dim();

    // |ψ̃_i⟩ = Σ_j (Ω⁻¹)_ji |ψ_j⟩
    std::vector<Ket> duals;
    duals.reserve(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
        for (Eigen::Index j = 0; j < n; ++j) v += g.inverse(j, i) * states[j].amplitudes;
        duals.emplace_back(std::move(v));
    }
    return ReciprocalSet{std::move(duals), g.inverse};
}

IndependenceReport independence_report(const std::vector<Ket>& states) {
    require_common_dim(states);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(overlap_matrix(states),
                                                        Eigen::EigenvaluesOnly);
    const Eigen::VectorXd evals = eig.eigenvalues();
    const double lo = evals(0);
    const double hi = evals(evals.size() - 1);
    return IndependenceReport{lo, hi, lo > kRankTol * hi};
}

Ensemble::Ensemble(std::vector<Ket> states, Eigen::VectorXd priors)
    : states_(std::move(states)), priors_(std::move(priors)) {
    require_common_dim(states_);
    const auto n = static_cast<Eigen::Index>(states_.size());
    if (priors_.size() != n)
        throw ValidationError("priors", "expected " + std::to_string(n) + " priors, got " +
                                            std::to_string(priors_.size()));
    if (priors_.minCoeff() < 1e-12)
        throw ValidationError("priors", "priors must be strictly positive");
    if (std::abs(priors_.sum() - 1.0) > 1e-12)
        throw ValidationError("priors",
                              "priors sum to " + std::to_string(priors_.sum()) + ", expected 1");
    if (n > states_.front().dim())
        throw ValidationError("states", "more states than dimensions");

    norm_factors_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) norm_factors_(i) = states_[static_cast<size_t>(i)].normalize();

    try {
        gram_ = udisc::gram(states_);
    } catch (const SingularGram& e) {
        throw ValidationError("independence", e.what());
    }
    reciprocals_ = ReciprocalSet{};
    {
        // Reuse the validated Gram inverse rather than recomputing it.
        const Eigen::Index d = states_.front().dim();
        reciprocals_.overlaps = gram_.inverse;
        reciprocals_.vectors.reserve(static_cast<size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
            for (Eigen::Index j = 0; j < n; ++j)
                v += gram_.inverse(j, i) * states_[static_cast<size_t>(j)].amplitudes;
            reciprocals_.vectors.emplace_back(std::move(v));
        }
    }

    Eigen::MatrixXcd state_matrix(states_.front().dim(), n);
    for (Eigen::Index i = 0; i < n; ++i) state_matrix.col(i) = states_[static_cast<size_t>(i)].amplitudes;
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(state_matrix);
    span_basis_ = qr.householderQ() * Eigen::MatrixXcd::Identity(states_.front().dim(), n);
}

Eigen::VectorXcd Ensemble::span_coords(const Ket& v) const {
    if (v.dim() != dim())
        throw DimensionMismatch("ket dim " + std::to_string(v.dim()) + " vs ensemble dim " +
                                std::to_string(dim()));
    return span_basis_.adjoint() * v.amplitudes;
}

}  // namespace udisc
