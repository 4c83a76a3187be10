#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "udisc/ensemble.hpp"
#include "udisc/ket.hpp"

namespace udisc {

/// Relative singular-value ratio below which a bipartite cut counts as
/// Schmidt rank one.
inline constexpr double kProductTol = 1e-8;

/// A multipartite tensor-product factorization d_1 ⊗ d_2 ⊗ ... ⊗ d_m with
/// row-major flattening: basis state (i_1,...,i_m) sits at index
/// ((i_1 d_2 + i_2) d_3 + ...) + i_m.
struct TensorSpace {
    std::vector<int> dims;

    TensorSpace() = default;
    explicit TensorSpace(std::vector<int> d);

    int parties() const { return static_cast<int>(dims.size()); }
    Eigen::Index total_dim() const;
};

/// Outcome of the product test. When `is_product`, the normalized factors
/// satisfy ⊗_k |φ_k⟩ = |v⟩/‖v‖ up to global phase, each factor's first
/// nonzero amplitude real positive. `residual` is the largest relative
/// second singular value seen across the leading bipartitions.
struct ProductDecomposition {
    bool is_product = false;
    std::vector<Ket> factors;
    double residual = 0.0;
};

/// Schmidt-rank-one test across every leading bipartition (1..k | k+1..m).
ProductDecomposition is_product_vector(const Ket& v, const TensorSpace& space);

/// Partial trace of |v⟩⟨v| over all parties except `keep` (0-based).
/// The result's trace equals ⟨v|v⟩.
Eigen::MatrixXcd reduced_operator(const Ket& v, const TensorSpace& space, int keep);

/// One local projective measurement {|φ_k⟩⟨φ_k|, 1_k - |φ_k⟩⟨φ_k|} per party.
/// The all-success branch implements |Ψ̃_t⟩⟨Ψ̃_t| / ⟨Ψ̃_t|Ψ̃_t⟩ and therefore
/// fires on no state other than the target.
struct LoccProtocol {
    TensorSpace space;
    std::vector<Ket> local_states;  // |φ_k⟩, unit norm
    int target_index = 0;           // 0-based

    /// POVM element of the all-success branch, ⊗_k |φ_k⟩⟨φ_k|.
    Eigen::MatrixXcd success_operator() const;
};

/// Builds the finite-round LOCC protocol that unambiguously detects state
/// `target`. Requires the target's reciprocal vector to be a product vector
/// (throws NotProduct otherwise).
LoccProtocol build_locc_protocol(const Ensemble& ensemble, const TensorSpace& space,
                                 int target);

struct LoccSimulation {
    double empirical_success = 0.0;  // all-success branch rate
    double empirical_error = 0.0;    // all-success branch on a wrong state
    long long trials = 0;
    long long success_count = 0;
    long long error_count = 0;
};

/// Monte Carlo run of the protocol: states sampled by prior, each party's
/// outcome sampled by sequentially conditioned Born probabilities. Trials
/// are processed in independent chunks with derived seeds and merged by
/// summation, so results are reproducible for a fixed seed.
LoccSimulation simulate_locc(const LoccProtocol& protocol, const Ensemble& ensemble,
                             long long trials, std::uint64_t seed);

/// Witnesses for the nonexistence of a 2⊗2 product basis in which exactly
/// one state is locally detectable: whenever some reciprocal is a product
/// vector, at least one other reciprocal must be as well. `witnesses` pairs
/// each product reciprocal with a distinct product companion.
struct Nonexistence2x2Report {
    std::vector<int> product_reciprocal_indices;
    std::vector<std::pair<int, int>> witnesses;
    bool assertion_holds = true;
};

/// Checks the companion-product assertion on a basis of four 2⊗2 product
/// states. Throws NotABasis for dependent inputs, NotAllProduct if a state
/// is entangled.
Nonexistence2x2Report check_2x2_nonexistence(const std::vector<Ket>& basis);

}  // namespace udisc
