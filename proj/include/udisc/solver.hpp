#pragma once

#include <optional>

#include <Eigen/Dense>

#include "udisc/ensemble.hpp"

namespace udisc {

/// Default threshold under which all KKT residual groups must fall for a
/// (p, K) pair to be declared optimal.
inline constexpr double kKktTol = 1e-6;

/// Per-condition residuals of the optimality system for the unambiguous
/// discrimination program. Conditions:
///   (i)   p_i >= 0 and 1 - M_p >= 0          (primal feasibility)
///   (ii)  K >= 0 and Tr[(1 - M_p)K] = 0      (dual feasibility / slackness)
///   (iii) p_i (⟨ψ̃_i|K|ψ̃_i⟩ - η_i) = 0 ∀i
///   (iv)  ⟨ψ̃_i|K|ψ̃_i⟩ >= η_i ∀i
struct KktReport {
    double primal_sign = 0.0;       // max(0, -min_i p_i)
    double primal_spectral = 0.0;   // max(0, λmax(M_p) - 1)
    double dual_psd = 0.0;          // max(0, -λmin(K))
    double dual_slackness = 0.0;    // |Tr[(1 - M_p)K]|
    double stationarity = 0.0;      // max_i |p_i(⟨ψ̃_i|K|ψ̃_i⟩ - η_i)|
    double dual_feasibility = 0.0;  // max_i max(0, η_i - ⟨ψ̃_i|K|ψ̃_i⟩)

    double condition_i() const { return std::max(primal_sign, primal_spectral); }
    double condition_ii() const { return std::max(dual_psd, dual_slackness); }
    double condition_iii() const { return stationarity; }
    double condition_iv() const { return dual_feasibility; }

    double max_residual() const {
        return std::max({condition_i(), condition_ii(), condition_iii(), condition_iv()});
    }

    bool optimal(double tol = kKktTol) const { return max_residual() <= tol; }
};

/// Optimal success probabilities with a dual certificate. The certificate K
/// is an n x n Hermitian PSD operator expressed in the ensemble's span basis
/// (Ensemble::span_basis / span_coords).
struct UdSolution {
    Eigen::VectorXd p_star;
    double p_max = 0.0;
    Eigen::MatrixXcd certificate;
    KktReport kkt;
    int iterations = 0;
};

/// Globally optimal unambiguous discrimination of the ensemble: maximizes
/// Σ η_i p_i over p >= 0 with Σ p_i|ψ̃_i⟩⟨ψ̃_i| <= 1, by a log-barrier
/// interior-point method with an active-set polish. Deterministic.
/// Throws NoConvergence if the Newton iteration cap is exhausted.
UdSolution solve(const Ensemble& ensemble);

/// Residuals of the KKT system at an arbitrary candidate pair. `certificate`
/// must be n x n in the ensemble's span basis.
KktReport verify_kkt(const Ensemble& ensemble, const Eigen::VectorXd& p,
                     const Eigen::MatrixXcd& certificate);

/// Closed-form solution that detects only state `index`, applicable iff
/// η_k/η_i <= |⟨ψ̃_k|ψ̃_i⟩|²/|⟨ψ̃_i|ψ̃_i⟩|² for all k. Returns nullopt when
/// the condition fails.
std::optional<UdSolution> single_state_solution(const Ensemble& ensemble, int index);

struct OracleResult {
    double p_best = 0.0;
    Eigen::VectorXd best_p;
};

/// Exhaustive grid scan over the feasible box [0, p_i^max]^n, keeping points
/// with λmax(M_p) <= 1. Only for n <= 4 (throws TooLarge otherwise).
/// Independent of the interior-point path; intended as a verification oracle.
OracleResult brute_force_oracle(const Ensemble& ensemble, int grid_steps);

/// Runs the solver from `trials` distinct strictly feasible starting points
/// and returns the maximum pairwise ‖p* - p*‖_∞ deviation.
double uniqueness_probe(const Ensemble& ensemble, int trials);

/// Success-probability cap p_i^max = ⟨ψ̃_i|ψ̃_i⟩⁻¹ per state.
Eigen::VectorXd success_caps(const Ensemble& ensemble);

namespace detail {
/// Internal entry point: solve from an explicit strictly feasible start.
UdSolution solve_from(const Ensemble& ensemble, const Eigen::VectorXd& start);
}  // namespace detail

}  // namespace udisc
