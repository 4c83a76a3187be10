#include "udisc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "udisc/rng.hpp"

namespace udisc {

namespace {

constexpr double kGapTarget = 1e-9;   // stop when 2|S|/t falls below this
constexpr double kMuFactor = 10.0;    // barrier parameter growth per stage
constexpr int kMaxNewtonSteps = 10000;
constexpr double kCenteringTol = 1e-13;  // half squared Newton decrement
constexpr double kEigClip = -1e-12;      // certificate eigenvalue floor

// Everything the barrier needs, in span coordinates of H_S.
struct SpanProblem {
    int n = 0;
    Eigen::MatrixXcd recip;        // column i = span coords of ψ̃_i
    Eigen::MatrixXcd rec_overlaps; // ⟨ψ̃_i|ψ̃_j⟩ = Ω⁻¹
    Eigen::VectorXd eta;
    Eigen::VectorXd caps;          // p_i^max = 1/(Ω⁻¹)_ii
};

SpanProblem make_problem(const Ensemble& ensemble) {
    SpanProblem pr;
    pr.n = ensemble.size();
    pr.rec_overlaps = ensemble.reciprocals().overlaps;
    pr.eta = ensemble.priors();
    pr.recip.resize(pr.n, pr.n);
    for (int i = 0; i < pr.n; ++i)
        pr.recip.col(i) = ensemble.span_coords(ensemble.reciprocals().vectors[static_cast<size_t>(i)]);
    pr.caps = pr.rec_overlaps.diagonal().real().cwiseInverse();
    return pr;
}

Eigen::MatrixXcd measurement_operator(const SpanProblem& pr, const Eigen::VectorXd& p) {
    Eigen::MatrixXcd m = pr.recip * p.cast<Complex>().asDiagonal() * pr.recip.adjoint();
    return Complex(0.5, 0.0) * (m + m.adjoint());
}

// log det(1 - M_p) through Cholesky; nullopt when 1 - M_p is not positive
// definite (iterate left the interior).
std::optional<double> interior_logdet(const SpanProblem& pr, const Eigen::VectorXd& p) {
    Eigen::MatrixXcd slack = Eigen::MatrixXcd::Identity(pr.n, pr.n) - measurement_operator(pr, p);
    Eigen::LLT<Eigen::MatrixXcd> llt(slack);
    if (llt.info() != Eigen::Success) return std::nullopt;
    double logdet = 0.0;
    for (int i = 0; i < pr.n; ++i) {
        const double d = std::real(llt.matrixLLT()(i, i));
        if (!(d > 0.0)) return std::nullopt;
        logdet += 2.0 * std::log(d);
    }
    return logdet;
}

struct BarrierState {
    Eigen::VectorXd p;  // full length n, off-support entries exactly 0
    double t = 1.0;
    int newton_steps = 0;
};

Eigen::MatrixXcd slack_inverse(const SpanProblem& pr, const Eigen::VectorXd& p) {
    Eigen::MatrixXcd slack = Eigen::MatrixXcd::Identity(pr.n, pr.n) - measurement_operator(pr, p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(slack);
    Eigen::MatrixXcd z = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                         eig.eigenvectors().adjoint();
    return Complex(0.5, 0.0) * (z + z.adjoint());
}

double barrier_value(const SpanProblem& pr, const std::vector<int>& support, double t,
                     const Eigen::VectorXd& p, const std::optional<double>& logdet) {
    if (!logdet) return -std::numeric_limits<double>::infinity();
    double value = *logdet;
    for (int i : support) {
        if (p(i) <= 0.0) return -std::numeric_limits<double>::infinity();
        value += t * pr.eta(i) * p(i) + std::log(p(i));
    }
    return value;
}

// Central-path following on the face p_i = 0 for i outside `support`.
// Maximizes t·Ση_ip_i + logdet(1 - M_p) + Σ log p_i over the support.
BarrierState run_barrier(const SpanProblem& pr, const std::vector<int>& support,
                         Eigen::VectorXd p, int& step_budget) {
    const int ns = static_cast<int>(support.size());
    Eigen::MatrixXcd recip_s(pr.n, ns);
    Eigen::VectorXd eta_s(ns);
    for (int a = 0; a < ns; ++a) {
        recip_s.col(a) = pr.recip.col(support[static_cast<size_t>(a)]);
        eta_s(a) = pr.eta(support[static_cast<size_t>(a)]);
    }

    BarrierState state;
    state.p = p;
    state.t = 1.0;

    // A start on or outside the boundary poisons the line search (the barrier
    // value is -inf there, and -inf >= -inf accepts arbitrary steps), so pull
    // it radially inside first; M_p is linear in p.
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
            measurement_operator(pr, state.p), Eigen::EigenvaluesOnly);
        const double top = eig.eigenvalues().maxCoeff();
        if (top > 1.0 - 1e-6) state.p *= (1.0 - 1e-6) / top;
    }

    while (true) {
        // Newton centering at fixed t.
        for (int inner = 0; inner < 60; ++inner) {
            if (state.newton_steps >= step_budget)
                throw NoConvergence(state.newton_steps, 2.0 * ns / state.t, state.p);

            Eigen::MatrixXcd w = recip_s.adjoint() * slack_inverse(pr, state.p) * recip_s;
            Eigen::VectorXd ps(ns), grad(ns);
            for (int a = 0; a < ns; ++a) ps(a) = state.p(support[static_cast<size_t>(a)]);
            grad = state.t * eta_s - w.diagonal().real() + ps.cwiseInverse();

            // The Hessian is positive definite in exact arithmetic; a failed
            // factorization is roundoff, cured by a growing diagonal ridge.
            Eigen::MatrixXd hess = w.cwiseAbs2();
            hess.diagonal() += ps.cwiseAbs2().cwiseInverse();
            Eigen::VectorXd dir = grad;
            double ridge = 1e-14 * hess.diagonal().maxCoeff();
            for (int attempt = 0; attempt < 60; ++attempt, ridge *= 10.0) {
                Eigen::LLT<Eigen::MatrixXd> llt(hess);
                if (llt.info() == Eigen::Success) {
                    dir = llt.solve(grad);
                    break;
                }
                hess.diagonal().array() += ridge;
            }

            const double decrement_sq = grad.dot(dir);
            ++state.newton_steps;
            if (!(decrement_sq * 0.5 > kCenteringTol)) break;

            // Largest step keeping p > 0, then backtrack into the interior.
            double alpha = 1.0;
            for (int a = 0; a < ns; ++a)
                if (dir(a) < 0.0) alpha = std::min(alpha, -0.99 * ps(a) / dir(a));

            const auto current_logdet = interior_logdet(pr, state.p);
            const double current_value =
                barrier_value(pr, support, state.t, state.p, current_logdet);
            bool moved = false;
            for (int bt = 0; bt < 60 && alpha > 1e-18; ++bt, alpha *= 0.5) {
                Eigen::VectorXd trial = state.p;
                for (int a = 0; a < ns; ++a) trial(support[static_cast<size_t>(a)]) += alpha * dir(a);
                const auto trial_logdet = interior_logdet(pr, trial);
                const double trial_value =
                    barrier_value(pr, support, state.t, trial, trial_logdet);
                if (std::isfinite(trial_value) &&
                    trial_value >= current_value + 0.01 * alpha * decrement_sq) {
                    state.p = trial;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;  // step vanished; centered to machine precision
        }

        if (2.0 * ns / state.t <= kGapTarget) break;
        state.t = std::min(state.t * kMuFactor, 2.0 * ns / kGapTarget);
    }
    return state;
}

Eigen::MatrixXcd clip_psd(const Eigen::MatrixXcd& k) {
    Eigen::MatrixXcd herm = Complex(0.5, 0.0) * (k + k.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
    Eigen::VectorXd vals = eig.eigenvalues();
    // Eigenvalues below the clip floor indicate a genuinely indefinite input;
    // those are kept so the report shows the failure.
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        if (vals(i) < 0.0 && vals(i) >= kEigClip) vals(i) = 0.0;
    return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().adjoint();
}

std::vector<int> detect_support(const Eigen::VectorXd& p) {
    const double threshold = std::max(1e-6, 1e-3 * p.maxCoeff());
    std::vector<int> support;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > threshold) support.push_back(static_cast<int>(i));
    if (support.empty()) {
        Eigen::Index argmax = 0;
        p.maxCoeff(&argmax);
        support.push_back(static_cast<int>(argmax));
    }
    return support;
}

KktReport evaluate_kkt(const SpanProblem& pr, const Eigen::VectorXd& p,
                       const Eigen::MatrixXcd& k) {
    KktReport report;
    // Non-finite candidates must fail loudly; std::max(0.0, nan) would
    // otherwise mask them as zero residuals.
    if (!p.allFinite() || !k.allFinite()) {
        const double inf = std::numeric_limits<double>::infinity();
        report.primal_sign = report.primal_spectral = inf;
        report.dual_psd = report.dual_slackness = inf;
        report.stationarity = report.dual_feasibility = inf;
        return report;
    }
    report.primal_sign = std::max(0.0, -p.minCoeff());

    const Eigen::MatrixXcd m = measurement_operator(pr, p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> meig(m, Eigen::EigenvaluesOnly);
    report.primal_spectral = std::max(0.0, meig.eigenvalues().maxCoeff() - 1.0);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> keig(k, Eigen::EigenvaluesOnly);
    report.dual_psd = std::max(0.0, -keig.eigenvalues().minCoeff());

    report.dual_slackness =
        std::abs(std::real((k - m * k).trace()));

    double stationarity = 0.0;
    double dual_feas = 0.0;
    for (int i = 0; i < pr.n; ++i) {
        const double quad = std::real(pr.recip.col(i).dot(k * pr.recip.col(i)));
        stationarity = std::max(stationarity, std::abs(p(i) * (quad - pr.eta(i))));
        dual_feas = std::max(dual_feas, pr.eta(i) - quad);
    }
    report.stationarity = stationarity;
    report.dual_feasibility = std::max(0.0, dual_feas);
    return report;
}

Eigen::VectorXd default_start(const SpanProblem& pr) {
    // Tr M_p = 0.5 at this point, so it is strictly feasible.
    return 0.5 * pr.caps / pr.n;
}

UdSolution solve_impl(const Ensemble& ensemble, const Eigen::VectorXd& start) {
    const SpanProblem pr = make_problem(ensemble);
    std::vector<int> all(static_cast<size_t>(pr.n));
    for (int i = 0; i < pr.n; ++i) all[static_cast<size_t>(i)] = i;

    int budget = kMaxNewtonSteps;
    BarrierState full = run_barrier(pr, all, start, budget);
    int iterations = full.newton_steps;
    budget -= full.newton_steps;

    const auto finish = [&](const BarrierState& st, const Eigen::MatrixXcd& certificate) {
        UdSolution sol;
        sol.certificate = certificate;

        // M_p is linear in p and M_p <= 1 is active at every optimum (all
        // priors are positive), so pushing the iterate radially onto the
        // boundary is feasible and closes the barrier's residual gap.
        sol.p_star = st.p;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(measurement_operator(pr, st.p),
                                                            Eigen::EigenvaluesOnly);
        const double top = eig.eigenvalues().maxCoeff();
        if (top > 0.0) sol.p_star /= top;

        sol.p_max = pr.eta.dot(sol.p_star);
        sol.kkt = evaluate_kkt(pr, sol.p_star, sol.certificate);
        sol.iterations = iterations;
        return sol;
    };

    // The certificate comes from the full run's strictly interior iterate,
    // where the slack is invertible. Its dual margin on state i is 1/(t p_i)
    // > 0 by the centering condition, so it certifies every support face;
    // face-restricted iterates do not share that property.
    const Eigen::MatrixXcd certificate = clip_psd(slack_inverse(pr, full.p) / full.t);
    UdSolution best = finish(full, certificate);

    // Active-set polish: the central path leaves O(sqrt(gap)) residue in
    // components that vanish at the optimum whenever strict complementarity
    // fails, so the primal is re-solved on the detected face. Off-face entries
    // are exactly zero afterwards, so the support can only shrink.
    std::vector<int> support = detect_support(full.p);
    while (static_cast<int>(support.size()) < pr.n) {
        Eigen::VectorXd p0 = Eigen::VectorXd::Zero(pr.n);
        for (int i : support) p0(i) = std::max(full.p(i), 1e-8 * pr.caps(i));

        BarrierState st = run_barrier(pr, support, p0, budget);
        iterations += st.newton_steps;
        budget -= st.newton_steps;

        // Either certificate may witness the face solution: the face run's own
        // fails when the face slack hides a dual constraint (orthogonal
        // reciprocals), the full run's fails when strict complementarity
        // degeneracy leaves it weight on directions the face leaves open.
        UdSolution cand = finish(st, clip_psd(slack_inverse(pr, st.p) / st.t));
        UdSolution cand_full = finish(st, certificate);
        if (cand_full.kkt.max_residual() < cand.kkt.max_residual()) cand = cand_full;
        // A face solution certified to 1e-8 is preferred outright: it carries
        // exact zeros and exact caps where the interior iterate only carries
        // central-path residue of the same order.
        if (cand.kkt.optimal(1e-8) || cand.kkt.max_residual() <= best.kkt.max_residual())
            best = cand;

        std::vector<int> next = detect_support(st.p);
        if (next == support) break;
        support = std::move(next);
    }
    return best;
}

}  // namespace

Eigen::VectorXd success_caps(const Ensemble& ensemble) {
    return ensemble.reciprocals().overlaps.diagonal().real().cwiseInverse();
}

UdSolution solve(const Ensemble& ensemble) {
    const SpanProblem pr = make_problem(ensemble);
    return solve_impl(ensemble, default_start(pr));
}

namespace detail {
UdSolution solve_from(const Ensemble& ensemble, const Eigen::VectorXd& start) {
    return solve_impl(ensemble, start);
}
}  // namespace detail

KktReport verify_kkt(const Ensemble& ensemble, const Eigen::VectorXd& p,
                     const Eigen::MatrixXcd& certificate) {
    const int n = ensemble.size();
    if (p.size() != n)
        throw DimensionMismatch("success vector has length " + std::to_string(p.size()) +
                                ", expected " + std::to_string(n));
    if (certificate.rows() != n || certificate.cols() != n)
        throw DimensionMismatch("certificate must be " + std::to_string(n) + "x" +
                                std::to_string(n));
    return evaluate_kkt(make_problem(ensemble), p, certificate);
}

std::optional<UdSolution> single_state_solution(const Ensemble& ensemble, int index) {
    const int n = ensemble.size();
    if (index < 0 || index >= n) throw std::out_of_range("state index out of range");

    const Eigen::MatrixXcd& rec = ensemble.reciprocals().overlaps;
    const Eigen::VectorXd& eta = ensemble.priors();
    const double self = std::real(rec(index, index));
    for (int k = 0; k < n; ++k) {
        const double lhs = eta(k) / eta(index);
        const double rhs = std::norm(rec(k, index)) / (self * self);
        if (rhs - lhs < -1e-12 * (1.0 + lhs + rhs)) return std::nullopt;
    }

    const SpanProblem pr = make_problem(ensemble);
    UdSolution sol;
    sol.p_star = Eigen::VectorXd::Zero(n);
    sol.p_star(index) = 1.0 / self;
    sol.p_max = eta(index) / self;
    const Eigen::VectorXcd dual_coords = pr.recip.col(index);
    sol.certificate =
        (eta(index) / (self * self)) * (dual_coords * dual_coords.adjoint());
    sol.kkt = evaluate_kkt(pr, sol.p_star, sol.certificate);
    sol.iterations = 0;
    return sol;
}

OracleResult brute_force_oracle(const Ensemble& ensemble, int grid_steps) {
    const int n = ensemble.size();
    if (n > 4) throw TooLarge("brute-force oracle supports n <= 4, got n = " + std::to_string(n));
    if (grid_steps < 2) throw Error("grid_steps must be at least 2");

    const Eigen::MatrixXcd& rec = ensemble.reciprocals().overlaps;
    const Eigen::VectorXd caps = success_caps(ensemble);
    const Eigen::VectorXd& eta = ensemble.priors();

    const auto feasible = [&](const Eigen::VectorXd& p) {
        Eigen::MatrixXcd b(n, n);
        const Eigen::VectorXd root = p.cwiseSqrt();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b(i, j) = root(i) * root(j) * rec(i, j);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig;
        if (n <= 3)
            eig.computeDirect(b, Eigen::EigenvaluesOnly);
        else
            eig.compute(b, Eigen::EigenvaluesOnly);
        return eig.eigenvalues().maxCoeff() <= 1.0 + 1e-12;
    };

    OracleResult best;
    best.p_best = 0.0;
    best.best_p = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);

    // Depth-first over the grid; feasibility is monotone in every
    // coordinate, so the first infeasible step prunes the rest of the axis.
    const auto scan = [&](const auto& self_fn, int level) -> void {
        for (int k = 0; k < grid_steps; ++k) {
            p(level) = caps(level) * static_cast<double>(k) / (grid_steps - 1);
            if (!feasible(p)) break;
            if (level == n - 1) {
                const double value = eta.dot(p);
                if (value > best.p_best) {
                    best.p_best = value;
                    best.best_p = p;
                }
            } else {
                self_fn(self_fn, level + 1);
            }
        }
        p(level) = 0.0;
    };
    scan(scan, 0);
    return best;
}

double uniqueness_probe(const Ensemble& ensemble, int trials) {
    if (trials < 2) throw Error("uniqueness_probe needs at least 2 trials");
    const SpanProblem pr = make_problem(ensemble);

    std::vector<Eigen::VectorXd> answers;
    answers.reserve(static_cast<size_t>(trials));
    for (int trial = 0; trial < trials; ++trial) {
        SplitMix64 rng = SplitMix64::derive(0x75d15cULL, static_cast<std::uint64_t>(trial));
        Eigen::VectorXd start(pr.n);
        for (int i = 0; i < pr.n; ++i) start(i) = pr.caps(i) * rng.uniform(0.05, 0.95);
        double trace = 0.0;
        for (int i = 0; i < pr.n; ++i) trace += start(i) / pr.caps(i);
        start *= 0.7 / trace;  // Tr M_p = 0.7: strictly feasible
        answers.push_back(solve_impl(ensemble, start).p_star);
    }

    double deviation = 0.0;
    for (size_t a = 0; a < answers.size(); ++a)
        for (size_t b = a + 1; b < answers.size(); ++b)
            deviation = std::max(deviation, (answers[a] - answers[b]).lpNorm<Eigen::Infinity>());
    return deviation;
}

}  // namespace udisc
