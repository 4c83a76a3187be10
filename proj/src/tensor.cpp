#include "udisc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

#include "udisc/errors.hpp"
#include "udisc/rng.hpp"

namespace udisc {

TensorSpace::TensorSpace(std::vector<int> d) : dims(std::move(d)) {
    if (dims.empty()) throw ValidationError("dims", "tensor factorization needs at least one party");
    for (int dk : dims)
        if (dk < 1) throw ValidationError("dims", "local dimensions must be positive");
}

Eigen::Index TensorSpace::total_dim() const {
    Eigen::Index total = 1;
    for (int dk : dims) total *= dk;
    return total;
}

ProductDecomposition is_product_vector(const Ket& v, const TensorSpace& space) {
    if (v.dim() != space.total_dim())
        throw DimensionMismatch("vector of dim " + std::to_string(v.dim()) +
                                " in tensor space of dim " + std::to_string(space.total_dim()));

    ProductDecomposition result;
    Eigen::VectorXcd current = v.normalized().amplitudes;

    // Peel one party per leading cut; each cut must be Schmidt rank one.
    const int m = space.parties();
    for (int k = 0; k + 1 < m; ++k) {
        const Eigen::Index dk = space.dims[static_cast<size_t>(k)];
        const Eigen::Index rest = current.size() / dk;
        Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
            a(current.data(), dk, rest);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& sigma = svd.singularValues();
        const double ratio = sigma.size() > 1 ? sigma(1) / sigma(0) : 0.0;
        result.residual = std::max(result.residual, ratio);
        if (ratio > kProductTol) {
            result.is_product = false;
            result.factors.clear();
            return result;
        }
        result.factors.push_back(phase_fixed(Ket(svd.matrixU().col(0))));
        current = svd.matrixV().col(0).conjugate();
    }
    result.factors.push_back(phase_fixed(Ket(current).normalized()));
    result.is_product = true;
    return result;
}

Eigen::MatrixXcd reduced_operator(const Ket& v, const TensorSpace& space, int keep) {
    if (v.dim() != space.total_dim())
        throw DimensionMismatch("vector of dim " + std::to_string(v.dim()) +
                                " in tensor space of dim " + std::to_string(space.total_dim()));
    if (keep < 0 || keep >= space.parties()) throw std::out_of_range("party index out of range");

    Eigen::Index left = 1, right = 1;
    for (int k = 0; k < keep; ++k) left *= space.dims[static_cast<size_t>(k)];
    for (int k = keep + 1; k < space.parties(); ++k) right *= space.dims[static_cast<size_t>(k)];
    const Eigen::Index dk = space.dims[static_cast<size_t>(keep)];

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dk, dk);
    for (Eigen::Index l = 0; l < left; ++l)
        for (Eigen::Index r = 0; r < right; ++r)
            for (Eigen::Index i = 0; i < dk; ++i)
                for (Eigen::Index j = 0; j < dk; ++j)
                    rho(i, j) += v.amplitudes((l * dk + i) * right + r) *
                                 std::conj(v.amplitudes((l * dk + j) * right + r));
    return rho;
}

Eigen::MatrixXcd LoccProtocol::success_operator() const {
    Ket all = local_states.front();
    for (size_t k = 1; k < local_states.size(); ++k) all = tensor(all, local_states[k]);
    return all.amplitudes * all.amplitudes.adjoint();
}

LoccProtocol build_locc_protocol(const Ensemble& ensemble, const TensorSpace& space,
                                 int target) {
    if (target < 0 || target >= ensemble.size())
        throw std::out_of_range("target state index out of range");
    if (ensemble.dim() != space.total_dim())
        throw DimensionMismatch("ensemble dim " + std::to_string(ensemble.dim()) +
                                " does not match tensor space dim " +
                                std::to_string(space.total_dim()));

    const Ket& reciprocal = ensemble.reciprocals().vectors[static_cast<size_t>(target)];
    ProductDecomposition pd = is_product_vector(reciprocal, space);
    if (!pd.is_product)
        throw NotProduct("reciprocal vector of state " + std::to_string(target + 1) +
                         " is entangled across the given factorization");

    LoccProtocol protocol;
    protocol.space = space;
    protocol.local_states = std::move(pd.factors);
    protocol.target_index = target;
    return protocol;
}

namespace {

// Projects `w` onto the success branch |φ_k⟩⟨φ_k| of party k, in place
// through `branch`; returns the squared norm of the branch.
double success_branch(const Eigen::VectorXcd& w, const Ket& phi, Eigen::Index left,
                      Eigen::Index dk, Eigen::Index right, Eigen::VectorXcd& branch) {
    branch.setZero();
    for (Eigen::Index l = 0; l < left; ++l)
        for (Eigen::Index r = 0; r < right; ++r) {
            Complex overlap(0.0, 0.0);
            for (Eigen::Index i = 0; i < dk; ++i)
                overlap += std::conj(phi.amplitudes(i)) * w((l * dk + i) * right + r);
            for (Eigen::Index i = 0; i < dk; ++i)
                branch((l * dk + i) * right + r) = phi.amplitudes(i) * overlap;
        }
    return branch.squaredNorm();
}

}  // namespace

LoccSimulation simulate_locc(const LoccProtocol& protocol, const Ensemble& ensemble,
                             long long trials, std::uint64_t seed) {
    if (trials < 1) throw Error("simulate_locc needs at least one trial");
    if (ensemble.dim() != protocol.space.total_dim())
        throw DimensionMismatch("ensemble does not live in the protocol's tensor space");

    const int n = ensemble.size();
    const int m = protocol.space.parties();
    Eigen::VectorXd cumulative(n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += ensemble.priors()(i);
        cumulative(i) = acc;
    }

    std::vector<Eigen::Index> lefts(static_cast<size_t>(m)), rights(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        Eigen::Index left = 1, right = 1;
        for (int a = 0; a < k; ++a) left *= protocol.space.dims[static_cast<size_t>(a)];
        for (int a = k + 1; a < m; ++a) right *= protocol.space.dims[static_cast<size_t>(a)];
        lefts[static_cast<size_t>(k)] = left;
        rights[static_cast<size_t>(k)] = right;
    }

    LoccSimulation sim;
    sim.trials = trials;

    constexpr long long kChunk = 1 << 16;
    Eigen::VectorXcd w(ensemble.dim()), branch(ensemble.dim());
    for (long long chunk_start = 0; chunk_start < trials; chunk_start += kChunk) {
        SplitMix64 rng =
            SplitMix64::derive(seed, static_cast<std::uint64_t>(chunk_start / kChunk));
        const long long chunk_end = std::min(trials, chunk_start + kChunk);
        for (long long trial = chunk_start; trial < chunk_end; ++trial) {
            const double u = rng.uniform();
            int state = n - 1;
            for (int i = 0; i < n; ++i)
                if (u < cumulative(i)) {
                    state = i;
                    break;
                }

            w = ensemble.states()[static_cast<size_t>(state)].amplitudes;
            double weight = w.squaredNorm();
            bool all_success = true;
            for (int k = 0; k < m && all_success; ++k) {
                const double branch_weight =
                    success_branch(w, protocol.local_states[static_cast<size_t>(k)],
                                   lefts[static_cast<size_t>(k)],
                                   protocol.space.dims[static_cast<size_t>(k)],
                                   rights[static_cast<size_t>(k)], branch);
                if (rng.uniform() < branch_weight / weight) {
                    w = branch;
                    weight = branch_weight;
                } else {
                    all_success = false;
                }
            }
            if (all_success) {
                ++sim.success_count;
                if (state != protocol.target_index) ++sim.error_count;
            }
        }
    }

    sim.empirical_success = static_cast<double>(sim.success_count) / static_cast<double>(trials);
    sim.empirical_error = static_cast<double>(sim.error_count) / static_cast<double>(trials);
    return sim;
}

Nonexistence2x2Report check_2x2_nonexistence(const std::vector<Ket>& basis) {
    if (basis.size() != 4) throw Error("2x2 check needs exactly four states");
    const TensorSpace space({2, 2});
    for (const Ket& state : basis) {
        if (state.dim() != 4)
            throw DimensionMismatch("2x2 check needs dimension-4 states");
        if (!is_product_vector(state, space).is_product)
            throw NotAllProduct("input state is entangled across the 2x2 factorization");
    }

    ReciprocalSet reciprocals;
    try {
        reciprocals = reciprocal_set(basis);
    } catch (const SingularGram& e) {
        throw NotABasis(std::string("states do not form a basis: ") + e.what());
    }

    Nonexistence2x2Report report;
    for (int i = 0; i < 4; ++i)
        if (is_product_vector(reciprocals.vectors[static_cast<size_t>(i)], space).is_product)
            report.product_reciprocal_indices.push_back(i);

    for (int i : report.product_reciprocal_indices) {
        bool found = false;
        for (int j : report.product_reciprocal_indices)
            if (j != i) {
                report.witnesses.emplace_back(i, j);
                found = true;
                break;
            }
        if (!found) report.assertion_holds = false;
    }
    return report;
}

}  // namespace udisc
