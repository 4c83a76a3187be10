#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "udisc/scenarios.hpp"
#include "udisc/tensor.hpp"

using namespace udisc;

namespace {

Eigen::VectorXd uniform_priors(int n) {
    return Eigen::VectorXd::Constant(n, 1.0 / n);
}

Ket bell_state() {
    const double s = 1.0 / std::sqrt(2.0);
    return Ket{s, 0, 0, s};
}

}  // namespace

TEST_SUITE("tensor") {

TEST_CASE("tensor space validates and multiplies dimensions") {
    CHECK(TensorSpace({2, 3}).total_dim() == 6);
    CHECK(TensorSpace({2, 2, 3}).total_dim() == 12);
    CHECK(TensorSpace({5}).parties() == 1);
    CHECK_THROWS_AS(TensorSpace(std::vector<int>{}), ValidationError);
    CHECK_THROWS_AS(TensorSpace({2, 0}), ValidationError);
}

TEST_CASE("row-major flattening matches the tensor helper") {
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 3; ++j) {
            const Ket t = tensor(basis_ket(2, i), basis_ket(3, j));
            CHECK(std::abs(t.amplitudes(i * 3 + j) - 1.0) < 1e-15);
        }
}

TEST_CASE("product vectors factor and reassemble up to global phase") {
    SplitMix64 rng(555);
    const TensorSpace space({2, 2, 3});
    for (int trial = 0; trial < 10; ++trial) {
        const Ket a = testing::random_unit_ket(rng, 2);
        const Ket b = testing::random_unit_ket(rng, 2);
        const Ket c = testing::random_unit_ket(rng, 3);
        const Ket v = tensor(tensor(a, b), c);

        const ProductDecomposition pd = is_product_vector(v, space);
        REQUIRE(pd.is_product);
        REQUIRE(pd.factors.size() == 3);
        CHECK(pd.residual < 1e-12);

        const Ket rebuilt = tensor(tensor(pd.factors[0], pd.factors[1]), pd.factors[2]);
        const Ket expected = phase_fixed(v);
        CHECK((phase_fixed(rebuilt).amplitudes - expected.amplitudes).norm() < 1e-10);
    }
}

TEST_CASE("entangled vectors are rejected with a large residual") {
    const ProductDecomposition pd = is_product_vector(bell_state(), TensorSpace({2, 2}));
    CHECK_FALSE(pd.is_product);
    CHECK(pd.factors.empty());
    CHECK(pd.residual == doctest::Approx(1.0));  // symmetric Schmidt spectrum
}

TEST_CASE("product test validates dimensions and zero vectors") {
    CHECK_THROWS_AS(is_product_vector(Ket{1, 0, 0}, TensorSpace({2, 2})), DimensionMismatch);
    CHECK_THROWS_AS(is_product_vector(Ket{0, 0, 0, 0}, TensorSpace({2, 2})), ZeroVector);
}

TEST_CASE("six-state reciprocals: only the first is a product vector") {
    const Scenario scenario = builtin_scenario(ScenarioId::Example1);
    const Ensemble ensemble(scenario.states, uniform_priors(6));
    const TensorSpace& space = *scenario.space;

    const ProductDecomposition first =
        is_product_vector(ensemble.reciprocals().vectors[0], space);
    REQUIRE(first.is_product);
    CHECK((first.factors[0].amplitudes - basis_ket(2, 0).amplitudes).norm() < 1e-12);
    CHECK((first.factors[1].amplitudes - basis_ket(3, 0).amplitudes).norm() < 1e-12);

    for (size_t i = 1; i < 6; ++i)
        CHECK_FALSE(is_product_vector(ensemble.reciprocals().vectors[i], space).is_product);
}

TEST_CASE("reduced operator traces to the squared norm") {
    SplitMix64 rng(808);
    const TensorSpace space({2, 3});
    const Ket v = testing::random_unit_ket(rng, 6);
    for (int party = 0; party < 2; ++party) {
        const Eigen::MatrixXcd rho = reduced_operator(v, space, party);
        CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
        CHECK(std::abs(rho.trace().imag()) < 1e-14);
    }
    CHECK_THROWS_AS(reduced_operator(v, space, 2), std::out_of_range);
}

TEST_CASE("reduced operator of a Bell state is maximally mixed") {
    const Eigen::MatrixXcd rho = reduced_operator(bell_state(), TensorSpace({2, 2}), 0);
    CHECK((rho - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("entangled reciprocal has a rank-two qubit marginal") {
    const Scenario scenario = builtin_scenario(ScenarioId::Example1);
    const Ensemble ensemble(scenario.states, uniform_priors(6));
    const Eigen::MatrixXcd rho =
        reduced_operator(ensemble.reciprocals().vectors[3], *scenario.space, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues()(0) > 1e-6 * eig.eigenvalues()(1));
}

TEST_CASE("local protocol projects onto the product reciprocal direction") {
    const Scenario scenario = builtin_scenario(ScenarioId::Example1);
    const Ensemble ensemble(scenario.states, uniform_priors(6));

    const LoccProtocol protocol = build_locc_protocol(ensemble, *scenario.space, 0);
    CHECK(protocol.target_index == 0);
    CHECK((protocol.local_states[0].amplitudes - basis_ket(2, 0).amplitudes).norm() < 1e-12);
    CHECK((protocol.local_states[1].amplitudes - basis_ket(3, 0).amplitudes).norm() < 1e-12);

    const Eigen::MatrixXcd op = protocol.success_operator();
    CHECK(std::abs(op.trace().real() - 1.0) < 1e-12);
    // Proportional to |reciprocal><reciprocal|: annihilates every other state.
    for (size_t j = 1; j < 6; ++j) {
        const Eigen::VectorXcd& psi = ensemble.states()[j].amplitudes;
        CHECK(std::abs((psi.adjoint() * op * psi)(0)) < 1e-12);
    }

    CHECK_THROWS_AS(build_locc_protocol(ensemble, *scenario.space, 1), NotProduct);
    CHECK_THROWS_AS(build_locc_protocol(ensemble, *scenario.space, 9), std::out_of_range);
}

TEST_CASE("orthonormal product basis simulates at rate 1/4") {
    const Scenario scenario = builtin_scenario(ScenarioId::OrthonormalDemo);
    const Ensemble ensemble(scenario.states, uniform_priors(4));
    const LoccProtocol protocol = build_locc_protocol(ensemble, *scenario.space, 0);

    const LoccSimulation sim = simulate_locc(protocol, ensemble, 200000, 42);
    CHECK(sim.error_count == 0);
    // Binomial 3-sigma band around 1/4.
    const double sigma = std::sqrt(0.25 * 0.75 / 200000.0);
    CHECK(std::abs(sim.empirical_success - 0.25) < 3.0 * sigma);
}

TEST_CASE("simulation is reproducible for a fixed seed") {
    const Scenario scenario = builtin_scenario(ScenarioId::Example1);
    const Ensemble ensemble(scenario.states, two_parameter_priors(0.9, 0.1));
    const LoccProtocol protocol = build_locc_protocol(ensemble, *scenario.space, 0);

    const LoccSimulation first = simulate_locc(protocol, ensemble, 100000, 7);
    const LoccSimulation second = simulate_locc(protocol, ensemble, 100000, 7);
    CHECK(first.success_count == second.success_count);
    CHECK(first.error_count == 0);
    CHECK(second.error_count == 0);
}

TEST_CASE("computational 2x2 basis has four product reciprocals") {
    const Scenario scenario = builtin_scenario(ScenarioId::OrthonormalDemo);
    const Nonexistence2x2Report report = check_2x2_nonexistence(scenario.states);
    CHECK(report.product_reciprocal_indices.size() == 4);
    CHECK(report.assertion_holds);
    CHECK_FALSE(report.witnesses.empty());
}

TEST_CASE("2x2 check rejects malformed inputs") {
    const Scenario scenario = builtin_scenario(ScenarioId::OrthonormalDemo);

    std::vector<Ket> three(scenario.states.begin(), scenario.states.end() - 1);
    CHECK_THROWS_AS(check_2x2_nonexistence(three), Error);

    std::vector<Ket> entangled = scenario.states;
    entangled[3] = bell_state();
    CHECK_THROWS_AS(check_2x2_nonexistence(entangled), NotAllProduct);

    std::vector<Ket> dependent = scenario.states;
    dependent[3] = dependent[2];
    CHECK_THROWS_AS(check_2x2_nonexistence(dependent), NotABasis);
}

}  // TEST_SUITE
