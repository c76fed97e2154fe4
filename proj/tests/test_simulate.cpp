#include <gtest/gtest.h>

#include <set>

#include "oracle.hpp"
#include "qdetect/counter_rng.hpp"
#include "qdetect/simulate.hpp"
#include "qdetect/solver.hpp"

using namespace qdetect;

namespace {

std::vector<Operator> printed_detectors() {
    const auto d = build_detectors();
    return {d.lifted.begin(), d.lifted.end()};
}

const StateVector &literal_psi() {
    static const StateVector v = build_Psi_literal().vector();
    return v;
}

// Eigen oracle: ||prod_i (P_i or 1 - P_i) psi||^2 / ||psi||^2.
double oracle_probability(const StateVector &psi, const std::vector<Operator> &dets, const std::vector<int> &bits) {
    oracle::Vec v = oracle::to_eigen(psi);
    const double n2 = v.squaredNorm();
    for (std::size_t i = 0; i < dets.size(); ++i) {
        const oracle::Mat p = oracle::to_eigen(dets[i]);
        v = bits[i] == 1 ? oracle::Vec(p * v) : oracle::Vec(v - p * v);
    }
    return v.squaredNorm() / n2;
}

}  // namespace

TEST(OutcomeBits, Ordering) {
    EXPECT_EQ(outcome_bits(0, 3), (std::vector<int>{1, 1, 1}));
    EXPECT_EQ(outcome_bits(1, 3), (std::vector<int>{1, 1, 0}));
    EXPECT_EQ(outcome_bits(2, 3), (std::vector<int>{1, 0, 1}));
    EXPECT_EQ(outcome_bits(7, 3), (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(outcome_bits(1, 1), (std::vector<int>{0}));
}

TEST(Exact, MatchesOracleAndSumsToOne) {
    const auto dets = printed_detectors();
    for (const auto &psi : {literal_psi(), repaired_state()}) {
        const auto dist = exact_joint_distribution(psi, dets);
        ASSERT_EQ(dist.outcomes.size(), 8u);
        EXPECT_NEAR(dist.total_probability(), 1.0, 1e-12);
        for (const auto &o : dist.outcomes) {
            EXPECT_NEAR(o.probability, oracle_probability(psi, dets, o.bits), 1e-12);
            EXPECT_GE(o.probability, 0.0);
        }
        EXPECT_EQ(dist.provenance, OutcomeDistribution::Provenance::exact);
    }
}

TEST(Exact, PinnedOutcomes) {
    const auto dist = exact_joint_distribution(literal_psi(), printed_detectors());
    const auto phi = spin_components(literal_psi(), scenario_space());
    const double n2 = literal_psi().norm_squared();
    EXPECT_NEAR(dist.at({1, 1, 1}).probability, phi[0].norm_squared() / n2, 1e-14);
    EXPECT_EQ(dist.at({1, 1, 0}).probability, 0.0);
    EXPECT_EQ(dist.at({0, 1, 0}).probability, 0.0);
    EXPECT_THROW(dist.at({1, 1}), std::out_of_range);
}

TEST(Exact, SingleDetectorMatchesProperty) {
    const std::vector<Operator> t{build_detectors().lifted[0]};
    const auto dist = exact_joint_distribution(literal_psi(), t);
    const double expected = (build_E().lifted * literal_psi()).norm_squared() / literal_psi().norm_squared();
    EXPECT_NEAR(dist.at({1}).probability, expected, 1e-12);
}

TEST(Exact, SpinValuesHaveDistinctOutcomes) {
    const auto det = build_detectors();
    std::set<std::vector<int>> seen;
    for (std::size_t m = 0; m < 8; ++m) {
        std::vector<int> bits;
        for (const auto &s : det.subsets) {
            bits.push_back(s.contains(m) ? 1 : 0);
        }
        seen.insert(bits);
    }
    EXPECT_EQ(seen.size(), 8u);
}

TEST(Exact, PermutationPhaseAndScaleInvariant) {
    const auto dets = printed_detectors();
    const auto base = exact_joint_distribution(literal_psi(), dets);
    const std::vector<Operator> permuted{dets[2], dets[0], dets[1]};
    const auto p = exact_joint_distribution(literal_psi(), permuted);
    for (const auto &o : base.outcomes) {
        EXPECT_NEAR(p.at({o.bits[2], o.bits[0], o.bits[1]}).probability, o.probability, 1e-14);
    }
    for (Complex c : {Complex(2.0), Complex(-1.0), Complex(0.0, 1.0)}) {
        StateVector scaled = literal_psi();
        scaled *= c;
        const auto s = exact_joint_distribution(scaled, dets);
        for (std::size_t i = 0; i < 8; ++i) {
            EXPECT_NEAR(s.outcomes[i].probability, base.outcomes[i].probability, 1e-14);
        }
    }
}

TEST(Exact, RejectsBadDetectors) {
    const auto psi = literal_psi();
    std::vector<Operator> bad{Complex(2.0) * build_E().lifted};
    EXPECT_THROW(exact_joint_distribution(psi, bad), ContractError);
    std::vector<Operator> clash{build_E().lifted, build_detectors().lifted[0]};
    clash[1] = lift_spatial(build_L().spatial, scenario_space());
    EXPECT_THROW(exact_joint_distribution(psi, clash), ContractError);
    EXPECT_THROW(exact_joint_distribution(psi, std::vector<Operator>{}), ContractError);
    EXPECT_THROW(exact_joint_distribution(StateVector(80, Space::composite), printed_detectors()), ContractError);
}

TEST(Sample, ZeroTrials) {
    const auto exact = exact_joint_distribution(literal_psi(), printed_detectors());
    const auto s = sample(exact, {kDefaultSeed, 0, 1});
    EXPECT_EQ(s.n_trials, 0u);
    for (const auto &o : s.outcomes) {
        EXPECT_EQ(o.count, 0u);
    }
}

TEST(Sample, DeterministicAndShardIndependent) {
    const auto exact = exact_joint_distribution(literal_psi(), printed_detectors());
    const auto a = sample(exact, {kDefaultSeed, 100000, 1});
    const auto b = sample(exact, {kDefaultSeed, 100000, 1});
    const auto c = sample(exact, {kDefaultSeed, 100000, 7});
    const auto d = sample(exact, {kDefaultSeed + 1, 100000, 1});
    std::uint64_t total = 0;
    bool differs = false;
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(a.outcomes[i].count, b.outcomes[i].count);
        EXPECT_EQ(a.outcomes[i].count, c.outcomes[i].count);
        differs |= a.outcomes[i].count != d.outcomes[i].count;
        total += a.outcomes[i].count;
    }
    EXPECT_TRUE(differs);
    EXPECT_EQ(total, 100000u);
    EXPECT_EQ(a.generator_id, rng::kGeneratorId);
    EXPECT_EQ(a.at({1, 1, 0}).count, 0u);
}

TEST(Sample, ConvergesToExact) {
    const auto exact = exact_joint_distribution(literal_psi(), printed_detectors());
    const double small = total_variation(exact, sample(exact, {kDefaultSeed, 1000, 1}));
    const double large = total_variation(exact, sample(exact, {kDefaultSeed, 1000000, 4}));
    EXPECT_LT(large, small);
    EXPECT_LT(large, 0.005);
}

TEST(Sample, FromStateMatchesFromExact) {
    const auto dets = printed_detectors();
    const auto a = sample(literal_psi(), dets, {7, 5000, 2});
    const auto b = sample(exact_joint_distribution(literal_psi(), dets), {7, 5000, 1});
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(a.outcomes[i].count, b.outcomes[i].count);
    }
}

TEST(CounterRng, StreamsAndRange) {
    const rng::CounterRng g(42, 0);
    EXPECT_EQ(g.at(5), rng::CounterRng(42, 0).at(5));
    EXPECT_NE(g.at(5), rng::CounterRng(42, 1).at(5));
    double mean = 0.0;
    for (std::uint64_t t = 0; t < 10000; ++t) {
        const double u = g.uniform_at(t);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        mean += u;
    }
    EXPECT_NEAR(mean / 10000.0, 0.5, 0.02);
}

TEST(Inference, RepairedRowsInfer) {
    const auto repaired = repair_scenario(build_literal_scenario());
    const auto rows = detection_inference_table(repaired.problem.state, repaired.problem);
    ASSERT_EQ(rows.size(), 3u);
    for (const auto &r : rows) {
        EXPECT_TRUE(r.inference) << r.detector;
        EXPECT_NEAR(r.p_detector, r.p_property, 1e-10);
    }
}

TEST(Inference, LiteralAndProductCounterexamples) {
    const auto literal = build_literal_scenario();
    const auto rows = detection_inference_table(literal.problem.state, literal.problem);
    EXPECT_TRUE(rows[0].inference);
    EXPECT_FALSE(rows[1].inference);
    EXPECT_FALSE(rows[2].inference);
    const auto product = tensor_vec(spatial_basis(1), sx_top_eigenvector(SpinSystem::seven_halves()));
    const auto prod_rows = detection_inference_table(product, literal.problem);
    EXPECT_FALSE(prod_rows[0].inference);
    EXPECT_GT(prod_rows[0].residual, 0.1);
}
