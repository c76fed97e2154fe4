#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qdetect/audit.hpp"
#include "qdetect/solver.hpp"

using namespace qdetect;

namespace {

const PaperScenario &literal() {
    static const PaperScenario s = build_literal_scenario();
    return s;
}

const PaperScenario &repaired() {
    static const PaperScenario s = repair_scenario(literal());
    return s;
}

ProblemInstance random_problem(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const CompositeSpace space{4, 4};
    const SpinSystem spin = SpinSystem::with_dim(4);
    auto pair = [&](const char *r, const char *s, std::size_t rank, std::uint32_t mask) {
        const SpinSubset subset(mask, 4);
        return PropertyDetectorPair{r, s, oracle::random_projector(4, rank, Space::spatial, gen), subset,
                                    subset_projector(spin, subset)};
    };
    std::array<PropertyDetectorPair, 3> pairs{pair("A", "X", 2, 0b0011), pair("B", "Y", 1, 0b0101),
                                              pair("C", "Z", 3, 0b1001)};
    return {"random", space, spin, oracle::random_vector(16, Space::composite, gen), pairs};
}

}  // namespace

TEST(CheckDetector, PrintedPairPasses) {
    const auto psi = build_Psi_literal().vector();
    const auto c = check_detector(build_detectors().lifted[0], build_E().lifted, psi);
    EXPECT_EQ(c.verdict, Verdict::pass);
    EXPECT_LE(c.residual, 1e-12);
}

TEST(CheckDetector, WrongPairFails) {
    const auto psi = build_Psi_literal().vector();
    const auto c = check_detector(build_detectors().lifted[1], build_E().lifted, psi);
    EXPECT_EQ(c.verdict, Verdict::fail);
    EXPECT_GT(c.residual, 0.1);
    EXPECT_EQ(c.commutator_norm, 0.0);
}

TEST(CheckDetector, RejectsBadInput) {
    const auto e = build_E().lifted;
    EXPECT_THROW(check_detector(e, e, StateVector(80, Space::composite)), ContractError);
    EXPECT_THROW(check_detector(e, Operator::identity(8, Space::spin), build_Psi_literal().vector()), ContractError);
}

TEST(CheckF, SpinDetectorIsStructural) {
    const auto f = check_F_commutation(build_detectors().lifted[0], scenario_space());
    EXPECT_EQ(f.verdict, Verdict::pass);
    EXPECT_TRUE(f.structural);
    const auto id = check_F_commutation(Operator::identity(80, Space::composite), scenario_space());
    EXPECT_EQ(id.verdict, Verdict::pass);
}

TEST(CheckF, SpatialOperatorFails) {
    const auto f = check_F_commutation(build_E().lifted, scenario_space());
    EXPECT_EQ(f.verdict, Verdict::fail);
    EXPECT_FALSE(f.structural);
    EXPECT_EQ(f.samples, kFSampleCount);
    EXPECT_GT(f.max_commutator_norm, 1.0);
}

TEST(CheckF, SampleFamilyIsDeterministicHermitian) {
    const auto a = random_spatial_hermitian(10, kFSampleSeed, 3);
    EXPECT_EQ(a, random_spatial_hermitian(10, kFSampleSeed, 3));
    EXPECT_NE(a, random_spatial_hermitian(10, kFSampleSeed, 4));
    EXPECT_TRUE(classify(a, 1e-12).hermitian);
}

TEST(Conditions, CompleteAndOrdered) {
    const auto r = evaluate_conditions(literal());
    std::vector<std::string> ids;
    for (const auto &e : r.entries) {
        ids.push_back(e.id);
    }
    const std::vector<std::string> expected{
        "PROJ.E", "PROJ.G", "PROJ.L", "PROJ.T", "PROJ.Y", "PROJ.W", "C.1", "C.2", "C.3", "C.4", "C.5",
        "C.6", "C.7", "C.8", "C.9", "C.10", "D1.i[T]", "D1.ii[T;E]", "D1.i[Y]", "D1.ii[Y;G]", "D1.i[W]",
        "D1.ii[W;L]"};
    EXPECT_EQ(ids, expected);
    EXPECT_EQ(r.variant, "literal");
    EXPECT_THROW(r.at("C.11"), std::out_of_range);
}

TEST(Conditions, LiteralFailures) {
    const auto r = evaluate_conditions(literal());
    EXPECT_EQ(r.failing_ids(), (std::vector<std::string>{"PROJ.G", "C.5", "C.6", "D1.ii[Y;G]", "D1.ii[W;L]"}));
    EXPECT_TRUE(r.passes("C.4"));
    EXPECT_FALSE(r.passes());
    EXPECT_NEAR(r.at("C.5").components.at("detection_residual"), 0.434864, 1e-6);
}

TEST(Conditions, RepairedPassesAll) {
    const auto r = evaluate_conditions(repaired());
    EXPECT_TRUE(r.passes()) << ::testing::PrintToString(r.failing_ids());
    EXPECT_GE(r.at("C.10").measured, 0.5);
}

TEST(Conditions, CommutatorsMatchOracle) {
    const auto &p = repaired().problem;
    const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    const auto r = evaluate_conditions(p);
    for (std::size_t k = 0; k < 3; ++k) {
        const auto a = oracle::to_eigen(p.pairs[pairs[k].first].property);
        const auto b = oracle::to_eigen(p.pairs[pairs[k].second].property);
        EXPECT_NEAR(r.at("C." + std::to_string(k + 1)).measured, (a * b - b * a).norm(), 1e-12);
    }
    const auto psi = oracle::to_eigen(p.state);
    const auto e = oracle::to_eigen(p.pairs[0].lifted_property(p.space));
    const double out = (psi - e * psi).norm() / psi.norm();
    EXPECT_NEAR(r.at("C.10").components.at("||psi - E psi||/||psi||"), out, 1e-12);
}

TEST(Conditions, ScaleInvariant) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto base = random_problem(seed);
        const auto r0 = evaluate_conditions(base);
        for (Complex c : {Complex(2.0), Complex(-1.0), Complex(0.0, 1.0)}) {
            auto scaled = base;
            scaled.state *= c;
            const auto r1 = evaluate_conditions(scaled);
            ASSERT_EQ(r0.entries.size(), r1.entries.size());
            for (std::size_t i = 0; i < r0.entries.size(); ++i) {
                EXPECT_NEAR(r0.entries[i].measured, r1.entries[i].measured, 1e-12) << r0.entries[i].id;
                EXPECT_EQ(r0.entries[i].verdict, r1.entries[i].verdict) << r0.entries[i].id;
            }
        }
    }
}

TEST(Conditions, Deterministic) {
    const auto a = evaluate_conditions(literal());
    const auto b = evaluate_conditions(literal());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        EXPECT_EQ(a.entries[i].measured, b.entries[i].measured);
    }
}

TEST(Conditions, LooserToleranceNeverAddsFailures) {
    const auto strict = evaluate_conditions(literal());
    Tolerances loose;
    loose.abs_tol = 1e-1;
    loose.audit_warn_tol = 1e-1;
    const auto relaxed = evaluate_conditions(literal(), loose);
    for (std::size_t i = 0; i < strict.entries.size(); ++i) {
        const auto &s = strict.entries[i];
        if (s.relation == Relation::at_most && s.verdict == Verdict::pass) {
            EXPECT_EQ(relaxed.entries[i].verdict, Verdict::pass) << s.id;
        }
    }
    EXPECT_EQ(relaxed.at("C.6").verdict, Verdict::fail);
}

TEST(Structural, PinnedFindings) {
    const auto r = structural_audit(literal());
    EXPECT_NEAR(r.at("STRUCT.G.psi(2).norm").measured, 0.75, 1e-12);
    EXPECT_EQ(r.at("STRUCT.G.psi(2).norm").verdict, Verdict::informational);
    EXPECT_NEAR(r.at("STRUCT.Psi.minus_half.overlap").measured, 5.0 / std::sqrt(385.0), 1e-12);
    EXPECT_LE(r.at("STRUCT.channel.overlap[7/2,3/2]").measured, 1e-12);
    EXPECT_EQ(r.at("STRUCT.channel.overlap[7/2,3/2]").verdict, Verdict::pass);
    EXPECT_NEAR(r.at("STRUCT.feasibility[W]").measured, 0.194331, 1e-6);
    EXPECT_LE(r.at("STRUCT.pipeline.reconstruction").measured, 1e-12);
    std::size_t count = 0;
    for (const auto &e : r.entries) {
        count += e.id.starts_with("STRUCT.") ? 1 : 0;
        EXPECT_NE(e.verdict, Verdict::fail) << e.id;
    }
    EXPECT_GE(count, 6u);
    EXPECT_FALSE(r.notes.empty());
}

TEST(Structural, RepairedChannelsAreClean) {
    const auto r = structural_audit(repaired());
    EXPECT_LE(r.at("STRUCT.channel.gram").measured, 1e-10);
    EXPECT_LE(r.at("STRUCT.pipeline.isometry").measured, 1e-10);
    EXPECT_LE(r.at("STRUCT.pipeline.norm").measured, 1e-10);
}

TEST(Verdicts, Strings) {
    EXPECT_EQ(to_string(Verdict::informational), "informational");
    EXPECT_EQ(to_string(Relation::greater_than), ">");
}
