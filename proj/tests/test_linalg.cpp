#include <gtest/gtest.h>

#include <numeric>

#include "oracle.hpp"
#include "qdetect/linalg.hpp"
#include "qdetect/scenario.hpp"
#include "qdetect/spin.hpp"

using namespace qdetect;

namespace {

constexpr double kTol = 1e-10;

std::vector<StateVector> slit_one() {
    std::vector<StateVector> out;
    for (std::size_t i = 1; i <= 5; ++i) {
        out.push_back(spatial_basis(i));
    }
    return out;
}

double gram_identity_gap(const std::vector<StateVector> &vs) {
    auto g = oracle::to_eigen(gram_matrix(vs));
    return (g - oracle::Mat::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Matmul, IdentityAndZero) {
    const auto sz = s_z(SpinSystem::seven_halves());
    EXPECT_EQ(matmul(Operator::identity(8, Space::spin), sz), sz);
    EXPECT_EQ(matmul(sz, Operator::zero(8, Space::spin)), Operator::zero(8, Space::spin));
}

TEST(Matmul, WhichSlitProjectorIsIdempotent) {
    const auto e = build_E().spatial;
    EXPECT_LE(oracle::max_diff(matmul(e, e), e), kTol);
}

TEST(Matmul, RejectsMismatch) {
    EXPECT_THROW(matmul(Operator::identity(3, Space::spin), Operator::identity(4, Space::spin)), ContractError);
    EXPECT_THROW(matmul(Operator::identity(3, Space::spin), Operator::identity(3, Space::spatial)), ContractError);
}

TEST(Matmul, AgreesWithEigen) {
    std::mt19937_64 gen(7);
    const auto a = oracle::random_operator(9, Space::spatial, gen);
    const auto b = oracle::random_operator(9, Space::spatial, gen);
    const oracle::Mat ref = oracle::to_eigen(a) * oracle::to_eigen(b);
    EXPECT_LE((oracle::to_eigen(matmul(a, b)) - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Adjoint, InvolutionAndHermitianDiagonal) {
    std::mt19937_64 gen(3);
    const auto a = oracle::random_operator(6, Space::spin, gen);
    EXPECT_EQ(adjoint(adjoint(a)), a);
    const auto sz = s_z(SpinSystem::seven_halves());
    EXPECT_EQ(adjoint(sz), sz);
}

TEST(Adjoint, RaisingGivesLowering) {
    const auto ladder = s_ladder(SpinSystem::seven_halves());
    EXPECT_EQ(adjoint(ladder.raise), ladder.lower);
}

TEST(Tensor, IdentityTraceAndCommutation) {
    const CompositeSpace space = scenario_space();
    EXPECT_EQ(tensor(Operator::identity(10, Space::spatial), Operator::identity(8, Space::spin)),
              Operator::identity(80, Space::composite));
    const auto e = build_E().spatial;
    const auto lifted = tensor(e, Operator::identity(8, Space::spin));
    EXPECT_NEAR(lifted.trace().real(), 40.0, kTol);
    EXPECT_EQ(lifted.space(), Space::composite);
    const auto t = lift_spin(build_detectors().spin[0], space);
    EXPECT_EQ(commutator(lifted, t).frobenius_norm(), 0.0);
}

TEST(Tensor, RejectsWrongTags) {
    EXPECT_THROW(tensor(Operator::identity(2, Space::spin), Operator::identity(2, Space::spin)), ContractError);
    EXPECT_THROW(tensor_vec(StateVector::basis(2, 0, Space::spin), StateVector::basis(2, 0, Space::spatial)),
                 ContractError);
}

TEST(Tensor, MatchesKroneckerOracle) {
    std::mt19937_64 gen(11);
    const auto a = oracle::random_operator(10, Space::spatial, gen);
    const auto b = oracle::random_operator(8, Space::spin, gen);
    const auto ref = oracle::kron(oracle::to_eigen(a), oracle::to_eigen(b));
    EXPECT_LE((oracle::to_eigen(tensor(a, b)) - ref).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Tensor, MixedProductProperty) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 5; ++trial) {
        const auto a = oracle::random_operator(10, Space::spatial, gen);
        const auto c = oracle::random_operator(10, Space::spatial, gen);
        const auto b = oracle::random_operator(8, Space::spin, gen);
        const auto d = oracle::random_operator(8, Space::spin, gen);
        const auto lhs = tensor(a, b) * tensor(c, d);
        const auto rhs = tensor(a * c, b * d);
        EXPECT_LE((lhs - rhs).frobenius_norm(), kTol * rhs.frobenius_norm());
    }
}

TEST(TensorVec, BasisAlignmentAndNorm) {
    const auto v = tensor_vec(spatial_basis(1), StateVector::basis(8, 0, Space::spin));
    EXPECT_EQ(v[0], Complex(1.0));
    EXPECT_DOUBLE_EQ(v.norm(), 1.0);
    std::mt19937_64 gen(2);
    const auto u = oracle::random_vector(10, Space::spatial, gen);
    const auto w = oracle::random_vector(8, Space::spin, gen);
    EXPECT_NEAR(tensor_vec(u, w).norm(), u.norm() * w.norm(), 1e-12);
}

TEST(TensorVec, ConsistentWithTensor) {
    std::mt19937_64 gen(4);
    const auto a = oracle::random_operator(10, Space::spatial, gen);
    const auto b = oracle::random_operator(8, Space::spin, gen);
    const auto u = oracle::random_vector(10, Space::spatial, gen);
    const auto w = oracle::random_vector(8, Space::spin, gen);
    EXPECT_LE(distance(tensor(a, b) * tensor_vec(u, w), tensor_vec(a * u, b * w)), 1e-10);
}

TEST(TensorVec, SlitTwoVectorIsAnnihilated) {
    const auto e = lift_spatial(build_E().spatial, scenario_space());
    const auto v = tensor_vec(spatial_basis(6), StateVector::basis(8, 3, Space::spin));
    EXPECT_EQ((e * v).norm(), 0.0);
}

TEST(Commutator, TrivialCases) {
    std::mt19937_64 gen(9);
    const auto a = oracle::random_operator(7, Space::spatial, gen);
    EXPECT_EQ(commutator(a, a).frobenius_norm(), 0.0);
    EXPECT_EQ(commutator(a, Operator::identity(7, Space::spatial)).frobenius_norm(), 0.0);
}

TEST(Commutator, Antisymmetric) {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 10; ++trial) {
        const auto a = oracle::random_operator(8, Space::spin, gen);
        const auto b = oracle::random_operator(8, Space::spin, gen);
        EXPECT_LE((commutator(a, b) + commutator(b, a)).frobenius_norm(), kTol);
    }
}

TEST(GramSchmidt, OrthonormalInputUnchanged) {
    const std::vector<StateVector> in{spatial_basis(1), spatial_basis(2)};
    const auto r = gram_schmidt(in);
    EXPECT_EQ(r.rank, 2u);
    EXPECT_TRUE(r.defects.empty());
    EXPECT_LE(distance(r.basis[0], in[0]), 1e-15);
    EXPECT_LE(distance(r.basis[1], in[1]), 1e-15);
}

TEST(GramSchmidt, CollinearPair) {
    StateVector v = spatial_basis(1) + spatial_basis(3);
    const std::vector<StateVector> in{v, Complex(2.0) * v};
    const auto r = gram_schmidt(in);
    EXPECT_EQ(r.rank, 1u);
    EXPECT_LE(distance(r.basis[0], Complex(1.0 / v.norm()) * v), 1e-15);
    const bool has_dependent = std::any_of(r.defects.begin(), r.defects.end(), [](const GramDefect &d) {
        return d.kind == GramDefect::Kind::dependent && d.first == 1;
    });
    EXPECT_TRUE(has_dependent);
}

TEST(GramSchmidt, EmptyInput) {
    const auto r = gram_schmidt(std::vector<StateVector>{});
    EXPECT_EQ(r.rank, 0u);
    EXPECT_TRUE(r.basis.empty());
}

TEST(GramSchmidt, PrintedGVectorsHaveNormDefect) {
    const auto g = build_G_literal();
    std::vector<StateVector> vs;
    for (const auto &p : g.printed) {
        vs.push_back(p.vector());
    }
    const auto r = gram_schmidt(vs);
    EXPECT_EQ(r.rank, 3u);
    const bool psi2_norm = std::any_of(r.defects.begin(), r.defects.end(), [](const GramDefect &d) {
        return d.kind == GramDefect::Kind::norm && d.first == 1;
    });
    EXPECT_TRUE(psi2_norm);
}

TEST(GramSchmidt, RandomInputsGiveOrthonormalOutput) {
    std::mt19937_64 gen(21);
    for (std::size_t count : {1u, 3u, 6u, 10u, 13u}) {
        std::vector<StateVector> vs;
        for (std::size_t k = 0; k < count; ++k) {
            vs.push_back(oracle::random_vector(10, Space::spatial, gen));
        }
        const auto r = gram_schmidt(vs);
        EXPECT_EQ(r.rank, std::min<std::size_t>(count, 10));
        EXPECT_LE(gram_identity_gap(r.basis), kTol);
    }
}

TEST(GramSchmidt, LowRankRandomInputs) {
    std::mt19937_64 gen(22);
    std::vector<StateVector> base{oracle::random_vector(8, Space::spin, gen), oracle::random_vector(8, Space::spin, gen)};
    std::vector<StateVector> vs = base;
    vs.push_back(Complex(0.3, 1.0) * base[0] + Complex(-2.0) * base[1]);
    vs.push_back(oracle::random_vector(8, Space::spin, gen));
    const auto r = gram_schmidt(vs);
    EXPECT_EQ(r.rank, 3u);
    EXPECT_EQ(r.kept, (std::vector<std::size_t>{0, 1, 3}));
    EXPECT_LE(gram_identity_gap(r.basis), kTol);
}

TEST(Lowdin, FixedPointOnOrthonormalSet) {
    const auto in = slit_one();
    const auto out = lowdin_orthonormalize(in);
    for (std::size_t i = 0; i < in.size(); ++i) {
        EXPECT_LE(distance(in[i], out[i]), kTol);
    }
}

TEST(Lowdin, MatchesInverseSquareRootOracle) {
    const auto g = build_G_literal();
    std::vector<StateVector> vs;
    for (const auto &p : g.printed) {
        vs.push_back(p.vector());
    }
    const auto out = lowdin_orthonormalize(vs);
    EXPECT_LE(gram_identity_gap(out), kTol);

    oracle::Mat v(10, 3);
    for (int k = 0; k < 3; ++k) {
        v.col(k) = oracle::to_eigen(vs[k]);
    }
    const oracle::Mat s = v.adjoint() * v;
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(s);
    const oracle::Mat inv_sqrt =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
    const oracle::Mat ref = v * inv_sqrt;
    for (int k = 0; k < 3; ++k) {
        EXPECT_LE((oracle::to_eigen(out[k]) - ref.col(k)).norm(), kTol);
    }
}

TEST(Lowdin, PermutationEquivariant) {
    std::mt19937_64 gen(31);
    std::vector<StateVector> vs;
    for (int k = 0; k < 4; ++k) {
        vs.push_back(oracle::random_vector(10, Space::spatial, gen));
    }
    const auto out = lowdin_orthonormalize(vs);
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    std::vector<StateVector> permuted;
    for (auto p : perm) {
        permuted.push_back(vs[p]);
    }
    const auto out_p = lowdin_orthonormalize(permuted);
    for (std::size_t k = 0; k < perm.size(); ++k) {
        EXPECT_LE(distance(out_p[k], out[perm[k]]), kTol);
    }
}

TEST(Lowdin, RankDeficientNamesIndex) {
    const StateVector a = spatial_basis(1);
    const StateVector b = spatial_basis(2);
    const std::vector<StateVector> vs{a, b, a + b};
    try {
        lowdin_orthonormalize(vs);
        FAIL() << "expected RankDeficientError";
    } catch (const RankDeficientError &e) {
        EXPECT_EQ(e.dependent_index(), 2u);
    }
}

TEST(ProjectorFromOrthonormal, WhichSlitProjector) {
    const auto e = projector_from_orthonormal(slit_one());
    EXPECT_NEAR(e.trace().real(), 5.0, kTol);
    EXPECT_TRUE(is_projector(e, kTol));
    EXPECT_EQ(e, build_E().spatial);
}

TEST(ProjectorFromOrthonormal, CompleteBasisGivesIdentity) {
    std::vector<StateVector> all;
    for (std::size_t i = 1; i <= 10; ++i) {
        all.push_back(spatial_basis(i));
    }
    EXPECT_EQ(projector_from_orthonormal(all), Operator::identity(10, Space::spatial));
}

TEST(ProjectorFromOrthonormal, PrintedLVectors) {
    const auto l = build_L();
    std::vector<StateVector> vs;
    for (const auto &p : l.printed) {
        vs.push_back(p.vector());
    }
    const auto proj = projector_from_orthonormal(vs);
    EXPECT_TRUE(is_projector(proj, kTol));
    EXPECT_NEAR(proj.trace().real(), 5.0, kTol);
}

TEST(ProjectorFromOrthonormal, RejectsPrintedGVectors) {
    const auto g = build_G_literal();
    std::vector<StateVector> vs;
    for (const auto &p : g.printed) {
        vs.push_back(p.vector());
    }
    EXPECT_THROW(projector_from_orthonormal(vs), GramDefectError);
}

TEST(ProjectorFromOrthonormal, RandomSetsAreProjectors) {
    std::mt19937_64 gen(41);
    for (std::size_t count = 1; count <= 10; ++count) {
        std::vector<StateVector> vs;
        for (std::size_t k = 0; k < count; ++k) {
            vs.push_back(oracle::random_vector(10, Space::spatial, gen));
        }
        const auto p = projector_from_orthonormal(gram_schmidt(vs).basis);
        EXPECT_TRUE(is_projector(p, kTol));
        EXPECT_NEAR(p.trace().real(), static_cast<double>(count), kTol);
    }
}

TEST(HermitianEig, SpinZ) {
    const auto eig = hermitian_eig(s_z(SpinSystem::seven_halves()));
    ASSERT_EQ(eig.values.size(), 8u);
    for (std::size_t k = 0; k < 8; ++k) {
        EXPECT_NEAR(eig.values[k], -3.5 + static_cast<double>(k), kTol);
    }
}

TEST(HermitianEig, IdentityAndWhichSlit) {
    for (double v : hermitian_eig(Operator::identity(8, Space::spin)).values) {
        EXPECT_NEAR(v, 1.0, kTol);
    }
    const auto eig = hermitian_eig(build_E().spatial);
    for (std::size_t k = 0; k < 10; ++k) {
        EXPECT_NEAR(eig.values[k], k < 5 ? 0.0 : 1.0, kTol);
    }
}

TEST(HermitianEig, RejectsNonHermitian) {
    Operator a = Operator::zero(3, Space::spin);
    a(0, 1) = 1.0;
    try {
        hermitian_eig(a);
        FAIL() << "expected NotHermitianError";
    } catch (const NotHermitianError &e) {
        EXPECT_NEAR(e.asymmetry(), std::sqrt(2.0), 1e-12);
    }
}

TEST(HermitianEig, RandomMatricesReconstructAndAgreeWithEigen) {
    std::mt19937_64 gen(51);
    for (std::size_t dim : {1u, 2u, 5u, 10u, 16u, 40u, 80u}) {
        const auto a = oracle::random_hermitian(dim, Space::auxiliary, gen);
        const auto eig = hermitian_eig(a);
        const double scale = a.frobenius_norm();
        Operator rebuilt(dim, Space::auxiliary);
        for (std::size_t k = 0; k < dim; ++k) {
            rebuilt += Complex(eig.values[k]) * Operator::outer(eig.vectors[k], eig.vectors[k]);
            EXPECT_LE((a * eig.vectors[k] - Complex(eig.values[k]) * eig.vectors[k]).norm(), 1e-8 * scale);
        }
        EXPECT_LE((rebuilt - a).frobenius_norm(), 1e-8 * scale);
        EXPECT_LE(gram_identity_gap(eig.vectors), 1e-8);
        EXPECT_TRUE(std::is_sorted(eig.values.begin(), eig.values.end()));

        Eigen::SelfAdjointEigenSolver<oracle::Mat> ref(oracle::to_eigen(a));
        for (std::size_t k = 0; k < dim; ++k) {
            EXPECT_NEAR(eig.values[k], ref.eigenvalues()(k), 1e-9 * scale);
        }
    }
}

TEST(HermitianEig, DegenerateSpectrum) {
    const auto p = build_L().spatial;
    const auto eig = hermitian_eig(p);
    EXPECT_LE(gram_identity_gap(eig.vectors), 1e-8);
    const double total = std::accumulate(eig.values.begin(), eig.values.end(), 0.0);
    EXPECT_NEAR(total, 5.0, 1e-10);
}

TEST(Classify, FlagsNonProjectors) {
    Operator a = Operator::identity(3, Space::spin);
    a(0, 0) = 2.0;
    const auto c = classify(a, kTol);
    EXPECT_TRUE(c.hermitian);
    EXPECT_FALSE(c.projector);
    EXPECT_NEAR(c.idempotency_defect, 2.0, 1e-12);
}

TEST(ExtractSpinFactor, RecognisesLiftedSpinOperators) {
    const auto space = scenario_space();
    const auto t = build_detectors().spin[0];
    const auto x = extract_spin_factor(lift_spin(t, space), space, kTol);
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ(*x, t);
    EXPECT_FALSE(extract_spin_factor(lift_spatial(build_E().spatial, space), space, kTol).has_value());
}

TEST(PrincipalCosine, KnownAngles) {
    const std::vector<StateVector> a{spatial_basis(1)};
    StateVector tilted = spatial_basis(1) + spatial_basis(2);
    const std::vector<StateVector> b{tilted};
    EXPECT_NEAR(max_principal_cosine(a, b), 1.0 / std::sqrt(2.0), 1e-12);
    const std::vector<StateVector> c{spatial_basis(3)};
    EXPECT_EQ(max_principal_cosine(a, c), 0.0);
    EXPECT_EQ(max_principal_cosine(a, std::vector<StateVector>{}), 0.0);
}

TEST(Tolerances, Validation) {
    EXPECT_NO_THROW(Tolerances{}.validate());
    EXPECT_THROW((Tolerances{1e-3, 1e-10, 1e-6}.validate()), ContractError);
    EXPECT_THROW((Tolerances{0.0, 1e-10, 1e-6}.validate()), ContractError);
}
