#include <gtest/gtest.h>

#include "support.hpp"

using namespace gtube;
using namespace gtube::testing;

namespace {

using Q = qcomplex;
using T = PointTensor<Q>;

T random_vsp(Rng& rng, int n, int p) {
    return sym(random_point_tensor<Q>(rng, n, p + 1, Valued::scalar), slot_range(2, p + 1));
}

// Oracles written directly from the component formulas.
T oracle_dot(const T& A, const T& th) {
    const int n = A.dim(), p = A.arity() - 1, q = th.arity();
    T r(n, p + q, Valued::vector);
    for (int a = 0; a < n; ++a)
        for_each_index(n, p + q, [&](const std::vector<int>& idx) {
            Q acc;
            for (int b = 0; b < n; ++b) {
                std::vector<int> u(idx.begin(), idx.begin() + p), v(idx.begin() + p, idx.end());
                u.push_back(b);
                acc += A.at(a, u) * th.at(b, v);
            }
            r.at(a, idx) = acc;
        });
    return r;
}

T oracle_contract(const T& A, const T& th) {
    const int n = A.dim(), p = A.arity() - 1, q = th.arity();
    T r(n, p + q, th.valued());
    for (int a = 0; a < (th.vector_valued() ? n : 1); ++a)
        for_each_index(n, p + q, [&](const std::vector<int>& idx) {
            Q acc;
            for (int j = 0; j < q; ++j)
                for (int b = 0; b < n; ++b) {
                    std::vector<int> u(idx.begin(), idx.begin() + p), v(idx.begin() + p, idx.end());
                    u.push_back(v[j]);
                    v[j] = b;
                    acc += th.at(a, v) * A.at(b, u);
                }
            r.at(a, idx) = acc;
        });
    return r;
}

T oracle_wedge(const T& A, const T& B) {
    const int n = A.dim(), k = A.arity() - 1, l = B.arity() - 1;
    T r(n, k + l + 1, Valued::vector);
    for (int a = 0; a < n; ++a)
        for_each_index(n, k + l + 1, [&](const std::vector<int>& idx) {
            const std::vector<int> J(idx.begin() + 2, idx.begin() + 2 + l), M(idx.begin() + 2 + l, idx.end());
            Q acc;
            for (int b = 0; b < n; ++b) {
                for (int s = 0; s < 2; ++s) {
                    std::vector<int> ai{idx[s], b}, bi{idx[1 - s]};
                    ai.insert(ai.end(), M.begin(), M.end());
                    bi.insert(bi.end(), J.begin(), J.end());
                    const Q term = A.at(a, ai) * B.at(b, bi);
                    if (s == 0) acc += term;
                    else acc -= term;
                }
            }
            r.at(a, idx) = acc;
        });
    return r;
}

}  // namespace

TEST(Sym, TwoSlotExample) {
    EXPECT_EQ(sym(dx(2, {0, 1}), {1, 2}), dx(2, {0, 1}) + dx(2, {1, 0}));
}

TEST(Sym, OfSymmetricTensorScalesByFactorial) {
    Rng rng(1);
    const auto t = sym(random_point_tensor<Q>(rng, 3, 3, Valued::vector), {1, 2, 3});
    EXPECT_EQ(sym(t, {1, 2, 3}), t * ratio<Q>(6));
}

TEST(Sym, NestedSymmetrizationIdentity) {
    Rng rng(2);
    const int k = 3;
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = random_point_tensor<Q>(rng, 2, k + 1, Valued::vector);
        EXPECT_EQ(sym(sym(t, slot_range(3, k + 1)), slot_range(2, k + 1)),
                  sym(t, slot_range(2, k + 1)) * ratio<Q>(factorial(k - 1)));
    }
}

TEST(Sym, SlotErrors) {
    const auto t = dx(2, {0, 1, 1});
    EXPECT_THROW(sym(t, {1, 4}), rejected_input);
    EXPECT_THROW(sym(t, {2, 2}), rejected_input);
    EXPECT_THROW(alt(t, {0, 1}), rejected_input);
    EXPECT_THROW(alt(t, {3, 3}), rejected_input);
}

TEST(Alt, Examples) {
    EXPECT_EQ(alt(dx(2, {0, 1}), {1, 2}), dx(2, {0, 1}) - dx(2, {1, 0}));
    EXPECT_TRUE(alt(sym(dx(3, {0, 2}), {1, 2}), {1, 2}).is_zero());
}

TEST(ExactSequence, AltThreeAfterAltTwoVanishes) {
    for (int n : {2, 3})
        for (int p : {2, 3}) {
            SCOPED_TRACE(::testing::Message() << "n=" << n << " p=" << p);
            for (const auto& b : basis_vsp(n, p)) EXPECT_TRUE(alt(alt(b, {1, 2}), {1, 2, 3}).is_zero());
        }
}

TEST(ExactSequence, KernelOfAltTwoIsFullySymmetric) {
    for (int n : {2, 3})
        for (int p : {2, 3, 4}) {
            SCOPED_TRACE(::testing::Message() << "n=" << n << " p=" << p);
            const auto basis = basis_vsp(n, p);
            ASSERT_EQ(exact_rank(basis), n * binomial(n + p - 1, p));
            std::vector<T> images;
            for (const auto& b : basis) images.push_back(alt(b, {1, 2}));
            // rank(Alt₂) = dim(V*⊗S^p) − dim(S^{p+1})
            EXPECT_EQ(exact_rank(images), n * binomial(n + p - 1, p) - binomial(n + p, p + 1));
            for (const auto& m : multisets(n, p + 1))
                EXPECT_TRUE(alt(sym(dx(n, m), slot_range(1, p + 1)), {1, 2}).is_zero());
        }
}

TEST(ExactSequence, ImageOfAltTwoIsKernelOfCirc) {
    for (int n : {2, 3})
        for (int p : {2, 3, 4}) {
            SCOPED_TRACE(::testing::Message() << "n=" << n << " p=" << p);
            std::vector<T> images;
            for (const auto& b : basis_vsp(n, p)) {
                images.push_back(alt(b, {1, 2}));
                EXPECT_TRUE(circ(images.back()).is_zero());
            }
            const auto lam = basis_lambda2(n, p);
            std::vector<T> circs;
            for (const auto& b : lam) circs.push_back(circ(b));
            const int kernel_dim = exact_rank(lam) - exact_rank(circs);
            EXPECT_EQ(exact_rank(images), kernel_dim);
        }
}

TEST(Circ, Examples) {
    Rng rng(3);
    const auto t = sym(random_point_tensor<Q>(rng, 2, 3, Valued::vector), {1, 2, 3});
    EXPECT_EQ(circ(t), t * ratio<Q>(3));
    EXPECT_THROW(circ(dx(2, {0, 1})), rejected_input);
}

TEST(Circ, CommutesWithTrailingSymOnTheDiagonal) {
    Rng rng(4);
    const int k = 3;
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = random_point_tensor<Q>(rng, 2, k + 1, Valued::vector);
        const auto comm = circ(sym(t, slot_range(2, k + 1))) - sym(circ(t), slot_range(2, k + 1));
        std::vector<Q> eta{rng.scalar<Q>(), rng.scalar<Q>()};
        EXPECT_TRUE(contract_trailing(comm, k + 1, eta).is_zero());
    }
}

TEST(Circ, CommutatorWithTrailingSymIsNotAnOperatorIdentity) {
    Rng rng(4);
    const int k = 3;
    const auto t = random_point_tensor<Q>(rng, 2, k + 1, Valued::vector);
    EXPECT_FALSE((circ(sym(t, slot_range(2, k + 1))) - sym(circ(t), slot_range(2, k + 1))).is_zero());
}

TEST(Perm2, Examples) {
    Rng rng(5);
    const auto t = random_point_tensor<Q>(rng, 3, 3, Valued::vector);
    EXPECT_EQ(perm2(perm2(t)), t);
    const auto s = sym(t, {1, 2});
    EXPECT_EQ(perm2(s), s);
    EXPECT_EQ(perm2(unit_tensor<Q>(2, Valued::vector, 0, {0, 1})), unit_tensor<Q>(2, Valued::vector, 0, {1, 0}));
    EXPECT_THROW(perm2(dx(2, {0})), rejected_input);
}

TEST(Operators, AreLinear) {
    Rng rng(6);
    const auto a = random_point_tensor<Q>(rng, 2, 4, Valued::vector);
    const auto b = random_point_tensor<Q>(rng, 2, 4, Valued::vector);
    const Q c = rng.scalar<Q>();
    EXPECT_EQ(sym(a * c + b, {2, 3, 4}), sym(a, {2, 3, 4}) * c + sym(b, {2, 3, 4}));
    EXPECT_EQ(alt(a * c + b, {1, 3}), alt(a, {1, 3}) * c + alt(b, {1, 3}));
    EXPECT_EQ(circ(a * c + b), circ(a) * c + circ(b));
    EXPECT_EQ(perm2(a * c + b), perm2(a) * c + perm2(b));
}

TEST(Symmetry, DeclarationsAreVerified) {
    Rng rng(7);
    auto t = random_point_tensor<Q>(rng, 2, 3, Valued::vector);
    auto s = sym(t, {2, 3});
    EXPECT_NO_THROW(s.declare({{2, 3}, false}));
    EXPECT_EQ(s.declared().size(), 1u);
    auto a = alt(t, {1, 2});
    EXPECT_NO_THROW(a.declare({{1, 2}, true}));
    EXPECT_THROW(a.declare({{1, 2}, false}), rejected_input);
    EXPECT_THROW(t.declare({{1, 2, 3}, false}), rejected_input);
}

TEST(ProdDot, IdentityAndVectorCases) {
    Rng rng(8);
    const auto id = identity_point<Q>(3);
    const auto th = random_point_tensor<Q>(rng, 3, 2, Valued::vector);
    EXPECT_EQ(prod_dot(id, th), th);
    const auto A = random_point_tensor<Q>(rng, 3, 2, Valued::vector);
    const auto v = random_point_tensor<Q>(rng, 3, 0, Valued::vector);
    T Av(3, 1, Valued::vector);
    for (int a = 0; a < 3; ++a)
        for (int u = 0; u < 3; ++u)
            for (int b = 0; b < 3; ++b) Av.at(a, {u}) += A.at(a, {u, b}) * v.at(b, {});
    EXPECT_EQ(prod_dot(A, v), Av);
}

TEST(ProdDot, MatchesNestedLoopOracle) {
    Rng rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        const auto A = random_point_tensor<Q>(rng, 2, rng.integer(1, 3), Valued::vector);
        const auto th = random_point_tensor<Q>(rng, 2, rng.integer(0, 3), Valued::vector);
        EXPECT_EQ(prod_dot(A, th), oracle_dot(A, th));
    }
    EXPECT_THROW(prod_dot(dx(2, {0, 1}), dx(2, {0})), rejected_input);
}

TEST(ProdContract, IdentityAndEmptyCases) {
    Rng rng(10);
    const auto id = identity_point<Q>(2);
    const auto th = random_point_tensor<Q>(rng, 2, 3, Valued::vector);
    EXPECT_EQ(prod_contract(id, th), th * ratio<Q>(3));
    const auto A = random_point_tensor<Q>(rng, 2, 2, Valued::vector);
    EXPECT_TRUE(prod_contract(A, random_point_tensor<Q>(rng, 2, 0, Valued::vector)).is_zero());
}

TEST(ProdContract, MatchesNestedLoopOracle) {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const auto A = random_point_tensor<Q>(rng, 2, rng.integer(1, 3), Valued::vector);
        const auto th = random_point_tensor<Q>(rng, 2, rng.integer(0, 3), trial % 2 ? Valued::vector : Valued::scalar);
        EXPECT_EQ(prod_contract(A, th), oracle_contract(A, th));
    }
    EXPECT_THROW(prod_contract(identity_point<Q>(2), identity_point<Q>(3)), rejected_input);
}

TEST(RDot, Cases) {
    Rng rng(12);
    const auto R = random_point_tensor<Q>(rng, 2, 3, Valued::vector);
    const auto v = random_point_tensor<Q>(rng, 2, 0, Valued::vector);
    EXPECT_EQ(r_dot(R, v), prod_dot(R, v));
    const auto th = random_point_tensor<Q>(rng, 2, 2, Valued::vector);
    EXPECT_TRUE(r_dot(T(2, 3, Valued::vector), th).is_zero());
    EXPECT_EQ(r_dot(R, th), oracle_dot(R, th) - oracle_contract(R, th));
}

TEST(Wedge1, VanishesInDimensionOne) {
    Rng rng(13);
    const auto A = random_point_tensor<Q>(rng, 1, 3, Valued::vector);
    const auto B = random_point_tensor<Q>(rng, 1, 2, Valued::vector);
    EXPECT_TRUE(wedge1(A, B).is_zero());
}

TEST(Wedge1, AntisymmetricInFirstTwoSlots) {
    Rng rng(14);
    const auto A = random_point_tensor<Q>(rng, 3, 2, Valued::vector);
    const auto B = random_point_tensor<Q>(rng, 3, 2, Valued::vector);
    EXPECT_TRUE(is_antisymmetric(wedge1(A, B), {1, 2}));
}

TEST(Wedge1, MatchesNestedLoopOracle) {
    Rng rng(15);
    for (auto [k, l] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}}) {
        const auto A = random_point_tensor<Q>(rng, 2, k + 1, Valued::vector);
        const auto B = random_point_tensor<Q>(rng, 2, l + 1, Valued::vector);
        EXPECT_EQ(wedge1(A, B), oracle_wedge(A, B));
    }
    EXPECT_THROW(wedge1(random_point_tensor<Q>(rng, 2, 1, Valued::vector), identity_point<Q>(2)), rejected_input);
}

TEST(Alt2Preimage, ZeroAndRoundTrip) {
    EXPECT_TRUE(alt2_preimage(T(2, 3, Valued::scalar)).is_zero());
    Rng rng(16);
    for (int p : {2, 3})
        for (int trial = 0; trial < 5; ++trial) {
            const auto beta = alt(random_vsp(rng, 2, p), {1, 2});
            EXPECT_EQ(alt(alt2_preimage(beta), {1, 2}), beta);
        }
}

TEST(Alt2Preimage, RejectsNonzeroCirc) {
    const auto beta = alt(dx(3, {0, 1, 2}), {1, 2});
    try {
        alt2_preimage(beta);
        FAIL() << "expected an obstruction";
    } catch (const obstruction_error& e) {
        EXPECT_GT(e.residual(), 0.0);
    }
    EXPECT_THROW(alt2_preimage(dx(2, {0, 1, 1})), rejected_input);
}

namespace {

T nabla_curvature_at_point(std::uint64_t seed) {
    Rng rng(seed);
    const auto conn = random_torsion_free<Q>(rng, 2);
    const auto rho = covariant_derivative(conn, curvature(conn));
    return evaluate(rho, std::span<const Q>(random_point<Q>(rng, 2)));
}

}  // namespace

TEST(AltSymCurvature, ParticularSolution) {
    EXPECT_TRUE(altsym_curvature_solve(T(2, 4, Valued::vector)).is_zero());
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto rho = nabla_curvature_at_point(seed);
        ASSERT_FALSE(rho.is_zero());
        const auto S = altsym_curvature_solve(rho);
        EXPECT_TRUE(is_symmetric(S, {2, 3, 4}));
        EXPECT_TRUE(alt(sym(rho, {3, 4}) * ratio<Q>(8) - S, {1, 2}).is_zero());
        // second form of the same solution, built from ρ(ξ2, ξ3, ξ1, ξ4)
        EXPECT_EQ(S, sym(permute_slots(rho, {1, 2, 0, 3}), {2, 3, 4}) * ratio<Q>(2));
    }
}

TEST(AltSymCurvature, RejectsBrokenHypotheses) {
    Rng rng(17);
    EXPECT_THROW(altsym_curvature_solve(random_point_tensor<Q>(rng, 2, 4, Valued::vector)), rejected_input);
    EXPECT_THROW(altsym_curvature_solve(random_point_tensor<Q>(rng, 2, 3, Valued::vector)), rejected_input);
}

TEST(Fields, OperatorsCommuteWithEvaluation) {
    Rng rng(18);
    const auto A = random_field<Q>(rng, 2, 3, Valued::vector);
    const auto B = random_field<Q>(rng, 2, 2, Valued::vector);
    std::vector<std::vector<Q>> pts;
    for (int k = 0; k < 10; ++k) pts.push_back(random_point<Q>(rng, 2));
    for (const auto& p : pts) {
        const std::span<const Q> sp(p);
        const auto a = evaluate(A, sp), b = evaluate(B, sp);
        EXPECT_EQ(evaluate(sym(A, {1, 2, 3}), sp), sym(a, {1, 2, 3}));
        EXPECT_EQ(evaluate(alt(A, {2, 3}), sp), alt(a, {2, 3}));
        EXPECT_EQ(evaluate(circ(A), sp), circ(a));
        EXPECT_EQ(evaluate(perm2(A), sp), perm2(a));
        EXPECT_EQ(evaluate(prod_dot(A, B), sp), prod_dot(a, b));
        EXPECT_EQ(evaluate(prod_contract(A, B), sp), prod_contract(a, b));
        EXPECT_EQ(evaluate(r_dot(A, B), sp), r_dot(a, b));
        EXPECT_EQ(evaluate(wedge1(A, B), sp), wedge1(a, b));
    }
}

TEST(Fields, FloatAgreesWithPointwiseToTolerance) {
    Rng rng(19);
    const auto A = random_field<cfloat>(rng, 3, 3, Valued::vector);
    const auto B = random_field<cfloat>(rng, 3, 2, Valued::vector);
    for (int k = 0; k < 10; ++k) {
        const auto p = random_point<cfloat>(rng, 3);
        const std::span<const cfloat> sp(p);
        const auto a = evaluate(A, sp), b = evaluate(B, sp);
        EXPECT_LE(relative_defect(evaluate(prod_dot(A, B), sp), prod_dot(a, b)), 1e-10);
        EXPECT_LE(relative_defect(evaluate(prod_contract(A, B), sp), prod_contract(a, b)), 1e-10);
        EXPECT_LE(relative_defect(evaluate(r_dot(A, B), sp), r_dot(a, b)), 1e-10);
        EXPECT_LE(relative_defect(evaluate(wedge1(A, B), sp), wedge1(a, b)), 1e-10);
    }
}

TEST(Tensor, ShapeAndIndexChecks) {
    T t(2, 2, Valued::vector);
    EXPECT_EQ(t.size(), 8u);
    EXPECT_THROW(t.at(2, {0, 0}), rejected_input);
    EXPECT_THROW(t.at(0, {0, 2}), rejected_input);
    EXPECT_THROW(t.at(0, {0}), rejected_input);
    EXPECT_THROW(t + T(2, 3, Valued::vector), rejected_input);
    EXPECT_THROW(T(0, 1, Valued::scalar), rejected_input);
    EXPECT_EQ(T(3, 2, Valued::scalar).size(), 9u);
}
