#include <catch2/catch_amalgamated.hpp>

#include "qmskit/matkit.hpp"
#include "test_util.hpp"

using namespace qmskit;
using testutil::so3_G_expected;
using testutil::so3_H;
using testutil::so3_L;

namespace {

Vector unit(int d, int k) {
    Vector v = Vector::Zero(d);
    v(k) = 1.0;
    return v;
}

} // namespace

TEST_CASE("numeric_rank basics") {
    CHECK(numeric_rank(Matrix::Identity(3, 3)) == 3);
    CHECK(numeric_rank(Matrix::Zero(4, 4)) == 0);

    // |e1><e1| + 1e-15 |e2><e2| has exact rank 2 but numeric rank 1 at the
    // default relative threshold; the truncated matrix diag(1, 0) has rank 1.
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 1e-15;
    CHECK(numeric_rank(a) == 1);

    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(numeric_rank(bad), InvalidMatrix);
}

TEST_CASE("kernel_basis spans the kernel") {
    Matrix a(3, 3);
    a << 1, 0, 0,
         0, 1, 0,
         0, 0, 0;
    Matrix k = kernel_basis(a);
    REQUIRE(k.cols() == 1);
    CHECK((a * k).norm() < 1e-12);
}

TEST_CASE("orthonormal_extend discards dependent vectors") {
    SubspaceBasis empty(2, 1e-9);
    auto b1 = orthonormal_extend(empty, {unit(2, 0), 2.0 * unit(2, 0)});
    CHECK(b1.count() == 1);

    SubspaceBasis e1(2, 1e-9);
    e1.extend(unit(2, 0));
    Vector v(2);
    v << 1, 1;
    auto b2 = orthonormal_extend(e1, {v});
    CHECK(b2.count() == 2);
    CHECK(b2.orthonormality_defect() < 1e-12);

    SubspaceBasis full(3, 1e-9);
    full.extend_all({unit(3, 0), unit(3, 1), unit(3, 2)});
    std::mt19937_64 rng(11);
    auto b3 = orthonormal_extend(full, {testutil::random_unit_vector(3, rng)});
    CHECK(b3.count() == 3);

    CHECK_THROWS_AS(e1.extend(unit(3, 0)), DimError);
}

TEST_CASE("invariant_closure examples") {
    CHECK_THROWS_AS(invariant_closure({}, {Matrix::Zero(2, 2)}), EmptyInput);

    auto triv = invariant_closure({unit(2, 0)}, {Matrix::Zero(2, 2)});
    CHECK(triv.count() == 1);

    Matrix shift(3, 3);
    shift << 0, 0, 1,
             1, 0, 0,
             0, 1, 0;
    CHECK(invariant_closure({unit(3, 0)}, {shift}).count() == 3);

    // Example 4.2 generators acting on e3 reach all of C^3; the brute-force
    // word enumeration (length <= 4) is the independent oracle.
    Matrix gt = so3_G_expected() - 0.5 * so3_L() * so3_L();
    Matrix x1 = gt * so3_L() - so3_L() * gt;
    Matrix x2 = -gt;
    Matrix x3 = -so3_L();
    std::vector<Matrix> xs{x1, x2, x3};
    int oracle = testutil::word_span_dim(unit(3, 2), xs, 4);
    REQUIRE(oracle == 3);
    CHECK(invariant_closure({unit(3, 2)}, xs).count() == oracle);
}

TEST_CASE("invariant_closure is idempotent and monotone") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 10; ++trial) {
        int d = 3 + (trial % 2);
        std::vector<Matrix> ops{testutil::ginibre(d, d, rng), testutil::ginibre(d, d, rng)};
        Vector s1 = testutil::random_unit_vector(d, rng);
        Vector s2 = testutil::random_unit_vector(d, rng);

        auto closed = invariant_closure({s1}, ops);
        auto reclosed = invariant_closure(closed.vectors(), ops);
        CHECK(reclosed.count() == closed.count());
        for (const auto& v : reclosed.vectors()) CHECK(closed.contains(v));

        auto bigger = invariant_closure({s1, s2}, ops);
        for (const auto& v : closed.vectors()) CHECK(bigger.contains(v));
    }
}

TEST_CASE("operator_algebra_closure examples") {
    CHECK(operator_algebra_closure({}, true, 1e-9, 3).count() == 1);

    // Pauli pair generates all of M_2; enumeration of products up to length 3
    // is the oracle.
    std::vector<Matrix> paulis{testutil::pauli_x(), testutil::pauli_z()};
    int oracle = testutil::product_span_dim(paulis, 3);
    REQUIRE(oracle == 4);
    CHECK(operator_algebra_closure(paulis, true).count() == oracle);

    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 1.0;
    diag(1, 1) = 2.0;
    CHECK(operator_algebra_closure({diag}, true).count() == 2);
}

TEST_CASE("operator_algebra_closure matches orbit fullness (Burnside)") {
    // dim == d^2 iff the orbit of every probe vector is full, on random
    // models (d <= 4) and on a deliberately reducible family.
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 6; ++trial) {
        int d = 2 + (trial % 3);
        std::vector<Matrix> gens{testutil::ginibre(d, d, rng), testutil::ginibre(d, d, rng)};
        bool reducible = trial % 2 == 1;
        if (reducible) {
            for (auto& g : gens) {
                g.col(0).tail(d - 1).setZero();  // e1 spans a common invariant line
            }
        }
        bool full_algebra = operator_algebra_closure(gens, true).count() == d * d;

        auto with_id = gens;
        with_id.push_back(Matrix::Identity(d, d));
        bool all_orbits_full = true;
        for (int k = 0; k < d; ++k) {
            all_orbits_full &= invariant_closure({unit(d, k)}, with_id).count() == d;
        }
        for (int k = 0; k < 20; ++k) {
            all_orbits_full &=
                invariant_closure({testutil::random_unit_vector(d, rng)}, with_id).count() == d;
        }
        CHECK(full_algebra == all_orbits_full);
        if (reducible) CHECK_FALSE(full_algebra);
    }
}

TEST_CASE("lie_closure reproduces the so(3) relations") {
    Matrix gt = so3_G_expected() - 0.5 * so3_L() * so3_L();
    REQUIRE((gt - (Complex(0, -1) * so3_H())).norm() < 1e-14);

    auto lie = lie_closure({gt, so3_L()});
    CHECK(lie.count() == 3);

    Matrix x1 = gt * so3_L() - so3_L() * gt;
    Matrix x2 = -gt;
    Matrix x3 = -so3_L();
    CHECK((x1 * x2 - x2 * x1 - x3).norm() < 1e-12);
    CHECK((x2 * x3 - x3 * x2 - x1).norm() < 1e-12);
    CHECK((x3 * x1 - x1 * x3 - x2).norm() < 1e-12);
}

TEST_CASE("lie_closure degenerate cases") {
    std::mt19937_64 rng(404);
    Matrix a = testutil::ginibre(3, 3, rng);
    CHECK(lie_closure({a}).count() == 1);

    Matrix d1 = Matrix::Zero(2, 2), d2 = Matrix::Zero(2, 2);
    d1(0, 0) = 1.0;
    d2(1, 1) = 0.5;
    CHECK(lie_closure({d1, d2}).count() <= 2);
}

TEST_CASE("lie_closure output is closed under brackets") {
    std::mt19937_64 rng(505);
    const double tol = 1e-9;
    for (int trial = 0; trial < 4; ++trial) {
        int d = 2 + trial % 2;
        auto basis = lie_closure({testutil::ginibre(d, d, rng), testutil::ginibre(d, d, rng)}, tol);
        const auto& vs = basis.vectors();
        for (std::size_t i = 0; i < vs.size(); ++i) {
            for (std::size_t j = i + 1; j < vs.size(); ++j) {
                Matrix bi = unvec(vs[i], d), bj = unvec(vs[j], d);
                Vector c = vec(Matrix(bi * bj - bj * bi));
                double res = basis.residual(c).norm();
                CHECK(res <= 10.0 * tol * std::max(1.0, c.norm()));
            }
        }
    }
}

TEST_CASE("matrix_exp basics and Taylor oracle") {
    CHECK((matrix_exp(Matrix::Zero(3, 3), 1.7) - Matrix::Identity(3, 3)).norm() == 0.0);

    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = a(1, 1) = -0.5;
    Matrix e = matrix_exp(a, 2.0);
    CHECK(std::abs(e(0, 0).real() - std::exp(-1.0)) < 1e-14);
    CHECK(std::abs(e(1, 1).real() - std::exp(-1.0)) < 1e-14);

    Matrix g = so3_G_expected();
    CHECK((matrix_exp(g) - testutil::taylor_exp(g)).norm() < 1e-10);
}

TEST_CASE("matrix_exp semigroup and derivative properties") {
    std::mt19937_64 rng(606);
    for (int trial = 0; trial < 5; ++trial) {
        int d = 2 + trial % 3;
        Matrix a = testutil::ginibre(d, d, rng);
        a *= 10.0 / std::max(1.0, a.norm());

        double s = 0.3, t = 0.9;
        CHECK((matrix_exp(a, s + t) - matrix_exp(a, s) * matrix_exp(a, t)).norm() < 1e-10);

        const double h = 1e-5;
        Matrix deriv = (matrix_exp(a, h) - matrix_exp(a, -h)) / (2.0 * h);
        CHECK((deriv - a).cwiseAbs().maxCoeff() < 1e-6);
    }
}
