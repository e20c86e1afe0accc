#include <catch2/catch_amalgamated.hpp>

#include "qmskit/sse.hpp"
#include "test_util.hpp"

using namespace qmskit;
using testutil::pauli_y;
using testutil::pauli_z;
using testutil::so3_H;
using testutil::so3_L;

namespace {

LindbladModel so3_model() { return LindbladModel(so3_H(), {so3_L()}); }
LindbladModel pauli_model() { return LindbladModel(pauli_z(), {Complex(0, 1) * pauli_y()}); }

} // namespace

TEST_CASE("simulate_ito degenerate cases") {
    LindbladModel frozen(Matrix::Zero(2, 2), {});
    Vector xi(2);
    xi << Complex(0.6, 0.2), Complex(-0.5, 0.3);
    TrajectoryConfig cfg{1.0, 50, 8, 42, Scheme::ExponentialEuler};
    auto ens = simulate_ito(frozen, xi, cfg);
    for (const auto& grid : ens.samples) {
        CHECK((grid.col(0) - xi).norm() == 0.0);
        CHECK((grid.col(50) - xi).norm() < 1e-14);
    }

    // m = 0: the exponential-Euler path is the exact unitary orbit.
    LindbladModel ham(pauli_z(), {});
    auto uni = simulate_ito(ham, xi, cfg);
    Matrix exact = matrix_exp(Complex(0, -1) * pauli_z(), 1.0);
    CHECK((uni.samples[3].col(50) - exact * xi).norm() < 1e-12);

    CHECK_THROWS_AS(simulate_ito(frozen, Vector::Zero(2), cfg), ZeroVector);
}

TEST_CASE("trajectories are reproducible and scheduling independent") {
    auto pauli = pauli_model();
    Vector xi = Vector::Unit(2, 0);
    TrajectoryConfig cfg{0.7, 100, 300, 7, Scheme::EulerMaruyama};
    auto a = simulate_ito(pauli, xi, cfg);
    auto b = simulate_ito(pauli, xi, cfg);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t j = 0; j < a.samples.size(); ++j) {
        CHECK((a.samples[j] - b.samples[j]).norm() == 0.0);
    }

    auto m1 = simulate_moments(pauli, xi, cfg, {100});
    auto m2 = simulate_moments(pauli, xi, cfg, {100});
    CHECK((m1.records[0].density.mean - m2.records[0].density.mean).norm() == 0.0);

    // the streaming estimator sees the same trajectories as the stored grid
    auto direct = estimate_density(a, 100);
    CHECK((direct.mean - m1.records[0].density.mean).norm() < 1e-12);
}

TEST_CASE("mean_square_norm") {
    Vector xi(2);
    xi << Complex(0.8, 0.0), Complex(0.0, 0.6);

    LindbladModel ham(pauli_z(), {});
    TrajectoryConfig unitary_cfg{1.0, 200, 50, 3, Scheme::ExponentialEuler};
    auto ens = simulate_ito(ham, xi, unitary_cfg);
    auto est = mean_square_norm(ens, 200);
    CHECK(est.std_error < 1e-7);  // zero up to single-pass variance rounding
    CHECK(std::abs(est.value - 1.0) < 1e-12);

    // E||X_t||^2 = ||xi||^2 for the fleet, within 4 sigma + O(h) bias.
    for (const auto& model : {pauli_model(), so3_model()}) {
        Vector e1 = Vector::Unit(model.dim(), 0);
        TrajectoryConfig cfg{1.0, 500, 4000, 11, Scheme::EulerMaruyama};
        auto res = simulate_moments(model, e1, cfg, {500});
        const auto& n2 = res.records[0].norm2;
        CHECK(std::abs(n2.value - 1.0) <= 4.0 * n2.std_error + 5.0 * (1.0 / 500));
    }
}

TEST_CASE("estimate_density") {
    auto pauli = pauli_model();
    Vector xi = Vector::Unit(2, 0);
    TrajectoryConfig cfg{1.0, 300, 2000, 5, Scheme::ExponentialEuler};
    auto ens = simulate_ito(pauli, xi, cfg);

    auto at0 = estimate_density(ens, 0);
    CHECK((at0.mean - xi * xi.adjoint()).norm() == 0.0);
    CHECK(at0.aggregate_std_error == 0.0);

    auto at_t = estimate_density(ens, 300);
    Matrix exact = evolved_outer(pauli, xi, 1.0);
    CHECK((at_t.mean - exact).norm() <= 5.0 * at_t.aggregate_std_error + 5.0 / 300);

    // Pure dephasing: off-diagonals decay as exp(-2t), diagonal frozen.
    LindbladModel dephasing(Matrix::Zero(2, 2), {pauli_z()});
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const double t = 1.5;
    Matrix rho_exact = evolved_outer(dephasing, plus, t);
    CHECK(std::abs(rho_exact(0, 1) - 0.5 * std::exp(-2.0 * t)) < 1e-12);
    TrajectoryConfig dcfg{t, 600, 4000, 13, Scheme::ExponentialEuler};
    auto res = simulate_moments(dephasing, plus, dcfg, {600});
    const auto& est = res.records[0].density;
    CHECK(std::abs(est.mean(0, 1) - rho_exact(0, 1)) <
          5.0 * est.entry_std_error(0, 1) + 5.0 * t / 600);
}

TEST_CASE("verify_representation") {
    auto pauli = pauli_model();
    Vector xi = Vector::Unit(2, 0);

    TrajectoryConfig degenerate{0.5, 50, 1, 1, Scheme::ExponentialEuler};
    auto rep1 = verify_representation(pauli, xi, 0.5, degenerate);
    CHECK(rep1.n == 1);  // report produced; PASS not required at N = 1

    TrajectoryConfig cfg{0.5, 500, 4000, 21, Scheme::ExponentialEuler};
    auto rep2 = verify_representation(pauli, xi, 0.5, cfg);
    CHECK(rep2.pass);

    auto so3 = so3_model();
    TrajectoryConfig cfg3{1.0, 500, 4000, 22, Scheme::ExponentialEuler};
    auto rep3 = verify_representation(so3, Vector::Unit(3, 0), 1.0, cfg3);
    CHECK(rep3.pass);
}

TEST_CASE("totality_test") {
    TrajectoryConfig cfg{2.0, 400, 4000, 31, Scheme::ExponentialEuler};

    auto total = totality_test(so3_model(), Vector::Unit(3, 0), 2.0, cfg);
    CHECK(total.total);
    CHECK(total.exact_reference > 0.0);

    // Pure Hamiltonian from an eigenvector: rank-one second moment.
    LindbladModel ham(pauli_z(), {});
    auto rank1 = totality_test(ham, Vector::Unit(2, 0), 2.0, cfg);
    CHECK_FALSE(rank1.total);
    CHECK(std::abs(rank1.exact_reference) < 1e-12);

    // Reducible block model, xi inside the invariant block.
    Matrix h = Matrix::Zero(3, 3), l = Matrix::Zero(3, 3);
    h.topLeftCorner(2, 2) = pauli_z();
    l.topLeftCorner(2, 2) = Complex(0, 1) * pauli_y();
    l(2, 2) = 0.4;
    LindbladModel blocked(h, {l});
    Vector inside = Vector::Zero(3);
    inside(0) = 1.0;
    auto res = totality_test(blocked, inside, 2.0, cfg);
    CHECK_FALSE(res.total);
    CHECK(res.exact_reference <= 1e-10);
}

TEST_CASE("simulate_wong_zakai deterministic and commuting cases") {
    Vector xi(2);
    xi << Complex(0.5, 0.5), Complex(0.1, -0.7);

    // No noise: the polygonal flow is e^{t G~} = e^{t G}.
    LindbladModel ham(pauli_z(), {});
    WienerPath empty{1.0, RealMatrix(0, 100)};
    Matrix traj = simulate_wong_zakai(ham, xi, empty, 10);
    CHECK((traj.col(100) - matrix_exp(drift(ham), 1.0) * xi).norm() < 1e-12);

    // Commuting diagonal model: closed form exp((G - L^2/2) t + L W_t) xi at
    // the polygon nodes.
    Matrix l = Matrix::Zero(2, 2);
    l(0, 0) = 0.3;
    l(1, 1) = -0.2;
    LindbladModel diag(Matrix::Zero(2, 2), {l});
    const int fine = 400, coarse = 20;
    WienerPath path = sample_wiener_path(1, fine, 1.0, 77, 0);
    Matrix wz = simulate_wong_zakai(diag, xi, path, coarse);
    const Matrix gt = stratonovich_drift(diag);
    double w = 0.0;
    const int per = fine / coarse;
    for (int kc = 1; kc <= coarse; ++kc) {
        w += path.increments.row(0).segment((kc - 1) * per, per).sum();
        double t_node = kc / double(coarse);
        Matrix closed = matrix_exp(Matrix(gt * t_node + l * w));
        CHECK((wz.col(kc * per) - closed * xi).norm() < 1e-8);
    }

    CHECK_THROWS_AS(simulate_wong_zakai(diag, xi, path, 7), GridError);
}

TEST_CASE("wong_zakai norm preservation for anti-selfadjoint noise") {
    // Example 3.1: G~ + u L is anti-selfadjoint, so the polygonal flow is
    // exactly unitary and the trajectory norm is constant to solver accuracy.
    auto pauli = pauli_model();
    Vector xi = Vector::Unit(2, 0);
    WienerPath path = sample_wiener_path(1, 800, 1.0, 5, 3);
    Matrix wz = simulate_wong_zakai(pauli, xi, path, 40);
    double drift_stat = 0.0;
    for (Index k = 0; k < wz.cols(); ++k) {
        drift_stat = std::max(drift_stat, std::abs(wz.col(k).squaredNorm() - 1.0));
    }
    CHECK(drift_stat <= 1e-10);
}

TEST_CASE("wong_zakai_convergence") {
    Vector xi(2);
    xi << 1.0, Complex(0, 1);
    xi.normalize();

    LindbladModel ham(pauli_z(), {});
    auto zero_curve = wong_zakai_convergence(ham, xi, 1.0, {10, 40}, 5, 400, 3);
    for (double e : zero_curve) CHECK(e < 1e-12);

    Matrix l = Matrix::Zero(2, 2);
    l(0, 0) = 0.5;
    l(1, 1) = -0.3;
    LindbladModel diag(Matrix::Zero(2, 2), {l});
    auto curve = wong_zakai_convergence(diag, xi, 1.0, {10, 40, 160}, 30, 1600, 9);
    CHECK(curve[1] < curve[0]);
    CHECK(curve[2] < curve[1]);
    CHECK(curve[2] <= curve[0] / 3.0);

    auto so3_curve = wong_zakai_convergence(so3_model(), Vector::Unit(3, 0), 1.0,
                                            {10, 40, 160}, 20, 1600, 17);
    CHECK(so3_curve[1] < so3_curve[0]);
    CHECK(so3_curve[2] < so3_curve[1]);
}

TEST_CASE("chaos_isometry_check") {
    Vector xi(2);
    xi << Complex(0.6, 0.3), Complex(-0.2, 0.7);
    xi.normalize();

    // m = 0: the whole mass sits in the order-0 term.
    LindbladModel ham(pauli_z(), {});
    auto exact = chaos_isometry_check(ham, xi, 0.7, 0);
    CHECK(std::abs(exact.partial_sum - 1.0) < 1e-12);
    CHECK(exact.pass);

    auto pauli = pauli_model();
    auto res = chaos_isometry_check(pauli, xi, 0.3, 3);
    CHECK(res.bound == Catch::Approx(std::pow(0.3, 4) / 24.0).epsilon(1e-12));
    CHECK(res.pass);
    for (std::size_t k = 1; k < res.partial_sums.size(); ++k) {
        CHECK(res.partial_sums[k] >= res.partial_sums[k - 1] - 1e-14);
    }

    auto loose = chaos_isometry_check(pauli, xi, 2.0, 1);
    CHECK(loose.bound_too_loose);

    CHECK_THROWS_AS(chaos_isometry_check(pauli, xi, -1.0, 2), InvalidTime);
}

TEST_CASE("pathwise_norm_drift") {
    LindbladModel frozen(Matrix::Zero(2, 2), {});
    Vector xi = Vector::Unit(2, 0);
    TrajectoryConfig cfg{1.0, 100, 40, 2, Scheme::ExponentialEuler};
    CHECK(pathwise_norm_drift(frozen, simulate_ito(frozen, xi, cfg)) < 1e-14);

    LindbladModel dephasing(Matrix::Zero(2, 2), {pauli_z()});
    CHECK_THROWS_AS(pathwise_norm_drift(dephasing, xi, cfg), NotAntiSelfAdjoint);

    // Example 3.1 halving test: the max norm defect shrinks by a factor in
    // [1.2, 3.0] when h is halved (median over 5 seeds).
    auto pauli = pauli_model();
    std::vector<double> ratios;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        TrajectoryConfig coarse{1.0, 500, 200, seed, Scheme::EulerMaruyama};
        TrajectoryConfig fine{1.0, 1000, 200, seed, Scheme::EulerMaruyama};
        double a = pathwise_norm_drift(pauli, xi, coarse);
        double b = pathwise_norm_drift(pauli, xi, fine);
        ratios.push_back(a / b);
    }
    std::sort(ratios.begin(), ratios.end());
    CHECK(ratios[2] >= 1.2);
    CHECK(ratios[2] <= 3.0);
}

TEST_CASE("density refinement shrinks the distance to the exact evolution") {
    auto pauli = pauli_model();
    Vector xi = Vector::Unit(2, 0);
    Matrix exact = evolved_outer(pauli, xi, 1.0);
    std::vector<double> ratios;
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        TrajectoryConfig coarse{1.0, 250, 2000, seed, Scheme::ExponentialEuler};
        TrajectoryConfig fine{1.0, 500, 8000, seed + 1000, Scheme::ExponentialEuler};
        double dc = (simulate_moments(pauli, xi, coarse, {250}).records[0].density.mean - exact).norm();
        double df = (simulate_moments(pauli, xi, fine, {500}).records[0].density.mean - exact).norm();
        ratios.push_back(df / dc);
    }
    std::sort(ratios.begin(), ratios.end());
    CHECK(ratios[2] <= 0.7);
}

TEST_CASE("chaos isometry across the small-time fleet") {
    // c m t <= 0.5 keeps the remainder bound meaningful at low order.
    Matrix sx = testutil::pauli_x(), sz = testutil::pauli_z();
    LindbladModel depol(Matrix::Zero(2, 2), {sx, testutil::pauli_y(), sz});
    auto res = chaos_isometry_check(depol, Vector::Unit(2, 0), 0.15, 2);
    CHECK_FALSE(res.bound_too_loose);
    CHECK(res.pass);

    LindbladModel two_axis(Matrix::Zero(2, 2), {sx, sz});
    auto res2 = chaos_isometry_check(two_axis, Vector::Unit(2, 0), 0.2, 3);
    CHECK(res2.pass);
}
