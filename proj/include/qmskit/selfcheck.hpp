#pragma once

// The acceptance battery: exact reproduction of the worked examples plus the
// property sweeps, each criterion pinned to its stated tolerance. Shared by
// the dedicated acceptance binary and the CLI `selftest` subcommand.

#include <chrono>
#include <functional>
#include <iomanip>
#include <sstream>

#include "qmskit/report.hpp"

namespace qmskit::selfcheck {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    bool theorem_violation = false;
    std::string details;
    double seconds = 0.0;
};

namespace detail {

struct Checker {
    bool ok = true;
    std::ostringstream out;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            out << "[FAIL " << what << "] ";
        }
    }
    template <class T>
    void note(const std::string& key, T value) {
        out << key << "=" << value << " ";
    }
};

inline Matrix ginibre(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix a(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) a(i, j) = Complex(g(rng), g(rng)) / std::sqrt(2.0);
    return a;
}

inline Matrix random_hermitian(Index d, std::mt19937_64& rng) {
    Matrix a = ginibre(d, d, rng);
    return (a + a.adjoint()) / 2.0;
}

inline Vector random_unit(Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(d);
    for (Index i = 0; i < d; ++i) v(i) = Complex(g(rng), g(rng));
    return v.normalized();
}

inline LindbladModel random_model(Index d, int m, std::mt19937_64& rng) {
    std::vector<Matrix> ls;
    for (int l = 0; l < m; ++l) ls.push_back(ginibre(d, d, rng));
    return LindbladModel(random_hermitian(d, rng), std::move(ls));
}

/// Reducible construction whose S(xi) deficiency is visible at random
/// probes: all jump operators live on a leading block of dimension
/// d1 <= d-2 (then dim S(xi) <= d1 + 1 < d for every xi), or vanish
/// entirely when d = 2. Generic block models do not have this property:
/// S(xi) can be full at generic xi even though the model is reducible.
inline LindbladModel reducible_model(Index d, std::mt19937_64& rng) {
    Matrix h = Matrix::Zero(d, d);
    if (d == 2) {
        h(0, 0) = 1.3;
        h(1, 1) = -0.4;
        Matrix l = Matrix::Zero(2, 2);
        return LindbladModel(std::move(h), {std::move(l)});
    }
    const Index d1 = d - 2;
    h.topLeftCorner(d1, d1) = random_hermitian(d1, rng);
    h.bottomRightCorner(d - d1, d - d1) = random_hermitian(d - d1, rng);
    Matrix l = Matrix::Zero(d, d);
    l.topLeftCorner(d1, d1) = ginibre(d1, d1, rng);
    return LindbladModel(std::move(h), {std::move(l)});
}

/// Block-diagonal model with independent dynamics on blocks d1 and d2.
inline LindbladModel block_model(Index d1, Index d2, std::mt19937_64& rng) {
    const Index d = d1 + d2;
    Matrix h = Matrix::Zero(d, d), l = Matrix::Zero(d, d);
    h.topLeftCorner(d1, d1) = random_hermitian(d1, rng);
    h.bottomRightCorner(d2, d2) = random_hermitian(d2, rng);
    l.topLeftCorner(d1, d1) = ginibre(d1, d1, rng);
    l.bottomRightCorner(d2, d2) = ginibre(d2, d2, rng);
    return LindbladModel(std::move(h), {std::move(l)});
}

/// Reducible 3x3 model whose invariant plane span{e1,e2} has a
/// non-invariant orthocomplement (L block upper triangular, H tuned so
/// that G preserves the plane).
inline LindbladModel plane_model(std::mt19937_64& rng) {
    Matrix a = ginibre(2, 2, rng);
    Vector b = ginibre(2, 1, rng);
    Matrix l = Matrix::Zero(3, 3);
    l.topLeftCorner(2, 2) = a;
    l.block(0, 2, 2, 1) = b;
    l(2, 2) = Complex(0.2, 0.4);
    Matrix h = Matrix::Zero(3, 3);
    h.topLeftCorner(2, 2) = random_hermitian(2, rng);
    Vector off = Complex(0, 0.5) * (b.adjoint() * a).adjoint();
    h.block(0, 2, 2, 1) = -off;
    h.block(2, 0, 1, 2) = -off.adjoint();
    h(2, 2) = -0.6;
    return LindbladModel(std::move(h), {std::move(l)});
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

inline double best_fit_residual(const Matrix& a, const Matrix& b) {
    const Complex alpha = vec(b).dot(vec(a)) / b.squaredNorm();
    return (a - alpha * b).norm();
}

} // namespace qmskit::selfcheck::detail

// --- criterion 1: Example 4.2 reproduction -------------------------------

inline CriterionResult check_so3_example() {
    detail::Checker c;
    auto model = catalog::so3();

    Matrix g_expected(3, 3);
    g_expected << -0.5, 0, -1,
                   0, -0.5, 0,
                   1, 0, 0;
    const double drift_err = (drift(model) - g_expected).cwiseAbs().maxCoeff();
    c.note("drift_err", drift_err);
    c.require(drift_err <= 1e-12, "drift entrywise 1e-12");

    const Matrix gt = stratonovich_drift(model);
    c.require((gt - (Complex(0, -1) * model.H)).norm() <= 1e-12, "Gtilde == -iH");
    auto lie = lie_closure({gt, model.Ls[0]});
    c.note("lie_dim", lie.count());
    c.require(lie.count() == 3, "lie closure dim 3");

    const Matrix& l = model.Ls[0];
    Matrix x1 = gt * l - l * gt;
    Matrix x2 = -gt;
    Matrix x3 = -l;
    double table_err = std::max({(x1 * x2 - x2 * x1 - x3).norm(),
                                 (x2 * x3 - x3 * x2 - x1).norm(),
                                 (x3 * x1 - x1 * x3 - x2).norm()});
    c.note("so3_bracket_err", table_err);
    c.require(table_err <= 1e-12, "SO(3) bracket table 1e-12");

    for (int k = 0; k < 3; ++k) {
        auto mani = larc_manifold(model, Vector::Unit(3, k));
        c.require(mani.complex_dim == 2, "LARC manifold dim 2 at e" + std::to_string(k + 1));
    }

    auto gl = is_irreducible(model, IrreducibilityMethod::AlgebraGL);
    auto dl = is_irreducible(model, IrreducibilityMethod::AlgebraDelta);
    c.note("algebra_gl_dim", gl.algebra_dim);
    c.note("algebra_delta_dim", dl.algebra_dim);
    c.require(gl.irreducible && gl.algebra_dim == 9, "AlgebraGL dim 9");
    c.require(dl.irreducible && dl.algebra_dim == 9, "AlgebraDelta dim 9");

    auto inv = invariant_states(model);
    c.note("invariant_min_eig", inv.min_eigenvalue);
    c.require(inv.kernel_dim == 1 && inv.unique, "unique invariant state");
    c.require(inv.faithful && inv.min_eigenvalue > 1e-10, "faithful (min eig > 1e-10)");

    return {1, "example-4.2-so3", c.ok, !c.ok, c.out.str(), 0.0};
}

// --- criterion 2: Example 3.1 reproduction -------------------------------

inline CriterionResult check_pauli_example() {
    detail::Checker c;
    auto model = catalog::pauli();
    Matrix sigma1(2, 2), sigma3(2, 2);
    sigma1 << 0, 1, 1, 0;
    sigma3 << 1, 0, 0, -1;

    const Matrix g = drift(model);
    auto powers = delta_powers(g, model.Ls[0], 1);
    const double res1 = detail::best_fit_residual(powers[1], sigma1);
    const double res2 = detail::best_fit_residual(Matrix(powers[1] * model.Ls[0]), sigma3);
    c.note("delta_vs_sigma1_residual", res1);
    c.note("deltaL_vs_sigma3_residual", res2);
    c.require(res1 <= 1e-10, "delta_G(L) proportional to sigma_1");
    c.require(res2 <= 1e-10, "delta_G(L)L proportional to sigma_3");

    std::mt19937_64 rng(0xA31);
    bool all_full = true;
    for (int i = 0; i < 20; ++i) {
        all_full &= s_xi_span(model, detail::random_unit(2, rng)).dim == 2;
    }
    c.require(all_full, "S(xi)=C^2 for 20 random xi");

    TrajectoryConfig cfg{1.0, 1000, 10000, 0xE31, Scheme::EulerMaruyama};
    auto moments = simulate_moments(model, Vector::Unit(2, 0), cfg, {1000});
    const auto& n2 = moments.records[0].norm2;
    const double h = 1.0 / 1000;
    c.note("mean_norm2", n2.value);
    c.note("std_error", n2.std_error);
    c.require(std::abs(n2.value - 1.0) <= 4.0 * n2.std_error + 5.0 * h,
              "norm identity within 4 sigma + 5h");

    WienerPath path = sample_wiener_path(1, 2000, 1.0, 0xE32, 0);
    Matrix wz = simulate_wong_zakai(model, Vector::Unit(2, 0), path, 50);
    double drift_stat = 0.0;
    for (Index k = 0; k < wz.cols(); ++k) {
        drift_stat = std::max(drift_stat, std::abs(wz.col(k).squaredNorm() - 1.0));
    }
    c.note("wz_norm_drift", drift_stat);
    c.require(drift_stat <= 1e-10, "Wong-Zakai norm drift 1e-10");

    return {2, "example-3.1-pauli", c.ok, !c.ok, c.out.str(), 0.0};
}

// --- criterion 3: Example 4.1 reproduction -------------------------------

inline CriterionResult check_pure_hamiltonian_example() {
    detail::Checker c;
    auto minimal = catalog::pure_hamiltonian();
    c.require(check_minimal(minimal).minimal, "m=0 representation is minimal");

    auto larc = larc_check(minimal);
    c.require(larc.verdict == LarcVerdict::FailsAt, "LARC fails");
    bool all_small = true;
    for (const auto& probe : larc.per_xi) all_small &= probe.complex_dim <= 1;
    c.require(all_small, "manifold dim <= 1 at every probe");

    const Complex z(0.8, -0.6);
    LindbladModel variant(minimal.H, {z * Matrix::Identity(2, 2)});
    auto chk = check_minimal(variant);
    c.require(!chk.minimal, "L=zI flagged non-minimal");
    if (!chk.minimal) {
        Matrix combo = chk.witness(0) * Matrix::Identity(2, 2) + chk.witness(1) * variant.Ls[0];
        c.note("witness_combo_norm", combo.norm());
        c.require(combo.norm() <= 1e-10 && chk.witness.norm() > 0.5, "dependence witness valid");
    }

    auto recovered = minimalize(variant);
    c.require(recovered.num_jump_ops() == 0, "minimalize recovers m=0");
    std::mt19937_64 rng(0xB41);
    double gen_err = 0.0;
    for (int i = 0; i < 20; ++i) {
        Matrix x = detail::ginibre(2, 2, rng);
        gen_err = std::max(gen_err, (apply_generator(variant, x, Mode::Heisenberg) -
                                     apply_generator(recovered, x, Mode::Heisenberg)).norm());
    }
    c.note("generator_err", gen_err);
    c.require(gen_err <= 1e-10, "generator equality 1e-10");

    auto verdict = is_irreducible(minimal, IrreducibilityMethod::AlgebraGL);
    c.require(!verdict.irreducible, "not irreducible");
    c.require(verdict.invariant_subspace.has_value(), "invariant-subspace witness present");
    if (verdict.invariant_subspace) {
        const Vector v = verdict.invariant_subspace->vectors().front();
        const Vector hv = minimal.H * v;
        const double eig_defect = (hv - v * v.dot(hv)).norm();
        c.note("eigline_defect", eig_defect);
        c.require(verdict.invariant_subspace->count() == 1 && eig_defect <= 1e-8,
                  "witness is an H-eigenvector line");
    }

    return {3, "example-4.1-pure-hamiltonian", c.ok, !c.ok, c.out.str(), 0.0};
}

// --- criterion 4: Theorem 2.4 equivalence sweep --------------------------

inline CriterionResult check_theorem24_sweep() {
    detail::Checker c;
    std::mt19937_64 rng(0x24CAFE);
    int agreements = 0, cases = 0;
    auto run_case = [&](const LindbladModel& m) {
        const Index d = m.dim();
        bool gl = is_irreducible(m, IrreducibilityMethod::AlgebraGL).irreducible;
        bool dl = is_irreducible(m, IrreducibilityMethod::AlgebraDelta).irreducible;
        bool s_full = true;
        for (int p = 0; p < 20; ++p) {
            s_full &= s_xi_span(m, detail::random_unit(d, rng)).dim == d;
        }
        ++cases;
        if (gl == dl && dl == s_full) ++agreements;
    };
    for (int i = 0; i < 100; ++i) {
        run_case(detail::random_model(2 + i % 3, 1 + i % 2, rng));
    }
    for (int i = 0; i < 20; ++i) {
        run_case(detail::reducible_model(2 + i % 3, rng));
    }
    c.note("agreements", agreements);
    c.note("cases", cases);
    c.require(agreements == 120 && cases == 120, "AlgebraGL == AlgebraDelta == S-probe, 120/120");
    return {4, "theorem-2.4-equivalence-sweep", c.ok, !c.ok, c.out.str(), 0.0};
}

// --- criterion 5: Monte Carlo representation identity ---------------------

inline CriterionResult check_representation_identity() {
    detail::Checker c;
    const std::vector<std::pair<std::string, LindbladModel>> models = {
        {"pauli", catalog::pauli()}, {"so3", catalog::so3()}};

    for (const auto& [name, model] : models) {
        Vector xi = Vector::Unit(model.dim(), 0);
        for (double t : {0.5, 1.0}) {
            TrajectoryConfig cfg{t, 2000, 10000, 0x501 + static_cast<std::uint64_t>(10 * t),
                                 Scheme::ExponentialEuler};
            auto rep = verify_representation(model, xi, t, cfg);
            c.note(name + "_t" + std::to_string(t).substr(0, 3) + "_dist", rep.distance);
            c.note("budget", 5.0 * rep.aggregate_std_error + rep.bias_budget);
            c.require(rep.pass, name + " representation at t=" + std::to_string(t));
        }

        Matrix exact = evolved_outer(model, xi, 1.0);
        std::vector<double> ratios;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            TrajectoryConfig coarse{1.0, 2000, 10000, 0x520 + seed, Scheme::ExponentialEuler};
            TrajectoryConfig fine{1.0, 4000, 40000, 0x900 + seed, Scheme::ExponentialEuler};
            double dc =
                (simulate_moments(model, xi, coarse, {2000}).records[0].density.mean - exact)
                    .norm();
            double df =
                (simulate_moments(model, xi, fine, {4000}).records[0].density.mean - exact).norm();
            ratios.push_back(df / dc);
        }
        const double med = detail::median(ratios);
        c.note(name + "_refine_median_ratio", med);
        c.require(med <= 0.7, name + " refinement reduces distance by >= 30%");
    }
    return {5, "sse-representation-identity", c.ok, !c.ok, c.out.str(), 0.0};
}

// --- criterion 6: totality <=> structure ----------------------------------

inline CriterionResult check_totality_chain() {
    detail::Checker c;
    std::mt19937_64 rng(0x6A11);

    struct Case {
        LindbladModel model;
        Vector xi;
        double t;
        bool inside_invariant_block;
    };
    std::vector<Case> cases;

    // 10 irreducible cases; probe times are matched to the mixing time of
    // each model so that the exact minimum eigenvalue clears the Monte Carlo
    // decision threshold with margin (the fleet guard below enforces this).
    Matrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, Complex(0, -1), Complex(0, 1), 0;
    sz << 1, 0, 0, -1;
    cases.push_back({catalog::pauli(), Vector::Unit(2, 0), 2.0, false});
    cases.push_back({catalog::pauli(), detail::random_unit(2, rng), 2.0, false});
    cases.push_back({catalog::so3(), Vector::Unit(3, 0), 2.0, false});
    cases.push_back({catalog::so3(), detail::random_unit(3, rng), 2.0, false});
    cases.push_back(
        {LindbladModel(Matrix::Zero(2, 2), {sx, sy, sz}), Vector::Unit(2, 0), 1.0, false});
    cases.push_back({LindbladModel(Matrix::Zero(2, 2), {0.7 * sx, 0.7 * sz}),
                     detail::random_unit(2, rng), 1.2, false});
    {
        Matrix u(2, 2);
        const double th = 0.6;
        u << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        auto p = catalog::pauli();
        cases.push_back({LindbladModel(u * p.H * u.adjoint(), {u * p.Ls[0] * u.adjoint()}),
                         detail::random_unit(2, rng), 2.0, false});
    }
    {
        auto s = catalog::so3();
        cases.push_back(
            {LindbladModel(1.1 * s.H, {0.9 * s.Ls[0]}), detail::random_unit(3, rng), 2.0, false});
        auto p = catalog::pauli();
        cases.push_back({LindbladModel(1.3 * p.H, {0.8 * p.Ls[0]}), Vector::Unit(2, 1), 2.0, false});
    }
    {
        auto gen = catalog::generic_cycle_3();
        cases.push_back({build_generic(gen.rates, gen.energies), detail::random_unit(3, rng), 2.0,
                         false});
    }

    // 10 reducible, xi inside the invariant block: the trajectory never
    // leaves the block, so the exact reference is zero.
    for (int i = 0; i < 10; ++i) {
        Index d1 = 1 + i % 2, d2 = 1 + (i / 2) % 2;
        auto m = detail::block_model(d1, d2, rng);
        cases.push_back({std::move(m), Vector::Unit(d1 + d2, 0), 2.0, true});
    }

    // 10 reducible, xi not inside the invariant subspace: commuting-diagonal
    // models and plane-invariant models have full S(xi) at the probe (total
    // must come out true although the QMS is reducible); models whose jump
    // operators live on a small block keep S(xi) deficient at every xi.
    for (int i = 0; i < 4; ++i) {
        Matrix l = Matrix::Zero(2, 2), h = Matrix::Zero(2, 2);
        l(0, 0) = 0.65 + 0.05 * i;
        l(1, 1) = -0.3;
        h(0, 0) = 0.3;
        h(1, 1) = -0.8;
        Vector xi(2);
        xi << 0.8, Complex(0.1, 0.59);
        cases.push_back({LindbladModel(std::move(h), {std::move(l)}), xi.normalized(), 1.5, false});
    }
    for (int i = 0; i < 3; ++i) {
        auto m = detail::reducible_model(3 + i % 2, rng);
        cases.push_back({std::move(m), detail::random_unit(3 + i % 2, rng), 2.0, false});
    }
    for (int i = 0; i < 3; ++i) {
        Matrix a = Complex(0, 1) * sy;  // strongly mixing plane block
        Vector b(2);
        b << Complex(1.0, 0.0), Complex(0.5, -0.2);
        b *= 0.25 + 0.1 * i;
        Matrix l = Matrix::Zero(3, 3);
        l.topLeftCorner(2, 2) = a;
        l.block(0, 2, 2, 1) = b;
        l(2, 2) = Complex(0.2, 0.4);
        Matrix h = Matrix::Zero(3, 3);
        h.topLeftCorner(2, 2) = sz;
        Vector off = Complex(0, 0.5) * (b.adjoint() * a).adjoint();
        h.block(0, 2, 2, 1) = -off;
        h.block(2, 0, 1, 2) = -off.adjoint();
        h(2, 2) = -0.6;
        Vector xi(3);
        xi << 0.55, Complex(0.35, -0.45), Complex(0.55, 0.25);
        cases.push_back({LindbladModel(std::move(h), {std::move(l)}), xi.normalized(), 1.5, false});
    }

    int agreements = 0;
    int exact_zero_ok = 0, inside_cases = 0;
    int decidable = 0, nonzero_exact = 0;
    for (const auto& cs : cases) {
        const Index d = cs.model.dim();
        const bool s_full = s_xi_span(cs.model, cs.xi).dim == d;
        TrajectoryConfig cfg{cs.t, static_cast<int>(200 * cs.t), 20000, 0x6A12,
                             Scheme::ExponentialEuler};
        auto rep = totality_test(cs.model, cs.xi, cs.t, cfg);
        if (rep.total == s_full) ++agreements;
        if (cs.inside_invariant_block) {
            ++inside_cases;
            if (rep.exact_reference <= 1e-10) ++exact_zero_ok;
        }
        if (rep.exact_reference > 1e-8) {
            ++nonzero_exact;
            if (rep.exact_reference >= 2.0 * rep.threshold) ++decidable;
        }
    }
    c.note("agreements", agreements);
    c.note("cases", cases.size());
    c.note("inside_exact_zero", exact_zero_ok);
    c.note("decidable_margin", decidable);
    c.require(agreements == 30, "totality agrees with dim S(xi) in 30/30");
    c.require(exact_zero_ok == inside_cases, "inside cases have exact min eig <= 1e-10");
    c.require(decidable == nonzero_exact,
              "every nonzero exact reference clears twice the decision threshold");
    return {6, "totality-vs-structure", c.ok, !c.ok, c.out.str(), 0.0};
}

// --- criterion 7: chaos isometry ------------------------------------------

inline CriterionResult check_chaos_isometry() {
    detail::Checker c;
    struct Case {
        const char* name;
        LindbladModel model;
        double t;
    };
    const std::vector<Case> cases = {{"pauli", catalog::pauli(), 0.3},
                                     {"so3", catalog::so3(), 0.2}};
    for (const auto& cs : cases) {
        Vector xi = Vector::Unit(cs.model.dim(), 0);
        auto res = chaos_isometry_check(cs.model, xi, cs.t, 4);
        c.note(std::string(cs.name) + "_partial_sum", res.partial_sum);
        c.note("bound", res.bound);
        c.note("quad_budget", res.quadrature_budget);
        const double expected_bound = std::pow(cs.t, 5) / 120.0;  // c = m = 1 for both models
        c.require(std::abs(res.bound - expected_bound) <= 1e-15, "bound equals (cmt)^5/120");
        c.require(res.pass, std::string(cs.name) + " chaos isometry at order 4");
        bool monotone = true;
        for (std::size_t k = 1; k < res.partial_sums.size(); ++k) {
            monotone &= res.partial_sums[k] >= res.partial_sums[k - 1] - 1e-14;
        }
        c.require(monotone, "partial sums monotone in order");
    }
    return {7, "chaos-isometry", c.ok, !c.ok, c.out.str(), 0.0};
}

// --- criterion 8: Wong-Zakai convergence ----------------------------------

inline CriterionResult check_wong_zakai_convergence() {
    detail::Checker c;
    // 3200 fine steps: the smallest grid above the nominal 2000 that is
    // refined by every resolution in {10, 40, 160}.
    auto curve = wong_zakai_convergence(catalog::so3(), Vector::Unit(3, 0), 1.0, {10, 40, 160},
                                        100, 3200, 0x8F0);
    c.note("median_err_n10", curve[0]);
    c.note("median_err_n40", curve[1]);
    c.note("median_err_n160", curve[2]);
    c.require(curve[1] < curve[0], "median error decreases 10 -> 40");
    c.require(curve[2] < curve[1], "median error decreases 40 -> 160");
    return {8, "wong-zakai-convergence", c.ok, !c.ok, c.out.str(), 0.0};
}

// --- criterion 9: generic equivalences ------------------------------------

inline CriterionResult check_generic_equivalences() {
    detail::Checker c;
    std::mt19937_64 rng(0x9123);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_real_distribution<double> rate(0.1, 2.0);
    int consistent = 0;
    double worst_bracket = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2 + trial % 5;
        RealMatrix gamma = RealMatrix::Zero(d, d);
        for (int l = 0; l < d; ++l)
            for (int k = 0; k < d; ++k)
                if (l != k && coin(rng) < 0.5) gamma(l, k) = rate(rng);
        RealVector energies(d);
        switch (trial % 3) {
            case 0: energies.setZero(); break;
            case 1: energies = RealVector::LinSpaced(d, 1.0, d * d); break;
            default:
                for (int i = 0; i < d; ++i) energies(i) = 2.0 * coin(rng) - 1.0;
        }
        LarcOptions opts;
        opts.random_probes = 15;
        opts.seed = 0x9200 + trial;
        try {
            auto rep = verify_equivalences(RateMatrix(gamma), DiagonalHamiltonian(energies), opts);
            ++consistent;
            worst_bracket = std::max(worst_bracket, rep.max_bracket_relative_error);
        } catch (const InternalError& err) {
            c.require(false, std::string("equivalence violation: ") + err.what());
        }
    }
    c.note("consistent", consistent);
    c.note("worst_bracket_rel_err", worst_bracket);
    c.require(consistent == 50, "chain <=> algebra <=> LARC in 50/50");
    c.require(worst_bracket <= 1e-10, "bracket coefficients match to 1e-10");
    return {9, "generic-equivalences", c.ok, !c.ok, c.out.str(), 0.0};
}

// --- criterion 10: support projections ------------------------------------

inline CriterionResult check_support_projections() {
    detail::Checker c;
    std::mt19937_64 rng(0xA0A0);
    const double times[3] = {0.5, 1.0, 2.0};
    int agreements = 0;
    for (int trial = 0; trial < 50; ++trial) {
        LindbladModel model = [&]() -> LindbladModel {
            switch (trial % 5) {
                case 0: return detail::random_model(2 + trial % 3, 1, rng);
                case 1: return detail::random_model(3, 2, rng);
                case 2: return detail::block_model(1 + trial % 2, 2, rng);
                case 3: return detail::plane_model(rng);
                default: return detail::random_model(4, 1, rng);
            }
        }();
        const Index d = model.dim();
        Vector xi = (trial % 5 == 2) ? Vector::Unit(d, 0) : detail::random_unit(d, rng);
        const double t = times[trial % 3];
        auto proj = support_projection(model, xi, t);
        int evolved_rank = numeric_rank(evolved_outer(model, xi, t), {1e-8, 1e-12});
        if (proj.rank == evolved_rank) {
            ++agreements;
        } else {
            c.note("mismatch_trial", trial);
            c.note("proj_rank", proj.rank);
            c.note("evolved_rank", evolved_rank);
        }
    }
    c.note("agreements", agreements);
    c.require(agreements == 50, "rank(P_t S(xi)) == rank(evolved state), 50/50");
    return {10, "support-projections", c.ok, !c.ok, c.out.str(), 0.0};
}

// --- driver ----------------------------------------------------------------

inline std::vector<CriterionResult> run_acceptance(std::ostream* progress = nullptr) {
    using Clock = std::chrono::steady_clock;
    struct Entry {
        const char* name;
        CriterionResult (*check)();
    };
    const std::vector<Entry> checks = {
        {"example-4.2-so3", check_so3_example},
        {"example-3.1-pauli", check_pauli_example},
        {"example-4.1-pure-hamiltonian", check_pure_hamiltonian_example},
        {"theorem-2.4-equivalence-sweep", check_theorem24_sweep},
        {"sse-representation-identity", check_representation_identity},
        {"totality-vs-structure", check_totality_chain},
        {"chaos-isometry", check_chaos_isometry},
        {"wong-zakai-convergence", check_wong_zakai_convergence},
        {"generic-equivalences", check_generic_equivalences},
        {"support-projections", check_support_projections},
    };
    std::vector<CriterionResult> results;
    for (const auto& entry : checks) {
        auto start = Clock::now();
        CriterionResult res;
        try {
            res = entry.check();
        } catch (const InternalError& err) {
            res.pass = false;
            res.theorem_violation = true;
            res.details = std::string("InternalError: ") + err.what();
        } catch (const std::exception& err) {
            res.pass = false;
            res.details = std::string("error: ") + err.what();
        }
        res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (res.id == 0) res.id = static_cast<int>(results.size()) + 1;
        if (res.name.empty()) res.name = entry.name;
        if (progress) {
            (*progress) << (res.pass ? "[PASS] " : "[FAIL] ") << res.id << " " << res.name
                        << " (" << std::fixed << std::setprecision(2) << res.seconds << " s)"
                        << (res.details.empty() ? "" : " :: " + res.details) << "\n";
            progress->flush();
        }
        results.push_back(std::move(res));
    }
    return results;
}

} // namespace qmskit::selfcheck
