#pragma once

// Structural analysis of a quantum Markov semigroup: multiple-commutator
// spans S(xi), irreducibility by operator-algebra closure and by Monte Carlo
// totality, support projections, invariant states, fixed points,
// decoherence-free triviality, and Lie-algebra rank (LARC) diagnostics.

#include <optional>
#include <random>
#include <string>

#include "qmskit/gksl.hpp"
#include "qmskit/sse.hpp"

namespace qmskit {

/// [delta_G^0(L), ..., delta_G^{n_max}(L)] with delta_G(A) = [G, A].
inline std::vector<Matrix> delta_powers(const Matrix& g, const Matrix& l, int n_max) {
    require_square(g, "G");
    require_square(l, "L");
    if (g.rows() != l.rows()) throw DimError("delta_powers: dimension mismatch");
    std::vector<Matrix> out;
    out.reserve(n_max + 1);
    out.push_back(l);
    for (int n = 0; n < n_max; ++n) {
        out.push_back(g * out.back() - out.back() * g);
    }
    return out;
}

/// All delta_G^n(L_l) for 0 <= n <= d^2 - 1 (Cayley-Hamilton on the adjoint
/// map makes higher powers redundant) and every jump operator.
inline std::vector<Matrix> delta_family(const LindbladModel& model) {
    const Matrix g = drift(model);
    const int cap = static_cast<int>(model.dim() * model.dim()) - 1;
    std::vector<Matrix> ops;
    for (const auto& l : model.Ls) {
        auto powers = delta_powers(g, l, cap);
        ops.insert(ops.end(), powers.begin(), powers.end());
    }
    return ops;
}

struct SxiResult {
    Vector xi;            // normalized seed
    SubspaceBasis basis;  // orthonormal basis of S(xi)
    int dim = 0;
    int delta_powers_used = 0;
};

/// S(xi): the span of xi together with all words
/// delta_G^{n_1}(L_{l_1}) ... delta_G^{n_k}(L_{l_k}) xi, realized as the
/// smallest delta-family-invariant subspace containing xi.
inline SxiResult s_xi_span(const LindbladModel& model, const Vector& xi,
                           double tol = Tolerance{}.rel_rank_tol) {
    if (xi.size() != model.dim()) throw DimError("s_xi_span: xi dimension mismatch");
    const double n = xi.norm();
    if (n <= 1e-300) throw ZeroVector("s_xi_span: xi must be nonzero");
    Vector unit = xi / n;
    auto basis = invariant_closure({unit}, delta_family(model), tol);
    SxiResult res{std::move(unit), std::move(basis), 0,
                  static_cast<int>(model.dim() * model.dim()) - 1};
    res.dim = static_cast<int>(res.basis.count());
    return res;
}

enum class IrreducibilityMethod { AlgebraGL, AlgebraDelta, MonteCarloTotality };

inline const char* to_string(IrreducibilityMethod m) {
    switch (m) {
        case IrreducibilityMethod::AlgebraGL: return "algebra_gl";
        case IrreducibilityMethod::AlgebraDelta: return "algebra_delta";
        default: return "monte_carlo_totality";
    }
}

struct IrreducibilityVerdict {
    bool irreducible = false;
    IrreducibilityMethod method = IrreducibilityMethod::AlgebraGL;
    int algebra_dim = 0;  // closure dimension for the algebra routes
    /// Common invariant subspace of G and the L_l, present when an algebra
    /// route found the model reducible and a witness could be located.
    std::optional<SubspaceBasis> invariant_subspace;
    double min_totality_eigenvalue = 0.0;  // Monte Carlo route evidence
};

namespace detail {

/// Searches for a nontrivial common invariant subspace of the family by
/// probing orbits (unital-algebra closures) of structured seed vectors. Any
/// invariant subspace contains an eigenvector of each family member, so
/// eigenvector probes locate one whenever the eigenspaces are simple; random
/// and canonical probes cover the rest of the cases seen in practice. Both
/// the family and its adjoint are probed (an invariant subspace of the
/// adjoints yields one for the family by orthocomplement).
inline std::optional<SubspaceBasis> find_common_invariant_subspace(
    const std::vector<Matrix>& family, double tol) {
    const Index d = family.front().rows();
    std::vector<Matrix> adjoints;
    for (const auto& a : family) adjoints.push_back(a.adjoint());

    auto probes_for = [&](const std::vector<Matrix>& ops) {
        std::vector<Vector> probes;
        for (const auto& a : ops) {
            Eigen::ComplexEigenSolver<Matrix> es(a);
            for (Index i = 0; i < d; ++i) probes.push_back(es.eigenvectors().col(i));
        }
        for (Index i = 0; i < d; ++i) probes.push_back(Vector::Unit(d, i));
        std::mt19937_64 rng(0x5eedULL);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int i = 0; i < 10; ++i) {
            Vector v(d);
            for (Index j = 0; j < d; ++j) v(j) = Complex(gauss(rng), gauss(rng));
            probes.push_back(v.normalized());
        }
        return probes;
    };

    for (const Vector& probe : probes_for(family)) {
        if (probe.norm() < 1e-12) continue;
        auto orbit = invariant_closure({probe}, family, tol);
        if (orbit.count() < d) return orbit;
    }
    for (const Vector& probe : probes_for(adjoints)) {
        if (probe.norm() < 1e-12) continue;
        auto orbit = invariant_closure({probe}, adjoints, tol);
        if (orbit.count() < d) {
            // orthocomplement of an adjoint-invariant subspace
            Matrix stacked(orbit.count(), d);
            for (Index i = 0; i < orbit.count(); ++i) {
                stacked.row(i) = orbit.vectors()[i].adjoint();
            }
            Matrix complement = kernel_basis(stacked, {tol, 1e-12});
            SubspaceBasis result(d, tol);
            for (Index c = 0; c < complement.cols(); ++c) result.extend(complement.col(c));
            if (result.count() > 0 && result.count() < d) return result;
        }
    }
    return std::nullopt;
}

inline void check_closure_ambiguity(const SubspaceBasis& closure, Index d) {
    const Index full = d * d;
    if (closure.count() + 1 >= full && closure.borderline()) {
        throw ToleranceAmbiguity(
            "algebra closure dimension " + std::to_string(closure.count()) +
            " is within 1 of " + std::to_string(full) + " with borderline singular values");
    }
}

} // namespace detail

struct TotalityProbeOptions {
    int probes = 5;
    double t = 2.0;
    TrajectoryConfig config{2.0, 500, 8000, 2024, Scheme::ExponentialEuler};
    std::uint64_t probe_seed = 99;
};

/// Irreducibility by one of the three routes. The algebra routes decide via
/// Burnside: the unital algebra generated by {G, L_l} (or by the delta
/// family) is all of M_d iff no nontrivial common invariant subspace exists.
/// The Monte Carlo route samples SSE trajectories and tests totality of the
/// second moment at random probes.
inline IrreducibilityVerdict is_irreducible(const LindbladModel& model,
                                            IrreducibilityMethod method,
                                            double tol = Tolerance{}.rel_rank_tol,
                                            const TotalityProbeOptions& mc = {}) {
    const Index d = model.dim();
    IrreducibilityVerdict verdict;
    verdict.method = method;

    if (method == IrreducibilityMethod::MonteCarloTotality) {
        std::mt19937_64 rng(mc.probe_seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        verdict.irreducible = true;
        verdict.min_totality_eigenvalue = std::numeric_limits<double>::infinity();
        for (int p = 0; p < mc.probes; ++p) {
            Vector xi(d);
            for (Index j = 0; j < d; ++j) xi(j) = Complex(gauss(rng), gauss(rng));
            xi.normalize();
            auto rep = totality_test(model, xi, mc.t, mc.config);
            verdict.min_totality_eigenvalue =
                std::min(verdict.min_totality_eigenvalue, rep.min_eigenvalue);
            if (!rep.total) verdict.irreducible = false;
        }
        return verdict;
    }

    std::vector<Matrix> family{drift(model)};
    for (const auto& l : model.Ls) family.push_back(l);

    std::vector<Matrix> generators =
        (method == IrreducibilityMethod::AlgebraGL) ? family : delta_family(model);
    if (generators.empty()) generators.push_back(Matrix::Zero(d, d));

    auto closure = operator_algebra_closure(generators, true, tol, d);
    detail::check_closure_ambiguity(closure, d);
    verdict.algebra_dim = static_cast<int>(closure.count());
    verdict.irreducible = closure.count() == d * d;
    if (!verdict.irreducible) {
        // the witness is always reported for {G, L_l}: a subspace invariant
        // under the delta family need not be invariant under G itself
        verdict.invariant_subspace = detail::find_common_invariant_subspace(family, tol);
    }
    return verdict;
}

/// Runs both algebra routes and enforces their Theorem-2.4 agreement.
inline IrreducibilityVerdict is_irreducible_checked(const LindbladModel& model,
                                                    double tol = Tolerance{}.rel_rank_tol) {
    auto gl = is_irreducible(model, IrreducibilityMethod::AlgebraGL, tol);
    auto dl = is_irreducible(model, IrreducibilityMethod::AlgebraDelta, tol);
    if (gl.irreducible != dl.irreducible) {
        throw InternalError("irreducibility routes disagree: algebra_gl=" +
                            std::to_string(gl.irreducible) + " algebra_delta=" +
                            std::to_string(dl.irreducible));
    }
    return gl;
}

struct SupportProjection {
    Matrix projection;  // orthogonal projection onto e^{tG} S(xi)
    int rank = 0;
};

/// Support projection of the evolved pure state: the orthogonal projection
/// onto P_t S(xi) with P_t = e^{tG}; its rank equals dim S(xi) since P_t is
/// invertible.
inline SupportProjection support_projection(const LindbladModel& model, const Vector& xi,
                                            double t, double tol = Tolerance{}.rel_rank_tol) {
    if (!(t > 0.0)) throw InvalidTime("support_projection: t must be positive");
    auto sxi = s_xi_span(model, xi, tol);
    const Matrix pt = matrix_exp(drift(model), t);
    SubspaceBasis image(model.dim(), tol);
    for (const auto& v : sxi.basis.vectors()) image.extend(pt * v);
    if (image.count() != sxi.basis.count()) {
        throw InternalError("e^{tG} lost rank on S(xi); exponential is broken");
    }
    Matrix proj = Matrix::Zero(model.dim(), model.dim());
    for (const auto& v : image.vectors()) proj += v * v.adjoint();
    return {std::move(proj), static_cast<int>(image.count())};
}

struct InvariantStateReport {
    int kernel_dim = 0;
    /// Trace-normalized kernel element; present only when kernel_dim == 1.
    std::optional<QuantumState> state;
    bool unique = false;
    /// kernel_dim == 1: min eigenvalue of the state exceeds faithfulness_tol.
    /// kernel_dim > 1: whether a faithful invariant state exists at all,
    /// decided through the ergodic (spectral-projection) average of I/d.
    bool faithful = false;
    double min_eigenvalue = 0.0;
};

namespace detail {

/// Ergodic limit state: the spectral projection of LL_* at eigenvalue zero
/// applied to I/d. The zero eigenvalue of a QMS generator is semisimple, so
/// P_0 = K (K_L^* K)^{-1} K_L^* with K, K_L right/left kernel bases.
inline Matrix ergodic_state(const Matrix& schroedinger_matrix, Index d, const Tolerance& tol) {
    Matrix k = kernel_basis(schroedinger_matrix, tol);
    Matrix kl = kernel_basis(schroedinger_matrix.adjoint().eval(), tol);
    if (k.cols() == 0 || kl.cols() != k.cols()) {
        throw InternalError("invariant-state kernel is empty or mismatched");
    }
    Matrix cross = kl.adjoint() * k;
    Vector coeffs = cross.partialPivLu().solve(kl.adjoint() * vec(Matrix(Matrix::Identity(d, d) / double(d))));
    Matrix rho = unvec(k * coeffs, d);
    rho = ((rho + rho.adjoint()) / 2.0).eval();
    rho /= rho.trace().real();
    return rho;
}

} // namespace detail

/// Kernel of the Schroedinger superoperator. Every finite-dimensional QMS
/// has at least one invariant state, so an empty kernel is an internal
/// error, never a property of the model.
inline InvariantStateReport invariant_states(const LindbladModel& model,
                                             const Tolerance& tol = {},
                                             double faithfulness_tol = 1e-10) {
    const Index d = model.dim();
    const Matrix m = superoperator(model, Mode::Schroedinger).matrix;
    Matrix kernel = kernel_basis(m, tol);

    InvariantStateReport rep;
    rep.kernel_dim = static_cast<int>(kernel.cols());
    if (rep.kernel_dim == 0) {
        throw InternalError("Schroedinger generator has empty kernel (impossible for finite d)");
    }
    if (rep.kernel_dim == 1) {
        Matrix raw = unvec(kernel.col(0), d);
        Matrix herm = (raw + raw.adjoint()) / 2.0;
        Matrix anti = (raw - raw.adjoint()) / Complex(0, 2);
        Matrix rho = herm.norm() >= anti.norm() ? herm : anti;
        const double tr = rho.trace().real();
        if (std::abs(tr) < 1e-12) throw InternalError("invariant kernel element is traceless");
        rho /= tr;
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
        rep.min_eigenvalue = es.eigenvalues().minCoeff();
        rep.unique = true;
        rep.faithful = rep.min_eigenvalue > faithfulness_tol;
        Matrix clipped = rho;
        if (rep.min_eigenvalue < 0.0 && rep.min_eigenvalue > -1e-8) {
            Eigen::SelfAdjointEigenSolver<Matrix> full(rho);
            clipped = full.eigenvectors() *
                      full.eigenvalues().cwiseMax(0.0).asDiagonal() *
                      full.eigenvectors().adjoint();
            clipped /= clipped.trace().real();
        }
        rep.state = QuantumState(clipped);
    } else {
        Matrix rho = detail::ergodic_state(m, d, tol);
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
        rep.min_eigenvalue = es.eigenvalues().minCoeff();
        rep.faithful = rep.min_eigenvalue > faithfulness_tol;
    }
    return rep;
}

struct FixedPointReport {
    int dim = 0;
    bool trivial = false;
    std::vector<Matrix> basis;
};

/// F(T) = ker(LL) in Heisenberg mode; contains the identity, so dim >= 1.
inline FixedPointReport fixed_points(const LindbladModel& model, const Tolerance& tol = {}) {
    const Index d = model.dim();
    Matrix kernel = kernel_basis(superoperator(model, Mode::Heisenberg).matrix, tol);
    FixedPointReport rep;
    rep.dim = static_cast<int>(kernel.cols());
    if (rep.dim < 1) throw InternalError("fixed-point space lost the identity");
    rep.trivial = rep.dim == 1;
    for (Index c = 0; c < kernel.cols(); ++c) rep.basis.push_back(unvec(kernel.col(c), d));
    return rep;
}

/// N(T) triviality through the commutant of the iterated commutators
/// {delta_H^n(L_l), delta_H^n(L_l^*)}: trivial iff the commutant is C I.
/// Requires a faithful invariant state; NotApplicable otherwise.
inline bool decoherence_free_trivial(const LindbladModel& model, const Tolerance& tol = {}) {
    auto inv = invariant_states(model, tol);
    if (!inv.faithful) {
        throw NotApplicable("decoherence-free analysis needs a faithful invariant state");
    }
    const Index d = model.dim();
    const int cap = static_cast<int>(d * d) - 1;
    std::vector<Matrix> ops;
    for (const auto& l : model.Ls) {
        auto p1 = delta_powers(model.H, l, cap);
        auto p2 = delta_powers(model.H, l.adjoint(), cap);
        ops.insert(ops.end(), p1.begin(), p1.end());
        ops.insert(ops.end(), p2.begin(), p2.end());
    }
    if (ops.empty()) ops.push_back(Matrix::Zero(d, d));

    // commutant = kernel of x -> (A x - x A)_A, stacked over the family
    const Matrix id = Matrix::Identity(d, d);
    Matrix stacked(static_cast<Index>(ops.size()) * d * d, d * d);
    for (std::size_t i = 0; i < ops.size(); ++i) {
        stacked.middleRows(static_cast<Index>(i) * d * d, d * d) =
            Eigen::kroneckerProduct(id, ops[i]).eval() -
            Eigen::kroneckerProduct(ops[i].transpose(), id).eval();
    }
    return kernel_basis(stacked, tol).cols() == 1;
}

struct LarcManifold {
    RealSubspaceBasis real_span;   // real span of {A xi : A in Lie basis}
    SubspaceBasis complex_span;    // complex span of the same image vectors
    int real_dim = 0;
    int complex_dim = 0;
};

/// Evaluation of the Lie algebra at xi, from an explicit generator list.
/// xi itself is not included: the manifold is the image of the Lie algebra.
inline LarcManifold larc_manifold_from(const std::vector<Matrix>& generators, const Vector& xi,
                                       double tol = Tolerance{}.rel_rank_tol) {
    const double n = xi.norm();
    if (n <= 1e-300) throw ZeroVector("larc_manifold: xi must be nonzero");
    const Vector unit = xi / n;
    auto lie = lie_closure(generators, tol);
    const Index d = xi.size();
    LarcManifold mani{RealSubspaceBasis(d, tol), SubspaceBasis(d, tol), 0, 0};
    for (const auto& v : lie.vectors()) {
        Vector image = unvec(v, d) * unit;
        mani.real_span.extend(image);
        mani.complex_span.extend(image);
    }
    mani.real_dim = static_cast<int>(mani.real_span.count());
    mani.complex_dim = static_cast<int>(mani.complex_span.count());
    return mani;
}

/// LARC manifold of the model: the Lie algebra of {G~, L_1..L_m} evaluated
/// at xi, with G~ = G - 1/2 sum L^2. Representation-dependent, so callers
/// should pass a minimal model.
inline LarcManifold larc_manifold(const LindbladModel& model, const Vector& xi,
                                  double tol = Tolerance{}.rel_rank_tol) {
    if (xi.size() != model.dim()) throw DimError("larc_manifold: xi dimension mismatch");
    std::vector<Matrix> gens{stratonovich_drift(model)};
    for (const auto& l : model.Ls) gens.push_back(l);
    return larc_manifold_from(gens, xi, tol);
}

enum class LarcVerdict { Holds, FailsAt, Inconclusive };

inline const char* to_string(LarcVerdict v) {
    switch (v) {
        case LarcVerdict::Holds: return "holds";
        case LarcVerdict::FailsAt: return "fails_at";
        default: return "inconclusive";
    }
}

struct LarcProbe {
    Vector xi;
    int complex_dim = 0;
    int real_dim = 0;
};

struct LarcReport {
    int lie_dim = 0;  // real dimension of the Lie algebra of {G~, L_l}
    std::vector<LarcProbe> per_xi;
    LarcVerdict verdict = LarcVerdict::Inconclusive;
    std::optional<Vector> witness;  // first deficient probe, for FailsAt
    bool sampled_only = false;
    std::string caveat;
};

struct LarcOptions {
    int random_probes = 50;
    std::uint64_t seed = 12345;
};

/// Sampled LARC decision. Probes are the canonical basis, all eigenvectors
/// of G~ and of every L_l, plus random unit vectors. The manifold is deemed
/// full when its complex span is C^d (the paper counts complex dimensions;
/// real spans are reported alongside as the control-theoretic reading).
/// Sampling cannot prove "for all xi", so Holds is only reported with an
/// explicit sampled-only caveat, and only when the irreducibility
/// necessary condition and a Burnside certificate for the enveloping
/// algebra both pass; otherwise the verdict degrades to Inconclusive.
inline LarcReport larc_check(const LindbladModel& model, const LarcOptions& options = {},
                             double tol = Tolerance{}.rel_rank_tol) {
    const Index d = model.dim();
    std::vector<Matrix> gens{stratonovich_drift(model)};
    for (const auto& l : model.Ls) gens.push_back(l);

    LarcReport rep;
    rep.lie_dim = static_cast<int>(lie_closure(gens, tol).count());

    std::vector<Vector> probes;
    for (Index i = 0; i < d; ++i) probes.push_back(Vector::Unit(d, i));
    for (const auto& gen : gens) {
        Eigen::ComplexEigenSolver<Matrix> es(gen);
        for (Index i = 0; i < d; ++i) {
            Vector v = es.eigenvectors().col(i);
            if (v.norm() > 1e-12) probes.push_back(v.normalized());
        }
    }
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < options.random_probes; ++i) {
        Vector v(d);
        for (Index j = 0; j < d; ++j) v(j) = Complex(gauss(rng), gauss(rng));
        probes.push_back(v.normalized());
    }

    bool all_full = true;
    for (const auto& probe : probes) {
        auto mani = larc_manifold_from(gens, probe, tol);
        rep.per_xi.push_back({probe, mani.complex_dim, mani.real_dim});
        if (mani.complex_dim < d && all_full) {
            all_full = false;
            rep.verdict = LarcVerdict::FailsAt;
            rep.witness = probe;
        }
    }
    if (!all_full) return rep;

    const bool algebra_full = operator_algebra_closure(gens, true, tol, d).count() == d * d;
    if (algebra_full) {
        rep.verdict = LarcVerdict::Holds;
        rep.sampled_only = true;
        rep.caveat = "full manifold certified at sampled probes only; "
                     "enveloping algebra is full (Burnside) and the QMS is irreducible";
    } else {
        rep.verdict = LarcVerdict::Inconclusive;
        rep.caveat = "all probes full but the necessary irreducibility condition failed";
    }
    return rep;
}

} // namespace qmskit
