#pragma once

// GKSL model construction, drift, generator application, superoperator
// assembly, exact semigroup evolution, and minimality of the representation.

#include <optional>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "qmskit/matkit.hpp"

namespace qmskit {

/// GKSL data (H, L_1..L_m) on C^d:
///   LL(x) = i[H,x] + 1/2 sum_l (-L*L x + 2 L* x L - x L*L)
///         = G* x + sum_l L* x L + x G,      G = -1/2 sum_l L*L - iH.
struct LindbladModel {
    Matrix H;
    std::vector<Matrix> Ls;

    LindbladModel(Matrix hamiltonian, std::vector<Matrix> jump_ops,
                  double herm_tol = 1e-8)
        : H(std::move(hamiltonian)), Ls(std::move(jump_ops)) {
        require_square(H, "H");
        require_finite(H, "H");
        const double asym = (H - H.adjoint()).norm();
        if (asym > herm_tol * std::max(1.0, H.norm())) {
            throw ValidationError("H is not Hermitian: ||H - H*|| = " + std::to_string(asym));
        }
        for (const auto& l : Ls) {
            require_square(l, "L");
            require_finite(l, "L");
            if (l.rows() != H.rows()) throw DimError("jump operator dimension mismatch");
        }
    }

    Index dim() const { return H.rows(); }
    int num_jump_ops() const { return static_cast<int>(Ls.size()); }
};

/// G = -1/2 sum_l L*L - iH.
inline Matrix drift(const LindbladModel& model) {
    Matrix g = Complex(0, -1) * model.H;
    for (const auto& l : model.Ls) g -= 0.5 * (l.adjoint() * l);
    return g;
}

/// Stratonovich-corrected drift G~ = G - 1/2 sum_l L^2 (note: L^2, not L*L).
inline Matrix stratonovich_drift(const LindbladModel& model) {
    Matrix g = drift(model);
    for (const auto& l : model.Ls) g -= 0.5 * (l * l);
    return g;
}

enum class Mode { Heisenberg, Schroedinger };

/// Heisenberg: LL(x) = G*x + sum L* x L + x G.
/// Schroedinger: LL_*(rho) = G rho + rho G* + sum L rho L* (the trace dual).
inline Matrix apply_generator(const LindbladModel& model, const Matrix& x, Mode mode) {
    if (x.rows() != model.dim() || x.cols() != model.dim()) {
        throw DimError("apply_generator: argument dimension mismatch");
    }
    const Matrix g = drift(model);
    Matrix out;
    if (mode == Mode::Heisenberg) {
        out = g.adjoint() * x + x * g;
        for (const auto& l : model.Ls) out += l.adjoint() * x * l;
    } else {
        out = g * x + x * g.adjoint();
        for (const auto& l : model.Ls) out += l * x * l.adjoint();
    }
    return out;
}

/// d^2 x d^2 matrix acting on column-stacked d x d matrices.
struct Superoperator {
    Mode mode;
    Matrix matrix;

    Index dim() const { return static_cast<Index>(std::llround(std::sqrt(double(matrix.rows())))); }

    Matrix apply(const Matrix& x) const { return unvec(matrix * vec(x), x.rows()); }
};

inline Superoperator superoperator(const LindbladModel& model, Mode mode) {
    const Index d = model.dim();
    const Matrix id = Matrix::Identity(d, d);
    const Matrix g = drift(model);
    Matrix m(d * d, d * d);
    if (mode == Mode::Heisenberg) {
        m = Eigen::kroneckerProduct(id, g.adjoint()).eval()
          + Eigen::kroneckerProduct(g.transpose(), id).eval();
        for (const auto& l : model.Ls) {
            m += Eigen::kroneckerProduct(l.transpose(), l.adjoint().eval()).eval();
        }
    } else {
        m = Eigen::kroneckerProduct(id, g).eval()
          + Eigen::kroneckerProduct(g.conjugate(), id).eval();
        for (const auto& l : model.Ls) {
            m += Eigen::kroneckerProduct(l.conjugate(), l).eval();
        }
    }
    return {mode, std::move(m)};
}

struct QuantumState {
    Matrix rho;

    explicit QuantumState(Matrix density, double tol = 1e-8) : rho(std::move(density)) {
        require_square(rho, "rho");
        require_finite(rho, "rho");
        if ((rho - rho.adjoint()).norm() > tol * std::max(1.0, rho.norm())) {
            throw ValidationError("state is not Hermitian");
        }
        if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol) {
            throw ValidationError("state trace is not 1");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol) {
            throw ValidationError("state has a negative eigenvalue beyond tolerance");
        }
    }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
};

inline QuantumState pure_state(const Vector& xi) {
    const double n = xi.norm();
    if (n <= 1e-300) throw ZeroVector("pure_state: zero vector");
    Vector u = xi / n;
    return QuantumState(u * u.adjoint());
}

/// rho(t) = exp(t LL_*) rho via the Schroedinger superoperator exponential.
/// Eigenvalues in [-1e-8, 0) are clipped; anything more negative signals a
/// broken exponential and raises InternalError.
inline QuantumState evolve_state(const Superoperator& schroedinger, const QuantumState& state,
                                 double t) {
    if (!(t >= 0.0)) throw InvalidTime("evolve_state: t must be nonnegative");
    if (schroedinger.mode != Mode::Schroedinger) {
        throw ValidationError("evolve_state needs the Schroedinger-mode superoperator");
    }
    if (t == 0.0) return state;
    const Index d = state.rho.rows();
    Matrix rho_t = unvec(matrix_exp(schroedinger.matrix, t) * vec(state.rho), d);
    rho_t = ((rho_t + rho_t.adjoint()) / 2.0).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_t);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-8) {
        throw InternalError("evolved state strongly negative (min eig " +
                            std::to_string(min_eig) + ")");
    }
    if (min_eig < 0.0) {
        RealVector clipped = es.eigenvalues().cwiseMax(0.0);
        rho_t = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
        rho_t /= rho_t.trace().real();
    }
    return QuantumState(std::move(rho_t));
}

inline QuantumState evolve_state(const LindbladModel& model, const QuantumState& state, double t) {
    return evolve_state(superoperator(model, Mode::Schroedinger), state, t);
}

struct MinimalityCheck {
    bool minimal;
    /// When not minimal: coefficients (c_0 for the identity, c_l for L_l)
    /// with c_0 I + sum_l c_l L_l = 0 and |c| = 1.
    Vector witness;
};

/// A GKSL representation is minimal iff {I, L_1..L_m} is linearly
/// independent in the Hilbert-Schmidt sense.
inline MinimalityCheck check_minimal(const LindbladModel& model,
                                     const Tolerance& tol = {}) {
    const Index d = model.dim();
    const int m = model.num_jump_ops();
    Matrix stacked(d * d, m + 1);
    stacked.col(0) = vec(Matrix(Matrix::Identity(d, d)));
    for (int l = 0; l < m; ++l) stacked.col(l + 1) = vec(model.Ls[l]);
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = std::max(tol.rel_rank_tol * sv(0), tol.abs_floor);
    if (sv(sv.size() - 1) > cutoff) return {true, Vector()};
    return {false, svd.matrixV().col(sv.size() - 1)};
}

/// Returns a model with the same generator whose {I, L_1..L_m'} family is
/// linearly independent: each L_l loses its identity component c_l =
/// tr(L_l)/d, the unique generator-preserving correction i(cbar L - c L*)/2
/// is absorbed into H, and the traceless family is compressed by SVD.
inline LindbladModel minimalize(const LindbladModel& model, const Tolerance& tol = {}) {
    const Index d = model.dim();
    Matrix h = model.H;
    std::vector<Matrix> traceless;
    for (const auto& l : model.Ls) {
        const Complex c = l.trace() / static_cast<double>(d);
        Matrix lp = l - c * Matrix::Identity(d, d);
        h += Complex(0, 0.5) * (std::conj(c) * lp - c * lp.adjoint());
        if (lp.norm() > tol.abs_floor) traceless.push_back(std::move(lp));
    }
    h = ((h + h.adjoint()) / 2.0).eval();

    if (traceless.empty()) return LindbladModel(std::move(h), {});

    const int m = static_cast<int>(traceless.size());
    Matrix stacked(d * d, m);
    for (int l = 0; l < m; ++l) stacked.col(l) = vec(traceless[l]);
    Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = std::max(tol.rel_rank_tol * sv(0), tol.abs_floor);
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    if (rank == m) return LindbladModel(std::move(h), std::move(traceless));

    // K_j = sum_l V_{lj} L_l is a unitary remix (V^T unitary), so the
    // dissipator is unchanged and columns beyond the rank vanish.
    Matrix remixed = stacked * svd.matrixV();
    std::vector<Matrix> kept;
    kept.reserve(rank);
    for (int j = 0; j < rank; ++j) kept.push_back(unvec(remixed.col(j), d));
    return LindbladModel(std::move(h), std::move(kept));
}

} // namespace qmskit
