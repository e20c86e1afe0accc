#pragma once

// Dense complex linear-algebra kernel: rank/kernel decisions, orthonormal
// subspace bases (complex span and real span), invariant-subspace closure,
// operator-algebra and Lie-algebra closure, matrix exponentials.

#include <complex>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qmskit/errors.hpp"

namespace qmskit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Tolerance {
    double rel_rank_tol = 1e-9;
    double abs_floor = 1e-12;
};

inline void require_finite(const Matrix& a, const char* what = "matrix") {
    if (!a.allFinite()) {
        throw InvalidMatrix(std::string(what) + " has non-finite entries");
    }
}

inline void require_square(const Matrix& a, const char* what = "matrix") {
    if (a.rows() != a.cols()) {
        throw DimError(std::string(what) + " is not square");
    }
}

/// Column-stacking vectorization, vec(AXB) = (B^T (x) A) vec(X).
inline Vector vec(const Matrix& a) {
    return Eigen::Map<const Vector>(a.data(), a.size());
}

inline Matrix unvec(const Vector& v, Index rows) {
    if (v.size() % rows != 0) throw DimError("unvec: size not divisible by row count");
    return Eigen::Map<const Matrix>(v.data(), rows, v.size() / rows);
}

/// Number of singular values above max(rel_rank_tol * sigma_max, abs_floor).
inline int numeric_rank(const Matrix& a, const Tolerance& tol = {}) {
    require_finite(a);
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& sv = svd.singularValues();
    const double cutoff = std::max(tol.rel_rank_tol * sv(0), tol.abs_floor);
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    return rank;
}

/// Orthonormal basis of ker(a), columns of the returned matrix.
inline Matrix kernel_basis(const Matrix& a, const Tolerance& tol = {}) {
    require_finite(a);
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? std::max(tol.rel_rank_tol * sv(0), tol.abs_floor)
                                        : tol.abs_floor;
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    return svd.matrixV().rightCols(a.cols() - rank);
}

namespace detail {

// Shared Gram-Schmidt machinery for the two span flavours. InnerProduct
// returns the expansion coefficient of v along a unit basis vector b.
template <class Coeff, class InnerProduct>
class SpanBasis {
public:
    SpanBasis(Index ambient_dim, double tol) : ambient_(ambient_dim), tol_(tol) {
        if (ambient_dim <= 0) throw DimError("ambient dimension must be positive");
        if (tol <= 0) throw ValidationError("basis tolerance must be positive");
    }

    Index ambient_dim() const { return ambient_; }
    Index count() const { return static_cast<Index>(vectors_.size()); }
    double tol() const { return tol_; }
    const std::vector<Vector>& vectors() const { return vectors_; }

    /// v minus its projection onto the current span (two reorthogonalization
    /// passes, which is enough for nearly dependent inputs).
    Vector residual(const Vector& v) const {
        Vector r = v;
        for (int pass = 0; pass < 2; ++pass) {
            for (const Vector& b : vectors_) {
                r -= b * InnerProduct{}(b, r);
            }
        }
        return r;
    }

    bool contains(const Vector& v) const {
        const double nv = v.norm();
        if (nv == 0.0) return true;
        return residual(v).norm() <= tol_ * nv;
    }

    /// Extends the span by v. Returns true if the dimension grew; vectors
    /// whose residual is below tol * ||v|| are discarded.
    bool extend(const Vector& v) {
        if (v.size() != ambient_) throw DimError("basis extension: dimension mismatch");
        if (!v.allFinite()) throw InvalidMatrix("basis extension: non-finite vector");
        const double nv = v.norm();
        if (nv <= 1e-300) return false;
        if (count() == ambient_capacity()) return false;  // span is already everything
        Vector r = residual(v);
        const double ratio = r.norm() / nv;
        if (ratio <= tol_) {
            max_discard_ratio_ = std::max(max_discard_ratio_, ratio);
            return false;
        }
        min_accept_ratio_ = std::min(min_accept_ratio_, ratio);
        vectors_.push_back(r / r.norm());
        return true;
    }

    int extend_all(const std::vector<Vector>& vs) {
        int grew = 0;
        for (const Vector& v : vs) grew += extend(v) ? 1 : 0;
        return grew;
    }

    /// Max |<v_i,v_j> - delta_ij| over all pairs; used by invariant tests.
    double orthonormality_defect() const {
        double worst = 0.0;
        for (std::size_t i = 0; i < vectors_.size(); ++i) {
            for (std::size_t j = i; j < vectors_.size(); ++j) {
                Coeff g = InnerProduct{}(vectors_[i], vectors_[j]);
                double target = (i == j) ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(g - Coeff(target)));
            }
        }
        return worst;
    }

    /// True when a discarded or accepted vector sat within a factor 10 of the
    /// tolerance, i.e. the dimension decision was close.
    bool borderline() const {
        return max_discard_ratio_ > tol_ / 10.0 || min_accept_ratio_ < 10.0 * tol_;
    }

    Index ambient_capacity() const;

private:
    Index ambient_;
    double tol_;
    std::vector<Vector> vectors_;
    double min_accept_ratio_ = 1.0;
    double max_discard_ratio_ = 0.0;
};

struct ComplexInner {
    Complex operator()(const Vector& b, const Vector& v) const { return b.dot(v); }
};
struct RealInner {
    double operator()(const Vector& b, const Vector& v) const { return b.dot(v).real(); }
};

template <> inline Index SpanBasis<Complex, ComplexInner>::ambient_capacity() const {
    return ambient_;
}
template <> inline Index SpanBasis<double, RealInner>::ambient_capacity() const {
    return 2 * ambient_;  // real span of C^n fills up at real dimension 2n
}

} // namespace detail

/// Orthonormal basis of a complex subspace of C^n.
using SubspaceBasis = detail::SpanBasis<Complex, detail::ComplexInner>;

/// Orthonormal (w.r.t. Re<a,b>) basis of a real-linear subspace of C^n,
/// i.e. of R^{2n}. count() is the real dimension.
using RealSubspaceBasis = detail::SpanBasis<double, detail::RealInner>;

/// Spans span(old basis vectors plus new ones); dependent vectors discarded.
inline SubspaceBasis orthonormal_extend(SubspaceBasis basis, const std::vector<Vector>& vs) {
    basis.extend_all(vs);
    return basis;
}

/// Smallest subspace containing the seeds that is invariant (within tol)
/// under every listed operator. Iterates "apply all operators to the current
/// basis and extend" until the count stabilizes; the count strictly grows
/// until fixed, so at most ambient_dim rounds are needed.
inline SubspaceBasis invariant_closure(const std::vector<Vector>& seeds,
                                       const std::vector<Matrix>& operators,
                                       double tol = Tolerance{}.rel_rank_tol) {
    if (seeds.empty()) throw EmptyInput("invariant_closure: empty seed list");
    const Index n = seeds.front().size();
    for (const auto& s : seeds) {
        if (s.size() != n) throw DimError("invariant_closure: seed dimension mismatch");
    }
    for (const auto& op : operators) {
        require_square(op, "invariant_closure operator");
        if (op.rows() != n) throw DimError("invariant_closure: operator dimension mismatch");
    }
    SubspaceBasis basis(n, tol);
    basis.extend_all(seeds);
    for (Index iter = 0; iter <= n + 1; ++iter) {
        bool grew = false;
        const auto snapshot = basis.vectors();
        for (const Matrix& op : operators) {
            for (const Vector& b : snapshot) {
                grew |= basis.extend(op * b);
            }
        }
        if (!grew) return basis;
    }
    throw InternalError("invariant_closure failed to stabilize (tolerance oscillation)");
}

/// Orthonormal (Hilbert-Schmidt) basis of the associative algebra generated
/// by the given matrices, as vectorized d x d matrices in C^{d^2}. The loop
/// left-multiplies the current basis by the generators, which reaches every
/// word g_1 g_2 ... g_k.
inline SubspaceBasis operator_algebra_closure(const std::vector<Matrix>& generators,
                                              bool include_identity,
                                              double tol = Tolerance{}.rel_rank_tol,
                                              Index dim = -1) {
    Index d = dim;
    if (d < 0) {
        if (generators.empty()) throw EmptyInput("operator_algebra_closure: no generators and no dimension");
        d = generators.front().rows();
    }
    for (const auto& g : generators) {
        require_square(g, "algebra generator");
        if (g.rows() != d) throw DimError("operator_algebra_closure: generator dimension mismatch");
    }
    SubspaceBasis basis(d * d, tol);
    std::vector<Matrix> mats;
    if (include_identity) {
        Matrix id = Matrix::Identity(d, d);
        if (basis.extend(vec(id))) mats.push_back(id / id.norm());
    }
    for (const Matrix& g : generators) {
        if (basis.extend(vec(g))) mats.push_back(unvec(basis.vectors().back(), d));
    }
    for (Index iter = 0; iter <= d * d + 1; ++iter) {
        bool grew = false;
        const std::size_t n_now = mats.size();
        for (const Matrix& g : generators) {
            for (std::size_t i = 0; i < n_now; ++i) {
                if (basis.extend(vec(g * mats[i]))) {
                    mats.push_back(unvec(basis.vectors().back(), d));
                    grew = true;
                }
            }
        }
        if (!grew) return basis;
    }
    throw InternalError("operator_algebra_closure failed to stabilize");
}

/// Basis, over the reals, of the real Lie algebra generated by the given
/// matrices under [A,B] = AB - BA. Vectors are vectorized matrices,
/// orthonormal for the real part of the Hilbert-Schmidt inner product.
inline RealSubspaceBasis lie_closure(const std::vector<Matrix>& generators,
                                     double tol = Tolerance{}.rel_rank_tol) {
    if (generators.empty()) throw EmptyInput("lie_closure: no generators");
    const Index d = generators.front().rows();
    for (const auto& g : generators) {
        require_square(g, "lie generator");
        if (g.rows() != d) throw DimError("lie_closure: generator dimension mismatch");
    }
    RealSubspaceBasis basis(d * d, tol);
    std::vector<Matrix> mats;
    for (const Matrix& g : generators) {
        if (basis.extend(vec(g))) mats.push_back(unvec(basis.vectors().back(), d));
    }
    for (Index iter = 0; iter <= 2 * d * d + 1; ++iter) {
        bool grew = false;
        const std::size_t n_now = mats.size();
        for (std::size_t i = 0; i < n_now; ++i) {
            for (std::size_t j = i + 1; j < n_now; ++j) {
                Matrix c = mats[i] * mats[j] - mats[j] * mats[i];
                if (basis.extend(vec(c))) {
                    mats.push_back(unvec(basis.vectors().back(), d));
                    grew = true;
                }
            }
        }
        if (!grew) return basis;
    }
    throw InternalError("lie_closure failed to stabilize");
}

/// e^{tA} by scaling-and-squaring (Eigen's Pade-based implementation).
inline Matrix matrix_exp(const Matrix& a, double t = 1.0) {
    require_square(a, "matrix_exp argument");
    require_finite(a, "matrix_exp argument");
    if (!std::isfinite(t)) throw InvalidMatrix("matrix_exp: non-finite time");
    return (t * a).exp();
}

} // namespace qmskit
