#pragma once

// Generic QMS construction from jump rates and a diagonal Hamiltonian,
// graph-theoretic irreducibility of the embedded classical chain, and the
// equivalence chain: classical irreducibility <=> algebra irreducibility
// <=> LARC, with the explicit iterated-bracket certificates.

#include <deque>
#include <utility>

#include "qmskit/structure.hpp"

namespace qmskit {

/// Nonnegative jump rates gamma_{lk} for l -> k transitions; the diagonal
/// is ignored.
struct RateMatrix {
    RealMatrix gamma;

    explicit RateMatrix(RealMatrix rates) : gamma(std::move(rates)) {
        if (gamma.rows() != gamma.cols()) throw DimError("rate matrix must be square");
        if (!gamma.allFinite()) throw InvalidRate("rates must be finite");
        if ((gamma.array() < 0.0).any()) throw InvalidRate("rates must be nonnegative");
    }

    Index dim() const { return gamma.rows(); }
    bool has_edge(Index l, Index k) const { return l != k && gamma(l, k) > 0.0; }
};

struct DiagonalHamiltonian {
    RealVector energies;

    explicit DiagonalHamiltonian(RealVector e) : energies(std::move(e)) {
        if (!energies.allFinite()) throw ValidationError("energies must be finite");
    }
};

/// Model with one jump operator L_{lk} = sqrt(gamma_{lk}) |e_k><e_l| per
/// strictly positive rate and H = diag(energies). Zero-rate operators are
/// omitted.
inline LindbladModel build_generic(const RateMatrix& rates, const DiagonalHamiltonian& h) {
    const Index d = rates.dim();
    if (h.energies.size() != d) throw DimError("energies/rates dimension mismatch");
    Matrix ham = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) ham(i, i) = h.energies(i);
    std::vector<Matrix> ls;
    for (Index l = 0; l < d; ++l) {
        for (Index k = 0; k < d; ++k) {
            if (!rates.has_edge(l, k)) continue;
            Matrix jump = Matrix::Zero(d, d);
            jump(k, l) = std::sqrt(rates.gamma(l, k));
            ls.push_back(std::move(jump));
        }
    }
    return LindbladModel(std::move(ham), std::move(ls));
}

/// Classical chain generator on distributions: column l holds the rates out
/// of state l, so d/dt p = M p reproduces the diagonal restriction of LL_*.
inline RealMatrix classical_generator(const RateMatrix& rates) {
    const Index d = rates.dim();
    RealMatrix m = RealMatrix::Zero(d, d);
    for (Index l = 0; l < d; ++l) {
        for (Index k = 0; k < d; ++k) {
            if (!rates.has_edge(l, k)) continue;
            m(k, l) += rates.gamma(l, k);
            m(l, l) -= rates.gamma(l, k);
        }
    }
    return m;
}

struct ChainCertificate {
    bool irreducible = false;
    /// For irreducible chains: one simple positive-rate path per ordered
    /// pair, keyed as paths[l][k] = (l, j_1, ..., j_n, k); paths[l][l] empty.
    std::vector<std::vector<std::vector<int>>> paths;
    /// For reducible chains: an ordered pair (from, to) with no path.
    std::optional<std::pair<int, int>> unreachable;
};

/// Strong connectivity of the positive-rate digraph, with certificates:
/// BFS shortest paths (simple by construction) when connected, a
/// non-reachable ordered pair otherwise.
inline ChainCertificate chain_irreducible(const RateMatrix& rates) {
    const int d = static_cast<int>(rates.dim());
    ChainCertificate cert;
    cert.paths.assign(d, std::vector<std::vector<int>>(d));
    for (int src = 0; src < d; ++src) {
        std::vector<int> parent(d, -1);
        std::deque<int> queue{src};
        std::vector<bool> seen(d, false);
        seen[src] = true;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v = 0; v < d; ++v) {
                if (!seen[v] && rates.has_edge(u, v)) {
                    seen[v] = true;
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        for (int dst = 0; dst < d; ++dst) {
            if (dst == src) continue;
            if (!seen[dst]) {
                cert.irreducible = false;
                cert.unreachable = {src, dst};
                cert.paths.clear();
                return cert;
            }
            std::vector<int> path;
            for (int v = dst; v != -1; v = parent[v]) path.push_back(v);
            std::reverse(path.begin(), path.end());
            cert.paths[src][dst] = std::move(path);
        }
    }
    cert.irreducible = true;
    return cert;
}

struct BracketCheck {
    int from = 0;
    int to = 0;
    std::vector<int> path;
    double coefficient = 0.0;       // entry (to, from) of the iterated bracket
    double expected = 0.0;          // sqrt of the path-rate product
    double relative_error = 0.0;
    double off_component = 0.0;     // residual outside the |e_to><e_from| direction
};

struct EquivalenceReport {
    ChainCertificate chain;
    IrreducibilityVerdict algebra;
    LarcReport larc;
    std::vector<BracketCheck> brackets;
    bool consistent = false;
    double max_bracket_relative_error = 0.0;
    /// Complex manifold dimensions at the canonical probes, with and without
    /// G~ among the Lie generators (the section-5 brackets use the L's only).
    std::vector<std::pair<int, int>> canonical_manifold_dims;
};

/// Theorem 5.1 verification: the three verdicts (classical chain strong
/// connectivity, AlgebraGL irreducibility, sampled LARC) must agree, and for
/// irreducible chains the iterated bracket along each certificate path must
/// equal (path-rate product)^{1/2} |e_k><e_l|. An inconsistency is a theorem
/// violation, reported as InternalError.
inline EquivalenceReport verify_equivalences(const RateMatrix& rates, const DiagonalHamiltonian& h,
                                             const LarcOptions& larc_options = {}) {
    const Index d = rates.dim();
    LindbladModel model = build_generic(rates, h);
    EquivalenceReport rep;
    rep.chain = chain_irreducible(rates);
    rep.algebra = is_irreducible(model, IrreducibilityMethod::AlgebraGL);
    rep.larc = larc_check(model, larc_options);

    // jump operator lookup by edge
    std::vector<std::vector<Matrix>> edge_op(d, std::vector<Matrix>(d));
    for (Index l = 0; l < d; ++l) {
        for (Index k = 0; k < d; ++k) {
            if (!rates.has_edge(l, k)) continue;
            Matrix jump = Matrix::Zero(d, d);
            jump(k, l) = std::sqrt(rates.gamma(l, k));
            edge_op[l][k] = std::move(jump);
        }
    }

    if (rep.chain.irreducible) {
        for (Index l = 0; l < d; ++l) {
            for (Index k = 0; k < d; ++k) {
                if (l == k) continue;
                const auto& path = rep.chain.paths[l][k];
                Matrix bracket = edge_op[path[0]][path[1]];
                for (std::size_t i = 1; i + 1 < path.size(); ++i) {
                    const Matrix& next = edge_op[path[i]][path[i + 1]];
                    bracket = (next * bracket - bracket * next).eval();
                }
                BracketCheck chk;
                chk.from = static_cast<int>(l);
                chk.to = static_cast<int>(k);
                chk.path = path;
                chk.coefficient = bracket(k, l).real();
                double prod = 1.0;
                for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                    prod *= rates.gamma(path[i], path[i + 1]);
                }
                chk.expected = std::sqrt(prod);
                chk.relative_error = std::abs(chk.coefficient - chk.expected) / chk.expected;
                Matrix off = bracket;
                off(k, l) = 0.0;
                chk.off_component = off.norm();
                rep.max_bracket_relative_error =
                    std::max(rep.max_bracket_relative_error, chk.relative_error);
                rep.brackets.push_back(std::move(chk));
            }
        }
    }

    std::vector<Matrix> ls_only = model.Ls;
    if (ls_only.empty()) ls_only.push_back(Matrix::Zero(d, d));
    std::vector<Matrix> with_gt{stratonovich_drift(model)};
    with_gt.insert(with_gt.end(), model.Ls.begin(), model.Ls.end());
    for (Index i = 0; i < d; ++i) {
        Vector e = Vector::Unit(d, i);
        rep.canonical_manifold_dims.push_back(
            {larc_manifold_from(with_gt, e).complex_dim,
             larc_manifold_from(ls_only, e).complex_dim});
    }

    const bool larc_holds = rep.larc.verdict == LarcVerdict::Holds;
    rep.consistent = (rep.chain.irreducible == rep.algebra.irreducible) &&
                     (rep.chain.irreducible == larc_holds);
    if (!rep.consistent) {
        throw InternalError(
            "generic equivalence violated: chain=" + std::to_string(rep.chain.irreducible) +
            " algebra=" + std::to_string(rep.algebra.irreducible) +
            " larc=" + std::string(to_string(rep.larc.verdict)));
    }
    return rep;
}

} // namespace qmskit
