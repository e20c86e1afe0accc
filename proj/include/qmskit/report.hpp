#pragma once

// Analysis orchestration: runs the structural battery on a model and
// assembles the schema-versioned report consumed by the CLI.

#include "qmskit/catalog.hpp"

namespace qmskit {

struct AnalyzeOptions {
    Tolerance tol;
    int s_xi_probes = 10;        // random probes in addition to the canonical basis
    std::uint64_t seed = 12345;
    LarcOptions larc;
    bool run_monte_carlo = false;
    TotalityProbeOptions mc;
};

inline Json vector_to_json(const Vector& v) {
    Json j = Json::array();
    for (Index i = 0; i < v.size(); ++i) j.push_back(complex_to_json(v(i)));
    return j;
}

inline Json basis_to_json(const SubspaceBasis& basis) {
    Json j = Json::array();
    for (const auto& v : basis.vectors()) j.push_back(vector_to_json(v));
    return j;
}

inline Json larc_to_json(const LarcReport& rep) {
    Json j;
    j["lie_dim_real"] = rep.lie_dim;
    j["verdict"] = to_string(rep.verdict);
    j["sampled_only"] = rep.sampled_only;
    if (!rep.caveat.empty()) j["caveat"] = rep.caveat;
    if (rep.witness) j["fails_at"] = vector_to_json(*rep.witness);
    Json per_xi = Json::array();
    for (const auto& probe : rep.per_xi) {
        per_xi.push_back(Json{{"xi", vector_to_json(probe.xi)},
                              {"complex_dim", probe.complex_dim},
                              {"real_dim", probe.real_dim}});
    }
    j["per_xi"] = std::move(per_xi);
    return j;
}

/// Full AnalysisReport. The structural verdicts are computed on the
/// minimalized model (LARC in particular is representation-sensitive); the
/// fingerprint and minimality check describe the model as given.
inline Json analyze(const LindbladModel& model, const AnalyzeOptions& options = {}) {
    Json rep;
    rep["schema"] = 1;
    rep["fingerprint"] = fingerprint(model);
    rep["dim"] = model.dim();
    rep["tolerance"] = {{"rel_rank_tol", options.tol.rel_rank_tol},
                        {"abs_floor", options.tol.abs_floor}};

    auto minimality = check_minimal(model, options.tol);
    LindbladModel minimal = minimalize(model, options.tol);
    rep["minimality"] = {{"minimal", minimality.minimal},
                         {"original_m", model.num_jump_ops()},
                         {"minimal_m", minimal.num_jump_ops()}};
    if (!minimality.minimal) {
        rep["minimality"]["dependence_witness"] = vector_to_json(minimality.witness);
    }

    auto gl = is_irreducible(minimal, IrreducibilityMethod::AlgebraGL, options.tol.rel_rank_tol);
    auto dl = is_irreducible(minimal, IrreducibilityMethod::AlgebraDelta, options.tol.rel_rank_tol);
    if (gl.irreducible != dl.irreducible) {
        throw InternalError("irreducibility routes disagree on the minimal model");
    }
    Json methods = Json::array();
    for (const auto* v : {&gl, &dl}) {
        Json m{{"method", to_string(v->method)},
               {"irreducible", v->irreducible},
               {"algebra_dim", v->algebra_dim},
               {"full_dim", minimal.dim() * minimal.dim()},
               {"tolerance", options.tol.rel_rank_tol}};
        methods.push_back(std::move(m));
    }
    rep["irreducibility"] = {{"irreducible", gl.irreducible}, {"methods", std::move(methods)}};
    if (gl.invariant_subspace) {
        rep["irreducibility"]["invariant_subspace"] = basis_to_json(*gl.invariant_subspace);
    }

    if (options.run_monte_carlo) {
        auto mc = is_irreducible(minimal, IrreducibilityMethod::MonteCarloTotality,
                                 options.tol.rel_rank_tol, options.mc);
        rep["irreducibility"]["monte_carlo"] = {
            {"method", to_string(mc.method)},
            {"irreducible", mc.irreducible},
            {"min_totality_eigenvalue", mc.min_totality_eigenvalue},
            {"probes", options.mc.probes},
            {"n_traj", options.mc.config.n_traj},
            {"t", options.mc.t},
            {"seed", options.mc.config.master_seed}};
        if (mc.irreducible != gl.irreducible) {
            throw InternalError("Monte Carlo totality disagrees with the algebra verdict");
        }
    }

    auto inv = invariant_states(minimal, options.tol);
    rep["invariant_state"] = {{"kernel_dim", inv.kernel_dim},
                              {"unique", inv.unique},
                              {"faithful", inv.faithful},
                              {"min_eigenvalue", inv.min_eigenvalue}};
    if (inv.state) rep["invariant_state"]["state"] = matrix_to_json(inv.state->rho);

    auto fp = fixed_points(minimal, options.tol);
    rep["fixed_points"] = {{"dim", fp.dim}, {"trivial", fp.trivial}};

    try {
        rep["decoherence_free_trivial"] = decoherence_free_trivial(minimal, options.tol);
    } catch (const NotApplicable&) {
        rep["decoherence_free_trivial"] = nullptr;
    }

    rep["larc"] = larc_to_json(larc_check(minimal, options.larc, options.tol.rel_rank_tol));

    Json sxi = Json::array();
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vector> probes;
    for (Index i = 0; i < minimal.dim(); ++i) probes.push_back(Vector::Unit(minimal.dim(), i));
    for (int p = 0; p < options.s_xi_probes; ++p) {
        Vector v(minimal.dim());
        for (Index i = 0; i < minimal.dim(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
        probes.push_back(v.normalized());
    }
    bool all_full = true;
    for (const auto& probe : probes) {
        auto res = s_xi_span(minimal, probe, options.tol.rel_rank_tol);
        all_full &= res.dim == minimal.dim();
        sxi.push_back(Json{{"xi", vector_to_json(probe)}, {"dim", res.dim}});
    }
    rep["s_xi"] = {{"probes", std::move(sxi)}, {"all_full", all_full}};
    if (all_full != gl.irreducible && options.s_xi_probes > 0) {
        // S(xi) can be full at sampled probes of a reducible model; only the
        // converse direction is a theorem violation.
        if (gl.irreducible && !all_full) {
            throw InternalError("irreducible model with a deficient S(xi) probe");
        }
    }

    return rep;
}

} // namespace qmskit
