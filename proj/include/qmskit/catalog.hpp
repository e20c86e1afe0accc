#pragma once

// Built-in example models: the worked examples of the source material,
// reproduced entrywise, plus a three-state generic cycle.

#include "qmskit/model_io.hpp"

namespace qmskit {
namespace catalog {

/// d = 2, L = i sigma_y, H = sigma_z: irreducible with anti-selfadjoint
/// noise, so single trajectories stay on the unit sphere.
inline LindbladModel pauli() {
    Matrix h(2, 2), l(2, 2);
    h << 1, 0,
         0, -1;
    l << 0, 1,
        -1, 0;
    return LindbladModel(std::move(h), {std::move(l)});
}

/// d = 2, m = 0, H = sigma_z: unitary evolution, reducible, LARC fails.
inline LindbladModel pure_hamiltonian() {
    Matrix h(2, 2);
    h << 1, 0,
         0, -1;
    return LindbladModel(std::move(h), {});
}

/// The 3x3 rotation-group model: irreducible although LARC fails at every
/// canonical basis vector.
inline LindbladModel so3() {
    Matrix h(3, 3), l(3, 3);
    h << 0, 0, Complex(0, -1),
         0, 0, 0,
         Complex(0, 1), 0, 0;
    l << 0, 1, 0,
        -1, 0, 0,
         0, 0, 0;
    return LindbladModel(std::move(h), {std::move(l)});
}

/// Generic model on a 3-cycle with unit rates and energies (1, 2, 3).
inline GenericInput generic_cycle_3() {
    RealMatrix gamma = RealMatrix::Zero(3, 3);
    gamma(0, 1) = gamma(1, 2) = gamma(2, 0) = 1.0;
    RealVector energies(3);
    energies << 1.0, 2.0, 3.0;
    return {RateMatrix(std::move(gamma)), DiagonalHamiltonian(std::move(energies))};
}

struct Entry {
    const char* name;
    const char* description;
};

inline const std::vector<Entry>& entries() {
    static const std::vector<Entry> list = {
        {"pauli", "d=2, H=sigma_z, L=i*sigma_y: irreducible, norm-preserving trajectories"},
        {"pure-hamiltonian", "d=2, H=sigma_z, m=0: reducible unitary evolution"},
        {"so3", "d=3 rotation-group model: irreducible but LARC fails"},
        {"generic-cycle-3", "generic model on a 3-cycle of unit rates"},
    };
    return list;
}

inline bool has(const std::string& name) {
    for (const auto& e : entries()) {
        if (name == e.name) return true;
    }
    return false;
}

inline ParsedInput get(const std::string& name) {
    if (name == "pauli") return pauli();
    if (name == "pure-hamiltonian") return pure_hamiltonian();
    if (name == "so3") return so3();
    if (name == "generic-cycle-3") return generic_cycle_3();
    throw ParseError("unknown catalog model: " + name);
}

} // namespace catalog

/// Loads a model or rate graph from a catalog name or a JSON file path.
inline ParsedInput parse_model(const std::string& name_or_path) {
    if (catalog::has(name_or_path)) return catalog::get(name_or_path);
    return input_from_json(load_json_file(name_or_path));
}

} // namespace qmskit
