#pragma once

// JSON schemas for models, rate graphs and reports, plus the canonical
// serialization used for fingerprinting. Complex numbers are [re, im]
// pairs throughout; matrices are row-major lists of such pairs.

#include <fstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "qmskit/generic.hpp"

namespace qmskit {

using Json = nlohmann::json;

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ParseError(where + ": expected a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const Json& j, Index rows, Index cols, const std::string& where) {
    if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
        throw ParseError(where + ": expected " + std::to_string(rows) + " rows");
    }
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const Json& row = j[i];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            throw ParseError(where + " row " + std::to_string(i) + ": expected " +
                             std::to_string(cols) + " entries");
        }
        for (Index c = 0; c < cols; ++c) {
            m(i, c) = complex_from_json(row[c], where + "[" + std::to_string(i) + "][" +
                                                    std::to_string(c) + "]");
        }
    }
    return m;
}

inline Json model_to_json(const LindbladModel& model) {
    Json j;
    j["dim"] = model.dim();
    j["H"] = matrix_to_json(model.H);
    Json ls = Json::array();
    for (const auto& l : model.Ls) ls.push_back(matrix_to_json(l));
    j["L"] = std::move(ls);
    return j;
}

inline LindbladModel model_from_json(const Json& j) {
    if (!j.contains("dim") || !j["dim"].is_number_integer()) {
        throw ParseError("model: missing integer field 'dim'");
    }
    const Index d = j["dim"].get<Index>();
    if (d < 1) throw ParseError("model: dim must be positive");
    if (!j.contains("H")) throw ParseError("model: missing field 'H'");
    Matrix h = matrix_from_json(j["H"], d, d, "H");

    // name the offending entries before the constructor rejects the model
    std::string offenders;
    for (Index r = 0; r < d; ++r) {
        for (Index c = r; c < d; ++c) {
            if (std::abs(h(r, c) - std::conj(h(c, r))) > 1e-8) {
                offenders += " (" + std::to_string(r) + "," + std::to_string(c) + ")";
            }
        }
    }
    if (!offenders.empty()) {
        throw ValidationError("H is not Hermitian at entries:" + offenders);
    }

    std::vector<Matrix> ls;
    if (j.contains("L")) {
        if (!j["L"].is_array()) throw ParseError("model: 'L' must be a list of matrices");
        for (std::size_t i = 0; i < j["L"].size(); ++i) {
            ls.push_back(matrix_from_json(j["L"][i], d, d, "L[" + std::to_string(i) + "]"));
        }
    }
    return LindbladModel(std::move(h), std::move(ls));
}

struct GenericInput {
    RateMatrix rates;
    DiagonalHamiltonian energies;
};

inline Json rates_to_json(const GenericInput& input) {
    Json j;
    const Index d = input.rates.dim();
    j["dim"] = d;
    Json gamma = Json::array();
    for (Index l = 0; l < d; ++l) {
        Json row = Json::array();
        for (Index k = 0; k < d; ++k) row.push_back(input.rates.gamma(l, k));
        gamma.push_back(std::move(row));
    }
    j["gamma"] = std::move(gamma);
    Json energies = Json::array();
    for (Index i = 0; i < d; ++i) energies.push_back(input.energies.energies(i));
    j["energies"] = std::move(energies);
    return j;
}

inline GenericInput rates_from_json(const Json& j) {
    if (!j.contains("dim") || !j["dim"].is_number_integer()) {
        throw ParseError("rate graph: missing integer field 'dim'");
    }
    const Index d = j["dim"].get<Index>();
    if (d < 1) throw ParseError("rate graph: dim must be positive");
    if (!j.contains("gamma") || !j["gamma"].is_array() ||
        static_cast<Index>(j["gamma"].size()) != d) {
        throw ParseError("rate graph: 'gamma' must be a " + std::to_string(d) + "-row matrix");
    }
    RealMatrix gamma(d, d);
    for (Index l = 0; l < d; ++l) {
        const Json& row = j["gamma"][l];
        if (!row.is_array() || static_cast<Index>(row.size()) != d) {
            throw ParseError("rate graph: gamma row " + std::to_string(l) + " has wrong length");
        }
        for (Index k = 0; k < d; ++k) {
            if (!row[k].is_number()) throw ParseError("rate graph: gamma entries must be numbers");
            gamma(l, k) = row[k].get<double>();
        }
    }
    RealVector energies = RealVector::Zero(d);
    if (j.contains("energies")) {
        if (!j["energies"].is_array() || static_cast<Index>(j["energies"].size()) != d) {
            throw ParseError("rate graph: 'energies' must have length " + std::to_string(d));
        }
        for (Index i = 0; i < d; ++i) energies(i) = j["energies"][i].get<double>();
    }
    return {RateMatrix(std::move(gamma)), DiagonalHamiltonian(std::move(energies))};
}

/// FNV-1a over the canonical (sorted-key) JSON dump.
inline std::string fingerprint(const Json& canonical) {
    const std::string dump = canonical.dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

inline std::string fingerprint(const LindbladModel& model) {
    return fingerprint(model_to_json(model));
}

using ParsedInput = std::variant<LindbladModel, GenericInput>;

inline ParsedInput input_from_json(const Json& j) {
    if (j.contains("gamma")) return rates_from_json(j);
    return model_from_json(j);
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& err) {
        throw ParseError(std::string("malformed JSON in ") + path + ": " + err.what());
    }
}

/// Parses a CLI vector: comma-separated components, each "re" or "re:im".
inline Vector parse_vector_arg(const std::string& text, Index expected_dim) {
    std::vector<Complex> entries;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (tok.empty()) throw ParseError("empty vector component");
        double re = 0.0, im = 0.0;
        std::size_t colon = tok.find(':');
        try {
            if (colon == std::string::npos) {
                re = std::stod(tok);
            } else {
                re = std::stod(tok.substr(0, colon));
                im = std::stod(tok.substr(colon + 1));
            }
        } catch (const std::exception&) {
            throw ParseError("bad vector component '" + tok + "' (want re or re:im)");
        }
        entries.emplace_back(re, im);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (expected_dim >= 0 && static_cast<Index>(entries.size()) != expected_dim) {
        throw ParseError("vector has " + std::to_string(entries.size()) + " components, expected " +
                         std::to_string(expected_dim));
    }
    Vector v(static_cast<Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) v(static_cast<Index>(i)) = entries[i];
    return v;
}

/// Trajectory CSV columns: traj_id, step, t, re_0, im_0, ..., re_{d-1}, im_{d-1}.
inline void write_trajectory_csv(std::ostream& out, const TrajectoryEnsemble& ens) {
    const Index d = ens.xi.size();
    out << "traj_id,step,t";
    for (Index i = 0; i < d; ++i) out << ",re_" << i << ",im_" << i;
    out << "\n";
    const double h = ens.config.t_final / ens.config.steps;
    out.precision(17);
    for (std::size_t j = 0; j < ens.samples.size(); ++j) {
        const Matrix& grid = ens.samples[j];
        for (Index k = 0; k <= ens.config.steps; ++k) {
            out << j << ',' << k << ',' << k * h;
            for (Index i = 0; i < d; ++i) {
                out << ',' << grid(i, k).real() << ',' << grid(i, k).imag();
            }
            out << "\n";
        }
    }
}

} // namespace qmskit
