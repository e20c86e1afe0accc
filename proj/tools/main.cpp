// qmskit command-line front end: model ingestion, structural analysis,
// SSE simulation with CSV export, support projections, LARC reports,
// generic-model equivalence reports, and the acceptance selftest.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qmskit/report.hpp"
#include "qmskit/selfcheck.hpp"

namespace {

using namespace qmskit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitTheoremViolation = 2;

void emit(const Json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << std::endl;
    } else {
        std::ofstream out(out_path);
        if (!out) throw ParseError("cannot write to " + out_path);
        out << report.dump(2) << "\n";
    }
}

LindbladModel expect_model(ParsedInput input) {
    if (auto* model = std::get_if<LindbladModel>(&input)) return std::move(*model);
    auto& generic = std::get<GenericInput>(input);
    return build_generic(generic.rates, generic.energies);
}

Json totality_to_json(const TotalityReport& rep) {
    return Json{{"min_eigenvalue", rep.min_eigenvalue},
                {"threshold", rep.threshold},
                {"aggregate_std_error", rep.aggregate_std_error},
                {"exact_reference", rep.exact_reference},
                {"total", rep.total}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"analysis of quantum Markov semigroups given by GKSL data"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags (--tol, --seed) usable after a subcommand

    double tol = Tolerance{}.rel_rank_tol;
    std::uint64_t seed = 2024;
    app.add_option("--tol", tol, "relative rank tolerance");
    app.add_option("--seed", seed, "master seed for stochastic subcommands");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "full structural analysis report");
    std::string analyze_model, analyze_out;
    int probes = 10;
    bool with_mc = false;
    analyze_cmd->add_option("model", analyze_model, "catalog name or JSON file")->required();
    analyze_cmd->add_option("--out", analyze_out, "write the report to a file");
    analyze_cmd->add_option("--probes", probes, "number of random S(xi) probes");
    analyze_cmd->add_flag("--mc", with_mc, "also run the Monte Carlo totality route");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "SSE ensemble + representation verification");
    std::string sim_model, sim_xi, sim_csv, sim_out, sim_scheme = "exponential-euler";
    double sim_t = 1.0;
    int sim_traj = 1000, sim_steps = 1000;
    sim_cmd->add_option("model", sim_model)->required();
    sim_cmd->add_option("--xi", sim_xi, "initial vector, components re or re:im")->required();
    sim_cmd->add_option("--t", sim_t, "final time");
    sim_cmd->add_option("--traj", sim_traj, "number of trajectories");
    sim_cmd->add_option("--steps", sim_steps, "time steps");
    sim_cmd->add_option("--scheme", sim_scheme, "euler-maruyama | exponential-euler");
    sim_cmd->add_option("--csv", sim_csv, "trajectory CSV output path");
    sim_cmd->add_option("--out", sim_out, "summary JSON output path");

    // support
    auto* support_cmd = app.add_subcommand("support", "support projection of the evolved state");
    std::string support_model, support_xi, support_out;
    double support_t = 1.0;
    support_cmd->add_option("model", support_model)->required();
    support_cmd->add_option("--xi", support_xi)->required();
    support_cmd->add_option("--t", support_t);
    support_cmd->add_option("--out", support_out);

    // larc
    auto* larc_cmd = app.add_subcommand("larc", "Lie-algebra rank condition report");
    std::string larc_model, larc_out;
    int larc_probes = 50;
    larc_cmd->add_option("model", larc_model)->required();
    larc_cmd->add_option("--probes", larc_probes, "random probes");
    larc_cmd->add_option("--out", larc_out);

    // generic
    auto* generic_cmd = app.add_subcommand("generic", "section-5 equivalence report");
    std::string generic_rates, generic_out;
    generic_cmd->add_option("rates", generic_rates, "catalog name or rate-graph JSON")->required();
    generic_cmd->add_option("--out", generic_out);

    // examples
    auto* examples_cmd = app.add_subcommand("examples", "list the built-in models");

    // selftest
    auto* selftest_cmd = app.add_subcommand("selftest", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (analyze_cmd->parsed()) {
            AnalyzeOptions options;
            options.tol.rel_rank_tol = tol;
            options.s_xi_probes = probes;
            options.seed = seed;
            options.run_monte_carlo = with_mc;
            options.mc.config.master_seed = seed;
            emit(analyze(expect_model(parse_model(analyze_model)), options), analyze_out);
        } else if (sim_cmd->parsed()) {
            LindbladModel model = expect_model(parse_model(sim_model));
            Vector xi = parse_vector_arg(sim_xi, model.dim());
            Scheme scheme;
            if (sim_scheme == "euler-maruyama") {
                scheme = Scheme::EulerMaruyama;
            } else if (sim_scheme == "exponential-euler") {
                scheme = Scheme::ExponentialEuler;
            } else {
                throw ParseError("unknown scheme: " + sim_scheme);
            }
            TrajectoryConfig cfg{sim_t, sim_steps, sim_traj, seed, scheme};
            auto rep = verify_representation(model, xi, sim_t, cfg);
            auto totality = totality_test(model, xi, sim_t, cfg);
            Json summary{
                {"schema", 1},
                {"model_fingerprint", fingerprint(model)},
                {"config",
                 {{"t", sim_t}, {"steps", sim_steps}, {"n_traj", sim_traj}, {"seed", seed},
                  {"scheme", sim_scheme}}},
                {"representation",
                 {{"frobenius_distance", rep.distance},
                  {"aggregate_std_error", rep.aggregate_std_error},
                  {"bias_budget", rep.bias_budget},
                  {"pass", rep.pass}}},
                {"totality", totality_to_json(totality)}};
            if (!sim_csv.empty()) {
                auto ens = simulate_ito(model, xi, cfg);
                std::ofstream csv(sim_csv);
                if (!csv) throw ParseError("cannot write to " + sim_csv);
                write_trajectory_csv(csv, ens);
                summary["csv"] = sim_csv;
            }
            std::cout << (rep.pass ? "PASS" : "FAIL")
                      << " representation identity: distance=" << rep.distance
                      << " budget=" << 5.0 * rep.aggregate_std_error + rep.bias_budget << "\n";
            emit(summary, sim_out);
        } else if (support_cmd->parsed()) {
            LindbladModel model = expect_model(parse_model(support_model));
            Vector xi = parse_vector_arg(support_xi, model.dim());
            auto proj = support_projection(model, xi, support_t);
            emit(Json{{"schema", 1},
                      {"t", support_t},
                      {"rank", proj.rank},
                      {"projection", matrix_to_json(proj.projection)}},
                 support_out);
        } else if (larc_cmd->parsed()) {
            LindbladModel model = expect_model(parse_model(larc_model));
            LarcOptions options;
            options.random_probes = larc_probes;
            options.seed = seed;
            auto rep = larc_check(minimalize(model), options, tol);
            Json j = larc_to_json(rep);
            j["schema"] = 1;
            emit(j, larc_out);
        } else if (generic_cmd->parsed()) {
            ParsedInput input = parse_model(generic_rates);
            auto* generic = std::get_if<GenericInput>(&input);
            if (!generic) throw ParseError("'" + generic_rates + "' is not a rate graph");
            auto rep = verify_equivalences(generic->rates, generic->energies);
            Json brackets = Json::array();
            for (const auto& chk : rep.brackets) {
                brackets.push_back(Json{{"from", chk.from},
                                        {"to", chk.to},
                                        {"path", chk.path},
                                        {"coefficient", chk.coefficient},
                                        {"expected", chk.expected},
                                        {"relative_error", chk.relative_error}});
            }
            emit(Json{{"schema", 1},
                      {"chain_irreducible", rep.chain.irreducible},
                      {"algebra_irreducible", rep.algebra.irreducible},
                      {"larc", larc_to_json(rep.larc)},
                      {"consistent", rep.consistent},
                      {"max_bracket_relative_error", rep.max_bracket_relative_error},
                      {"brackets", std::move(brackets)}},
                 generic_out);
        } else if (examples_cmd->parsed()) {
            for (const auto& entry : catalog::entries()) {
                std::cout << entry.name << "  -  " << entry.description << "\n";
            }
        } else if (selftest_cmd->parsed()) {
            auto results = selfcheck::run_acceptance(&std::cout);
            for (const auto& res : results) {
                if (!res.pass) return kExitTheoremViolation;
            }
            std::cout << "selftest passed (" << results.size() << " criteria)\n";
        }
    } catch (const InternalError& err) {
        std::cerr << "theorem violation: " << err.what() << "\n";
        return kExitTheoremViolation;
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}
