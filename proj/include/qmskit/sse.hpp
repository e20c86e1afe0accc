#pragma once

// Linear stochastic Schroedinger equation machinery:
//   dX_t = G X_t dt + sum_l L_l X_t dW_t^l,  X_0 = xi,
// with real-valued independent Wiener processes. Covers Ito simulation,
// Monte Carlo second moments, the Wong-Zakai piecewise-polygonal
// approximation with Stratonovich-corrected drift, totality of the essential
// range, and the chaos-expansion isometry check.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <cstdint>
#include <numbers>
#include <thread>
#include <vector>

#include "qmskit/gksl.hpp"

namespace qmskit {

enum class Scheme { EulerMaruyama, ExponentialEuler };

struct TrajectoryConfig {
    double t_final = 1.0;
    int steps = 1000;
    int n_traj = 1000;
    std::uint64_t master_seed = 0;
    Scheme scheme = Scheme::ExponentialEuler;

    void validate() const {
        if (!(t_final > 0.0)) throw InvalidTime("t_final must be positive");
        if (steps < 1) throw ValidationError("steps must be >= 1");
        if (n_traj < 1) throw ValidationError("n_traj must be >= 1");
    }
};

namespace noise {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double to_unit_interval(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;  // in (0,1)
}

/// Standard normal keyed by (seed, trajectory, step, channel). Counter-based,
/// so trajectories are reproducible independently of scheduling or thread
/// count.
inline double gaussian(std::uint64_t seed, std::uint64_t traj, std::uint64_t step,
                       std::uint64_t channel) {
    std::uint64_t k = splitmix64(seed ^ splitmix64(traj ^ splitmix64(step ^ splitmix64(channel))));
    double u1 = to_unit_interval(splitmix64(k ^ 0x9e3779b97f4a7c15ULL));
    double u2 = to_unit_interval(splitmix64(k ^ 0xc2b2ae3d27d4eb4fULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace noise

namespace detail {

/// Runs fn(block_begin, block_end) over [0, n_items) in fixed-size blocks.
/// The block layout does not depend on the thread count, so per-block
/// reductions merged in block order are bit-reproducible.
template <class Fn>
void run_blocks(int n_items, int block_size, Fn&& fn) {
    const int n_blocks = (n_items + block_size - 1) / block_size;
    unsigned hw = std::thread::hardware_concurrency();
    int n_threads = std::max(1, std::min<int>(hw ? static_cast<int>(hw) : 1, n_blocks));
    if (n_threads == 1) {
        for (int b = 0; b < n_blocks; ++b) {
            fn(b, b * block_size, std::min(n_items, (b + 1) * block_size));
        }
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        int b;
        while (!failed.load(std::memory_order_relaxed) && (b = next.fetch_add(1)) < n_blocks) {
            try {
                fn(b, b * block_size, std::min(n_items, (b + 1) * block_size));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// Precomputed stepping context shared by all trajectories of one run.
struct SseStepper {
    Matrix g;
    std::vector<Matrix> ls;
    Matrix exp_hg;
    double h = 0.0;
    double sqrt_h = 0.0;
    Scheme scheme = Scheme::ExponentialEuler;
    std::uint64_t seed = 0;

    SseStepper(const LindbladModel& model, const TrajectoryConfig& config)
        : g(drift(model)), ls(model.Ls), scheme(config.scheme), seed(config.master_seed) {
        h = config.t_final / config.steps;
        sqrt_h = std::sqrt(h);
        if (scheme == Scheme::ExponentialEuler) exp_hg = matrix_exp(g, h);
    }

    void step(Vector& x, Vector& scratch, std::uint64_t traj, std::uint64_t k) const {
        if (scheme == Scheme::EulerMaruyama) {
            scratch.noalias() = x + h * (g * x);
            for (std::size_t l = 0; l < ls.size(); ++l) {
                const double dw = sqrt_h * noise::gaussian(seed, traj, k, l);
                scratch.noalias() += dw * (ls[l] * x);
            }
            x.swap(scratch);
        } else {
            scratch = x;
            for (std::size_t l = 0; l < ls.size(); ++l) {
                const double dw = sqrt_h * noise::gaussian(seed, traj, k, l);
                scratch.noalias() += dw * (ls[l] * x);
            }
            x.noalias() = exp_hg * scratch;
        }
    }
};

} // namespace detail

/// Full sample grid: samples[j] is d x (steps+1) with column 0 equal to xi.
struct TrajectoryEnsemble {
    TrajectoryConfig config;
    Vector xi;
    std::vector<Matrix> samples;
};

inline TrajectoryEnsemble simulate_ito(const LindbladModel& model, const Vector& xi,
                                       const TrajectoryConfig& config) {
    config.validate();
    if (xi.size() != model.dim()) throw DimError("simulate_ito: xi dimension mismatch");
    if (xi.norm() <= 1e-300) throw ZeroVector("simulate_ito: xi must be nonzero");

    detail::SseStepper stepper(model, config);
    TrajectoryEnsemble ens{config, xi, std::vector<Matrix>(config.n_traj)};
    detail::run_blocks(config.n_traj, 64, [&](int, int begin, int end) {
        Vector x(xi.size()), scratch(xi.size());
        for (int j = begin; j < end; ++j) {
            Matrix& grid = ens.samples[j];
            grid.resize(xi.size(), config.steps + 1);
            x = xi;
            grid.col(0) = x;
            for (int k = 0; k < config.steps; ++k) {
                stepper.step(x, scratch, static_cast<std::uint64_t>(j), k);
                grid.col(k + 1) = x;
            }
            if (!grid.allFinite()) throw InternalError("SSE trajectory diverged");
        }
    });
    return ens;
}

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
    int n = 0;
};

struct DensityEstimate {
    Matrix mean;                  // E |X_t><X_t|
    RealMatrix entry_std_error;   // per-entry standard error
    double aggregate_std_error = 0.0;
    int n = 0;
};

namespace detail {

struct MomentAccum {
    Matrix sum_outer;
    RealMatrix sum_abs2;
    double sum_n2 = 0.0;
    double sum_n4 = 0.0;

    void init(Index d) {
        sum_outer = Matrix::Zero(d, d);
        sum_abs2 = RealMatrix::Zero(d, d);
    }
    void add(const Vector& x) {
        Matrix outer = x * x.adjoint();
        sum_outer += outer;
        sum_abs2 += outer.cwiseAbs2();
        const double n2 = x.squaredNorm();
        sum_n2 += n2;
        sum_n4 += n2 * n2;
    }
    void merge(const MomentAccum& other) {
        sum_outer += other.sum_outer;
        sum_abs2 += other.sum_abs2;
        sum_n2 += other.sum_n2;
        sum_n4 += other.sum_n4;
    }
};

inline DensityEstimate density_from_accum(const MomentAccum& acc, int n) {
    DensityEstimate est;
    est.n = n;
    est.mean = acc.sum_outer / double(n);
    RealMatrix var = (acc.sum_abs2 / double(n) - est.mean.cwiseAbs2()).cwiseMax(0.0);
    est.entry_std_error = (var / double(n)).cwiseSqrt();
    est.aggregate_std_error = std::sqrt(var.sum() / double(n));
    return est;
}

inline MonteCarloEstimate norm2_from_accum(const MomentAccum& acc, int n) {
    MonteCarloEstimate est;
    est.n = n;
    est.value = acc.sum_n2 / double(n);
    double var = std::max(0.0, acc.sum_n4 / double(n) - est.value * est.value);
    est.std_error = std::sqrt(var / double(n));
    return est;
}

} // namespace detail

/// Sample mean of ||X_t||^2 with its standard error.
inline MonteCarloEstimate mean_square_norm(const TrajectoryEnsemble& ens, int time_index) {
    if (time_index < 0 || time_index > ens.config.steps) throw GridError("time index out of range");
    detail::MomentAccum acc;
    acc.init(ens.xi.size());
    for (const auto& grid : ens.samples) acc.add(grid.col(time_index));
    return detail::norm2_from_accum(acc, static_cast<int>(ens.samples.size()));
}

/// Sample mean of |X_t><X_t| with entrywise standard errors.
inline DensityEstimate estimate_density(const TrajectoryEnsemble& ens, int time_index) {
    if (time_index < 0 || time_index > ens.config.steps) throw GridError("time index out of range");
    detail::MomentAccum acc;
    acc.init(ens.xi.size());
    for (const auto& grid : ens.samples) acc.add(grid.col(time_index));
    return detail::density_from_accum(acc, static_cast<int>(ens.samples.size()));
}

struct MomentRecord {
    int step = 0;
    DensityEstimate density;
    MonteCarloEstimate norm2;
};

struct MomentResult {
    std::vector<MomentRecord> records;
    double max_norm_drift = 0.0;  // max over trajectories and times of | ||X||^2 - ||xi||^2 |
    int n = 0;
};

/// Streaming second-moment estimator: runs the ensemble without storing the
/// sample grid. Produces the same trajectories (same counter-based noise) as
/// simulate_ito, aggregated at the requested step indices in fixed block
/// order, so results are reproducible for any thread count.
inline MomentResult simulate_moments(const LindbladModel& model, const Vector& xi,
                                     const TrajectoryConfig& config,
                                     std::vector<int> record_steps,
                                     bool track_norm_drift = false) {
    config.validate();
    if (xi.size() != model.dim()) throw DimError("simulate_moments: xi dimension mismatch");
    if (xi.norm() <= 1e-300) throw ZeroVector("simulate_moments: xi must be nonzero");
    std::sort(record_steps.begin(), record_steps.end());
    for (int s : record_steps) {
        if (s < 0 || s > config.steps) throw GridError("record step out of range");
    }

    detail::SseStepper stepper(model, config);
    const Index d = xi.size();
    const double xi_n2 = xi.squaredNorm();
    const int block_size = 256;
    const int n_blocks = (config.n_traj + block_size - 1) / block_size;

    struct BlockResult {
        std::vector<detail::MomentAccum> at;
        double drift = 0.0;
    };
    std::vector<BlockResult> blocks(n_blocks);

    detail::run_blocks(config.n_traj, block_size, [&](int b, int begin, int end) {
        BlockResult& res = blocks[b];
        res.at.resize(record_steps.size());
        for (auto& a : res.at) a.init(d);
        Vector x(d), scratch(d);
        for (int j = begin; j < end; ++j) {
            x = xi;
            std::size_t next_rec = 0;
            while (next_rec < record_steps.size() && record_steps[next_rec] == 0) {
                res.at[next_rec++].add(x);
            }
            for (int k = 0; k < config.steps; ++k) {
                stepper.step(x, scratch, static_cast<std::uint64_t>(j), k);
                if (track_norm_drift) {
                    res.drift = std::max(res.drift, std::abs(x.squaredNorm() - xi_n2));
                }
                while (next_rec < record_steps.size() && record_steps[next_rec] == k + 1) {
                    res.at[next_rec++].add(x);
                }
            }
            if (!x.allFinite()) throw InternalError("SSE trajectory diverged");
        }
    });

    MomentResult out;
    out.n = config.n_traj;
    for (std::size_t r = 0; r < record_steps.size(); ++r) {
        detail::MomentAccum total;
        total.init(d);
        for (const auto& blk : blocks) total.merge(blk.at[r]);
        MomentRecord rec;
        rec.step = record_steps[r];
        rec.density = detail::density_from_accum(total, config.n_traj);
        rec.norm2 = detail::norm2_from_accum(total, config.n_traj);
        out.records.push_back(std::move(rec));
    }
    for (const auto& blk : blocks) out.max_norm_drift = std::max(out.max_norm_drift, blk.drift);
    return out;
}

/// exp(t LL_*) applied to |xi><xi| without state validation (the input need
/// not have unit trace).
inline Matrix evolved_outer(const LindbladModel& model, const Vector& xi, double t) {
    const Matrix rho0 = xi * xi.adjoint();
    Matrix rho_t = unvec(matrix_exp(superoperator(model, Mode::Schroedinger).matrix, t) * vec(rho0),
                         model.dim());
    return ((rho_t + rho_t.adjoint()) / 2.0).eval();
}

struct RepresentationReport {
    double distance = 0.0;             // || MC mean - exact ||_F at step size h
    double distance_refined = 0.0;     // same at step size h/2 (calibration run)
    double aggregate_std_error = 0.0;
    double bias_budget = 0.0;          // extrapolated O(h) discretization term
    bool pass = false;
    int n = 0;
    int steps = 0;
};

/// Monte Carlo check of T_*t(|xi><xi|) = E|X_t><X_t|. The O(h) bias budget
/// is calibrated by halving h once and extrapolating the distance drop.
inline RepresentationReport verify_representation(const LindbladModel& model, const Vector& xi,
                                                  double t, TrajectoryConfig config) {
    config.t_final = t;
    const Matrix exact = evolved_outer(model, xi, t);

    auto run = [&](const TrajectoryConfig& c) {
        auto res = simulate_moments(model, xi, c, {c.steps});
        return res.records.front().density;
    };
    DensityEstimate coarse = run(config);
    TrajectoryConfig half = config;
    half.steps *= 2;
    DensityEstimate fine = run(half);

    RepresentationReport rep;
    rep.n = config.n_traj;
    rep.steps = config.steps;
    rep.distance = (coarse.mean - exact).norm();
    rep.distance_refined = (fine.mean - exact).norm();
    rep.aggregate_std_error = coarse.aggregate_std_error;
    rep.bias_budget = 2.0 * std::max(0.0, rep.distance - rep.distance_refined);
    rep.pass = rep.distance <= 5.0 * rep.aggregate_std_error + rep.bias_budget;
    return rep;
}

struct TotalityReport {
    double min_eigenvalue = 0.0;   // of the MC second-moment matrix
    double threshold = 0.0;        // decision constant k=3 times aggregate SE
    double aggregate_std_error = 0.0;
    double exact_reference = 0.0;  // min eigenvalue of the exact evolved state
    bool total = false;
};

/// Theorem-3.2 style check: the essential range of X_t(xi) is total iff
/// E|X_t><X_t| is positive definite; decided at 3 standard errors, with the
/// exact superoperator evolution reported for auditing.
inline TotalityReport totality_test(const LindbladModel& model, const Vector& xi, double t,
                                    TrajectoryConfig config) {
    if (!(t > 0.0)) throw InvalidTime("totality_test: t must be positive");
    config.t_final = t;
    auto res = simulate_moments(model, xi, config, {config.steps});
    const DensityEstimate& est = res.records.front().density;

    Matrix herm = (est.mean + est.mean.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Matrix> ex(evolved_outer(model, xi, t), Eigen::EigenvaluesOnly);

    TotalityReport rep;
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.aggregate_std_error = est.aggregate_std_error;
    rep.threshold = 3.0 * est.aggregate_std_error;
    rep.exact_reference = ex.eigenvalues().minCoeff();
    rep.total = rep.min_eigenvalue > rep.threshold;
    return rep;
}

/// One realization of the driving noise on a uniform fine grid.
struct WienerPath {
    double t_final = 1.0;
    RealMatrix increments;  // m x fine_steps

    int fine_steps() const { return static_cast<int>(increments.cols()); }
    double dt() const { return t_final / fine_steps(); }
};

inline WienerPath sample_wiener_path(int channels, int fine_steps, double t_final,
                                     std::uint64_t seed, std::uint64_t traj) {
    WienerPath path{t_final, RealMatrix(channels, fine_steps)};
    const double sqrt_h = std::sqrt(t_final / fine_steps);
    for (int k = 0; k < fine_steps; ++k) {
        for (int l = 0; l < channels; ++l) {
            path.increments(l, k) = sqrt_h * noise::gaussian(seed, traj, k, l);
        }
    }
    return path;
}

/// Ito reference solution consuming the given increments (shared-noise
/// comparisons against the Wong-Zakai route). Returns d x (fine_steps+1).
inline Matrix ito_on_path(const LindbladModel& model, const Vector& xi, const WienerPath& path,
                          Scheme scheme = Scheme::ExponentialEuler) {
    const Index d = model.dim();
    if (xi.size() != d) throw DimError("ito_on_path: xi dimension mismatch");
    if (static_cast<int>(model.Ls.size()) != path.increments.rows()) {
        throw GridError("ito_on_path: channel count mismatch");
    }
    const int steps = path.fine_steps();
    const double h = path.dt();
    const Matrix g = drift(model);
    const Matrix eg = (scheme == Scheme::ExponentialEuler) ? matrix_exp(g, h) : Matrix();
    Matrix out(d, steps + 1);
    Vector x = xi;
    out.col(0) = x;
    Vector scratch(d);
    for (int k = 0; k < steps; ++k) {
        if (scheme == Scheme::EulerMaruyama) {
            scratch.noalias() = x + h * (g * x);
            for (std::size_t l = 0; l < model.Ls.size(); ++l) {
                scratch.noalias() += path.increments(static_cast<Index>(l), k) * (model.Ls[l] * x);
            }
            x.swap(scratch);
        } else {
            scratch = x;
            for (std::size_t l = 0; l < model.Ls.size(); ++l) {
                scratch.noalias() += path.increments(static_cast<Index>(l), k) * (model.Ls[l] * x);
            }
            x.noalias() = eg * scratch;
        }
        out.col(k + 1) = x;
    }
    return out;
}

/// Wong-Zakai approximation at coarse resolution n: on each coarse interval
/// the polygonal noise has constant slope u_l, and the ODE
///   X' = (G~ + sum_l u_l L_l) X
/// is solved exactly by a matrix exponential, sampled on the fine grid.
inline Matrix simulate_wong_zakai(const LindbladModel& model, const Vector& xi,
                                  const WienerPath& path, int n_coarse) {
    const Index d = model.dim();
    if (xi.size() != d) throw DimError("simulate_wong_zakai: xi dimension mismatch");
    if (n_coarse < 1) throw GridError("coarse resolution must be >= 1");
    const int fine = path.fine_steps();
    if (fine % n_coarse != 0) {
        throw GridError("fine grid does not refine the coarse polygon grid");
    }
    if (static_cast<int>(model.Ls.size()) != path.increments.rows()) {
        throw GridError("simulate_wong_zakai: channel count mismatch");
    }
    const int per = fine / n_coarse;
    const double h_fine = path.dt();
    const double h_coarse = per * h_fine;
    const Matrix gt = stratonovich_drift(model);

    Matrix out(d, fine + 1);
    Vector x = xi;
    out.col(0) = x;
    for (int kc = 0; kc < n_coarse; ++kc) {
        Matrix a = gt;
        for (std::size_t l = 0; l < model.Ls.size(); ++l) {
            const double dw = path.increments.row(static_cast<Index>(l))
                                  .segment(kc * per, per).sum();
            a += (dw / h_coarse) * model.Ls[l];
        }
        const Matrix step = matrix_exp(a, h_fine);
        for (int i = 0; i < per; ++i) {
            x = step * x;
            out.col(kc * per + i + 1) = x;
        }
    }
    return out;
}

/// Median (over paths) sup-norm error of the Wong-Zakai solution against a
/// fine-grid Ito reference on shared noise, at each coarse resolution.
inline std::vector<double> wong_zakai_convergence(const LindbladModel& model, const Vector& xi,
                                                  double t, const std::vector<int>& resolutions,
                                                  int n_paths, int fine_steps = 3200,
                                                  std::uint64_t seed = 0) {
    for (int n : resolutions) {
        if (fine_steps % n != 0) throw GridError("fine grid must refine every resolution");
    }
    std::vector<std::vector<double>> errors(resolutions.size(),
                                            std::vector<double>(n_paths, 0.0));
    detail::run_blocks(n_paths, 4, [&](int, int begin, int end) {
        for (int j = begin; j < end; ++j) {
            WienerPath path = sample_wiener_path(static_cast<int>(model.Ls.size()), fine_steps, t,
                                                 seed, static_cast<std::uint64_t>(j));
            Matrix ref = ito_on_path(model, xi, path);
            for (std::size_t r = 0; r < resolutions.size(); ++r) {
                Matrix wz = simulate_wong_zakai(model, xi, path, resolutions[r]);
                errors[r][j] = (wz - ref).colwise().norm().maxCoeff();
            }
        }
    });
    std::vector<double> medians;
    for (auto& errs : errors) {
        std::sort(errs.begin(), errs.end());
        medians.push_back(errs[errs.size() / 2]);
    }
    return medians;
}

/// Max over trajectories and times of | ||X_t||^2 - ||xi||^2 |. Only
/// meaningful for anti-selfadjoint jump operators, where the exact flow is
/// norm-preserving.
inline double pathwise_norm_drift(const LindbladModel& model, const TrajectoryEnsemble& ens,
                                  double tol = 1e-10) {
    for (const auto& l : model.Ls) {
        if ((l + l.adjoint()).norm() > tol * std::max(1.0, l.norm())) {
            throw NotAntiSelfAdjoint("pathwise_norm_drift requires anti-selfadjoint jump operators");
        }
    }
    const double xi_n2 = ens.xi.squaredNorm();
    double worst = 0.0;
    for (const auto& grid : ens.samples) {
        for (Index k = 0; k < grid.cols(); ++k) {
            worst = std::max(worst, std::abs(grid.col(k).squaredNorm() - xi_n2));
        }
    }
    return worst;
}

/// Streaming variant of pathwise_norm_drift.
inline double pathwise_norm_drift(const LindbladModel& model, const Vector& xi,
                                  const TrajectoryConfig& config, double tol = 1e-10) {
    for (const auto& l : model.Ls) {
        if ((l + l.adjoint()).norm() > tol * std::max(1.0, l.norm())) {
            throw NotAntiSelfAdjoint("pathwise_norm_drift requires anti-selfadjoint jump operators");
        }
    }
    return simulate_moments(model, xi, config, {}, true).max_norm_drift;
}

namespace detail {

/// Gauss-Legendre nodes and weights on [0,1].
inline void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                nodes[i] = 0.5 * (1.0 + x);
                weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
                break;
            }
        }
    }
}

} // namespace detail

struct ChaosIsometryResult {
    double partial_sum = 0.0;
    double bound = 0.0;              // (c m)^{n+1} t^{n+1} / (n+1)!
    double quadrature_budget = 0.0;
    bool pass = false;
    bool bound_too_loose = false;
    std::vector<double> partial_sums;  // cumulative by order, [0..order]
};

/// Deterministic verification of the chaos expansion through its Ito
/// isometry: the ordered-simplex integrals of ||P L P ... P xi||^2 summed up
/// to the given order must reach ||xi||^2 within the remainder bound.
/// Orders <= 3 use tensorized Gauss-Legendre mapped to the simplex; orders
/// 4 and 5 use Monte Carlo quadrature over the simplex with 1e5 samples.
inline ChaosIsometryResult chaos_isometry_check(const LindbladModel& model, const Vector& xi,
                                                double t, int order) {
    if (!(t > 0.0)) throw InvalidTime("chaos_isometry_check: t must be positive");
    if (order < 0 || order > 5) throw ValidationError("chaos order must be in [0,5]");
    const Index d = model.dim();
    const int m = model.num_jump_ops();
    const Matrix g = drift(model);

    double c = 0.0;
    for (const auto& l : model.Ls) {
        Eigen::JacobiSVD<Matrix> svd(l);
        c = std::max(c, svd.singularValues()(0));
    }

    ChaosIsometryResult res;
    double mc_se_total = 0.0;
    res.partial_sum = (matrix_exp(g, t) * xi).squaredNorm();
    res.partial_sums.push_back(res.partial_sum);

    // chain norm^2 for one ell-combo at ordered times s_1 >= ... >= s_k
    auto chain_sq = [&](const std::vector<Matrix>& seg_exp, int k,
                        const std::vector<int>& combo) {
        Vector v = seg_exp[k] * xi;  // P_{s_k} xi
        for (int j = k - 1; j >= 0; --j) {
            v = model.Ls[combo[j]] * v;
            v = seg_exp[j] * v;  // P_{s_j - s_{j+1}} (s_0 = t)
        }
        return v.squaredNorm();
    };
    auto all_combos_sq = [&](const std::vector<double>& s, int k) {
        std::vector<Matrix> seg_exp(k + 1);
        seg_exp[0] = matrix_exp(g, t - s[0]);
        for (int j = 1; j < k; ++j) seg_exp[j] = matrix_exp(g, s[j - 1] - s[j]);
        seg_exp[k] = matrix_exp(g, s[k - 1]);
        std::vector<int> combo(k, 0);
        double total = 0.0;
        while (true) {
            total += chain_sq(seg_exp, k, combo);
            int pos = k - 1;
            while (pos >= 0 && ++combo[pos] == m) combo[pos--] = 0;
            if (pos < 0) break;
        }
        return total;
    };

    for (int k = 1; k <= order && m > 0; ++k) {
        double term = 0.0;
        if (k <= 3) {
            std::vector<double> nodes, weights;
            detail::gauss_legendre_01(8, nodes, weights);
            std::vector<int> idx(k, 0);
            std::vector<double> s(k);
            while (true) {
                double w = 1.0, jac = t;
                double s_prev = t * nodes[idx[0]];
                s[0] = s_prev;
                w *= weights[idx[0]];
                for (int j = 1; j < k; ++j) {
                    jac *= s_prev;
                    s_prev *= nodes[idx[j]];
                    s[j] = s_prev;
                    w *= weights[idx[j]];
                }
                term += w * jac * all_combos_sq(s, k);
                int pos = k - 1;
                while (pos >= 0 && ++idx[pos] == 8) idx[pos--] = 0;
                if (pos < 0) break;
            }
        } else {
            const int n_samples = 100000;
            const std::uint64_t qseed = 0x71c9a3f0d5b8e642ULL + static_cast<std::uint64_t>(k);
            double sum = 0.0, sum_sq = 0.0;
            std::vector<double> s(k);
            for (int i = 0; i < n_samples; ++i) {
                for (int j = 0; j < k; ++j) {
                    s[j] = t * noise::to_unit_interval(
                                   noise::splitmix64(qseed ^ noise::splitmix64(
                                       static_cast<std::uint64_t>(i) * 8 + j)));
                }
                std::sort(s.begin(), s.end(), std::greater<double>());
                double val = all_combos_sq(s, k);
                sum += val;
                sum_sq += val * val;
            }
            double volume = std::pow(t, k);
            for (int j = 2; j <= k; ++j) volume /= j;
            double mean = sum / n_samples;
            double var = std::max(0.0, sum_sq / n_samples - mean * mean);
            term = volume * mean;
            mc_se_total += volume * std::sqrt(var / n_samples);
        }
        res.partial_sum += term;
        res.partial_sums.push_back(res.partial_sum);
    }
    while (static_cast<int>(res.partial_sums.size()) <= order) {
        res.partial_sums.push_back(res.partial_sum);  // m == 0: higher orders vanish
    }

    const double xi_n2 = xi.squaredNorm();
    res.bound = std::pow(c * m * t, order + 1);
    for (int j = 2; j <= order + 1; ++j) res.bound /= j;
    res.bound_too_loose = res.bound > 0.5 * xi_n2;
    res.quadrature_budget = 3.0 * mc_se_total + 1e-9 * std::max(1.0, xi_n2);
    res.pass = std::abs(res.partial_sum - xi_n2) <= res.bound + res.quadrature_budget;
    return res;
}

} // namespace qmskit
