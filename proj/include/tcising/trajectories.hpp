// SPDX-License-Identifier: Apache-2.0

/**
 * @file trajectories.hpp
 * @brief Quantum-jump unraveling of the lossy dynamics.
 *
 * Each trajectory evolves under H_eff = H - (i/2) sum_k L_k^+ L_k until the
 * squared norm falls to a uniform threshold u, then applies one jump chosen
 * with weight ||L_k psi||^2 and renormalizes. Jump times are located inside
 * a single Krylov step by bisection on the projected propagator.
 *
 * Trajectory i draws from a generator seeded by (seed0, i) only, and the
 * ensemble reduction runs in index order, so results do not depend on the
 * number of worker threads.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "tcising/dynamics.hpp"
#include "tcising/error.hpp"
#include "tcising/krylov.hpp"
#include "tcising/measures.hpp"
#include "tcising/model.hpp"
#include "tcising/states.hpp"

namespace tcising {

struct TrajectoryOptions {
    double tol = 1e-8;
    int max_krylov = 40;
    double leak_bound = 1e-3;      ///< BAND_FLOOR_EXCEEDED above this mean leaked probability
    double jump_time_tol = 1e-10;  ///< bisection tolerance on the jump time
    std::size_t snapshots_per_save = 0;
    unsigned threads = 1;
    bool pinned = false;
    std::size_t block = 128;  ///< trajectories buffered per reduction block
    std::size_t dense_limit = 512;  ///< diagonalize H_eff once when the basis is at most this large
    /// Full diagonal of sum L^+L; empty = column norms of the jump matrices.
    std::vector<double> loss_diagonal;
};

struct JumpRecord {
    std::size_t trajectory = 0;
    double t = 0.0;
    int channel = 0;
};

struct ObservableTrace {
    std::string label;
    int index = 0;
    std::vector<double> mean;
    std::vector<double> stderr_;
};

struct TrajectoryEnsemble {
    std::size_t n_traj = 0;
    std::uint64_t seed0 = 0;
    std::vector<double> t_grid;
    std::vector<std::string> channels;
    std::vector<JumpRecord> jump_log;
    std::vector<ObservableTrace> traces;
    std::vector<std::vector<SpinWord>> snapshots;  ///< per save time, trajectory-major
    double mean_leak = 0.0;
    double max_leak = 0.0;

    [[nodiscard]] const ObservableTrace* find(const std::string& label, int index = 0) const {
        for (const auto& tr : traces)
            if (tr.label == label && tr.index == index) return &tr;
        return nullptr;
    }
};

namespace detail {

struct TrajectoryResult {
    std::vector<double> values;  ///< [save time][entry]
    std::vector<JumpRecord> jumps;
    std::vector<SpinWord> snapshots;  ///< [save time][sample]
    double leak = 0.0;
};

/// exp(-i H_eff tau) from one eigendecomposition of the dense non-Hermitian generator.
class DenseSpectral {
public:
    bool init(const MatrixC& heff) {
        Eigen::ComplexEigenSolver<MatrixC> es(heff);
        if (es.info() != Eigen::Success) return false;
        lam_ = es.eigenvalues();
        v_ = es.eigenvectors();
        lu_.compute(v_);
        // reject nearly defective spectra
        const MatrixC check = v_ * lu_.solve(MatrixC::Identity(v_.rows(), v_.cols()));
        return (check - MatrixC::Identity(v_.rows(), v_.cols())).cwiseAbs().maxCoeff() < 1e-9 &&
               lu_.solve(MatrixC::Identity(v_.rows(), v_.cols())).cwiseAbs().maxCoeff() < 1e6;
    }
    void start(const VectorC& psi) { c_ = lu_.solve(psi); }
    [[nodiscard]] VectorC at(double tau) const {
        VectorC d(c_.size());
        for (Eigen::Index k = 0; k < c_.size(); ++k) d[k] = std::exp(cplx(0.0, -tau) * lam_[k]) * c_[k];
        return v_ * d;
    }

private:
    VectorC lam_;
    MatrixC v_;
    Eigen::PartialPivLU<MatrixC> lu_;
    VectorC c_;
};

class TrajectoryRunner {
public:
    TrajectoryRunner(const SparseOperator& h, const std::vector<JumpOperator>& jumps, const QuantumState& psi0,
                     const std::vector<double>& t_grid, std::uint64_t seed0,
                     const std::vector<ObservableSpec>& observables, const TrajectoryOptions& opt)
        : h_(h), jumps_(jumps), psi0_(psi0), t_grid_(t_grid), seed0_(seed0), obs_(observables), opt_(opt) {
        decay_ = opt.loss_diagonal;
        if (decay_.empty()) {
            decay_.assign(h.dim(), 0.0);
            for (const auto& j : jumps) {
                const auto c = j.op.matrix.column_norms_squared();
                for (std::size_t k = 0; k < c.size(); ++k) decay_[k] += c[k];
            }
        }
        TCISING_REQUIRE(decay_.size() == h.dim(), ErrorCode::SectorMismatch, "loss diagonal has the wrong size");
        popt_.tol = opt.tol;
        popt_.max_dim = opt.max_krylov;
        popt_.hermitian = std::all_of(decay_.begin(), decay_.end(), [](double d) { return d == 0.0; });
        width_ = 0;
        for (const auto& o : obs_) width_ += evaluate(o, psi0_, opt_.pinned).size();
        if (h.dim() <= opt.dense_limit) {
            MatrixC heff = h.matrix.to_dense().template cast<cplx>();
            for (std::size_t k = 0; k < decay_.size(); ++k) {
                const auto i = static_cast<Eigen::Index>(k);
                heff(i, i) -= cplx(0.0, 0.5 * decay_[k]);
            }
            use_dense_ = dense_.init(heff);
        }
    }

    [[nodiscard]] std::size_t width() const noexcept { return width_; }

    [[nodiscard]] TrajectoryResult run(std::size_t index) const {
        TrajectoryResult res;
        res.values.reserve(t_grid_.size() * width_);
        std::mt19937_64 rng = stream_rng(seed0_, index);
        std::mt19937_64 snap_rng = stream_rng(seed0_ ^ 0x736e617073686f74ULL, index);

        auto heff = [&](const VectorC& x, VectorC& y) {
            h_.matrix.apply(x, y);
            for (Eigen::Index k = 0; k < x.size(); ++k) y[k] -= cplx(0.0, 0.5 * decay_[static_cast<std::size_t>(k)]) * x[k];
        };

        VectorC psi = psi0_.amps;
        double t = psi0_.t;
        double u = uniform_open(rng);
        double survival = 1.0;  // probability of never having left the band
        double hint = 0.0;
        krylov::KrylovStep step;
        QuantumState view{psi0_.basis, VectorC(), 0.0};

        DenseSpectral dense = dense_;
        if (use_dense_) dense.start(psi);
        double t_ref = t;  // time at which dense.start() was last called
        for (double ts : t_grid_) {
            TCISING_REQUIRE(ts >= t - 1e-12, ErrorCode::InvalidArgument, "time grid must be ascending");
            if (use_dense_) {
                while (true) {
                    VectorC end = dense.at(ts - t_ref);
                    if (end.squaredNorm() > u) {
                        psi = std::move(end);
                        break;
                    }
                    double lo = t - t_ref, hi = ts - t_ref;
                    while (hi - lo > opt_.jump_time_tol) {
                        const double mid = 0.5 * (lo + hi);
                        if (dense.at(mid).squaredNorm() > u)
                            lo = mid;
                        else
                            hi = mid;
                    }
                    psi = dense.at(hi);
                    t = t_ref + hi;
                    survival *= jump(psi, rng, res, index, t);
                    u = uniform_open(rng);
                    dense.start(psi);
                    t_ref = t;
                }
                t = ts;
            }
            while (!use_dense_ && ts - t > 1e-12 * std::max(1.0, ts)) {
                double tau = hint > 0.0 ? std::min(hint, ts - t) : ts - t;
                const double accepted = step.build(heff, psi, tau, popt_);
                hint = accepted < tau ? accepted : accepted * 1.5;
                VectorC next = step.evaluate(accepted);
                if (next.squaredNorm() > u) {
                    psi = std::move(next);
                    t += accepted;
                    continue;
                }
                // locate ||psi(tau)||^2 = u inside the step
                double lo = 0.0, hi = accepted;
                while (hi - lo > opt_.jump_time_tol) {
                    const double mid = 0.5 * (lo + hi);
                    if (step.evaluate(mid).squaredNorm() > u)
                        lo = mid;
                    else
                        hi = mid;
                }
                psi = step.evaluate(hi);
                t += hi;
                survival *= jump(psi, rng, res, index, t);
                u = uniform_open(rng);
            }
            t = ts;
            view.amps = psi / psi.norm();
            view.t = t;
            for (const auto& o : obs_)
                for (const auto& v : evaluate(o, view, opt_.pinned)) res.values.push_back(v.value);
            if (opt_.snapshots_per_save > 0) {
                auto s = sample_snapshots(view, opt_.snapshots_per_save, snap_rng);
                res.snapshots.insert(res.snapshots.end(), s.begin(), s.end());
            }
        }
        res.leak = 1.0 - survival;
        return res;
    }

private:
    /// Apply one jump; returns the fraction of the jump rate that stayed inside the band.
    double jump(VectorC& psi, std::mt19937_64& rng, TrajectoryResult& res, std::size_t index, double t) const {
        double full = 0.0;
        for (Eigen::Index k = 0; k < psi.size(); ++k) full += decay_[static_cast<std::size_t>(k)] * std::norm(psi[k]);
        std::vector<VectorC> out(jumps_.size());
        std::vector<double> w(jumps_.size());
        double inside = 0.0;
        for (std::size_t c = 0; c < jumps_.size(); ++c) {
            jumps_[c].op.matrix.apply(psi, out[c]);
            w[c] = out[c].squaredNorm();
            inside += w[c];
        }
        TCISING_REQUIRE(inside > 0.0, ErrorCode::BandFloorExceeded, "every jump channel leaves the band");
        double r = uniform_open(rng) * inside;
        std::size_t pick = 0;
        for (; pick + 1 < w.size(); ++pick) {
            if (r < w[pick]) break;
            r -= w[pick];
        }
        psi = out[pick] / std::sqrt(w[pick]);
        res.jumps.push_back({index, t, static_cast<int>(pick)});
        return full > 0.0 ? std::min(1.0, inside / full) : 1.0;
    }

    const SparseOperator& h_;
    const std::vector<JumpOperator>& jumps_;
    const QuantumState& psi0_;
    const std::vector<double>& t_grid_;
    std::uint64_t seed0_;
    const std::vector<ObservableSpec>& obs_;
    TrajectoryOptions opt_;
    std::vector<double> decay_;
    krylov::PropagatorOptions popt_;
    std::size_t width_ = 0;
    DenseSpectral dense_;
    bool use_dense_ = false;
};

}  // namespace detail

/// Monte-Carlo wavefunction ensemble; traces hold mean and standard error per save time.
[[nodiscard]] inline TrajectoryEnsemble trajectories(const SparseOperator& h, const std::vector<JumpOperator>& jumps,
                                                     const QuantumState& psi0, const std::vector<double>& t_grid,
                                                     std::size_t n_traj, std::uint64_t seed0,
                                                     const std::vector<ObservableSpec>& observables,
                                                     const TrajectoryOptions& opt = {}) {
    TCISING_REQUIRE(psi0.dim() == h.dim(), ErrorCode::SectorMismatch, "state and Hamiltonian bases differ");
    TCISING_REQUIRE(n_traj > 0, ErrorCode::InvalidArgument, "need at least one trajectory");
    for (const auto& o : observables)
        TCISING_REQUIRE(!o.needs_pure_state() && o.kind != ObservableKind::StringW, ErrorCode::InvalidArgument,
                        o.label() + " is not an ensemble observable");
    for (const auto& j : jumps)
        TCISING_REQUIRE(j.op.dim() == h.dim(), ErrorCode::SectorMismatch, "jump operator on a different basis");

    QuantumState start = psi0;
    start.amps /= start.norm();
    const detail::TrajectoryRunner runner(h, jumps, start, t_grid, seed0, observables, opt);

    TrajectoryEnsemble ens;
    ens.n_traj = n_traj;
    ens.seed0 = seed0;
    ens.t_grid = t_grid;
    for (const auto& j : jumps) ens.channels.push_back(j.label);
    ens.snapshots.resize(opt.snapshots_per_save > 0 ? t_grid.size() : 0);

    for (const auto& o : observables)
        for (const auto& v : evaluate(o, start, opt.pinned)) {
            ObservableTrace tr;
            tr.label = o.label();
            tr.index = v.index;
            ens.traces.push_back(std::move(tr));
        }
    const std::size_t width = runner.width();
    const std::size_t nt = t_grid.size();
    std::vector<double> mean(nt * width, 0.0), m2(nt * width, 0.0);
    std::size_t count = 0;
    double leak_sum = 0.0;

    const unsigned workers = std::max(1u, opt.threads);
    std::vector<detail::TrajectoryResult> buf;
    for (std::size_t begin = 0; begin < n_traj; begin += opt.block) {
        const std::size_t end = std::min(n_traj, begin + std::max<std::size_t>(1, opt.block));
        buf.assign(end - begin, {});
        std::vector<std::exception_ptr> errors(workers);
        auto work = [&](unsigned w) {
            try {
                for (std::size_t i = begin + w; i < end; i += workers) buf[i - begin] = runner.run(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
            for (auto& th : pool) th.join();
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);

        for (auto& r : buf) {  // index order
            ++count;
            for (std::size_t k = 0; k < r.values.size(); ++k) {
                const double d = r.values[k] - mean[k];
                mean[k] += d / static_cast<double>(count);
                m2[k] += d * (r.values[k] - mean[k]);
            }
            ens.jump_log.insert(ens.jump_log.end(), r.jumps.begin(), r.jumps.end());
            for (std::size_t ti = 0; ti < ens.snapshots.size(); ++ti)
                ens.snapshots[ti].insert(ens.snapshots[ti].end(),
                                         r.snapshots.begin() + static_cast<std::ptrdiff_t>(ti * opt.snapshots_per_save),
                                         r.snapshots.begin() + static_cast<std::ptrdiff_t>((ti + 1) * opt.snapshots_per_save));
            leak_sum += r.leak;
            ens.max_leak = std::max(ens.max_leak, r.leak);
        }
    }
    ens.mean_leak = leak_sum / static_cast<double>(count);
    TCISING_REQUIRE(ens.mean_leak <= opt.leak_bound, ErrorCode::BandFloorExceeded,
                    "leaked probability " + std::to_string(ens.mean_leak) + " exceeds the bound; widen the band");

    for (std::size_t e = 0; e < width; ++e) {
        auto& tr = ens.traces[e];
        tr.mean.resize(nt);
        tr.stderr_.resize(nt);
        for (std::size_t ti = 0; ti < nt; ++ti) {
            const std::size_t k = ti * width + e;
            tr.mean[ti] = mean[k];
            tr.stderr_[ti] = count > 1 ? std::sqrt(m2[k] / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
        }
    }
    return ens;
}

}  // namespace tcising
