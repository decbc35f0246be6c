#pragma once
/// Monte Carlo simulation of the (X, Y) state.
///
/// X is stepped exactly: conditionally on X(t_j) the state X(t_{j+1}) is
/// Gaussian with mean from the linear dynamics (Y-drift integrated by
/// composite Gauss-Legendre of closed-form integrands) and covariance from
/// the closed-form eps^2 decay integral. Y is deterministic. Under the
/// T-forward measure the drift gains -C(t) G0(t,t,T) with
/// C(t) = eps^2(t) h rho h. An Euler scheme is kept behind a flag as the
/// oracle's counterpart.
///
/// Paths are partitioned into fixed-size blocks; each block derives an
/// independent RNG stream from (seed, block index), so results are
/// bit-identical regardless of thread count.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mchjm/math.hpp"
#include "mchjm/reconstruct.hpp"
#include "mchjm/schedule.hpp"
#include "mchjm/swap.hpp"

namespace mchjm {

enum class Measure { RiskNeutral, TForward };
enum class Scheme { ExactGaussian, Euler };

struct PathConfig {
    std::size_t paths = 10000;
    std::vector<double> grid;  // strictly increasing, starts at 0
    Measure measure = Measure::RiskNeutral;
    double numeraire_maturity = 0.0;  // for the T-forward measure
    std::uint64_t seed = 42;
    bool antithetic = false;
    Scheme scheme = Scheme::ExactGaussian;
    bool drift_adjustment = true;  // false = negative control (missing measure change)
    int threads = 1;               // 0 = hardware concurrency
    std::size_t block_size = 4096;
    std::vector<double> observe;   // grid times to store; empty = all grid times

    /// Uniform grid 0..horizon with steps of at most `step`, horizon included.
    static std::vector<double> uniform_grid(double horizon, double step) {
        const int n = std::max(1, static_cast<int>(std::ceil(horizon / step - 1e-12)));
        std::vector<double> g(n + 1);
        for (int i = 0; i <= n; ++i) g[i] = horizon * i / n;
        return g;
    }
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

struct StatReport {
    std::string name;
    double estimate = 0.0;
    double target = 0.0;
    double std_error = 0.0;
    double z = 0.0;

    bool pass(double threshold = 3.0) const { return std::abs(z) < threshold; }
};

/// Simulated paths at the requested observation times.
struct PathSet {
    std::vector<double> obs_times;
    std::vector<Eigen::MatrixXd> X;       // per obs time: n x paths
    std::vector<Eigen::MatrixXd> Y;       // per obs time: n x n (deterministic, shared)
    std::vector<std::vector<double>> df;  // per obs time: pathwise exp(-int r)
    std::size_t paths = 0;
    bool antithetic = false;
    std::vector<std::string> warnings;

    HjmState state(std::size_t obs, std::size_t path) const {
        return {obs_times[obs], X[obs].col(static_cast<Eigen::Index>(path)), Y[obs]};
    }

    /// Mean and standard error of a pathwise functional; antithetic pairs are
    /// collapsed into single samples.
    template <typename F>
    McEstimate estimate(const F& f) const {
        const std::size_t stride = antithetic ? 2 : 1;
        const std::size_t m = paths / stride;
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double v = f(i * stride);
            if (stride == 2) v = 0.5 * (v + f(i * stride + 1));
            sum += v;
            sumsq += v * v;
        }
        McEstimate e;
        e.samples = m;
        e.value = sum / static_cast<double>(m);
        const double var = std::max(0.0, sumsq / static_cast<double>(m) - e.value * e.value);
        e.std_error = std::sqrt(var / static_cast<double>(m > 1 ? m - 1 : 1));
        return e;
    }
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t block) {
    // splitmix64 over (seed, block)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (block + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct StepCache {
    Eigen::VectorXd decay;   // e^{-lambda dt} (exact) or 1 - lambda dt (euler)
    Eigen::VectorXd drift;   // deterministic mean increment
    Eigen::MatrixXd noise;   // factor loading of iid normals
    double dt = 0.0;
    bool cov_floored = false;
};

inline Eigen::MatrixXd chol_psd(const Eigen::MatrixXd& v, bool& floored) {
    Eigen::LLT<Eigen::MatrixXd> llt(v);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    // floor negative eigenvalues at zero
    floored = true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

inline std::vector<StepCache> build_steps(const VolKernel& kern, const PathConfig& cfg,
                                          std::vector<std::string>& warnings) {
    const WgParams& p = kern.params();
    const int n = p.n;
    const bool tfwd = cfg.measure == Measure::TForward && cfg.drift_adjustment;
    const double Tnum = cfg.numeraire_maturity;
    double lam_max = 0.0;
    for (double l : p.lambda) lam_max = std::max(lam_max, l);

    std::vector<StepCache> steps(cfg.grid.size() - 1);
    for (std::size_t j = 0; j + 1 < cfg.grid.size(); ++j) {
        const double s = cfg.grid[j], u = cfg.grid[j + 1];
        StepCache& st = steps[j];
        st.dt = u - s;
        st.decay.resize(n);
        st.drift.resize(n);
        if (cfg.scheme == Scheme::ExactGaussian) {
            for (int i = 0; i < n; ++i) st.decay(i) = std::exp(-p.lambda[i] * st.dt);
            // drift_i = int_s^u e^{-lambda_i (u-y)} [ (Y(y) 1)_i - adj_i(y) ] dy
            const int panels = decay_panels(lam_max + 2.0 * p.beta2, st.dt);
            for (int i = 0; i < n; ++i) {
                const auto f = [&](double y) {
                    double v = 0.0;
                    for (int k = 0; k < n; ++k)
                        v += p.h[i] * p.h[k] * p.rho(i, k) *
                             kern.eps2_decay_integral(p.lambda[i] + p.lambda[k], 0.0, y);
                    if (tfwd) {
                        const double e2 = p.epsilon(y) * p.epsilon(y);
                        for (int k = 0; k < n; ++k) {
                            const double w = Tnum - y;
                            const double g0 = w <= 0.0 ? 0.0 : w * phibar(0, p.lambda[k] * w);
                            v -= e2 * p.h[i] * p.h[k] * p.rho(i, k) * g0;
                        }
                    }
                    return std::exp(-p.lambda[i] * (u - y)) * v;
                };
                st.drift(i) = integrate_gl(f, s, u, gl32(), panels);
            }
            st.noise = chol_psd(kern.cov_integral(s, u), st.cov_floored);
        } else {
            // Euler: left-endpoint coefficients
            const double e2 = p.epsilon(s) * p.epsilon(s);
            const Eigen::MatrixXd Ys = kern.Y(s);
            for (int i = 0; i < n; ++i) {
                st.decay(i) = 1.0 - p.lambda[i] * st.dt;
                double v = Ys.row(i).sum();
                if (tfwd) {
                    for (int k = 0; k < n; ++k) {
                        const double w = Tnum - s;
                        const double g0 = w <= 0.0 ? 0.0 : w * phibar(0, p.lambda[k] * w);
                        v -= e2 * p.h[i] * p.h[k] * p.rho(i, k) * g0;
                    }
                }
                st.drift(i) = v * st.dt;
            }
            Eigen::MatrixXd C(n, n);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) C(i, k) = e2 * p.h[i] * p.h[k] * p.rho(i, k);
            st.noise = chol_psd((C * st.dt).eval(), st.cov_floored);
        }
        if (st.cov_floored)
            warnings.push_back("step covariance floored at step " + std::to_string(j));
    }
    return steps;
}

} // namespace detail

/// Simulates X along cfg.grid and records states and discount factors at the
/// observation times. The discount accumulator integrates the stochastic
/// part of r by trapezoid on the grid; the deterministic part int f0 is
/// taken exactly from the curve.
inline PathSet simulate(const WgParams& p, const DiscountCurve& dc, const PathConfig& cfg) {
    if (cfg.paths < 2) throw std::invalid_argument("simulate: need at least 2 paths");
    if (cfg.grid.size() < 2 || cfg.grid.front() != 0.0)
        throw std::invalid_argument("simulate: grid must start at 0 and have at least two points");
    for (std::size_t i = 0; i + 1 < cfg.grid.size(); ++i)
        if (cfg.grid[i + 1] <= cfg.grid[i]) throw std::invalid_argument("simulate: grid must be strictly increasing");
    if (cfg.measure == Measure::TForward && cfg.numeraire_maturity < cfg.grid.back())
        throw std::invalid_argument("simulate: numeraire maturity must cover the grid");
    if (cfg.antithetic && (cfg.block_size % 2 != 0 || cfg.paths % 2 != 0))
        throw std::invalid_argument("simulate: antithetic needs even paths and block size");

    const int n = p.n;
    const VolKernel kern(p);

    std::vector<double> obs = cfg.observe.empty() ? cfg.grid : cfg.observe;
    std::vector<std::size_t> obs_idx;
    for (double t : obs) {
        auto it = std::find_if(cfg.grid.begin(), cfg.grid.end(),
                               [&](double g) { return std::abs(g - t) < 1e-12; });
        if (it == cfg.grid.end())
            throw std::invalid_argument("simulate: observation time not on grid");
        obs_idx.push_back(static_cast<std::size_t>(it - cfg.grid.begin()));
    }

    PathSet ps;
    ps.paths = cfg.paths;
    ps.antithetic = cfg.antithetic;
    ps.obs_times = obs;
    ps.X.assign(obs.size(), Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(cfg.paths)));
    ps.Y.resize(obs.size());
    for (std::size_t o = 0; o < obs.size(); ++o) ps.Y[o] = kern.Y(obs[o]);
    ps.df.assign(obs.size(), std::vector<double>(cfg.paths, 0.0));

    const auto steps = detail::build_steps(kern, cfg, ps.warnings);

    // -log P0 at grid points (exact deterministic discounting part)
    std::vector<double> lp(cfg.grid.size());
    for (std::size_t j = 0; j < cfg.grid.size(); ++j) lp[j] = dc.log_discount(cfg.grid[j]);

    const std::size_t nblocks = (cfg.paths + cfg.block_size - 1) / cfg.block_size;

    const auto run_block = [&](std::size_t b) {
        const std::size_t lo = b * cfg.block_size;
        const std::size_t hi = std::min(cfg.paths, lo + cfg.block_size);
        std::mt19937_64 eng(detail::mix_seed(cfg.seed, b));
        std::normal_distribution<double> normal;
        const std::size_t nsteps = steps.size();
        std::vector<double> zbuf;  // antithetic replay buffer
        if (cfg.antithetic) zbuf.resize(nsteps * static_cast<std::size_t>(n));

        Eigen::VectorXd X(n), z(n);
        for (std::size_t path = lo; path < hi; ++path) {
            const bool replay = cfg.antithetic && (path % 2 == 1);
            X.setZero();
            double ix = 0.0;       // trapezoid accumulator of sum_i X_i
            double sum_prev = 0.0; // sum_i X_i at previous grid point
            std::size_t next_obs = 0;
            while (next_obs < obs_idx.size() && obs_idx[next_obs] == 0) {
                ps.X[next_obs].col(static_cast<Eigen::Index>(path)) = X;
                ps.df[next_obs][path] = 1.0;
                ++next_obs;
            }
            for (std::size_t j = 0; j < nsteps; ++j) {
                const detail::StepCache& st = steps[j];
                for (int i = 0; i < n; ++i) {
                    double zi;
                    if (replay) {
                        zi = -zbuf[j * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
                    } else {
                        zi = normal(eng);
                        if (cfg.antithetic)
                            zbuf[j * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] = zi;
                    }
                    z(i) = zi;
                }
                X = st.decay.cwiseProduct(X) + st.drift + st.noise * z;
                const double sum_cur = X.sum();
                ix += 0.5 * (sum_prev + sum_cur) * st.dt;
                sum_prev = sum_cur;
                while (next_obs < obs_idx.size() && obs_idx[next_obs] == j + 1) {
                    ps.X[next_obs].col(static_cast<Eigen::Index>(path)) = X;
                    ps.df[next_obs][path] = std::exp(-lp[j + 1] - ix);
                    ++next_obs;
                }
            }
        }
    };

    int nthreads = cfg.threads;
    if (nthreads <= 0) nthreads = static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(nblocks)));
    if (nthreads == 1) {
        for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(nthreads));
        for (int w = 0; w < nthreads; ++w)
            workers.emplace_back([&, w] {
                for (std::size_t b = static_cast<std::size_t>(w); b < nblocks;
                     b += static_cast<std::size_t>(nthreads))
                    run_block(b);
            });
        for (auto& t : workers) t.join();
    }
    return ps;
}

/// E[exp(-int_0^T r)] vs P0(T) under the risk-neutral measure.
inline StatReport check_bond_martingale(const WgParams& p, const CurveSet& cs, PathConfig cfg, double T) {
    cfg.measure = Measure::RiskNeutral;
    cfg.observe = {T};
    const PathSet ps = simulate(p, cs.discount(), cfg);
    const auto est = ps.estimate([&](std::size_t path) { return ps.df[0][path]; });
    StatReport r;
    r.name = "bond martingale T=" + std::to_string(T);
    r.estimate = est.value;
    r.target = cs.discount().discount(T);
    r.std_error = est.std_error;
    r.z = est.std_error > 0.0 ? (est.value - r.target) / est.std_error : 0.0;
    return r;
}

/// E^{T-fwd}[kappa + F_{T-x}(T,x)] vs kappa + F_0(T,x).
inline StatReport check_forward_martingale(const WgParams& p, const CurveSet& cs, PathConfig cfg,
                                           double T, Tenor x) {
    const double xw = x.years();
    cfg.measure = Measure::TForward;
    cfg.numeraire_maturity = T;
    cfg.observe = {T - xw};
    const PathSet ps = simulate(p, cs.discount(), cfg);
    const VolKernel kern(p);
    const double f0 = cs.forward(T, x);
    const double kap = p.shift.kappa(T, x);
    // reconstruction exponent is affine in X: precompute the path-independent parts
    const HjmState probe = ps.state(0, 0);
    const Eigen::VectorXd G = kern.G(probe.t, T - xw, T, T, x);
    const Eigen::VectorXd G0tT = kern.G0(probe.t, probe.t, T);
    const double c0 = G.dot(ps.Y[0] * (G0tT - 0.5 * G));
    const auto est = ps.estimate([&](std::size_t path) {
        const double incr = G.dot(ps.X[0].col(static_cast<Eigen::Index>(path))) + c0;
        return (kap + f0) * std::exp(incr);
    });
    StatReport r;
    r.name = "forward martingale T=" + std::to_string(T) + " x=" + tenor_label(x);
    r.estimate = est.value;
    r.target = kap + f0;
    r.std_error = est.std_error;
    r.z = est.std_error > 0.0 ? (est.value - r.target) / est.std_error : 0.0;
    return r;
}

/// Pathwise swaption price: discounted A(Ta) (S(Ta) - K)^+ with the annuity
/// and par rate reconstructed from the simulated state at expiry.
inline McEstimate mc_swaption_price(const WgParams& p, const CurveSet& cs, const SwapSchedule& sch,
                                    double strike, PathConfig cfg) {
    const double Ta = sch.expiry;
    cfg.measure = Measure::RiskNeutral;
    cfg.observe = {Ta};
    const PathSet ps = simulate(p, cs.discount(), cfg);
    const VolKernel kern(p);
    const int n = p.n;

    // fixed-leg bonds: P_Ta(T) = P0(T)/P0(Ta) exp(-v.X - 0.5 v.Yv)
    const double p0a = cs.discount().discount(Ta);
    const Eigen::MatrixXd& Y = ps.Y[0];
    std::vector<Eigen::VectorXd> v(sch.fixed_pay.size());
    std::vector<double> bond_det(sch.fixed_pay.size());
    for (std::size_t j = 0; j < sch.fixed_pay.size(); ++j) {
        v[j] = kern.G0(Ta, Ta, sch.fixed_pay[j]);
        bond_det[j] = std::log(cs.discount().discount(sch.fixed_pay[j]) / p0a) -
                      0.5 * v[j].dot(Y * v[j]);
    }
    // float-leg forwards F = (kap+F0) exp(w.X + c) - kap and float-leg bonds
    std::vector<Eigen::VectorXd> w(sch.float_pay.size()), vf(sch.float_pay.size());
    std::vector<double> fwd_c(sch.float_pay.size()), kapF0(sch.float_pay.size()), kap(sch.float_pay.size()),
        fbond_det(sch.float_pay.size());
    for (std::size_t k = 0; k < sch.float_pay.size(); ++k) {
        const double T = sch.float_pay[k];
        const double xw = sch.float_tenor.years();
        w[k] = kern.G(Ta, T - xw, T, T, sch.float_tenor);
        const Eigen::VectorXd G0tT = kern.G0(Ta, Ta, T);
        fwd_c[k] = w[k].dot(Y * (G0tT - 0.5 * w[k]));
        kap[k] = p.shift.kappa(T, sch.float_tenor);
        kapF0[k] = kap[k] + cs.forward(T, sch.float_tenor);
        vf[k] = G0tT;
        fbond_det[k] = std::log(cs.discount().discount(T) / p0a) - 0.5 * G0tT.dot(Y * G0tT);
    }

    Eigen::VectorXd X(n);
    const auto est = ps.estimate([&](std::size_t path) {
        X = ps.X[0].col(static_cast<Eigen::Index>(path));
        double ann = 0.0;
        for (std::size_t j = 0; j < sch.fixed_pay.size(); ++j)
            ann += sch.fixed_accrual[j] * std::exp(bond_det[j] - v[j].dot(X));
        double fl = 0.0;
        for (std::size_t k = 0; k < sch.float_pay.size(); ++k) {
            const double F = kapF0[k] * std::exp(w[k].dot(X) + fwd_c[k]) - kap[k];
            const double bk = std::exp(fbond_det[k] - vf[k].dot(X));
            fl += sch.float_accrual[k] * bk * F;
        }
        const double S = fl / ann;
        return ps.df[0][path] * ann * std::max(S - strike, 0.0);
    });
    return est;
}

/// Fixed-width binary dump of terminal states: uint64 path count, uint64
/// factor count, then row-major doubles (paths x factors) at the last
/// observation time.
inline void dump_terminal_states(const PathSet& ps, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write state dump '" + path + "'");
    const std::uint64_t np = ps.paths;
    const std::uint64_t nf = static_cast<std::uint64_t>(ps.X.back().rows());
    out.write(reinterpret_cast<const char*>(&np), sizeof np);
    out.write(reinterpret_cast<const char*>(&nf), sizeof nf);
    for (std::uint64_t i = 0; i < np; ++i)
        for (std::uint64_t f = 0; f < nf; ++f) {
            const double v = ps.X.back()(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(i));
            out.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
}

} // namespace mchjm
