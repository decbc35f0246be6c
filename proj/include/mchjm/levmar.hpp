#pragma once
/// Box-constrained Levenberg-Marquardt least squares over a residual vector.
/// Numerical Jacobian by central differences (one-sided at active bounds),
/// damped normal equations, steps clamped to the box.

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <vector>

namespace mchjm {

struct LevMarOptions {
    int max_iters = 200;
    double ftol = 1e-12;    // relative objective decrease
    double xtol = 1e-12;    // relative step size
    double gtol = 1e-10;    // gradient infinity norm
    double fd_step = 1e-6;  // central-difference step scale
    double mu0 = 1e-3;      // initial damping
};

struct LevMarResult {
    Eigen::VectorXd x;
    double objective = 0.0;  // sum of squared residuals
    int iterations = 0;
    bool converged = false;
    std::string stop_reason;
    std::vector<std::pair<int, double>> trace;  // (iteration, objective)
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

namespace detail {

inline Eigen::MatrixXd numeric_jacobian(const ResidualFn& f, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                        double step_scale, const Eigen::VectorXd& r0) {
    const int n = static_cast<int>(x.size());
    const int m = static_cast<int>(r0.size());
    Eigen::MatrixXd J(m, n);
    for (int j = 0; j < n; ++j) {
        const double h = step_scale * (1.0 + std::abs(x(j)));
        double up = std::min(x(j) + h, hi(j));
        double dn = std::max(x(j) - h, lo(j));
        if (up == dn) { J.col(j).setZero(); continue; }
        Eigen::VectorXd xu = x, xd = x;
        xu(j) = up;
        xd(j) = dn;
        J.col(j) = (f(xu) - f(xd)) / (up - dn);
    }
    return J;
}

} // namespace detail

inline LevMarResult levmar_box(const ResidualFn& f, Eigen::VectorXd x, const Eigen::VectorXd& lo,
                               const Eigen::VectorXd& hi, const LevMarOptions& opts = {}) {
    const int n = static_cast<int>(x.size());
    for (int j = 0; j < n; ++j) x(j) = std::clamp(x(j), lo(j), hi(j));

    LevMarResult res;
    Eigen::VectorXd r = f(x);
    double obj = r.squaredNorm();
    res.trace.emplace_back(0, obj);
    double mu = opts.mu0;
    double nu = 2.0;

    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        const Eigen::MatrixXd J = detail::numeric_jacobian(f, x, lo, hi, opts.fd_step, r);
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < opts.gtol) {
            res.stop_reason = "gradient tolerance";
            res.converged = true;
            break;
        }
        bool stepped = false;
        for (int inner = 0; inner < 30 && !stepped; ++inner) {
            Eigen::MatrixXd A = JtJ;
            for (int j = 0; j < n; ++j) A(j, j) += mu * std::max(JtJ(j, j), 1e-12);
            const Eigen::VectorXd delta = A.ldlt().solve(-g);
            Eigen::VectorXd xn = x + delta;
            for (int j = 0; j < n; ++j) xn(j) = std::clamp(xn(j), lo(j), hi(j));
            const Eigen::VectorXd rn = f(xn);
            const double objn = rn.squaredNorm();
            if (objn < obj) {
                const double rel_dx = (xn - x).norm() / (1.0 + x.norm());
                const double rel_df = (obj - objn) / std::max(obj, 1e-300);
                x = xn;
                r = rn;
                obj = objn;
                mu = std::max(mu / 3.0, 1e-15);
                nu = 2.0;
                stepped = true;
                res.trace.emplace_back(iter + 1, obj);
                if (rel_dx < opts.xtol) {
                    res.stop_reason = "step tolerance";
                    res.converged = true;
                }
                if (rel_df < opts.ftol) {
                    res.stop_reason = "objective tolerance";
                    res.converged = true;
                }
            } else {
                mu *= nu;
                nu *= 2.0;
                if (mu > 1e12) break;
            }
        }
        if (!stepped) {
            res.stop_reason = res.stop_reason.empty() ? "no descent direction" : res.stop_reason;
            res.converged = true;
            break;
        }
        if (res.converged) { ++iter; break; }
    }
    if (res.stop_reason.empty()) res.stop_reason = "iteration limit";
    res.x = x;
    res.objective = obj;
    res.iterations = iter;
    return res;
}

} // namespace mchjm
