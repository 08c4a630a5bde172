// SPDX-License-Identifier: Apache-2.0
//
// rismc - near-field RIS-assisted localization under element mutual coupling
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "rismc/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rismc {

Eigen::VectorXd fd_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& scale, double fd_rel_step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = fd_rel_step * std::max(std::abs(x[i]), scale[i]);
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

AscentResult bfgs_ascend(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                         const Eigen::VectorXd& fd_scale,
                         const AscentOptions& opts, const ProjectFn& project) {
    const Eigen::Index n = x0.size();
    AscentResult res;
    res.x = x0;
    if (project) project(res.x);
    res.value = f(res.x);
    if (!std::isfinite(res.value))
        throw std::runtime_error("bfgs_ascend: objective not finite at start");
    const Eigen::VectorXd x_start = res.x;
    const double f_start = res.value;

    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd grad = fd_gradient(f, res.x, fd_scale, opts.fd_rel_step);
    bool first = true;

    for (res.iters = 0; res.iters < opts.max_iters; ++res.iters) {
        const double gtol =
            opts.rel_grad_tol * std::max(std::abs(res.value), 1e-300);
        // Gradient scale is value/coordinate; compare per coordinate.
        double gmax = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            gmax = std::max(gmax, std::abs(grad[i]) * fd_scale[i]);
        if (gmax <= gtol) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd dir = h_inv * grad;
        double slope = grad.dot(dir);
        if (!(slope > 0.0)) {  // lost positive definiteness; reset
            h_inv.setIdentity();
            dir = grad;
            slope = grad.squaredNorm();
        }

        // Backtracking line search on the ascent direction. Improvements
        // below the floating-point noise floor of the objective do not count
        // as progress, otherwise the search walks on evaluation noise.
        const double noise_floor = 16.0 * 2.22e-16 * std::abs(res.value);
        double alpha = 1.0;
        Eigen::VectorXd x_new;
        double f_new = res.value;
        bool accepted = false;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            x_new = res.x + alpha * dir;
            if (project) project(x_new);
            const double fv = f(x_new);
            if (std::isfinite(fv) &&
                fv >= res.value + opts.armijo_c * alpha * slope &&
                fv > res.value + noise_floor) {
                f_new = fv;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            res.converged = true;  // no admissible ascent step remains
            break;
        }

        const Eigen::VectorXd grad_new =
            fd_gradient(f, x_new, fd_scale, opts.fd_rel_step);
        const Eigen::VectorXd step = x_new - res.x;
        // BFGS update in minimization form acting on -f.
        const Eigen::VectorXd y = grad - grad_new;
        const double sy = step.dot(y);
        if (sy > 1e-12 * step.norm() * y.norm()) {
            if (first) {
                h_inv *= sy / y.squaredNorm();
                first = false;
            }
            const Eigen::VectorXd hy = h_inv * y;
            const double yhy = y.dot(hy);
            h_inv += ((sy + yhy) / (sy * sy)) * (step * step.transpose()) -
                     (hy * step.transpose() + step * hy.transpose()) / sy;
        }

        res.x = x_new;
        res.value = f_new;
        grad = grad_new;
    }

    // Sub-noise displacements are reported as an exact no-move so that the
    // caller's convergence test can fire.
    double move = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        move = std::max(move, std::abs(res.x[i] - x_start[i]) /
                                  std::max(std::abs(x_start[i]), fd_scale[i]));
    if (move < 1e-13) {
        res.x = x_start;
        res.value = f_start;
    }
    return res;
}

NelderMeadResult nelder_mead_minimize(const ObjectiveFn& f,
                                      const Eigen::VectorXd& x0,
                                      const NelderMeadOptions& opts) {
    const Eigen::Index n = x0.size();
    const int m = static_cast<int>(n) + 1;

    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(m), x0);
    std::vector<double> vals(static_cast<std::size_t>(m));
    for (int i = 1; i < m; ++i) pts[static_cast<std::size_t>(i)][i - 1] += opts.initial_step;

    NelderMeadResult res;
    for (int i = 0; i < m; ++i) {
        vals[static_cast<std::size_t>(i)] = f(pts[static_cast<std::size_t>(i)]);
        ++res.evals;
    }

    std::vector<int> order(static_cast<std::size_t>(m));
    while (res.evals < opts.max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return vals[static_cast<std::size_t>(a)] < vals[static_cast<std::size_t>(b)];
        });
        const int best = order.front(), worst = order.back();
        const int second_worst = order[static_cast<std::size_t>(m - 2)];

        double diam = 0.0;
        for (int i = 0; i < m; ++i)
            diam = std::max(diam, (pts[static_cast<std::size_t>(i)] -
                                   pts[static_cast<std::size_t>(best)])
                                      .cwiseAbs()
                                      .maxCoeff());
        if (diam <= opts.x_tol) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < m; ++i)
            if (i != worst) centroid += pts[static_cast<std::size_t>(i)];
        centroid /= static_cast<double>(m - 1);

        const auto& xw = pts[static_cast<std::size_t>(worst)];
        const Eigen::VectorXd xr = centroid + (centroid - xw);
        const double fr = f(xr);
        ++res.evals;

        if (fr < vals[static_cast<std::size_t>(best)]) {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xw);
            const double fe = f(xe);
            ++res.evals;
            if (fe < fr) {
                pts[static_cast<std::size_t>(worst)] = xe;
                vals[static_cast<std::size_t>(worst)] = fe;
            } else {
                pts[static_cast<std::size_t>(worst)] = xr;
                vals[static_cast<std::size_t>(worst)] = fr;
            }
        } else if (fr < vals[static_cast<std::size_t>(second_worst)]) {
            pts[static_cast<std::size_t>(worst)] = xr;
            vals[static_cast<std::size_t>(worst)] = fr;
        } else {
            const bool outside = fr < vals[static_cast<std::size_t>(worst)];
            const Eigen::VectorXd xc =
                outside ? (centroid + 0.5 * (xr - centroid)).eval()
                        : (centroid + 0.5 * (xw - centroid)).eval();
            const double fc = f(xc);
            ++res.evals;
            if (fc < (outside ? fr : vals[static_cast<std::size_t>(worst)])) {
                pts[static_cast<std::size_t>(worst)] = xc;
                vals[static_cast<std::size_t>(worst)] = fc;
            } else {
                // Shrink toward the best vertex.
                for (int i = 0; i < m; ++i) {
                    if (i == best) continue;
                    pts[static_cast<std::size_t>(i)] =
                        pts[static_cast<std::size_t>(best)] +
                        0.5 * (pts[static_cast<std::size_t>(i)] -
                               pts[static_cast<std::size_t>(best)]);
                    vals[static_cast<std::size_t>(i)] = f(pts[static_cast<std::size_t>(i)]);
                    ++res.evals;
                }
            }
        }
    }

    int best = 0;
    for (int i = 1; i < m; ++i)
        if (vals[static_cast<std::size_t>(i)] < vals[static_cast<std::size_t>(best)]) best = i;
    res.x = pts[static_cast<std::size_t>(best)];
    res.value = vals[static_cast<std::size_t>(best)];
    return res;
}

}  // namespace rismc
