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

#pragma once

#include <Eigen/Dense>
#include <functional>

namespace rismc {

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;
using ProjectFn = std::function<void(Eigen::VectorXd&)>;

struct AscentOptions {
    int max_iters = 30;
    // Stop when |grad|_inf <= rel_grad_tol * max(|f|, tiny); the objective
    // scale is arbitrary (it carries |beta|^2), so tolerances are relative.
    double rel_grad_tol = 1e-7;
    double fd_rel_step = 1e-6;  // central differences, per coordinate
    int max_backtracks = 12;
    double armijo_c = 1e-4;
};

struct AscentResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iters = 0;
    bool converged = false;
};

// Central finite-difference gradient with per-coordinate step
// fd_rel_step * max(|x_i|, scale_i).
Eigen::VectorXd fd_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& scale, double fd_rel_step);

// Dense BFGS ascent with finite-difference gradients and a backtracking
// (Armijo) line search. `project` (optional) clamps candidate points to the
// feasible set before evaluation. Intended for small blocks (n <= 8).
AscentResult bfgs_ascend(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                         const Eigen::VectorXd& fd_scale,
                         const AscentOptions& opts,
                         const ProjectFn& project = nullptr);

struct NelderMeadOptions {
    double initial_step = 0.02;  // absolute, per coordinate
    double x_tol = 1e-9;         // simplex diameter, inf-norm
    int max_evals = 8000;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evals = 0;
    bool converged = false;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2) minimizing f.
NelderMeadResult nelder_mead_minimize(const ObjectiveFn& f,
                                      const Eigen::VectorXd& x0,
                                      const NelderMeadOptions& opts);

}  // namespace rismc
