#pragma once

#include <Eigen/Dense>
#include <vector>

namespace auvsim {

struct QpResult {
	Eigen::VectorXd x;
	double objective = 0;       // 0.5 x'Hx + g'x at the solution
	int iterations = 0;
	double kkt_residual = 0;    // infinity norm of the unit-step projected gradient
	std::vector<int> active;    // per coordinate: -1 at lower bound, +1 at upper, 0 free
};

/*
 * Dense convex box-constrained QP
 *   min 0.5 x'Hx + g'x   s.t.  lo <= x <= hi
 * solved by accelerated projected gradient with adaptive restart plus an
 * active-set polish (exact solves on the free subspace). H is symmetrized and
 * regularized by 1e-10 on the diagonal. Deterministic; throws QpError if the
 * KKT tolerance is not met within max_iter gradient steps.
 */
QpResult qp_solve(const Eigen::MatrixXd& H, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                  const Eigen::VectorXd& hi, const Eigen::VectorXd& warm_start, double tol = 1e-8,
                  int max_iter = 4000);

}  // namespace auvsim
