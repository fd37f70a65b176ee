#include "auvsim/qp.hpp"

#include <cmath>
#include <sstream>

#include "auvsim/errors.hpp"

namespace auvsim {

namespace {

Eigen::VectorXd clamp_box(Eigen::VectorXd x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
	return x.cwiseMax(lo).cwiseMin(hi);
}

// Infinity norm of x - Proj(x - grad): zero exactly at a KKT point.
double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                               const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
	return (x - clamp_box(x - grad, lo, hi)).lpNorm<Eigen::Infinity>();
}

}  // namespace

QpResult qp_solve(const Eigen::MatrixXd& H_in, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                  const Eigen::VectorXd& hi, const Eigen::VectorXd& warm_start, double tol,
                  int max_iter) {
	const int n = static_cast<int>(g.size());
	if (H_in.rows() != n || H_in.cols() != n || lo.size() != n || hi.size() != n) {
		std::ostringstream os;
		os << "qp_solve: inconsistent dimensions (H " << H_in.rows() << "x" << H_in.cols()
		   << ", g " << g.size() << ", bounds " << lo.size() << "/" << hi.size() << ")";
		throw ValidationError(os.str());
	}
	for (int i = 0; i < n; ++i)
		if (!(lo(i) <= hi(i))) throw ValidationError("qp_solve: empty box (lo > hi)");

	Eigen::MatrixXd H = 0.5 * (H_in + H_in.transpose());
	H.diagonal().array() += 1e-10;

	const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H)
	                     .eigenvalues()
	                     .maxCoeff() * 1.0000001 + 1e-12;

	Eigen::VectorXd x = warm_start.size() == n ? clamp_box(warm_start, lo, hi)
	                                           : clamp_box(Eigen::VectorXd::Zero(n), lo, hi);
	Eigen::VectorXd y = x, x_prev = x;
	double t = 1.0;
	int iter = 0;
	double kkt = projected_gradient_norm(x, H * x + g, lo, hi);

	auto polish = [&](Eigen::VectorXd& z) {
		// Fix coordinates pinned at a bound with a compatible gradient sign and
		// solve the free subspace exactly; repeat until the set stabilizes.
		for (int round = 0; round < 16; ++round) {
			const Eigen::VectorXd grad = H * z + g;
			std::vector<int> free_idx;
			for (int i = 0; i < n; ++i) {
				const double width = hi(i) - lo(i);
				const double eps_a = 1e-12 * std::max(1.0, width);
				const bool at_lo = z(i) <= lo(i) + eps_a && grad(i) >= 0;
				const bool at_hi = z(i) >= hi(i) - eps_a && grad(i) <= 0;
				if (at_lo)
					z(i) = lo(i);
				else if (at_hi)
					z(i) = hi(i);
				else
					free_idx.push_back(i);
			}
			if (projected_gradient_norm(z, H * z + g, lo, hi) <= tol) return true;
			if (free_idx.empty()) return false;
			const int m = static_cast<int>(free_idx.size());
			Eigen::MatrixXd Hff(m, m);
			Eigen::VectorXd rhs(m);
			for (int a = 0; a < m; ++a) {
				rhs(a) = -g(free_idx[a]);
				for (int b = 0; b < m; ++b) Hff(a, b) = H(free_idx[a], free_idx[b]);
				for (int i = 0; i < n; ++i) {
					bool is_free = false;
					for (int b = 0; b < m; ++b) is_free = is_free || free_idx[b] == i;
					if (!is_free) rhs(a) -= H(free_idx[a], i) * z(i);
				}
			}
			const Eigen::VectorXd zf = Hff.ldlt().solve(rhs);
			for (int a = 0; a < m; ++a) z(free_idx[a]) = zf(a);
			z = clamp_box(z, lo, hi);
			if (projected_gradient_norm(z, H * z + g, lo, hi) <= tol) return true;
		}
		return projected_gradient_norm(z, H * z + g, lo, hi) <= tol;
	};

	while (kkt > tol && iter < max_iter) {
		const Eigen::VectorXd grad_y = H * y + g;
		const Eigen::VectorXd x_new = clamp_box(y - grad_y / L, lo, hi);
		// Adaptive restart: drop momentum when it points uphill.
		if (grad_y.dot(x_new - x) > 0) {
			t = 1.0;
			y = x;
		} else {
			const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
			y = x_new + ((t - 1.0) / t_new) * (x_new - x);
			t = t_new;
		}
		x_prev = x;
		x = x_new;
		++iter;
		if (iter % 8 == 0 || iter == max_iter) {
			kkt = projected_gradient_norm(x, H * x + g, lo, hi);
			if (kkt <= 64 * tol) {
				if (polish(x)) {
					kkt = projected_gradient_norm(x, H * x + g, lo, hi);
					break;
				}
				kkt = projected_gradient_norm(x, H * x + g, lo, hi);
			}
		}
	}
	if (kkt > tol) {
		polish(x);
		kkt = projected_gradient_norm(x, H * x + g, lo, hi);
	}
	if (kkt > tol) {
		std::ostringstream os;
		os << "qp_solve: KKT residual " << kkt << " above tolerance " << tol << " after " << iter
		   << " iterations";
		throw QpError(os.str(), iter);
	}

	QpResult res;
	res.x = x;
	res.objective = 0.5 * x.dot(H_in * x) + g.dot(x);
	res.iterations = iter;
	res.kkt_residual = kkt;
	res.active.resize(n, 0);
	for (int i = 0; i < n; ++i) {
		const double eps_a = 1e-9 * std::max(1.0, hi(i) - lo(i));
		if (x(i) <= lo(i) + eps_a)
			res.active[i] = -1;
		else if (x(i) >= hi(i) - eps_a)
			res.active[i] = 1;
	}
	return res;
}

}  // namespace auvsim
