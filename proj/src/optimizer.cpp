#include "auvsim/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "auvsim/angles.hpp"

namespace auvsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Eigen::Vector4d approx_thrusts(double u_r, double w_r, double theta, const VehicleParams& p) {
	const double sth = std::sin(theta), cth = std::cos(theta);
	const double dW = p.W - p.B;
	const double horizontal = 0.5 * (dW * sth + p.X_u * u_r);
	const double common = 0.5 * (p.Z_w * w_r - dW * cth);
	const double diff = p.restoring_arm() * sth / (2.0 * p.l_v);
	return {horizontal, horizontal, common - diff, common + diff};
}

double approx_power(double u_r, double w_r, double theta, const VehicleParams& p) {
	return total_power(approx_thrusts(u_r, w_r, theta, p), p.alpha);
}

std::optional<double> speed_toward_los(double u_r, double w_r, double theta, double U_c,
                                       double psi_cd) {
	const double V_uw = std::cos(theta) * u_r + std::sin(theta) * w_r;
	if (V_uw <= 0) return std::nullopt;  // formula assumes motion toward the LOS point
	const double V_cp = U_c * std::sin(psi_cd);  // perpendicular current component
	const double V_ca = U_c * std::cos(psi_cd);  // along-track current component
	const double rad = V_uw * V_uw - V_cp * V_cp;
	if (rad < 0) return std::nullopt;  // cannot cancel the cross current
	const double U_h = std::sqrt(rad) + V_ca;
	if (U_h <= 0) return std::nullopt;
	return U_h;
}

std::optional<double> energy_estimate(double u_r, double w_r, double theta,
                                      const SetpointProblem& prob, const VehicleParams& p) {
	const auto U_h = speed_toward_los(u_r, w_r, theta, prob.U_c, prob.psi_cd);
	if (!U_h) return std::nullopt;
	return approx_power(u_r, w_r, theta, p) * prob.d_h / *U_h;
}

namespace {

// Residual of the arrival-time matching constraint: d_h * z_dot - d_z * U_h.
// Zero exactly when the horizontal and vertical travel times agree.
std::optional<double> time_match_residual(double w, double u, double theta,
                                          const SetpointProblem& prob) {
	const auto U_h = speed_toward_los(u, w, theta, prob.U_c, prob.psi_cd);
	if (!U_h) return std::nullopt;
	const double z_dot = -std::sin(theta) * u + std::cos(theta) * w;
	return prob.d_h * z_dot - prob.d_z * *U_h;
}

struct RootCandidate {
	double w;
	double energy;
};

}  // namespace

std::optional<double> solve_vertical_rate(double u_r, double theta, const SetpointProblem& prob,
                                          const VehicleParams& p) {
	const double w_lo = -prob.bounds.w_max, w_hi = prob.bounds.w_max;
	const double s = std::sin(theta), c = std::cos(theta);

	if (std::abs(prob.d_z) < prob.epsilon_z) {
		// Level target: hold depth, z_dot = 0.
		if (std::abs(c) < 1e-9) return std::nullopt;
		const double w = s * u_r / c;
		if (w < w_lo || w > w_hi) return std::nullopt;
		if (!speed_toward_los(u_r, w, theta, prob.U_c, prob.psi_cd)) return std::nullopt;
		return w;
	}

	/*
	 * Nontrivial depth offset. With kappa = d_h/d_z the constraint reads
	 *   sqrt(V_uw^2 - V_cp^2) = kappa*z_dot - V_ca,  V_uw = c*u + s*w,
	 *   z_dot = -s*u + c*w,
	 * which after squaring is a quadratic a*w^2 + b*w + c0 = 0:
	 */
	const double kappa = prob.d_h / prob.d_z;
	const double V_cp = prob.U_c * std::sin(prob.psi_cd);
	const double V_ca = prob.U_c * std::cos(prob.psi_cd);
	const double P = c * u_r, R = -s * u_r;
	const double a = s * s - kappa * kappa * c * c;
	const double b = 2.0 * (P * s - kappa * kappa * R * c + kappa * V_ca * c);
	const double c0 = P * P - V_cp * V_cp - kappa * kappa * R * R + 2.0 * kappa * V_ca * R - V_ca * V_ca;

	std::array<double, 2> roots{};
	int n_roots = 0;
	if (std::abs(a) < 1e-14) {
		if (std::abs(b) > 1e-14) roots[n_roots++] = -c0 / b;
	} else {
		const double disc = b * b - 4.0 * a * c0;
		if (disc < 0) return std::nullopt;
		const double sq = std::sqrt(disc);
		// Numerically stable pair.
		const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
		roots[n_roots++] = q / a;
		if (std::abs(q) > 0) roots[n_roots++] = c0 / q;
	}

	std::optional<RootCandidate> best;
	for (int i = 0; i < n_roots; ++i) {
		double w = roots[i];
		if (!std::isfinite(w)) continue;
		// Two Newton polish steps on the unsquared residual to remove both the
		// squaring roundoff and any spurious-branch drift.
		for (int it = 0; it < 2; ++it) {
			const auto f = time_match_residual(w, u_r, theta, prob);
			if (!f) break;
			const double dwn = 1e-7;
			const auto f2 = time_match_residual(w + dwn, u_r, theta, prob);
			if (!f2) break;
			const double df = (*f2 - *f) / dwn;
			if (std::abs(df) < 1e-12) break;
			w -= *f / df;
		}
		if (w < w_lo || w > w_hi) continue;
		const auto U_h = speed_toward_los(u_r, w, theta, prob.U_c, prob.psi_cd);
		if (!U_h) continue;
		const double z_dot = -s * u_r + c * w;
		// Squaring admits the branch with kappa*z_dot - V_ca < 0; reject it,
		// along with any root whose residual did not actually close.
		if (kappa * z_dot - V_ca < -1e-9) continue;
		const double resid = prob.d_h * z_dot - prob.d_z * *U_h;
		const double scale = std::max(1.0, std::abs(prob.d_z) * *U_h);
		if (std::abs(resid) > 1e-8 * scale) continue;
		const double energy = approx_power(u_r, w, theta, p) * prob.d_h / *U_h;
		if (!best || energy < best->energy) best = RootCandidate{w, energy};
	}
	if (!best) return std::nullopt;
	return best->w;
}

namespace {

// Objective for the outer 2D search: energy with w_r eliminated.
double reduced_energy(double u, double theta, const SetpointProblem& prob,
                      const VehicleParams& p, double* w_out = nullptr) {
	const auto w = solve_vertical_rate(u, theta, prob, p);
	if (!w) return kInf;
	const auto E = energy_estimate(u, *w, theta, prob, p);
	if (!E) return kInf;
	if (w_out) *w_out = *w;
	return *E;
}

}  // namespace

SetpointSolution SetpointOptimizer::optimize(const SetpointProblem& prob) {
	const auto& bb = prob.bounds;
	double best_u = 0, best_th = 0, best_E = kInf;

	const int nu = std::max(2, cfg_.grid_u), nth = std::max(2, cfg_.grid_theta);
	for (int i = 0; i < nu; ++i) {
		const double u = bb.u_min + (bb.u_max - bb.u_min) * i / (nu - 1);
		for (int j = 0; j < nth; ++j) {
			const double th = -bb.theta_max + 2.0 * bb.theta_max * j / (nth - 1);
			const double E = reduced_energy(u, th, prob, params_);
			if (E < best_E) {
				best_E = E;
				best_u = u;
				best_th = th;
			}
		}
	}
	if (warm_) {
		const double E = reduced_energy((*warm_)(0), (*warm_)(1), prob, params_);
		if (E < best_E) {
			best_E = E;
			best_u = (*warm_)(0);
			best_th = (*warm_)(1);
		}
	}

	SetpointSolution sol;
	if (!std::isfinite(best_E)) return sol;  // infeasible; caller applies the fallback policy

	// Nelder-Mead polish, candidates clamped into the box.
	const double du = (bb.u_max - bb.u_min) / nu;
	const double dth = 2.0 * bb.theta_max / nth;
	auto eval = [&](Eigen::Vector2d x) {
		x(0) = clamp(x(0), bb.u_min, bb.u_max);
		x(1) = clamp(x(1), -bb.theta_max, bb.theta_max);
		return reduced_energy(x(0), x(1), prob, params_);
	};
	std::array<Eigen::Vector2d, 3> v = {Eigen::Vector2d(best_u, best_th),
	                                     Eigen::Vector2d(best_u + du, best_th),
	                                     Eigen::Vector2d(best_u, best_th + dth)};
	std::array<double, 3> f = {best_E, eval(v[1]), eval(v[2])};
	for (int it = 0; it < cfg_.nm_max_iter; ++it) {
		// Order ascending.
		std::array<int, 3> idx = {0, 1, 2};
		std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
		std::array<Eigen::Vector2d, 3> vs = {v[idx[0]], v[idx[1]], v[idx[2]]};
		std::array<double, 3> fs = {f[idx[0]], f[idx[1]], f[idx[2]]};
		v = vs;
		f = fs;
		const double size = std::max((v[1] - v[0]).norm(), (v[2] - v[0]).norm());
		const bool flat = std::isfinite(f[2]) && (f[2] - f[0]) <= cfg_.nm_tol * (1.0 + std::abs(f[0]));
		if (size < cfg_.nm_tol || flat) break;

		const Eigen::Vector2d centroid = 0.5 * (v[0] + v[1]);
		const Eigen::Vector2d refl = centroid + (centroid - v[2]);
		const double f_refl = eval(refl);
		if (f_refl < f[0]) {
			const Eigen::Vector2d expa = centroid + 2.0 * (centroid - v[2]);
			const double f_expa = eval(expa);
			if (f_expa < f_refl) {
				v[2] = expa;
				f[2] = f_expa;
			} else {
				v[2] = refl;
				f[2] = f_refl;
			}
		} else if (f_refl < f[1]) {
			v[2] = refl;
			f[2] = f_refl;
		} else {
			const Eigen::Vector2d contr = centroid + 0.5 * (v[2] - centroid);
			const double f_contr = eval(contr);
			if (f_contr < f[2]) {
				v[2] = contr;
				f[2] = f_contr;
			} else {
				for (int k = 1; k < 3; ++k) {
					v[k] = v[0] + 0.5 * (v[k] - v[0]);
					f[k] = eval(v[k]);
				}
			}
		}
	}
	for (int k = 0; k < 3; ++k) {
		if (f[k] < best_E) {
			best_E = f[k];
			best_u = clamp(v[k](0), bb.u_min, bb.u_max);
			best_th = clamp(v[k](1), -bb.theta_max, bb.theta_max);
		}
	}

	const auto w = solve_vertical_rate(best_u, best_th, prob, params_);
	if (!w) return sol;  // should not happen for a finite best_E, but stay safe
	const auto U_h = speed_toward_los(best_u, *w, best_th, prob.U_c, prob.psi_cd);
	if (!U_h) return sol;
	sol.feasible = true;
	sol.u_r = best_u;
	sol.w_r = *w;
	sol.theta = best_th;
	sol.energy = approx_power(best_u, *w, best_th, params_) * prob.d_h / *U_h;
	sol.time = prob.d_h / *U_h;
	warm_ = Eigen::Vector2d(best_u, best_th);
	return sol;
}

SetpointSolution SetpointOptimizer::optimize_surge_benchmark(const SetpointProblem& prob,
                                                             double theta_s) const {
	const auto& bb = prob.bounds;
	SetpointSolution sol;
	sol.theta = theta_s;

	auto energy_at = [&](double u) {
		const auto E = energy_estimate(u, 0.0, theta_s, prob, params_);
		return E ? *E : kInf;
	};

	// Coarse scan, then golden-section refinement in the bracketing interval.
	const int n = 256;
	double best_u = 0, best_E = kInf;
	int best_i = -1;
	for (int i = 0; i < n; ++i) {
		const double u = bb.u_min + (bb.u_max - bb.u_min) * i / (n - 1);
		const double E = energy_at(u);
		if (E < best_E) {
			best_E = E;
			best_u = u;
			best_i = i;
		}
	}
	if (best_i < 0) return sol;

	double lo = bb.u_min + (bb.u_max - bb.u_min) * std::max(0, best_i - 1) / (n - 1);
	double hi = bb.u_min + (bb.u_max - bb.u_min) * std::min(n - 1, best_i + 1) / (n - 1);
	const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
	double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
	double f1 = energy_at(x1), f2 = energy_at(x2);
	while (hi - lo > 1e-7) {
		if (f1 < f2) {
			hi = x2;
			x2 = x1;
			f2 = f1;
			x1 = hi - gr * (hi - lo);
			f1 = energy_at(x1);
		} else {
			lo = x1;
			x1 = x2;
			f1 = f2;
			x2 = lo + gr * (hi - lo);
			f2 = energy_at(x2);
		}
	}
	const double u_ref = 0.5 * (lo + hi);
	if (energy_at(u_ref) < best_E) {
		best_u = u_ref;
		best_E = energy_at(u_ref);
	}
	if (!std::isfinite(best_E)) return sol;

	const auto U_h = speed_toward_los(best_u, 0.0, theta_s, prob.U_c, prob.psi_cd);
	sol.feasible = true;
	sol.u_r = best_u;
	sol.w_r = 0.0;
	sol.energy = best_E;
	sol.time = prob.d_h / *U_h;
	return sol;
}

}  // namespace auvsim
