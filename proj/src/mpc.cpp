#include "auvsim/mpc.hpp"

#include <cmath>

#include "auvsim/angles.hpp"
#include "auvsim/errors.hpp"

namespace auvsim {

void MpcConfig::validate() const {
	auto fail = [](const std::string& msg) { throw ValidationError("mpc config: " + msg); };
	if (horizon < 1) fail("horizon must be at least 1");
	if (!(dt > 0)) fail("dt must be positive");
	if (!(lambda_h > 1) || !(lambda_v > 1)) fail("velocity weights must exceed 1");
	if (rate_weight < 0) fail("rate weight must be non-negative");
	if (!(qp_tolerance > 0)) fail("qp tolerance must be positive");
	if (qp_max_iter < 1) fail("qp iteration budget must be positive");
}

Eigen::VectorXd LinearPredictionModel::rollout(const Eigen::Vector3d& x0,
                                               const Eigen::VectorXd& U) const {
	Eigen::VectorXd X(3 * N);
	Eigen::Vector3d x = x0;
	for (int k = 0; k < N; ++k) {
		x = A * x + B * U.segment<2>(2 * k) + c;
		X.segment<3>(3 * k) = x;
	}
	return X;
}

LinearPredictionModel condense(const Eigen::Matrix3d& A, const Eigen::Matrix<double, 3, 2>& B,
                               const Eigen::Vector3d& c, int N) {
	LinearPredictionModel m;
	m.A = A;
	m.B = B;
	m.c = c;
	m.N = N;
	m.Sx.resize(3 * N, 3);
	m.Su = Eigen::MatrixXd::Zero(3 * N, 2 * N);
	m.Sc.resize(3 * N);

	Eigen::Matrix3d Ak = Eigen::Matrix3d::Identity();  // A^k
	Eigen::Vector3d acc = Eigen::Vector3d::Zero();     // sum_{i<k} A^i c
	for (int k = 0; k < N; ++k) {
		acc = A * acc + c;                  // = sum_{i=0..k} A^i c after update with A^0 c first
		Ak = A * Ak;                        // A^{k+1}
		m.Sx.middleRows<3>(3 * k) = Ak;
		m.Sc.segment<3>(3 * k) = acc;
		// Row block k (predicting x_{k+1}): inputs u_0..u_k with weights A^{k-j} B.
		Eigen::Matrix3d Apow = Eigen::Matrix3d::Identity();
		for (int j = k; j >= 0; --j) {
			m.Su.block<3, 2>(3 * k, 2 * j) = Apow * B;
			Apow = A * Apow;
		}
	}
	return m;
}

LinearPredictionModel build_horizontal_model(const VehicleParams& p, double theta0, double v_r0,
                                             const MpcConfig& cfg) {
	const double c0 = std::cos(theta0);
	if (std::abs(theta0) >= M_PI / 2 - 1e-6)
		throw SingularityError("horizontal prediction model undefined at |theta| ~ pi/2");
	const double m1 = p.surge_inertia(), I1 = p.yaw_inertia(), dt = cfg.dt;

	Eigen::Matrix3d A;
	A << 1.0 - dt * p.X_u / m1, dt * p.mass * v_r0 / m1, 0.0,
	    0.0, 1.0 - dt * p.N_r / I1, 0.0,
	    0.0, dt / c0, 1.0;
	Eigen::Matrix<double, 3, 2> B;
	B << dt / m1, dt / m1,
	    dt * p.l_h / I1, -dt * p.l_h / I1,
	    0.0, 0.0;
	Eigen::Vector3d c(-dt * (p.W - p.B) * std::sin(theta0) / m1, 0.0, 0.0);
	return condense(A, B, c, cfg.horizon);
}

LinearPredictionModel build_vertical_model(const VehicleParams& p, double theta0,
                                           const MpcConfig& cfg) {
	const double s0 = std::sin(theta0), c0 = std::cos(theta0);
	const double m3 = p.heave_inertia(), I2 = p.pitch_inertia(), dt = cfg.dt;
	const double dW = p.W - p.B;
	const double arm = p.restoring_arm();

	// First-order expansions about theta0:
	//   cos(th) ~ (c0 + s0*theta0) - s0*th,  sin(th) ~ (s0 - c0*theta0) + c0*th
	Eigen::Matrix3d A;
	A << 1.0 - dt * p.Z_w / m3, 0.0, -dt * dW * s0 / m3,
	    0.0, 1.0 - dt * p.M_q / I2, dt * arm * c0 / I2,
	    0.0, dt, 1.0;
	Eigen::Matrix<double, 3, 2> B;
	B << dt / m3, dt / m3,
	    dt * p.l_v / I2, -dt * p.l_v / I2,  // pitch moment (T3 - T4) * l_v
	    0.0, 0.0;
	Eigen::Vector3d c(dt * dW * (c0 + s0 * theta0) / m3, dt * arm * (s0 - c0 * theta0) / I2, 0.0);
	return condense(A, B, c, cfg.horizon);
}

MpcController::MpcController(Plane plane, const VehicleParams& params, const MpcConfig& cfg)
    : plane_(plane), params_(params), cfg_(cfg) {
	cfg_.validate();
	reset();
}

void MpcController::reset() {
	warm_ = Eigen::VectorXd::Zero(2 * cfg_.horizon);
	prev_applied_.setZero();
}

MpcSolution MpcController::solve(const VehicleState& state, double velocity_setpoint,
                                 double angle_setpoint) {
	const int N = cfg_.horizon;
	const bool horizontal = plane_ == Plane::horizontal;
	const double theta0 = state.att(1);

	LinearPredictionModel model =
	    horizontal ? build_horizontal_model(params_, theta0, state.v_r(), cfg_)
	               : build_vertical_model(params_, theta0, cfg_);

	Eigen::Vector3d x0;
	double angle_ref;
	if (horizontal) {
		const double psi0 = state.att(2);
		x0 << state.u_r(), state.nu_r(5), psi0;
		angle_ref = psi0 + wrap_pi(angle_setpoint - psi0);  // nearest equivalent heading
	} else {
		x0 << state.w_r(), state.nu_r(4), theta0;
		angle_ref = angle_setpoint;
	}
	const double lambda = horizontal ? cfg_.lambda_h : cfg_.lambda_v;

	// Tracking cost sum_k lambda*(vel_k - vel_s)^2 + (ang_k - ang_s)^2 in
	// condensed form over U.
	Eigen::VectorXd qdiag(3 * N), ref(3 * N);
	for (int k = 0; k < N; ++k) {
		qdiag.segment<3>(3 * k) = Eigen::Vector3d(lambda, 0.0, 1.0);
		ref.segment<3>(3 * k) = Eigen::Vector3d(velocity_setpoint, 0.0, angle_ref);
	}
	const Eigen::MatrixXd SuQ = model.Su.transpose() * qdiag.asDiagonal();
	Eigen::MatrixXd H = SuQ * model.Su;
	const Eigen::VectorXd offset = model.Sx * x0 + model.Sc - ref;
	Eigen::VectorXd g = SuQ * offset;

	// Input-rate regularization rho * sum_k ||u_k - u_{k-1}||^2 anchored at the
	// last applied pair. The bare tracking Hessian is singular along input
	// directions that never reach a costed state, which lets the warm start
	// accumulate junk and the thrusters chatter; the first-difference penalty
	// makes the QP strictly convex without biasing any steady state.
	const double rho = cfg_.rate_weight;
	if (rho > 0) {
		for (int k = 0; k < N; ++k) {
			const int i = 2 * k;
			const double d = (k + 1 < N) ? 2.0 * rho : rho;
			H(i, i) += d;
			H(i + 1, i + 1) += d;
			if (k + 1 < N) {
				H(i, i + 2) -= rho;
				H(i + 2, i) -= rho;
				H(i + 1, i + 3) -= rho;
				H(i + 3, i + 1) -= rho;
			}
		}
		g.head<2>() -= rho * prev_applied_;
	}

	const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2 * N, params_.T_min);
	const Eigen::VectorXd hi = Eigen::VectorXd::Constant(2 * N, params_.T_max);
	const QpResult qp = qp_solve(H, g, lo, hi, warm_, cfg_.qp_tolerance, cfg_.qp_max_iter);

	// Shift the plan one step for the next call.
	warm_.head(2 * (N - 1)) = qp.x.tail(2 * (N - 1));
	warm_.tail(2) = qp.x.tail(2);

	MpcSolution sol;
	sol.thrusts = qp.x.head<2>();
	prev_applied_ = sol.thrusts;
	sol.inputs = qp.x;
	sol.predicted = model.rollout(x0, qp.x);
	sol.qp_iterations = qp.iterations;
	sol.kkt_residual = qp.kkt_residual;
	sol.cost = 0;
	for (int k = 0; k < N; ++k) {
		const double ev = sol.predicted(3 * k) - velocity_setpoint;
		const double ea = sol.predicted(3 * k + 2) - angle_ref;
		sol.cost += lambda * ev * ev + ea * ea;
	}
	return sol;
}

}  // namespace auvsim
