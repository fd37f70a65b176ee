#pragma once

#include <Eigen/Dense>

#include "auvsim/qp.hpp"
#include "auvsim/vehicle.hpp"

namespace auvsim {

struct MpcConfig {
	int horizon = 10;        // prediction steps N
	double dt = 0.1;         // model/control period [s]
	double lambda_h = 50.0;  // surge-velocity tracking weight (horizontal plane)
	double lambda_v = 50.0;  // heave-velocity tracking weight (vertical plane)
	double rate_weight = 0.02;  // input-rate regularization weight
	double qp_tolerance = 1e-8;
	int qp_max_iter = 4000;

	void validate() const;  // throws ValidationError
};

/*
 * Discrete affine prediction model x_{k+1} = A x_k + B u_k + c for one control
 * plane (3 states, 2 thruster inputs), plus its condensed form over N steps:
 *   X = Sx x0 + Su U + Sc,  X = [x_1; ...; x_N],  U = [u_0; ...; u_{N-1}].
 */
struct LinearPredictionModel {
	Eigen::Matrix3d A;
	Eigen::Matrix<double, 3, 2> B;
	Eigen::Vector3d c;
	int N = 0;
	Eigen::MatrixXd Sx;  // 3N x 3
	Eigen::MatrixXd Su;  // 3N x 2N
	Eigen::VectorXd Sc;  // 3N

	// Step-by-step rollout; equals the condensed map (used as an invariant).
	Eigen::VectorXd rollout(const Eigen::Vector3d& x0, const Eigen::VectorXd& U) const;
};

// Condense (A, B, c) over N steps.
LinearPredictionModel condense(const Eigen::Matrix3d& A, const Eigen::Matrix<double, 3, 2>& B,
                               const Eigen::Vector3d& c, int N);

// Horizontal plane: states (u_r, r, psi), inputs (T1, T2). Surge couples to
// the measured sway velocity and pitch (both frozen over the horizon), yaw
// integrates r / cos(theta0). Exactly linear for fixed (theta0, v_r0).
LinearPredictionModel build_horizontal_model(const VehicleParams& p, double theta0, double v_r0,
                                             const MpcConfig& cfg);

// Vertical plane: states (w_r, q, theta), inputs (T3, T4). The hydrostatic
// and restoring terms are linearized about the measured theta0 each call
// (successive linearization).
LinearPredictionModel build_vertical_model(const VehicleParams& p, double theta0,
                                           const MpcConfig& cfg);

struct MpcSolution {
	Eigen::Vector2d thrusts;      // first input pair, applied to the plant
	Eigen::VectorXd inputs;       // full 2N plan
	Eigen::VectorXd predicted;    // 3N predicted states
	double cost = 0;              // tracking cost of the predicted trajectory
	int qp_iterations = 0;
	double kkt_residual = 0;
};

/*
 * One receding-horizon tracker. The horizontal instance drives (u_r, psi) to
 * (u_rs, psi_s) with the yaw reference pre-wrapped to within pi of the current
 * heading; the vertical instance drives (w_r, theta) to (w_rs, theta_s).
 * Box-constrained thrusts; the previous plan (shifted by one step) warm-starts
 * the QP.
 */
class MpcController {
 public:
	enum class Plane { horizontal, vertical };

	MpcController(Plane plane, const VehicleParams& params, const MpcConfig& cfg);

	MpcSolution solve(const VehicleState& state, double velocity_setpoint, double angle_setpoint);

	void reset();

 private:
	Plane plane_;
	VehicleParams params_;
	MpcConfig cfg_;
	Eigen::VectorXd warm_;
	Eigen::Vector2d prev_applied_;  // rate-penalty anchor: last thrust pair sent to the plant
};

}  // namespace auvsim
