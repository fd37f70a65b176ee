#pragma once

#include <optional>

#include <Eigen/Dense>

#include "auvsim/vehicle.hpp"

namespace auvsim {

struct SetpointBounds {
	double u_min = 0.05, u_max = 1.5;  // surge setpoint box [m/s]
	double w_max = 0.5;                // |heave setpoint| bound [m/s]
	double theta_max = M_PI / 4;       // pitch envelope [rad]
};

// One steady-state setpoint selection instance, built by the engine each
// control step from the guidance geometry.
struct SetpointProblem {
	double d_h = 0;     // horizontal distance to the target waypoint [m], > 0
	double d_z = 0;     // depth offset to the target (+ = must go down) [m]
	double U_c = 0;     // current speed [m/s]
	double psi_cd = 0;  // current direction minus LOS direction [rad]
	SetpointBounds bounds;
	double epsilon_z = 0.05;  // |d_z| below this treats the segment as level
};

struct SetpointSolution {
	double u_r = 0, w_r = 0, theta = 0;
	double energy = 0;  // predicted electrical energy to the waypoint [J]
	double time = 0;    // predicted time to the waypoint [s]
	bool feasible = false;
};

struct OptimizerConfig {
	SetpointBounds bounds;
	int grid_u = 40, grid_theta = 40;  // coarse scan resolution
	int nm_max_iter = 200;             // simplex polish budget
	double nm_tol = 1e-8;
	double epsilon_z = 0.05;
	int reopt_decimation = 1;          // re-optimize every k-th control step
};

/*
 * Steady-state thrusts that hold (u_r, w_r, theta) with zero angular rates:
 * the plant equilibrium
 *   T1 = T2 = ((W-B) sin th + X_u u_r) / 2
 *   T3, T4  = (Z_w w_r - (W-B) cos th) / 2 -/+ (z_b B - z_g W) sin th / (2 l_v)
 */
Eigen::Vector4d approx_thrusts(double u_r, double w_r, double theta, const VehicleParams& p);

// Electrical power at the steady thrusts above.
double approx_power(double u_r, double w_r, double theta, const VehicleParams& p);

// Horizontal speed made good toward the LOS position for relative velocity
// (u_r, w_r) at pitch theta against a current of speed U_c at angle psi_cd to
// the LOS direction. Empty when the current's perpendicular component cannot
// be cancelled or the result is not a strictly positive forward speed.
std::optional<double> speed_toward_los(double u_r, double w_r, double theta, double U_c,
                                       double psi_cd);

// Predicted energy to the waypoint: approx_power * d_h / U_h.
std::optional<double> energy_estimate(double u_r, double w_r, double theta,
                                      const SetpointProblem& prob, const VehicleParams& p);

// Heave-rate setpoint completing (u_r, theta) so horizontal and vertical
// arrival times match: d_h / U_h == d_z / z_dot with z_dot = -sin(th) u_r +
// cos(th) w_r. For a near-level target (|d_z| < epsilon_z) this is the
// level-flight rate w_r = tan(th) u_r. Empty when no in-bounds feasible root
// exists. When the constraint has two feasible roots the cheaper-energy one
// is returned.
std::optional<double> solve_vertical_rate(double u_r, double theta, const SetpointProblem& prob,
                                          const VehicleParams& p);

/*
 * Constrained setpoint selection. optimize() minimizes the energy estimate
 * over (u_r, theta) with w_r eliminated through solve_vertical_rate: a coarse
 * grid scan followed by a Nelder-Mead polish, warm-started from the previous
 * call. optimize_surge_benchmark() is the comparison controller's 1D surge
 * search at a fixed pitch command and w_r = 0.
 */
class SetpointOptimizer {
 public:
	SetpointOptimizer(const VehicleParams& params, const OptimizerConfig& cfg)
	    : params_(params), cfg_(cfg) {}

	SetpointSolution optimize(const SetpointProblem& prob);
	SetpointSolution optimize_surge_benchmark(const SetpointProblem& prob, double theta_s) const;

	void reset() { warm_.reset(); }

 private:
	VehicleParams params_;
	OptimizerConfig cfg_;
	std::optional<Eigen::Vector2d> warm_;  // previous (u_r, theta)
};

}  // namespace auvsim
