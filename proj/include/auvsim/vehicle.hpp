#pragma once

#include <Eigen/Dense>
#include <string>

namespace auvsim {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/*
 * Rigid-body model of a small positively buoyant AUV with four fixed thrusters:
 * two horizontal (surge force + yaw moment) and two vertical (heave force +
 * pitch moment). NED frame, z positive down, Z-Y-X Euler angles. The inertia
 * and damping matrices are diagonal; sway carries no added mass (the surge
 * Coriolis coupling is exactly m*v_r*r) and roll reuses I_yy since the hull is
 * modeled as a sphere. Equations of motion in relative (through-water)
 * velocity nu_r:
 *
 *   eta_dot = J(eta) * nu_r + V_current
 *   M * nu_r_dot = tau(T) - C(nu_r)*nu_r - D*nu_r - g(eta)
 */
struct VehicleParams {
	double mass = 0;                       // dry mass [kg]
	double X_udot = 0, Z_wdot = 0;         // added mass, SNAME sign (negative) [kg]
	double M_qdot = 0, N_rdot = 0;         // added rotational inertia, SNAME sign [kg m^2]
	double X_u = 0, Y_v = 0, Z_w = 0;      // linear drag [N s/m]
	double K_p = 0, M_q = 0, N_r = 0;      // linear angular drag [N m s]
	double W = 0, B = 0;                   // weight, buoyancy [N]; B > W floats up
	double z_g = 0, z_b = 0;               // CG/CB vertical offsets, +down [m]
	double l_v = 0, l_h = 0;               // vertical-pair pitch arm, horizontal-pair yaw arm [m]
	double I_yy = 0, I_zz = 0;             // rigid-body inertia [kg m^2]
	double alpha = 0;                      // electrical power coefficient [W/N^2]
	double T_min = 0, T_max = 0;           // per-thruster force box [N]

	double surge_inertia() const { return mass - X_udot; }
	double heave_inertia() const { return mass - Z_wdot; }
	double pitch_inertia() const { return I_yy - M_qdot; }
	double yaw_inertia() const { return I_zz - N_rdot; }
	// Pitch/roll restoring coefficient; negative when the vehicle is bottom-heavy (stable).
	double restoring_arm() const { return z_b * B - z_g * W; }

	// Throws ValidationError. Parameter files must be positively buoyant;
	// in-code neutral vehicles (W == B) are allowed for equilibrium studies.
	void validate(bool require_positive_buoyancy = true) const;
};

// Built-in defaults: 30 kg spherical vehicle, 4 N buoyancy margin, +/-10 N
// thrusters. Identical to params/default_vehicle.json (enforced by a test).
VehicleParams default_vehicle_params();

// Strict loader: flat JSON object, exactly the VehicleParams keys, no extras.
VehicleParams load_vehicle_params(const std::string& path);

struct VehicleState {
	Eigen::Vector3d pos = Eigen::Vector3d::Zero();  // x, y, z (NED)
	Eigen::Vector3d att = Eigen::Vector3d::Zero();  // phi, theta, psi wrapped to (-pi, pi]
	Vector6d nu_r = Vector6d::Zero();               // u_r, v_r, w_r, p, q, r

	double u_r() const { return nu_r(0); }
	double v_r() const { return nu_r(1); }
	double w_r() const { return nu_r(2); }
};

struct CurrentField {
	double vx = 0, vy = 0;  // constant earth-frame components [m/s]

	double speed() const { return std::hypot(vx, vy); }
	double heading() const { return std::atan2(vy, vx); }
};

// Body->earth rotation R(phi, theta, psi), Z-Y-X convention.
Eigen::Matrix3d attitude_rotation(const Eigen::Vector3d& att);

// Euler angle rate transform T(phi, theta). Throws SingularityError when
// |theta| >= pi/2 - 1e-6.
Eigen::Matrix3d euler_rate_transform(const Eigen::Vector3d& att);

// blkdiag(R, T): maps body velocity to earth-frame pose rates.
Matrix6d body_to_earth_transform(const Eigen::Vector3d& att);

// Current velocity expressed in the body frame (linear part R^T * [vx vy 0],
// angular part zero for an irrotational current).
Vector6d current_in_body(const Eigen::Vector3d& att, const CurrentField& current);

// Generalized force from the four thrusters:
//   tau = [T1+T2, 0, T3+T4, 0, (T3-T4)*l_v, (T1-T2)*l_h]
Vector6d thrusts_to_tau(const Eigen::Vector4d& T, const VehicleParams& p);

// Electrical power drawn by one thruster producing force T.
inline double thrust_power(double T, double alpha) { return alpha * T * T; }

// Sum of h_p over all four thrusters.
double total_power(const Eigen::Vector4d& T, double alpha);

// Instantaneous power split into the four actuated efforts via the
// common/differential mode decomposition of each thruster pair. The parts sum
// exactly to total_power.
struct PowerSplit {
	double surge = 0, yaw = 0, heave = 0, pitch = 0;
	double total() const { return surge + yaw + heave + pitch; }
};
PowerSplit power_decompose(const Eigen::Vector4d& T, double alpha);

struct StateDerivative {
	Eigen::Vector3d pos_dot;
	Eigen::Vector3d att_dot;
	Vector6d nu_r_dot;
};

// Right-hand side of the twelve-state plant. Throws SingularityError near
// |theta| = pi/2.
StateDerivative dynamics_derivative(const VehicleState& s, const Eigen::Vector4d& T,
                                    const VehicleParams& p, const CurrentField& current);

}  // namespace auvsim
