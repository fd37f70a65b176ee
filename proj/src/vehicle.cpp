#include "auvsim/vehicle.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "auvsim/errors.hpp"

namespace auvsim {

void VehicleParams::validate(bool require_positive_buoyancy) const {
	auto fail = [](const std::string& msg) { throw ValidationError("vehicle params: " + msg); };
	if (!(mass > 0)) fail("mass must be positive");
	if (!(I_yy > 0) || !(I_zz > 0)) fail("rigid-body inertias must be positive");
	if (!(surge_inertia() > 0) || !(heave_inertia() > 0)) fail("effective linear inertia must be positive");
	if (!(pitch_inertia() > 0) || !(yaw_inertia() > 0)) fail("effective angular inertia must be positive");
	if (!(X_u > 0 && Y_v > 0 && Z_w > 0 && K_p > 0 && M_q > 0 && N_r > 0))
		fail("all damping coefficients must be positive");
	if (!(W > 0) || !(B > 0)) fail("weight and buoyancy must be positive");
	if (require_positive_buoyancy && !(B > W)) fail("buoyancy must exceed weight");
	if (require_positive_buoyancy ? !(z_g * W - z_b * B > 0) : (z_g * W - z_b * B < 0))
		fail("restoring arm must keep the CG below the CB (z_g*W - z_b*B >= 0)");
	if (!(l_v > 0) || !(l_h > 0)) fail("moment arms must be positive");
	if (!(alpha > 0)) fail("power coefficient must be positive");
	if (!(T_min < 0 && 0 < T_max)) fail("thrust box must contain zero (T_min < 0 < T_max)");
}

VehicleParams default_vehicle_params() {
	VehicleParams p;
	p.mass = 30.0;
	p.X_udot = -15.2;  // spherical hull: isotropic added mass
	p.Z_wdot = -15.2;
	p.M_qdot = -0.30;
	p.N_rdot = -0.30;
	p.X_u = 5.0;
	p.Y_v = 20.0;
	p.Z_w = 5.5;
	p.K_p = 0.5;
	p.M_q = 1.5;
	p.N_r = 1.5;
	p.W = 294.3;
	p.B = 298.3;
	p.z_g = 0.005;
	p.z_b = -0.005;
	p.l_v = 0.15;
	p.l_h = 0.20;
	p.I_yy = 0.9;
	p.I_zz = 0.9;
	p.alpha = 50.0;
	p.T_min = -10.0;
	p.T_max = 10.0;
	return p;
}

VehicleParams load_vehicle_params(const std::string& path) {
	std::ifstream in(path);
	if (!in) throw ValidationError("cannot open vehicle parameter file: " + path);
	nlohmann::json j;
	try {
		in >> j;
	} catch (const nlohmann::json::exception& e) {
		throw ValidationError("vehicle parameter file " + path + ": " + e.what());
	}
	if (!j.is_object()) throw ValidationError("vehicle parameter file must be a JSON object: " + path);

	VehicleParams p;
	struct Field {
		const char* key;
		double* dst;
	};
	const Field fields[] = {
	    {"mass", &p.mass},     {"X_udot", &p.X_udot}, {"Z_wdot", &p.Z_wdot}, {"M_qdot", &p.M_qdot},
	    {"N_rdot", &p.N_rdot}, {"X_u", &p.X_u},       {"Y_v", &p.Y_v},       {"Z_w", &p.Z_w},
	    {"K_p", &p.K_p},       {"M_q", &p.M_q},       {"N_r", &p.N_r},       {"W", &p.W},
	    {"B", &p.B},           {"z_g", &p.z_g},       {"z_b", &p.z_b},       {"l_v", &p.l_v},
	    {"l_h", &p.l_h},       {"I_yy", &p.I_yy},     {"I_zz", &p.I_zz},     {"alpha", &p.alpha},
	    {"T_min", &p.T_min},   {"T_max", &p.T_max},
	};
	for (const auto& f : fields) {
		auto it = j.find(f.key);
		if (it == j.end())
			throw ValidationError("vehicle parameter file " + path + ": missing key '" + f.key + "'");
		if (!it->is_number())
			throw ValidationError("vehicle parameter file " + path + ": key '" + f.key + "' must be a number");
		*f.dst = it->get<double>();
	}
	for (auto it = j.begin(); it != j.end(); ++it) {
		bool known = false;
		for (const auto& f : fields) known = known || (it.key() == f.key);
		if (!known) throw ValidationError("vehicle parameter file " + path + ": unknown key '" + it.key() + "'");
	}
	p.validate(true);
	return p;
}

Eigen::Matrix3d attitude_rotation(const Eigen::Vector3d& att) {
	const double cphi = std::cos(att(0)), sphi = std::sin(att(0));
	const double cth = std::cos(att(1)), sth = std::sin(att(1));
	const double cpsi = std::cos(att(2)), spsi = std::sin(att(2));
	Eigen::Matrix3d R;
	R << cpsi * cth, -spsi * cphi + cpsi * sth * sphi, spsi * sphi + cpsi * cphi * sth,
	    spsi * cth, cpsi * cphi + sphi * sth * spsi, -cpsi * sphi + sth * spsi * cphi,
	    -sth, cth * sphi, cth * cphi;
	return R;
}

static void check_pitch(double theta) {
	if (std::abs(theta) >= M_PI / 2 - 1e-6) {
		std::ostringstream os;
		os << "pitch angle " << theta << " rad too close to +/-pi/2 (kinematic singularity)";
		throw SingularityError(os.str());
	}
}

Eigen::Matrix3d euler_rate_transform(const Eigen::Vector3d& att) {
	check_pitch(att(1));
	const double cphi = std::cos(att(0)), sphi = std::sin(att(0));
	const double cth = std::cos(att(1)), tth = std::tan(att(1));
	Eigen::Matrix3d T;
	T << 1, sphi * tth, cphi * tth,
	    0, cphi, -sphi,
	    0, sphi / cth, cphi / cth;
	return T;
}

Matrix6d body_to_earth_transform(const Eigen::Vector3d& att) {
	Matrix6d J = Matrix6d::Zero();
	J.topLeftCorner<3, 3>() = attitude_rotation(att);
	J.bottomRightCorner<3, 3>() = euler_rate_transform(att);
	return J;
}

Vector6d current_in_body(const Eigen::Vector3d& att, const CurrentField& current) {
	Vector6d nu_c = Vector6d::Zero();
	nu_c.head<3>() = attitude_rotation(att).transpose() * Eigen::Vector3d(current.vx, current.vy, 0.0);
	return nu_c;
}

Vector6d thrusts_to_tau(const Eigen::Vector4d& T, const VehicleParams& p) {
	Vector6d tau = Vector6d::Zero();
	tau(0) = T(0) + T(1);
	tau(2) = T(2) + T(3);
	tau(4) = (T(2) - T(3)) * p.l_v;
	tau(5) = (T(0) - T(1)) * p.l_h;
	return tau;
}

double total_power(const Eigen::Vector4d& T, double alpha) {
	return alpha * T.squaredNorm();
}

PowerSplit power_decompose(const Eigen::Vector4d& T, double alpha) {
	// alpha*(T_a^2 + T_b^2) = 2*alpha*((T_a+T_b)/2)^2 + 2*alpha*((T_a-T_b)/2)^2
	auto mode = [alpha](double a, double b) {
		const double c = 0.5 * (a + b), d = 0.5 * (a - b);
		return std::pair<double, double>(2 * alpha * c * c, 2 * alpha * d * d);
	};
	PowerSplit s;
	std::tie(s.surge, s.yaw) = mode(T(0), T(1));
	std::tie(s.heave, s.pitch) = mode(T(2), T(3));
	return s;
}

StateDerivative dynamics_derivative(const VehicleState& s, const Eigen::Vector4d& T,
                                    const VehicleParams& p, const CurrentField& current) {
	check_pitch(s.att(1));
	const double u = s.nu_r(0), v = s.nu_r(1), w = s.nu_r(2);
	const double pp = s.nu_r(3), q = s.nu_r(4), r = s.nu_r(5);
	const double cphi = std::cos(s.att(0)), sphi = std::sin(s.att(0));
	const double cth = std::cos(s.att(1)), sth = std::sin(s.att(1));

	// Positive added-mass magnitudes (stored derivatives are SNAME-negative).
	const double a1 = -p.X_udot, a3 = -p.Z_wdot, a5 = -p.M_qdot, a6 = -p.N_rdot;
	const double Ixx = p.I_yy;  // spherical hull, roll is unactuated

	const Vector6d tau = thrusts_to_tau(T, p);
	const double dW = p.W - p.B;       // negative when positively buoyant
	const double arm = p.restoring_arm();  // z_b*B - z_g*W, negative when stable

	// Hydrostatic force/moment on the right-hand side.
	Vector6d h;
	h << -dW * sth,
	    dW * cth * sphi,
	    dW * cth * cphi,
	    arm * cth * sphi,
	    arm * sth,
	    0.0;

	// Skew-symmetric rigid-body + added-mass Coriolis contributions (RHS). The
	// pitch Munk moment (a1-a3)*u*w vanishes for the isotropic default hull.
	Vector6d cor;
	cor << -(p.mass + a3) * w * q + p.mass * v * r,
	    -(p.mass + a1) * r * u + (p.mass + a3) * pp * w,
	    -p.mass * pp * v + (p.mass + a1) * q * u,
	    -(p.I_zz - p.I_yy) * q * r - a3 * v * w - (a6 - a5) * q * r,
	    -(Ixx - p.I_zz) * pp * r - (a1 - a3) * u * w + a6 * pp * r,
	    -(p.I_yy - Ixx) * pp * q + a1 * u * v - a5 * pp * q;

	Vector6d damp;
	damp << p.X_u * u, p.Y_v * v, p.Z_w * w, p.K_p * pp, p.M_q * q, p.N_r * r;

	const Vector6d force = tau + h + cor - damp;

	StateDerivative d;
	d.nu_r_dot(0) = force(0) / p.surge_inertia();
	d.nu_r_dot(1) = force(1) / p.mass;
	d.nu_r_dot(2) = force(2) / p.heave_inertia();
	d.nu_r_dot(3) = force(3) / Ixx;
	d.nu_r_dot(4) = force(4) / p.pitch_inertia();
	d.nu_r_dot(5) = force(5) / p.yaw_inertia();

	d.pos_dot = attitude_rotation(s.att) * s.nu_r.head<3>() + Eigen::Vector3d(current.vx, current.vy, 0.0);
	d.att_dot = euler_rate_transform(s.att) * s.nu_r.tail<3>();
	return d;
}

}  // namespace auvsim
