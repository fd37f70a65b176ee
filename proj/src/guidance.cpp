#include "auvsim/guidance.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "auvsim/angles.hpp"
#include "auvsim/errors.hpp"

namespace auvsim {

double Mission::path_length() const {
	double len = 0;
	for (size_t i = 1; i < waypoints.size(); ++i) len += (waypoints[i] - waypoints[i - 1]).norm();
	return len;
}

void Mission::validate() const {
	auto fail = [this](const std::string& msg) {
		throw ValidationError("mission '" + name + "': " + msg);
	};
	if (waypoints.size() < 2) fail("needs at least two waypoints");
	if (!(switch_radius > 0)) fail("switch radius must be positive");
	if (!(lookahead_h > 0) || !(lookahead_v > 0)) fail("lookahead distances must be positive");
	for (const auto& wp : waypoints)
		if (!wp.allFinite()) fail("waypoints must be finite");
	for (size_t i = 1; i < waypoints.size(); ++i) {
		const double sep = (waypoints[i].head<2>() - waypoints[i - 1].head<2>()).norm();
		if (!(sep > switch_radius)) {
			std::ostringstream os;
			os << "waypoints " << i - 1 << " and " << i << " are horizontally separated by " << sep
			   << " m; must exceed the switch radius (" << switch_radius << " m)";
			fail(os.str());
		}
	}
}

PathSegment PathSegment::between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
	PathSegment seg;
	seg.a = a;
	seg.b = b;
	const double dx = b(0) - a(0), dy = b(1) - a(1);
	seg.horizontal_length = std::hypot(dx, dy);
	if (seg.horizontal_length < 1e-9)
		throw ValidationError("path segment is vertical (no horizontal extent); guidance undefined");
	seg.gamma_h = std::atan2(dy, dx);
	seg.gamma_v = std::atan2(a(2) - b(2), seg.horizontal_length);
	return seg;
}

double horizontal_cross_track(const Eigen::Vector3d& pos, const PathSegment& seg) {
	return -(pos(0) - seg.a(0)) * std::sin(seg.gamma_h) + (pos(1) - seg.a(1)) * std::cos(seg.gamma_h);
}

double along_track(const Eigen::Vector3d& pos, const PathSegment& seg) {
	return (pos(0) - seg.a(0)) * std::cos(seg.gamma_h) + (pos(1) - seg.a(1)) * std::sin(seg.gamma_h);
}

double vertical_cross_track(const Eigen::Vector3d& pos, const PathSegment& seg) {
	const double rho = std::hypot(pos(0) - seg.a(0), pos(1) - seg.a(1));
	return rho * std::sin(seg.gamma_v) + (pos(2) - seg.a(2)) * std::cos(seg.gamma_v);
}

double line_distance_3d(const Eigen::Vector3d& pos, const PathSegment& seg) {
	const Eigen::Vector3d dir = (seg.b - seg.a).normalized();
	const Eigen::Vector3d rel = pos - seg.a;
	return (rel - rel.dot(dir) * dir).norm();
}

static Eigen::Vector3d total_velocity(const VehicleState& s, const Vector6d& nu_c) {
	return s.nu_r.head<3>() + nu_c.head<3>();
}

double sideslip_angle(const VehicleState& s, const Vector6d& nu_c) {
	const Eigen::Vector3d v = total_velocity(s, nu_c);
	const double cth = std::cos(s.att(1)), sth = std::sin(s.att(1));
	const double fwd = v(0) * cth + v(2) * sth;  // speed component along the course plane
	if (std::hypot(fwd, v(1)) < 1e-6)
		throw DegenerateSpeedError("sideslip angle undefined: total planar speed below 1e-6 m/s");
	return std::atan2(v(1), fwd);
}

double attack_angle(const VehicleState& s, const Vector6d& nu_c) {
	const Eigen::Vector3d v = total_velocity(s, nu_c);
	if (std::hypot(v(0), v(2)) < 1e-6)
		throw DegenerateSpeedError("attack angle undefined: total planar speed below 1e-6 m/s");
	return std::atan2(v(2), v(0));
}

static std::atomic<bool> g_warned_degenerate{false};

static double safe_drift_angle(double (*fn)(const VehicleState&, const Vector6d&),
                               const VehicleState& s, const Vector6d& nu_c) {
	try {
		return fn(s, nu_c);
	} catch (const DegenerateSpeedError&) {
		if (!g_warned_degenerate.exchange(true))
			std::fprintf(stderr, "warning: total speed near zero, treating drift angles as 0\n");
		return 0.0;
	}
}

double sideslip_or_zero(const VehicleState& s, const Vector6d& nu_c) {
	return safe_drift_angle(&sideslip_angle, s, nu_c);
}

double attack_or_zero(const VehicleState& s, const Vector6d& nu_c) {
	return safe_drift_angle(&attack_angle, s, nu_c);
}

double los_yaw_setpoint(const VehicleState& s, const PathSegment& seg, double lookahead_h,
                        const Vector6d& nu_c) {
	const double y_e = horizontal_cross_track(s.pos, seg);
	return wrap_pi(seg.gamma_h - std::atan(y_e / lookahead_h) - sideslip_or_zero(s, nu_c));
}

double los_pitch_setpoint(const VehicleState& s, const PathSegment& seg, double lookahead_v,
                          const Vector6d& nu_c, double theta_max) {
	const double z_e = vertical_cross_track(s.pos, seg);
	const double alpha_a = attack_or_zero(s, nu_c);
	const double theta = wrap_pi(seg.gamma_v + std::atan(z_e / lookahead_v) + alpha_a);
	return clamp(theta, -theta_max, theta_max);
}

bool waypoint_switch(const Eigen::Vector3d& pos, const Eigen::Vector3d& wp, double radius) {
	return (pos - wp).norm() < radius;
}

}  // namespace auvsim
