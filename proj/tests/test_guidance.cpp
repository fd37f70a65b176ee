#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "auvsim/angles.hpp"
#include "auvsim/errors.hpp"
#include "auvsim/guidance.hpp"
#include "oracles.hpp"

using namespace auvsim;

namespace {

Mission straight_mission() {
	Mission m;
	m.name = "straight";
	m.waypoints = {{0, 0, 0}, {3, 4, 0}};
	return m;
}

VehicleState moving_state(const Eigen::Vector3d& pos, const Eigen::Vector3d& att, double u,
                          double v = 0, double w = 0) {
	VehicleState s;
	s.pos = pos;
	s.att = att;
	s.nu_r << u, v, w, 0, 0, 0;
	return s;
}

const Vector6d kStill = Vector6d::Zero();

}  // namespace

TEST_CASE("angle wrapping") {
	CHECK(wrap_pi(M_PI) == doctest::Approx(M_PI).epsilon(1e-15));
	CHECK(wrap_pi(-M_PI) == doctest::Approx(M_PI).epsilon(1e-15));
	CHECK(wrap_pi(3 * M_PI) == doctest::Approx(M_PI).epsilon(1e-12));
	CHECK(wrap_pi(2 * M_PI) == doctest::Approx(0.0).epsilon(1e-12));
	CHECK(wrap_pi(-0.1) == doctest::Approx(-0.1).epsilon(1e-15));
	CHECK(wrap_pi(7.0) == doctest::Approx(7.0 - 2 * M_PI).epsilon(1e-12));
}

TEST_CASE("mission validation") {
	Mission m = straight_mission();
	CHECK_NOTHROW(m.validate());
	CHECK(m.path_length() == doctest::Approx(5.0).epsilon(1e-15));

	m.waypoints.resize(1);
	CHECK_THROWS_AS(m.validate(), ValidationError);

	m = straight_mission();
	m.switch_radius = 0;
	CHECK_THROWS_AS(m.validate(), ValidationError);

	m = straight_mission();
	m.lookahead_v = -1;
	CHECK_THROWS_AS(m.validate(), ValidationError);

	// Consecutive waypoints closer (horizontally) than the acceptance sphere
	// would make the switch fire instantly; rejected.
	m = straight_mission();
	m.waypoints = {{0, 0, 0}, {1.5, 0, 10}};
	CHECK_THROWS_AS(m.validate(), ValidationError);

	// Vertically stacked waypoints have no defined course either.
	m.waypoints = {{0, 0, 0}, {0, 0, 10}};
	CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("path segment geometry") {
	const PathSegment seg = PathSegment::between({0, 0, 0}, {10, 0, 10});
	CHECK(seg.gamma_h == doctest::Approx(0.0).epsilon(1e-15));
	CHECK(seg.gamma_v == doctest::Approx(-M_PI / 4).epsilon(1e-15));  // descending
	CHECK(seg.horizontal_length == doctest::Approx(10.0).epsilon(1e-15));

	const PathSegment up = PathSegment::between({0, 0, 7}, {0, 10, 4});
	CHECK(up.gamma_h == doctest::Approx(M_PI / 2).epsilon(1e-15));
	CHECK(up.gamma_v == doctest::Approx(std::atan2(3.0, 10.0)).epsilon(1e-15));  // ascending

	CHECK_THROWS_AS(PathSegment::between({1, 1, 0}, {1, 1, 5}), ValidationError);
}

TEST_CASE("cross-track and along-track coordinates") {
	const PathSegment seg = PathSegment::between({0, 0, 0}, {10, 0, 10});

	// Vehicle at (5, 0, 4) sits 5 m along, slightly above the descending path.
	CHECK(along_track({5, 0, 4}, seg) == doctest::Approx(5.0).epsilon(1e-15));
	CHECK(vertical_cross_track({5, 0, 4}, seg) ==
	      doctest::Approx(-std::sqrt(0.5)).epsilon(1e-12));
	CHECK(horizontal_cross_track({5, 0, 4}, seg) == doctest::Approx(0.0).epsilon(1e-15));

	// Starboard offset is positive; below-path offset is positive.
	const PathSegment north = PathSegment::between({0, 0, 5}, {10, 0, 5});
	CHECK(horizontal_cross_track({3, 2, 5}, north) == doctest::Approx(2.0).epsilon(1e-15));
	CHECK(horizontal_cross_track({3, -2, 5}, north) == doctest::Approx(-2.0).epsilon(1e-15));
	CHECK(vertical_cross_track({3, 0, 6}, north) == doctest::Approx(1.0).epsilon(1e-15));

	CHECK(line_distance_3d({0, 1, 0}, PathSegment::between({0, 0, 0}, {1, 0, 0})) ==
	      doctest::Approx(1.0).epsilon(1e-15));
	CHECK(line_distance_3d({5, 3, 4}, north) == doctest::Approx(std::hypot(3.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("drift angles and the degenerate-speed guard") {
	const VehicleState rest;
	CHECK_THROWS_AS(sideslip_angle(rest, kStill), DegenerateSpeedError);
	CHECK_THROWS_AS(attack_angle(rest, kStill), DegenerateSpeedError);
	CHECK(sideslip_or_zero(rest, kStill) == 0.0);
	CHECK(attack_or_zero(rest, kStill) == 0.0);

	VehicleState s = moving_state({0, 0, 0}, {0, 0, 0}, 1.0, 1.0, 0.0);
	CHECK(sideslip_angle(s, kStill) == doctest::Approx(M_PI / 4).epsilon(1e-15));
	CHECK(attack_angle(s, kStill) == doctest::Approx(0.0).epsilon(1e-15));

	s = moving_state({0, 0, 0}, {0, 0, 0}, 1.0, 0.0, 1.0);
	CHECK(attack_angle(s, kStill) == doctest::Approx(M_PI / 4).epsilon(1e-15));
	CHECK(sideslip_angle(s, kStill) == doctest::Approx(0.0).epsilon(1e-15));

	// The current contributes to the total velocity: a vehicle at rest in a
	// moving stream has well-defined drift angles.
	Vector6d nu_c = Vector6d::Zero();
	nu_c(0) = 0.5;
	CHECK_NOTHROW(sideslip_angle(rest, nu_c));
	CHECK(sideslip_angle(rest, nu_c) == doctest::Approx(0.0).epsilon(1e-15));

	// Sideslip references the course-plane speed: at pitch the forward
	// component is cos(theta)*u + sin(theta)*w.
	s = moving_state({0, 0, 0}, {0, 0.5, 0}, 1.0, 0.3, 0.2);
	const double fwd = std::cos(0.5) * 1.0 + std::sin(0.5) * 0.2;
	CHECK(sideslip_angle(s, kStill) == doctest::Approx(std::atan2(0.3, fwd)).epsilon(1e-13));
}

TEST_CASE("line-of-sight yaw law") {
	const PathSegment north = PathSegment::between({0, 0, 0}, {20, 0, 0});

	// On-path, aligned: steer the course.
	VehicleState s = moving_state({0, 0, 0}, {0, 0, 0}, 1.0);
	CHECK(los_yaw_setpoint(s, north, 2.0, kStill) == doctest::Approx(0.0).epsilon(1e-15));

	// Starboard offset 2 m with 2 m lookahead: 45 degrees back to port.
	s = moving_state({5, 2, 0}, {0, 0, 0}, 1.0);
	CHECK(los_yaw_setpoint(s, north, 2.0, kStill) == doctest::Approx(-M_PI / 4).epsilon(1e-12));

	// Sideslip is subtracted: crabbing flow from port shifts the command.
	s = moving_state({5, 0, 0}, {0, 0, 0}, 1.0, 0.2, 0.0);
	CHECK(los_yaw_setpoint(s, north, 2.0, kStill) ==
	      doctest::Approx(-std::atan2(0.2, 1.0)).epsilon(1e-12));

	// Result is wrapped.
	const PathSegment south = PathSegment::between({0, 0, 0}, {-20, 0, 0});
	s = moving_state({0, -3, 0}, {0, 0, M_PI}, 1.0);
	const double psi_s = los_yaw_setpoint(s, south, 2.0, kStill);
	CHECK(psi_s <= M_PI);
	CHECK(psi_s > -M_PI);
	CHECK(psi_s == doctest::Approx(wrap_pi(M_PI - std::atan(3.0 / 2.0))).epsilon(1e-12));
}

TEST_CASE("line-of-sight pitch law") {
	const PathSegment dive = PathSegment::between({0, 0, 0}, {10, 0, 10});
	const double theta_max = M_PI / 4;

	// On-path: command the path angle itself.
	VehicleState s = moving_state({5, 0, 5}, {0, -M_PI / 4, 0}, 1.0);
	CHECK(los_pitch_setpoint(s, dive, 2.0, kStill, theta_max) ==
	      doctest::Approx(-M_PI / 4).epsilon(1e-12));

	// Far below a level path: the unclamped command would exceed the envelope.
	const PathSegment level = PathSegment::between({0, 0, 0}, {20, 0, 0});
	s = moving_state({5, 0, 30}, {0, 0, 0}, 1.0);
	CHECK(los_pitch_setpoint(s, level, 2.0, kStill, theta_max) ==
	      doctest::Approx(theta_max).epsilon(1e-12));
	s = moving_state({5, 0, -30}, {0, 0, 0}, 1.0);
	CHECK(los_pitch_setpoint(s, level, 2.0, kStill, theta_max) ==
	      doctest::Approx(-theta_max).epsilon(1e-12));

	// Attack angle is added: heave motion tilts the command.
	s = moving_state({5, 0, 0}, {0, 0, 0}, 1.0, 0.0, 0.3);
	CHECK(los_pitch_setpoint(s, level, 2.0, kStill, theta_max) ==
	      doctest::Approx(std::atan2(0.3, 1.0)).epsilon(1e-12));
}

TEST_CASE("waypoint acceptance sphere is strict") {
	const Eigen::Vector3d wp(10, 0, 0);
	CHECK(waypoint_switch({8.5, 0, 0}, wp, 2.0));
	CHECK_FALSE(waypoint_switch({8.0, 0, 0}, wp, 2.0));  // exactly on the sphere
	CHECK_FALSE(waypoint_switch({7.9, 0, 0}, wp, 2.0));
	CHECK(waypoint_switch({10, 0, 1.99}, wp, 2.0));
	CHECK_FALSE(waypoint_switch({9, 1.5, 1.0}, wp, 2.0));  // 3D distance 2.06
}
