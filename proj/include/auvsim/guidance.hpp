#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "auvsim/vehicle.hpp"

namespace auvsim {

/*
 * Waypoint list plus the guidance constants tied to it. The first waypoint is
 * the nominal start pose; segment i runs from waypoints[i-1] to waypoints[i].
 */
struct Mission {
	std::string name;
	std::vector<Eigen::Vector3d> waypoints;
	double switch_radius = 2.0;   // 3D acceptance sphere [m]
	double lookahead_h = 2.0;     // horizontal LOS lookahead [m]
	double lookahead_v = 2.0;     // vertical LOS lookahead [m]

	double path_length() const;   // 3D polyline length
	void validate() const;        // throws ValidationError
};

// One directed path segment with its precomputed horizontal/vertical path
// angles. Vertical angle is positive for an ascending (z-decreasing) segment.
struct PathSegment {
	Eigen::Vector3d a, b;
	double gamma_h = 0;           // atan2(dy, dx)
	double gamma_v = 0;           // atan2(z_a - z_b, horizontal_length)
	double horizontal_length = 0;

	static PathSegment between(const Eigen::Vector3d& a, const Eigen::Vector3d& b);
};

// Signed horizontal cross-track error: positive when the vehicle is to
// starboard of the segment direction.
double horizontal_cross_track(const Eigen::Vector3d& pos, const PathSegment& seg);

// Horizontal along-track coordinate of the vehicle's projection, from seg.a.
double along_track(const Eigen::Vector3d& pos, const PathSegment& seg);

// Signed vertical cross-track error: positive when the vehicle is below the
// path (NED z too large).
double vertical_cross_track(const Eigen::Vector3d& pos, const PathSegment& seg);

// 3D distance from a point to the infinite line carrying the segment.
double line_distance_3d(const Eigen::Vector3d& pos, const PathSegment& seg);

// Drift angles from the total (relative + current) body velocity. Both throw
// DegenerateSpeedError when their reference speed is below 1e-6 m/s.
double sideslip_angle(const VehicleState& s, const Vector6d& nu_c);
double attack_angle(const VehicleState& s, const Vector6d& nu_c);

// Non-throwing variants: a degenerate speed is treated as zero drift, with a
// one-time process-wide stderr warning. The LOS laws below use these.
double sideslip_or_zero(const VehicleState& s, const Vector6d& nu_c);
double attack_or_zero(const VehicleState& s, const Vector6d& nu_c);

// Horizontal line-of-sight heading command with drift compensation:
//   psi_s = gamma_h - atan(y_e / lookahead) - beta
// A degenerate sideslip (vehicle at rest in still water) is treated as
// beta = 0 with a one-time warning.
double los_yaw_setpoint(const VehicleState& s, const PathSegment& seg, double lookahead_h,
                        const Vector6d& nu_c);

// Vertical line-of-sight pitch command, clamped to [-theta_max, theta_max]:
//   theta_s = gamma_v + atan(z_e / lookahead) + alpha_attack
double los_pitch_setpoint(const VehicleState& s, const PathSegment& seg, double lookahead_v,
                          const Vector6d& nu_c, double theta_max);

// True when pos is strictly inside the 3D acceptance sphere of the waypoint.
bool waypoint_switch(const Eigen::Vector3d& pos, const Eigen::Vector3d& wp, double radius);

}  // namespace auvsim
