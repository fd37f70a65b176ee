#pragma once

#include <cmath>

namespace auvsim {

// Wrap an angle to (-pi, pi]. wrap_pi(pi) == pi, wrap_pi(-pi) == pi.
inline double wrap_pi(double a) {
	constexpr double two_pi = 2.0 * M_PI;
	a = std::fmod(a + M_PI, two_pi);
	if (a <= 0.0) a += two_pi;
	return a - M_PI;
}

inline double clamp(double x, double lo, double hi) {
	return x < lo ? lo : (x > hi ? hi : x);
}

}  // namespace auvsim
