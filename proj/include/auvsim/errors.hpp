#pragma once

#include <stdexcept>
#include <string>

namespace auvsim {

// Base class for everything this library throws on purpose.
struct SimError : std::runtime_error {
	explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration, parameter file, or mission definition. CLI maps this to exit 1.
struct ValidationError : SimError {
	explicit ValidationError(const std::string& msg) : SimError(msg) {}
};

// Kinematic transform evaluated too close to the pitch singularity.
struct SingularityError : SimError {
	explicit SingularityError(const std::string& msg) : SimError(msg) {}
};

// Guidance angle undefined (total planar speed below threshold).
struct DegenerateSpeedError : SimError {
	explicit DegenerateSpeedError(const std::string& msg) : SimError(msg) {}
};

// QP failed to reach the requested KKT tolerance within the iteration budget.
struct QpError : SimError {
	QpError(const std::string& msg, int iters) : SimError(msg), iterations(iters) {}
	int iterations;
};

}  // namespace auvsim
