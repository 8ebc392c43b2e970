#pragma once

#include <stdexcept>
#include <string>

namespace vanetsim {

// Fatal simulation faults. Recoverable validation problems (config parsing,
// config invariants) are reported as error lists instead, see config.hpp.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

class GeometryError : public SimError {
public:
    explicit GeometryError(const std::string& msg) : SimError("GeometryError: " + msg) {}
};

class SpawnOverflow : public SimError {
public:
    explicit SpawnOverflow(const std::string& msg) : SimError("SpawnOverflow: " + msg) {}
};

class OutOfLane : public SimError {
public:
    explicit OutOfLane(const std::string& msg) : SimError("OutOfLane: " + msg) {}
};

class CausalityViolation : public SimError {
public:
    explicit CausalityViolation(const std::string& msg) : SimError("CausalityViolation: " + msg) {}
};

// Wraps any invariant violation detected while a run is in progress.
class RuntimeFault : public SimError {
public:
    explicit RuntimeFault(const std::string& msg) : SimError("RuntimeFault: " + msg) {}
};

class IoError : public SimError {
public:
    explicit IoError(const std::string& msg) : SimError("IoError: " + msg) {}
};

} // namespace vanetsim
