#pragma once

// Exception hierarchy for the solver library. Every throw site uses one of
// these so callers can tell configuration mistakes from solver breakdowns.

#include <stdexcept>
#include <string>

namespace fbchemo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- parameter validation ---------------------------------------------------
struct ParamError : Error {
    using Error::Error;
};
struct RejectsNonPositiveProfile : ParamError {
    explicit RejectsNonPositiveProfile(const std::string& msg = "initial profile must be strictly positive on [0,b]")
        : ParamError(msg) {}
};
struct RejectsRadius : ParamError {
    explicit RejectsRadius(const std::string& msg = "initial radius b must lie in (0,1)")
        : ParamError(msg) {}
};
struct RejectsDimension : ParamError {
    explicit RejectsDimension(const std::string& msg = "dimension n must be an integer >= 2")
        : ParamError(msg) {}
};
struct RejectsLipschitz : ParamError {
    explicit RejectsLipschitz(const std::string& msg = "tabulated k violates its declared Lipschitz/bound constants")
        : ParamError(msg) {}
};

// --- elliptic solve ----------------------------------------------------------
struct IncompatibleSource : Error {
    explicit IncompatibleSource(const std::string& msg = "source violates the Neumann compatibility condition")
        : Error(msg) {}
};
struct SingularSystem : Error {
    explicit SingularSystem(const std::string& msg = "tridiagonal factorization hit a zero pivot")
        : Error(msg) {}
};
struct OutOfDomain : Error {
    explicit OutOfDomain(const std::string& msg = "evaluation point outside [0,1]")
        : Error(msg) {}
};

// --- parabolic step ----------------------------------------------------------
struct CflViolation : Error {
    explicit CflViolation(const std::string& msg = "explicit stability bound exceeded; shrink dt")
        : Error(msg) {}
};
struct NegativeDensity : Error {
    explicit NegativeDensity(const std::string& msg = "density undershoot beyond tolerance; resolution too coarse")
        : Error(msg) {}
};

// --- free boundary -----------------------------------------------------------
struct LeftDomain : Error {
    // moving_up tells the driver which end of (0,1) the step crossed.
    explicit LeftDomain(bool moving_up_, const std::string& msg = "boundary step left (0,1)")
        : Error(msg), moving_up(moving_up_) {}
    bool moving_up;
};
struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg = "fixed-point iteration exhausted max_iter")
        : Error(msg) {}
};
struct BViolation : Error {
    explicit BViolation(const std::string& msg = "boundary curve left the admissible Lipschitz set")
        : Error(msg) {}
};

// --- analytic oracles ---------------------------------------------------------
struct PastCollapse : Error {
    explicit PastCollapse(const std::string& msg = "closed-form radius is undefined past the collapse time")
        : Error(msg) {}
};

// --- config / CLI --------------------------------------------------------------
struct ConfigError : Error {
    using Error::Error;
};

} // namespace fbchemo
