// errors.hpp — exception types raised by the simulation and identification stages.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace havoq {

// Requested Fock truncation cannot hold the state (discarded population too large,
// or top levels became populated during evolution).
struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// Density-matrix invariants (trace, Hermiticity, positivity) violated mid-run.
struct IntegrationDivergedError : std::runtime_error {
    double t_fail;
    IntegrationDivergedError(const std::string& what, double t)
        : std::runtime_error(what), t_fail(t) {}
};

// No cutoff rank produced a linear mode (degenerate input to the rank sweep).
struct ClassificationError : std::runtime_error {
    explicit ClassificationError(const std::string& what) : std::runtime_error(what) {}
};

// Frequencies could not be split into two arithmetic ladders.
struct LadderAmbiguityError : std::runtime_error {
    std::vector<double> frequencies;
    LadderAmbiguityError(const std::string& what, std::vector<double> freqs)
        : std::runtime_error(what), frequencies(std::move(freqs)) {}
};

// Sideband comb fit failed (expected for strong modulation amplitudes).
struct UnresolvedSidebandsError : std::runtime_error {
    std::vector<double> frequencies;
    UnresolvedSidebandsError(const std::string& what, std::vector<double> freqs)
        : std::runtime_error(what), frequencies(std::move(freqs)) {}
};

// Bad or incomplete experiment configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace havoq
