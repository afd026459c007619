#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fqt {

// Invalid physical parameters or a violated operation precondition.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A steady-state or current evaluation failed its numerical checks.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Harmonic-weight quadrature hit its step cap before converging.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, std::vector<double> previous,
                    std::vector<double> last)
        : std::runtime_error(what), previous_(std::move(previous)), last_(std::move(last)) {}

    const std::vector<double>& previous() const noexcept { return previous_; }
    const std::vector<double>& last() const noexcept { return last_; }

private:
    std::vector<double> previous_;
    std::vector<double> last_;
};

} // namespace fqt
