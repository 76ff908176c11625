#ifndef QFLOW_ERRORS_HPP
#define QFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qflow {

// Invalid physical or numerical parameter (wrong bound, wrong sign, ...).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Mismatched array lengths between samples and grids.
class shape_error : public std::invalid_argument {
public:
    explicit shape_error(const std::string& what) : std::invalid_argument(what) {}
};

// Eigensolver did not converge.
class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, int iterations)
        : std::runtime_error(what), iterations_(iterations) {}
    int iterations() const noexcept { return iterations_; }

private:
    int iterations_;
};

// A truncated semi-infinite integral lost more probability mass than allowed.
class truncation_error : public std::runtime_error {
public:
    truncation_error(const std::string& what, double lost_mass)
        : std::runtime_error(what), lost_mass_(lost_mass) {}
    double lost_mass() const noexcept { return lost_mass_; }

private:
    double lost_mass_;
};

// A convergence sequence that cannot be extrapolated; carries the raw values.
class extrapolation_error : public std::runtime_error {
public:
    extrapolation_error(const std::string& what, std::vector<double> raw_values)
        : std::runtime_error(what), raw_(std::move(raw_values)) {}
    const std::vector<double>& raw_values() const noexcept { return raw_; }

private:
    std::vector<double> raw_;
};

}  // namespace qflow

#endif  // QFLOW_ERRORS_HPP
