#pragma once

#include <stdexcept>
#include <string>

namespace mist {

/// Iterates left the finite range (unbounded run or invalid step size).
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::string what, std::size_t iteration)
      : std::runtime_error(std::move(what)), iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

/// An iterative estimator ran out of its iteration budget. Carries the
/// best estimate reached so far.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string what, double best_estimate)
      : std::runtime_error(std::move(what)), best_estimate_(best_estimate) {}
  double best_estimate() const { return best_estimate_; }

 private:
  double best_estimate_;
};

/// File-format or filesystem failure; message names the file (and line
/// where applicable).
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mist
