#pragma once

#include <stdexcept>
#include <cstddef>
#include <string>

namespace pcascade {

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A weight sequence whose admissibility equation has no positive root.
class NotAdmissible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double value, double achieved_error)
      : std::runtime_error(what + " (value " + std::to_string(value) + ", achieved error " +
                           std::to_string(achieved_error) + ")"),
        value_(value),
        achieved_error_(achieved_error) {}

  double value() const noexcept { return value_; }
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double value_;
  double achieved_error_;
};

// Golden-section bracketing found a non-concave objective.
class NonConcaveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sampler gave up (retry cap or memory guard).
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// grow_cascade hit its node budget; carries where it stopped.
class CascadeTooLarge : public SamplingError {
 public:
  CascadeTooLarge(std::size_t nodes, std::size_t generation, std::size_t pending)
      : SamplingError("cascade exceeded its node budget: " + std::to_string(nodes) + " nodes stored, stopped in generation " +
                      std::to_string(generation) + " with " + std::to_string(pending) + " nodes still to expand"),
        nodes_(nodes),
        generation_(generation),
        pending_(pending) {}

  std::size_t nodes() const noexcept { return nodes_; }
  std::size_t generation() const noexcept { return generation_; }
  std::size_t pending() const noexcept { return pending_; }

 private:
  std::size_t nodes_;
  std::size_t generation_;
  std::size_t pending_;
};

}  // namespace pcascade
