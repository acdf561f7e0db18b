#ifndef DNE_TYPES_HPP
#define DNE_TYPES_HPP

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace dne {

/// Small gradient-space vector (N <= 3); stack allocated.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
/// Small N x N matrix matching Vec.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

using Vector = Eigen::VectorXd;

/// Raised when an argument violates an operation's precondition.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when model data violates one of the structural hypotheses.
/// The tag names the hypothesis, e.g. "(H_h)" or "q in (1, p_-)".
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string tag, const std::string& what)
      : std::runtime_error(tag + ": " + what), tag_(std::move(tag)) {}

  const std::string& tag() const noexcept { return tag_; }

private:
  std::string tag_;
};

} // namespace dne

#endif
