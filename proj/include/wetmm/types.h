#ifndef WETMM_TYPES_H_
#define WETMM_TYPES_H_

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace wetmm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Raised when an argument violates a documented precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a formula is evaluated outside its mathematical domain
// (e.g. a frame with no time left for uplink data).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised for channel estimates that cannot be normalized or inverted.
class DegenerateChannel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Detector { kZf, kMrc };

// kWetMm: beamformed energy transfer with estimated CSI.
// kIdeal: perfect CSI, no training phase.
// kOpMm: omnidirectional energy broadcast, CSI used for detection only.
enum class System { kWetMm, kIdeal, kOpMm };

std::string_view to_string(Detector d);
std::string_view to_string(System s);
Detector parse_detector(std::string_view text);
System parse_system(std::string_view text);

}  // namespace wetmm

#endif  // WETMM_TYPES_H_
