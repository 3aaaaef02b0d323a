#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace qcmi {

/// Raised when an estimator cannot form a finite per-sample term.
/// `sample()` is the row index in the caller's ordering.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, std::size_t sample)
      : std::runtime_error(what + " (sample " + std::to_string(sample) + ")"), sample_(sample) {}

  std::size_t sample() const noexcept { return sample_; }

 private:
  std::size_t sample_;
};

}  // namespace qcmi
