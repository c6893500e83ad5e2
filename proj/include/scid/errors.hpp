// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace scid {

// Numerical failure: the frame submatrix selected by the cover is too close
// to singular for reliable inversion. Remedy: reseed the weight sequence, or
// change the cover geometry (cells that coincide modulo J can never be
// separated, no matter the weights).
struct FrameConditionError : std::runtime_error {
  explicit FrameConditionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace scid
