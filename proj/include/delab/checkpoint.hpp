#pragma once

#include <filesystem>
#include <stdexcept>

#include "delab/dynamics.hpp"

namespace delab {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary layout, little-endian:
///   8 bytes  magic "DELAB01\0"
///   uint32   n
///   float64  box_length, dealias_fraction, time, mean_u1, mean_u2
///   float64  omega[n * n], physical space, row-major (index i * n + j)
/// Written to a sibling temporary file and renamed into place.
void write_checkpoint(const std::filesystem::path& path, const FlowState& s);
FlowState read_checkpoint(const std::filesystem::path& path);

}  // namespace delab
