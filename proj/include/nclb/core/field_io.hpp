#pragma once

#include <iosfwd>
#include <string>

#include "nclb/core/phase_field.hpp"

namespace nclb {

// Flat binary snapshot, little-endian:
//   char[8]  magic "NCLBFLD1"
//   int32    n_x (1 and homogeneous flag 1 for the homogeneous marker)
//   int32    homogeneous flag
//   int32    n (velocity points per axis)
//   int32    reserved (0)
//   float64  L_x, L_v, time
//   float64  values[n_x * n^3], x-major then (i, j, k) row-major in v
void write_field(std::ostream& out, const PhaseFieldd& f);
PhaseFieldd read_field(std::istream& in);
void save_field(const std::string& path, const PhaseFieldd& f);
PhaseFieldd load_field(const std::string& path);

/// CSV export: x,vx,vy,vz,f with a header row.
void write_field_csv(std::ostream& out, const PhaseFieldd& f);

}  // namespace nclb
