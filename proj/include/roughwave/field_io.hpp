#pragma once

#include <iosfwd>
#include <string>

#include "roughwave/spectral_field.hpp"

namespace roughwave {

// CSV layout:
//   # roughwave spectral field
//   dim,cells_per_cube,cubes_per_axis
//   <n>,<M>,<K>
//   m1[,m2[,m3]],re,im       (one row per nonzero coefficient, lattice order)
void write_field_csv(std::ostream& os, const SpectralField& f);
[[nodiscard]] SpectralField read_field_csv(std::istream& is);

// Binary layout, all little-endian:
//   8 bytes magic "RWFIELD1"
//   int32 dim, int32 cells_per_cube, int32 cubes_per_axis
//   uint64 record count
//   per record: int32 m[dim], float64 re, float64 im
void write_field_binary(std::ostream& os, const SpectralField& f);
[[nodiscard]] SpectralField read_field_binary(std::istream& is);

void save_field(const std::string& path, const SpectralField& f);
[[nodiscard]] SpectralField load_field(const std::string& path);

}  // namespace roughwave
