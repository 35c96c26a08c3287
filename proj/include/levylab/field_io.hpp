#ifndef LEVYLAB_FIELD_IO_HPP
#define LEVYLAB_FIELD_IO_HPP

#include <filesystem>
#include <iosfwd>

#include "levylab/grid.hpp"

namespace levylab {

// Binary layout, little-endian, no padding:
//   int32 dim, int32 N, float64 L, int32 m, then m * N^dim float64 values in
//   component-major, row-major (axis 0 slowest) order.
void write_field_binary(std::ostream& out, const GridField& field);
GridField read_field_binary(std::istream& in);
void write_field_binary(const std::filesystem::path& path, const GridField& field);
GridField read_field_binary(const std::filesystem::path& path);

// CSV: header "x0[,x1,x2],u0[,u1,...]", one row per grid point in flat order,
// values printed with 17 significant digits. Reading infers N and L from the
// coordinates (L = N * spacing).
void write_field_csv(std::ostream& out, const GridField& field);
GridField read_field_csv(std::istream& in);
void write_field_csv(const std::filesystem::path& path, const GridField& field);
GridField read_field_csv(const std::filesystem::path& path);

/// Dispatches on extension: ".csv" is CSV, anything else binary.
void write_field(const std::filesystem::path& path, const GridField& field);
GridField read_field(const std::filesystem::path& path);

}  // namespace levylab

#endif  // LEVYLAB_FIELD_IO_HPP
