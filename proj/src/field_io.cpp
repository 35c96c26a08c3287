#include "levylab/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "levylab/errors.hpp"

namespace levylab {
namespace {

static_assert(std::endian::native == std::endian::little, "binary field format assumes a little-endian host");

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError("truncated binary field");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

void write_field_binary(std::ostream& out, const GridField& field) {
  const Grid& g = field.grid();
  put<std::int32_t>(out, g.dim());
  put<std::int32_t>(out, g.points());
  put<double>(out, g.side());
  put<std::int32_t>(out, field.components());
  const auto v = field.values();
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!out) throw IoError("failed writing binary field");
}

GridField read_field_binary(std::istream& in) {
  const auto dim = get<std::int32_t>(in);
  const auto n = get<std::int32_t>(in);
  const auto side = get<double>(in);
  const auto m = get<std::int32_t>(in);
  Grid grid(dim, n, side);
  if (m < 1) throw IoError("binary field declares no components");
  std::vector<double> values(grid.size() * static_cast<std::size_t>(m));
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!in) throw IoError("truncated binary field payload");
  return GridField(grid, m, std::move(values));
}

void write_field_binary(const std::filesystem::path& path, const GridField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_field_binary(out, field);
}

GridField read_field_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_field_binary(in);
}

void write_field_csv(std::ostream& out, const GridField& field) {
  const Grid& g = field.grid();
  for (int a = 0; a < g.dim(); ++a) out << (a ? "," : "") << 'x' << a;
  for (int c = 0; c < field.components(); ++c) out << ",u" << c;
  out << '\n' << std::setprecision(17);
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, x);
    for (int a = 0; a < g.dim(); ++a) out << (a ? "," : "") << x[a];
    for (int c = 0; c < field.components(); ++c) out << ',' << field(c, i);
    out << '\n';
  }
  if (!out) throw IoError("failed writing CSV field");
}

GridField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV field");
  const auto header = split(line);
  int dim = 0;
  while (dim < static_cast<int>(header.size()) && !header[dim].empty() && header[dim][0] == 'x') ++dim;
  const int m = static_cast<int>(header.size()) - dim;
  if (dim < 1 || dim > 3 || m < 1) throw IoError("CSV header must be x0[,x1,x2],u0[,...]");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw IoError("CSV row has the wrong number of columns");
    std::vector<double> r;
    for (const auto& c : cells) {
      try {
        r.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw IoError("CSV cell is not a number: " + c);
      }
    }
    rows.push_back(std::move(r));
  }
  const auto n = static_cast<int>(std::llround(std::pow(static_cast<double>(rows.size()), 1.0 / dim)));
  if (n < 2) throw IoError("CSV field has too few rows");
  // Spacing from the last axis, which varies fastest.
  const double h = rows[1][dim - 1] - rows[0][dim - 1];
  Grid grid(dim, n, h * n);
  if (rows.size() != grid.size()) throw IoError("CSV row count is not N^dim");
  GridField field(grid, m);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < m; ++c) field(c, i) = rows[i][dim + c];
  if (!field.all_finite()) throw IoError("CSV field has non-finite values");
  return field;
}

void write_field_csv(const std::filesystem::path& path, const GridField& field) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_field_csv(out, field);
}

GridField read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_field_csv(in);
}

void write_field(const std::filesystem::path& path, const GridField& field) {
  if (path.extension() == ".csv") write_field_csv(path, field);
  else write_field_binary(path, field);
}

GridField read_field(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? read_field_csv(path) : read_field_binary(path);
}

}  // namespace levylab
