#ifndef LEVYLAB_MEASURE_IO_HPP
#define LEVYLAB_MEASURE_IO_HPP

#include <filesystem>
#include <string>

#include "json.hpp"
#include "levylab/levy.hpp"

namespace levylab {

// Document layout (JSON):
//   {"variant": "StableSpectral", "alpha": a, "dim": d, "total_mass": m}
//   {"variant": "StableSpectral", "alpha": a, "atoms": [[t0, .., t_{d-1}, w], ...]}
//   {"variant": "DensityKernel",  "alpha": a, "dim": d, "density": {"family": f, "params": [...]}}
//   {"variant": "DirectSumAxes",  "alpha": a, "axes_weights": [w0, ..]}
nlohmann::json measure_to_json(const LevyMeasure& measure);
LevyMeasure measure_from_json(const nlohmann::json& doc);

std::string serialize_measure(const LevyMeasure& measure);
LevyMeasure parse_measure(const std::string& text);

LevyMeasure load_measure(const std::filesystem::path& path);
void save_measure(const std::filesystem::path& path, const LevyMeasure& measure);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace levylab

#endif  // LEVYLAB_MEASURE_IO_HPP
