#include "levylab/measure_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "levylab/errors.hpp"

namespace levylab {

nlohmann::json measure_to_json(const LevyMeasure& measure) {
  nlohmann::json doc;
  doc["variant"] = to_string(measure.kind());
  doc["alpha"] = measure.alpha();
  switch (measure.kind()) {
    case MeasureKind::StableSpectral: {
      const auto& sigma = measure.sigma();
      if (sigma.is_isotropic()) {
        doc["dim"] = measure.dim();
        doc["total_mass"] = sigma.total_mass();
      } else {
        auto atoms = nlohmann::json::array();
        for (const auto& a : sigma.atoms()) {
          auto row = nlohmann::json::array();
          for (double v : a.direction) row.push_back(v);
          row.push_back(a.weight);
          atoms.push_back(row);
        }
        doc["atoms"] = atoms;
      }
      break;
    }
    case MeasureKind::DensityKernel: {
      const auto& spec = measure.density_function().spec();
      doc["dim"] = measure.dim();
      doc["density"] = {{"family", spec.family}, {"params", spec.params}};
      break;
    }
    case MeasureKind::DirectSumAxes: doc["axes_weights"] = measure.axis_weights(); break;
  }
  return doc;
}

LevyMeasure measure_from_json(const nlohmann::json& doc) {
  try {
    const std::string variant = doc.at("variant").get<std::string>();
    const double alpha = doc.at("alpha").get<double>();
    if (variant == "StableSpectral") {
      if (doc.contains("total_mass"))
        return LevyMeasure::stable(alpha, SphericalMeasure::isotropic(doc.at("dim").get<int>(), doc.at("total_mass").get<double>()));
      std::vector<Atom> atoms;
      for (const auto& row : doc.at("atoms")) {
        auto v = row.get<std::vector<double>>();
        if (v.size() < 2) throw InvalidArgument("atom rows need a direction and a weight");
        const double w = v.back();
        v.pop_back();
        atoms.push_back({std::move(v), w});
      }
      if (doc.contains("dim") && doc.at("dim").get<std::size_t>() != atoms.front().direction.size())
        throw InvalidArgument("declared dim does not match the atoms");
      return LevyMeasure::stable(alpha, SphericalMeasure::discrete(std::move(atoms)));
    }
    if (variant == "DensityKernel") {
      const auto& d = doc.at("density");
      return LevyMeasure::density(doc.at("dim").get<int>(), alpha,
                                  {d.at("family").get<std::string>(), d.at("params").get<std::vector<double>>()});
    }
    if (variant == "DirectSumAxes") return LevyMeasure::direct_sum(alpha, doc.at("axes_weights").get<std::vector<double>>());
    throw InvalidArgument("unknown measure variant '" + variant + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed measure document: ") + e.what());
  }
}

std::string serialize_measure(const LevyMeasure& measure) { return measure_to_json(measure).dump(2); }

LevyMeasure parse_measure(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("measure document is not valid JSON: ") + e.what());
  }
  return measure_from_json(doc);
}

LevyMeasure load_measure(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open measure file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_measure(buf.str());
}

void save_measure(const std::filesystem::path& path, const LevyMeasure& measure) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write measure file " + path.string());
  out << serialize_measure(measure) << '\n';
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

std::string LevyMeasure::digest() const { return fnv1a_hex(measure_to_json(*this).dump()); }

}  // namespace levylab
