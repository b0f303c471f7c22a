#include "dnwave/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dnwave/error.hpp"

namespace dnwave {

namespace fs = std::filesystem;

nlohmann::json grid_to_json(const HalfSpaceGrid& grid) {
  nlohmann::json j;
  j["dim"] = grid.dim();
  j["z_min"] = grid.z_min();
  j["z_max"] = grid.z_max();
  j["n_normal"] = grid.n_normal();
  if (grid.dim() == 2) {
    j["tangential_extent"] = grid.tangential_extent();
    j["n_tangential"] = grid.n_tangential();
  }
  return j;
}

HalfSpaceGrid grid_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  const double z_min = j.value("z_min", 0.0);
  const double z_max = j.at("z_max").get<double>();
  const int n_normal = j.at("n_normal").get<int>();
  if (dim == 1) return HalfSpaceGrid::one_d(z_max, n_normal, z_min);
  return HalfSpaceGrid::two_d(z_max, n_normal, j.at("tangential_extent").get<double>(),
                              j.at("n_tangential").get<int>(), z_min);
}

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_field_csv(const fs::path& path, const ScalarField& field) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const auto& g = field.grid();
  out << (g.dim() == 2 ? "z_tangential,z_normal,value\n" : "z_normal,value\n");
  for (int j = 0; j < g.n_tangential(); ++j) {
    for (int i = 0; i < g.n_normal(); ++i) {
      if (g.dim() == 2) out << format_double(g.tangential_center(j)) << ',';
      out << format_double(g.normal_center(i)) << ',' << format_double(field(j, i)) << '\n';
    }
  }
}

ScalarField read_field_csv(const fs::path& path, const HalfSpaceGrid& grid, double time) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  const std::string expected = grid.dim() == 2 ? "z_tangential,z_normal,value" : "z_normal,value";
  if (line != expected) throw GridError("unexpected CSV header '" + line + "' in " + path.string());
  std::vector<double> values;
  values.reserve(grid.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find_last_of(',');
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  if (values.size() != grid.size()) {
    throw GridError("CSV row count does not match grid in " + path.string());
  }
  return ScalarField(grid, std::move(values), time);
}

std::string time_tag(double time) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", time);
  return buf;
}

fs::path write_snapshot(const fs::path& dir, const std::string& stem, const ScalarField& field,
                        const ModelParams& params) {
  fs::create_directories(dir);
  const std::string base = stem + "_t" + time_tag(field.time());
  const fs::path csv = dir / (base + ".csv");
  write_field_csv(csv, field);
  nlohmann::json side;
  side["time"] = field.time();
  side["m"] = params.m();
  side["p"] = params.p();
  side["grid"] = grid_to_json(field.grid());
  write_json(dir / (base + ".json"), side);
  return csv;
}

ScalarField read_snapshot(const fs::path& csv_path) {
  fs::path side_path = csv_path;
  side_path.replace_extension(".json");
  std::ifstream in(side_path);
  if (!in) throw Error("missing sidecar " + side_path.string());
  const nlohmann::json side = nlohmann::json::parse(in);
  return read_field_csv(csv_path, grid_from_json(side.at("grid")), side.at("time").get<double>());
}

std::vector<fs::path> write_sequence(const fs::path& dir, const std::string& stem,
                                     const FieldSequence& seq, const ModelParams& params) {
  std::vector<fs::path> paths;
  for (const auto& f : seq) paths.push_back(write_snapshot(dir, stem, f, params));
  return paths;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace dnwave
