#include "projsmooth/field_io.hpp"

#include <fstream>
#include <sstream>

namespace projsmooth {

using nlohmann::json;

json field_to_json(const MatrixField& f) {
  const int m = f.matrix_dim();
  json data = json::array();
  for (const Matrix& a : f.values())
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) data.push_back(json::array({a(r, c).real(), a(r, c).imag()}));

  json sizes = json::array();
  for (int n : f.grid().sizes()) sizes.push_back(n);

  return json{{"version", 1},
              {"geometry", {{"type", "torus"}, {"sizes", sizes}}},
              {"matrix_dim", m},
              {"hermitian", f.hermitian()},
              {"data", std::move(data)}};
}

MatrixField field_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ValidationError("mfield-json: top level must be an object");
    if (j.at("version").get<int>() != 1) throw ValidationError("mfield-json: unsupported version");
    const json& geometry = j.at("geometry");
    if (geometry.at("type").get<std::string>() != "torus")
      throw ValidationError("mfield-json: geometry type must be \"torus\"");
    TorusGrid grid(geometry.at("sizes").get<std::vector<int>>());
    const int m = j.at("matrix_dim").get<int>();
    if (m < 1) throw ValidationError("mfield-json: matrix_dim must be >= 1");
    const bool hermitian = j.at("hermitian").get<bool>();
    const json& data = j.at("data");
    const std::size_t per_point = static_cast<std::size_t>(m) * m;
    if (!data.is_array() || data.size() != grid.point_count() * per_point)
      throw ValidationError("mfield-json: data has wrong length");

    std::vector<Matrix> values;
    values.reserve(grid.point_count());
    std::size_t k = 0;
    for (std::size_t p = 0; p < grid.point_count(); ++p) {
      Matrix a(m, m);
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c, ++k) {
          const json& entry = data[k];
          if (!entry.is_array() || entry.size() != 2)
            throw ValidationError("mfield-json: entries must be [re, im] pairs");
          a(r, c) = Complex(entry[0].get<double>(), entry[1].get<double>());
        }
      }
      values.push_back(std::move(a));
    }
    return MatrixField(std::move(grid), m, std::move(values), hermitian);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("mfield-json: ") + e.what());
  }
}

void write_field(const MatrixField& f, const std::filesystem::path& path) {
  write_json(field_to_json(f), path);
}

MatrixField read_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("cannot parse " + path.string() + ": " + e.what());
  }
  return field_from_json(j);
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << dump_json(j);
  if (!out) throw ValidationError("write failed for " + path.string());
}

}  // namespace projsmooth
