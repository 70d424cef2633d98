#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "projsmooth/grid_field.hpp"

namespace projsmooth {

// "mfield-json v1":
//   {"version": 1,
//    "geometry": {"type": "torus", "sizes": [N1, ...]},
//    "matrix_dim": m,
//    "hermitian": bool,
//    "data": [[re, im], ...]}
// data holds point count * m * m entries: grid points in lexicographic
// order, each point's matrix in row-major order.
nlohmann::json field_to_json(const MatrixField& f);
MatrixField field_from_json(const nlohmann::json& j);

void write_field(const MatrixField& f, const std::filesystem::path& path);
MatrixField read_field(const std::filesystem::path& path);

// Stable-key-ordered JSON text, full round-trip precision for doubles.
std::string dump_json(const nlohmann::json& j);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace projsmooth
