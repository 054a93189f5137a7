#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "qmlab/algebra.hpp"

namespace qmlab {

using Json = nlohmann::ordered_json;

// Serializes with every floating-point number printed to 17 significant
// digits, so records round-trip exactly and are byte-stable.
// indent < 0 gives a single line.
std::string dump_text(const Json& value, int indent = -1);
Json parse_text(const std::string& text);

std::string format_double(double v);

Json shape_to_json(const AlgebraShape& shape);
AlgebraShape shape_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, int rows, int cols);
Json element_to_json(const Element& e);
Element element_from_json(const Json& j);

// 64-bit FNV-1a, used for instance digests.
std::uint64_t fnv1a(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace qmlab
