#include "qmlab/text.hpp"

#include <cstdio>
#include <sstream>

namespace qmlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // Keep floats recognisable as floats when read back.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace {

void write(std::ostringstream& out, const Json& v, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out << ',';
        first = false;
        newline(depth + 1);
        out << Json(it.key()).dump() << (indent < 0 ? ":" : ": ");
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out << '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : v) flat = flat && !e.is_structured();
      out << '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out << ',';
        if (!first && flat && indent >= 0) out << ' ';
        first = false;
        if (!flat) newline(depth + 1);
        write(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out << ']';
      return;
    }
    case Json::value_t::number_float:
      out << format_double(v.get<double>());
      return;
    default:
      out << v.dump();
      return;
  }
}

}  // namespace

std::string dump_text(const Json& value, int indent) {
  std::ostringstream out;
  write(out, value, indent, 0);
  return out.str();
}

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed structured text: ") + e.what());
  }
}

Json shape_to_json(const AlgebraShape& shape) { return Json(shape.block_dims()); }

AlgebraShape shape_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("shape must be a list of block dimensions");
  std::vector<int> dims;
  for (const auto& d : j) {
    if (!d.is_number_integer()) throw ConfigError("block dimension must be an integer");
    dims.push_back(d.get<int>());
  }
  return AlgebraShape(dims);
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
  return out;
}

Matrix matrix_from_json(const Json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows * cols)
    throw ConfigError("matrix entry count does not match its dimensions");
  Matrix m(rows, cols);
  int k = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c, ++k) {
      const Json& e = j[k];
      if (!e.is_array() || e.size() != 2) throw ConfigError("matrix entries are [re, im] pairs");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

Json element_to_json(const Element& e) {
  Json blocks = Json::array();
  for (const auto& b : e.blocks()) blocks.push_back(matrix_to_json(b));
  Json out;
  out["shape"] = shape_to_json(e.shape());
  out["blocks"] = blocks;
  return out;
}

Element element_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("blocks"))
    throw ConfigError("element record needs 'shape' and 'blocks'");
  AlgebraShape shape = shape_from_json(j.at("shape"));
  const Json& blocks = j.at("blocks");
  if (!blocks.is_array() || static_cast<int>(blocks.size()) != shape.num_blocks())
    throw ConfigError("element record has the wrong number of blocks");
  std::vector<Matrix> mats;
  for (int i = 0; i < shape.num_blocks(); ++i)
    mats.push_back(matrix_from_json(blocks[i], shape.block_dim(i), shape.block_dim(i)));
  return Element(shape, std::move(mats));
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace qmlab
