#include "vsl/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>

namespace vsl {

namespace {

using nlohmann::json;

constexpr char kDenseMagic[4] = {'V', 'S', 'D', '1'};
constexpr std::uint32_t kDenseVersion = 1;

bool has_suffix(const std::string& path, const std::string& suffix) {
  return path.size() >= suffix.size() &&
         path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::ifstream open_for_read(const std::string& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_for_write(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

std::vector<DenseVector> read_fvecs(const std::string& path) {
  auto in = open_for_read(path, std::ios::binary);
  std::vector<DenseVector> out;
  std::int32_t dim = 0;
  while (in.read(reinterpret_cast<char*>(&dim), 4)) {
    if (dim < 1) throw DataError(path + ": invalid fvecs dimension");
    if (!out.empty() && dim != out.front().size())
      throw DataError(path + ": inconsistent fvecs dimensions");
    std::vector<float> buf(static_cast<std::size_t>(dim));
    if (!in.read(reinterpret_cast<char*>(buf.data()), 4 * dim))
      throw DataError(path + ": truncated fvecs record");
    DenseVector v(dim);
    for (std::int32_t i = 0; i < dim; ++i) v[i] = static_cast<double>(buf[static_cast<std::size_t>(i)]);
    if (!v.allFinite()) throw DataError(path + ": non-finite value");
    out.push_back(std::move(v));
  }
  if (out.empty()) throw DataError(path + ": empty file");
  return out;
}

void write_fvecs(const std::string& path, std::span<const DenseVector> vectors) {
  auto out = open_for_write(path, std::ios::binary);
  for (const auto& v : vectors) {
    const std::int32_t dim = static_cast<std::int32_t>(v.size());
    out.write(reinterpret_cast<const char*>(&dim), 4);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const float f = static_cast<float>(v[i]);
      out.write(reinterpret_cast<const char*>(&f), 4);
    }
  }
  if (!out) throw DataError("failed writing '" + path + "'");
}

json parse_line(const std::string& path, const std::string& line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw DataError(path + ": line " + std::to_string(line_no) + ": " + e.what());
  }
}

[[noreturn]] void line_error(const std::string& path, std::size_t line_no,
                             const std::string& message) {
  throw DataError(path + ": line " + std::to_string(line_no) + ": " + message);
}

std::string id_to_string(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  throw DataError("id must be a string or integer");
}

}  // namespace

std::vector<DenseVector> read_dense(const std::string& path) {
  if (has_suffix(path, ".fvecs")) return read_fvecs(path);

  auto in = open_for_read(path, std::ios::binary);
  char magic[4];
  if (!in.read(magic, 4)) throw DataError(path + ": empty file");
  if (std::memcmp(magic, kDenseMagic, 4) != 0)
    throw DataError(path + ": bad magic (not a dense vector container)");
  std::uint32_t version = 0;
  std::uint64_t count = 0;
  std::uint32_t dim = 0;
  if (!in.read(reinterpret_cast<char*>(&version), 4) ||
      !in.read(reinterpret_cast<char*>(&count), 8) ||
      !in.read(reinterpret_cast<char*>(&dim), 4))
    throw DataError(path + ": truncated header");
  if (version != kDenseVersion)
    throw DataError(path + ": unsupported version " + std::to_string(version));
  if (count == 0) throw DataError(path + ": empty collection");
  if (dim == 0) throw DataError(path + ": zero dimension");

  std::vector<DenseVector> out;
  out.reserve(count);
  std::vector<float> buf(dim);
  for (std::uint64_t r = 0; r < count; ++r) {
    if (!in.read(reinterpret_cast<char*>(buf.data()), 4ll * dim))
      throw DataError(path + ": truncated record " + std::to_string(r));
    DenseVector v(static_cast<Eigen::Index>(dim));
    for (std::uint32_t i = 0; i < dim; ++i) v[static_cast<Eigen::Index>(i)] = buf[i];
    if (!v.allFinite()) throw DataError(path + ": non-finite value in record " + std::to_string(r));
    out.push_back(std::move(v));
  }
  return out;
}

void write_dense(const std::string& path, std::span<const DenseVector> vectors) {
  if (vectors.empty()) throw std::invalid_argument("write_dense: empty collection");
  const Eigen::Index dim = vectors.front().size();
  for (const auto& v : vectors)
    if (v.size() != dim) throw std::invalid_argument("write_dense: ragged dimensions");
  if (has_suffix(path, ".fvecs")) {
    write_fvecs(path, vectors);
    return;
  }
  auto out = open_for_write(path, std::ios::binary);
  out.write(kDenseMagic, 4);
  const std::uint32_t version = kDenseVersion;
  const std::uint64_t count = vectors.size();
  const std::uint32_t dim32 = static_cast<std::uint32_t>(dim);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&count), 8);
  out.write(reinterpret_cast<const char*>(&dim32), 4);
  for (const auto& v : vectors) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const float f = static_cast<float>(v[i]);
      out.write(reinterpret_cast<const char*>(&f), 4);
    }
  }
  if (!out) throw DataError("failed writing '" + path + "'");
}

std::vector<SparseVector> read_sparse(const std::string& path) {
  auto in = open_for_read(path, std::ios::in);
  std::vector<SparseVector> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json obj = parse_line(path, line, line_no);
    if (!obj.is_object()) line_error(path, line_no, "expected a JSON object");
    if (!obj.contains("dim") || !obj.contains("indices") || !obj.contains("values"))
      line_error(path, line_no, "missing dim/indices/values");
    SparseVector v;
    try {
      v.dim = obj.at("dim").get<int>();
      v.indices = obj.at("indices").get<std::vector<int>>();
      v.values = obj.at("values").get<std::vector<double>>();
    } catch (const json::exception& e) {
      line_error(path, line_no, e.what());
    }
    try {
      check_sparse(v);
    } catch (const DataError& e) {
      line_error(path, line_no, e.what());
    }
    out.push_back(std::move(v));
  }
  if (out.empty()) throw DataError(path + ": empty file");
  return out;
}

void write_sparse(const std::string& path, std::span<const SparseVector> vectors) {
  if (vectors.empty()) throw std::invalid_argument("write_sparse: empty collection");
  auto out = open_for_write(path, std::ios::out);
  std::size_t id = 0;
  for (const auto& v : vectors) {
    check_sparse(v);
    json obj;
    obj["id"] = id++;
    obj["dim"] = v.dim;
    obj["indices"] = v.indices;
    obj["values"] = v.values;
    out << obj.dump() << "\n";
  }
  if (!out) throw DataError("failed writing '" + path + "'");
}

std::vector<std::pair<std::string, VectorSet>> read_sets(const std::string& path) {
  auto in = open_for_read(path, std::ios::in);
  std::vector<std::pair<std::string, VectorSet>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json obj = parse_line(path, line, line_no);
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("vectors"))
      line_error(path, line_no, "expected {\"id\", \"vectors\"}");
    VectorSet set;
    try {
      const auto rows = obj.at("vectors").get<std::vector<std::vector<double>>>();
      if (rows.empty()) line_error(path, line_no, "empty vector set");
      for (const auto& row : rows) {
        if (row.empty()) line_error(path, line_no, "empty vector");
        if (row.size() != rows.front().size())
          line_error(path, line_no, "ragged inner dimensions");
        DenseVector v(static_cast<Eigen::Index>(row.size()));
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (!std::isfinite(row[i])) line_error(path, line_no, "non-finite value");
          v[static_cast<Eigen::Index>(i)] = row[i];
        }
        set.push_back(std::move(v));
      }
      out.emplace_back(id_to_string(obj.at("id")), std::move(set));
    } catch (const json::exception& e) {
      line_error(path, line_no, e.what());
    }
  }
  if (out.empty()) throw DataError(path + ": empty file");
  return out;
}

void write_sets(const std::string& path,
                std::span<const std::pair<std::string, VectorSet>> sets) {
  if (sets.empty()) throw std::invalid_argument("write_sets: empty collection");
  auto out = open_for_write(path, std::ios::out);
  for (const auto& [id, set] : sets) {
    json vectors = json::array();
    for (const auto& v : set) {
      json row = json::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
      vectors.push_back(std::move(row));
    }
    json obj;
    obj["id"] = id;
    obj["vectors"] = std::move(vectors);
    out << obj.dump() << "\n";
  }
  if (!out) throw DataError("failed writing '" + path + "'");
}

std::map<std::string, AttributeSet> read_attrs(const std::string& path) {
  auto in = open_for_read(path, std::ios::in);
  std::map<std::string, AttributeSet> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json obj = parse_line(path, line, line_no);
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("attrs"))
      line_error(path, line_no, "expected {\"id\", \"attrs\"}");
    try {
      const std::string id = id_to_string(obj.at("id"));
      AttributeSet attrs;
      for (const auto& token : obj.at("attrs").get<std::vector<std::string>>()) {
        if (token.empty()) line_error(path, line_no, "empty attribute token");
        attrs.insert(token);
      }
      if (!out.emplace(id, std::move(attrs)).second)
        line_error(path, line_no, "duplicate id '" + id + "'");
    } catch (const json::exception& e) {
      line_error(path, line_no, e.what());
    }
  }
  if (out.empty()) throw DataError(path + ": empty file");
  return out;
}

void write_attrs(const std::string& path,
                 const std::map<std::string, AttributeSet>& attrs) {
  if (attrs.empty()) throw std::invalid_argument("write_attrs: empty collection");
  auto out = open_for_write(path, std::ios::out);
  for (const auto& [id, set] : attrs) {
    json obj;
    obj["id"] = id;
    obj["attrs"] = std::vector<std::string>(set.begin(), set.end());
    out << obj.dump() << "\n";
  }
  if (!out) throw DataError("failed writing '" + path + "'");
}

std::vector<FilteredPoint> join_attrs(
    std::span<const std::pair<std::string, DenseVector>> vectors,
    const std::map<std::string, AttributeSet>& attrs) {
  std::vector<FilteredPoint> out;
  out.reserve(vectors.size());
  std::map<std::string, bool> used;
  for (const auto& [id, attr] : attrs) used[id] = false;
  for (const auto& [id, vector] : vectors) {
    const auto it = attrs.find(id);
    if (it == attrs.end()) throw DataError("join_attrs: no attributes for id '" + id + "'");
    used[id] = true;
    out.push_back(FilteredPoint{vector, it->second});
  }
  for (const auto& [id, was_used] : used)
    if (!was_used) throw DataError("join_attrs: attributes reference unknown id '" + id + "'");
  return out;
}

}  // namespace vsl
