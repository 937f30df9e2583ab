#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vsl/aggregation.hpp"
#include "vsl/filtered.hpp"
#include "vsl/vectors.hpp"

namespace vsl {

// Dense container: magic "VSD1", u32 version, u64 count, u32 dim, then
// count*dim little-endian float32. Paths ending in ".fvecs" use the fvecs
// layout instead (per-vector i32 dim prefix + float32 payload). Readers
// reject empty, truncated, or dimension-inconsistent files.
std::vector<DenseVector> read_dense(const std::string& path);
void write_dense(const std::string& path, std::span<const DenseVector> vectors);

// JSON Lines, one object per sparse vector: integer "dim", strictly
// increasing "indices", positive "values", optional "id". Violations raise
// DataError naming the line.
std::vector<SparseVector> read_sparse(const std::string& path);
void write_sparse(const std::string& path, std::span<const SparseVector> vectors);

// JSON Lines vector sets: {"id": ..., "vectors": [[...], ...]} with a
// uniform inner dimension.
std::vector<std::pair<std::string, VectorSet>> read_sets(const std::string& path);
void write_sets(const std::string& path,
                std::span<const std::pair<std::string, VectorSet>> sets);

// JSON Lines attributes: {"id": ..., "attrs": ["a", ...]}.
std::map<std::string, AttributeSet> read_attrs(const std::string& path);
void write_attrs(const std::string& path,
                 const std::map<std::string, AttributeSet>& attrs);

// Joins vectors to attributes by id; ids missing on either side are errors.
std::vector<FilteredPoint> join_attrs(
    std::span<const std::pair<std::string, DenseVector>> vectors,
    const std::map<std::string, AttributeSet>& attrs);

}  // namespace vsl
