#include <doctest.h>

#include <fstream>
#include <random>
#include <string>

#include "support/test_util.hpp"
#include "vsl/io.hpp"

using namespace vsl;
using vsl_test::random_vector;
using vsl_test::TempDir;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace

TEST_CASE("dense container round trip keeps f32 precision") {
  TempDir tmp;
  std::mt19937_64 rng(81);
  std::vector<DenseVector> vectors;
  for (int i = 0; i < 100; ++i) vectors.push_back(random_vector(rng, 12));

  for (const std::string name : {"data.vsd", "data.fvecs"}) {
    const std::string path = tmp.file(name);
    write_dense(path, vectors);
    const auto back = read_dense(path);
    REQUIRE(back.size() == vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      REQUIRE(back[i].size() == 12);
      for (int j = 0; j < 12; ++j)
        CHECK(back[i][j] == static_cast<double>(static_cast<float>(vectors[i][j])));
    }
  }
}

TEST_CASE("dense reader rejects malformed files") {
  TempDir tmp;
  const std::string empty = tmp.file("empty.vsd");
  write_text(empty, "");
  CHECK_THROWS_AS(read_dense(empty), DataError);

  const std::string garbage = tmp.file("garbage.vsd");
  write_text(garbage, "not a container at all");
  CHECK_THROWS_AS(read_dense(garbage), DataError);

  // Truncated payload: header promises more records than present.
  std::mt19937_64 rng(1);
  std::vector<DenseVector> one = {random_vector(rng, 4)};
  const std::string truncated = tmp.file("trunc.vsd");
  write_dense(truncated, one);
  {
    std::ifstream in(truncated, std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    data.resize(data.size() - 4);
    write_text(truncated, data);
  }
  CHECK_THROWS_AS(read_dense(truncated), DataError);

  // fvecs with inconsistent dimensions.
  const std::string bad_fvecs = tmp.file("bad.fvecs");
  {
    std::ofstream out(bad_fvecs, std::ios::binary);
    const auto put_rec = [&](std::int32_t dim) {
      out.write(reinterpret_cast<const char*>(&dim), 4);
      for (int i = 0; i < dim; ++i) {
        const float f = 1.0f;
        out.write(reinterpret_cast<const char*>(&f), 4);
      }
    };
    put_rec(3);
    put_rec(4);
  }
  CHECK_THROWS_AS(read_dense(bad_fvecs), DataError);

  CHECK_THROWS_AS(write_dense(tmp.file("x.vsd"), {}), std::invalid_argument);
}

TEST_CASE("sparse jsonl round trip and line-numbered errors") {
  TempDir tmp;
  std::mt19937_64 rng(82);
  std::vector<SparseVector> vectors;
  for (int i = 0; i < 20; ++i) vectors.push_back(vsl_test::random_sparse(rng, 50, 6));

  const std::string path = tmp.file("vectors.jsonl");
  write_sparse(path, vectors);
  const auto back = read_sparse(path);
  REQUIRE(back.size() == vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    CHECK(back[i].dim == vectors[i].dim);
    CHECK(back[i].indices == vectors[i].indices);
    CHECK(back[i].values == vectors[i].values);
  }

  const std::string bad = tmp.file("bad.jsonl");
  std::string text;
  for (int i = 0; i < 6; ++i)
    text += R"({"dim": 10, "indices": [1, 4], "values": [0.5, 0.25]})" "\n";
  text += R"({"dim": 10, "indices": [4, 1], "values": [0.5, 0.25]})" "\n";
  write_text(bad, text);
  try {
    read_sparse(bad);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }

  const std::string zero = tmp.file("zero.jsonl");
  write_text(zero, R"({"dim": 10, "indices": [1], "values": [0.0]})" "\n");
  CHECK_THROWS_AS(read_sparse(zero), DataError);
}

TEST_CASE("sets jsonl") {
  TempDir tmp;
  const std::string path = tmp.file("sets.jsonl");
  write_text(path,
             R"({"id": "a", "vectors": [[1.0, 2.0], [3.0, 4.0]]})" "\n"
             R"({"id": 7, "vectors": [[5.0, 6.0]]})" "\n");
  const auto sets = read_sets(path);
  REQUIRE(sets.size() == 2);
  CHECK(sets[0].first == "a");
  CHECK(sets[0].second.size() == 2);
  CHECK(sets[1].first == "7");
  CHECK(sets[1].second[0][1] == 6.0);

  const std::string ragged = tmp.file("ragged.jsonl");
  write_text(ragged, R"({"id": "a", "vectors": [[1.0, 2.0], [3.0]]})" "\n");
  CHECK_THROWS_AS(read_sets(ragged), DataError);

  // Round trip through the writer.
  const std::string again = tmp.file("sets2.jsonl");
  write_sets(again, sets);
  const auto back = read_sets(again);
  REQUIRE(back.size() == 2);
  CHECK(back[0].second[1] == sets[0].second[1]);
}

TEST_CASE("attrs jsonl and the id join") {
  TempDir tmp;
  const std::string path = tmp.file("attrs.jsonl");
  write_text(path,
             R"({"id": "0", "attrs": ["red", "large"]})" "\n"
             R"({"id": "1", "attrs": []})" "\n");
  const auto attrs = read_attrs(path);
  REQUIRE(attrs.size() == 2);
  CHECK(attrs.at("0") == AttributeSet{"large", "red"});
  CHECK(attrs.at("1").empty());  // empty attribute set is valid

  DenseVector v(2);
  v << 1.0, 2.0;
  std::vector<std::pair<std::string, DenseVector>> keyed = {{"0", v}, {"1", v}};
  const auto joined = join_attrs(keyed, attrs);
  REQUIRE(joined.size() == 2);
  CHECK(joined[0].attrs.count("red") == 1);

  // Vector id without attributes.
  keyed.emplace_back("2", v);
  CHECK_THROWS_AS(join_attrs(keyed, attrs), DataError);

  // Attribute row referencing an unknown vector id.
  keyed.pop_back();
  keyed.pop_back();
  CHECK_THROWS_AS(join_attrs(keyed, attrs), DataError);

  const std::string empty_token = tmp.file("tok.jsonl");
  write_text(empty_token, R"({"id": "0", "attrs": [""]})" "\n");
  CHECK_THROWS_AS(read_attrs(empty_token), DataError);
}
