#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nirmal/data.hpp"
#include "temp_util.hpp"

using namespace nirmal;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() { return fresh_temp_dir("data"); }

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  REQUIRE(out.good());
}

IdxImages sample_images() {
  IdxImages images;
  images.count = 3;
  images.rows = 2;
  images.cols = 2;
  images.pixels = {0, 255, 17, 34, 1, 2, 3, 4, 250, 251, 252, 253};
  return images;
}

Dataset small_dataset(int per_class, int num_classes, Index dim) {
  Dataset data;
  data.num_classes = num_classes;
  const Index n = Index(per_class) * num_classes;
  data.features.resize(n, dim);
  data.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    data.labels[i] = int(i % num_classes);
    for (Index c = 0; c < dim; ++c) {
      // unique value per row, so subset picks are identifiable
      data.features(i, c) = double(i) / double(n);
    }
  }
  return data;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("image files round trip bit-exactly") {
  const fs::path dir = temp_dir();
  const IdxImages images = sample_images();
  const fs::path path = dir / "images-idx3-ubyte";
  save_idx_images(path, images);

  const IdxImages loaded = load_idx_images(path);
  CHECK(loaded.count == 3);
  CHECK(loaded.rows == 2);
  CHECK(loaded.cols == 2);
  CHECK(loaded.pixels == images.pixels);

  // the serialized header is the documented big-endian layout
  const std::vector<std::uint8_t> bytes = read_bytes(path);
  REQUIRE(bytes.size() == 16 + 12);
  const std::vector<std::uint8_t> header = {0, 0, 8, 3, 0, 0, 0, 3, 0, 0, 0, 2, 0, 0, 0, 2};
  CHECK(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 16) == header);

  // writing the loaded struct again reproduces the same bytes
  const fs::path copy = dir / "copy-idx3-ubyte";
  save_idx_images(copy, loaded);
  CHECK(read_bytes(copy) == bytes);
}

TEST_CASE("label files round trip bit-exactly") {
  const fs::path dir = temp_dir();
  IdxLabels labels;
  labels.values = {0, 9, 4, 4, 1};
  const fs::path path = dir / "labels-idx1-ubyte";
  save_idx_labels(path, labels);

  const IdxLabels loaded = load_idx_labels(path);
  CHECK(loaded.values == labels.values);

  const std::vector<std::uint8_t> bytes = read_bytes(path);
  const std::vector<std::uint8_t> expected = {0, 0, 8, 1, 0, 0, 0, 5, 0, 9, 4, 4, 1};
  CHECK(bytes == expected);
}

TEST_CASE("multi-byte counts decode big-endian") {
  const fs::path dir = temp_dir();
  // count = 258 = 0x0102: a little-endian reader would see 33620224
  std::vector<std::uint8_t> bytes = {0, 0, 8, 3, 0, 0, 1, 2, 0, 0, 0, 1, 0, 0, 0, 1};
  bytes.resize(16 + 258, 7);
  const fs::path path = dir / "wide-idx3-ubyte";
  write_bytes(path, bytes);

  const IdxImages images = load_idx_images(path);
  CHECK(images.count == 258);
  CHECK(images.rows == 1);
  CHECK(images.cols == 1);
  CHECK(images.pixels.size() == 258);
}

TEST_CASE("wrong magic is rejected with the documented error") {
  const fs::path dir = temp_dir();
  IdxLabels labels;
  labels.values = {1, 2, 3};
  const fs::path path = dir / "labels-idx1-ubyte";
  save_idx_labels(path, labels);

  // a label file is not an image file
  CHECK_THROWS_WITH_AS(load_idx_images(path),
                       doctest::Contains("IDX magic mismatch"), std::runtime_error);
  try {
    load_idx_images(path);
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("expected 2051, got 2049") != std::string::npos);
    CHECK(msg.find(path.string()) != std::string::npos);
  }

  const IdxImages images = sample_images();
  const fs::path ipath = dir / "images-idx3-ubyte";
  save_idx_images(ipath, images);
  CHECK_THROWS_WITH_AS(load_idx_labels(ipath),
                       doctest::Contains("IDX magic mismatch"), std::runtime_error);
}

TEST_CASE("truncation and padding are rejected") {
  const fs::path dir = temp_dir();
  const fs::path path = dir / "broken-idx3-ubyte";

  write_bytes(path, {0, 0, 8, 3, 0, 0});  // header cut short
  CHECK_THROWS_WITH_AS(load_idx_images(path), doctest::Contains("IDX header truncated"),
                       std::runtime_error);

  // header promises 4 pixels, payload has 3
  write_bytes(path, {0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 9, 9, 9});
  CHECK_THROWS_WITH_AS(load_idx_images(path), doctest::Contains("payload length mismatch"),
                       std::runtime_error);

  CHECK_THROWS_WITH_AS(load_idx_images(dir / "does-not-exist"), doctest::Contains("cannot open"),
                       std::runtime_error);
}

TEST_CASE("datasets scale pixels to [0,1] and quantize back") {
  const IdxImages images = sample_images();
  IdxLabels labels;
  labels.values = {0, 1, 2};
  const Dataset data = make_dataset(images, labels, 3);
  CHECK(data.size() == 3);
  CHECK(data.dim() == 4);
  CHECK(data.features(0, 0) == 0.0);
  CHECK(data.features(0, 1) == 1.0);
  CHECK(data.features(0, 2) == 17.0 / 255.0);
  CHECK(data.labels[2] == 2);

  const IdxImages back = dataset_to_idx_images(data, 2, 2);
  CHECK(back.pixels == images.pixels);
  CHECK(dataset_to_idx_labels(data).values == labels.values);
  CHECK_THROWS_AS(dataset_to_idx_images(data, 3, 2), std::invalid_argument);
}

TEST_CASE("make_dataset validates the pairing") {
  const IdxImages images = sample_images();
  IdxLabels labels;
  labels.values = {0, 1};  // one label short
  CHECK_THROWS_AS(make_dataset(images, labels, 3), std::invalid_argument);
  labels.values = {0, 1, 9};  // out of range for 3 classes
  CHECK_THROWS_AS(make_dataset(images, labels, 3), std::invalid_argument);
}

TEST_CASE("subsets are class-balanced, deterministic, and duplicate-free") {
  const Dataset data = small_dataset(20, 4, 2);
  const Dataset sub = subset(data, 5, 123);
  REQUIRE(sub.size() == 20);

  std::vector<int> counts(4, 0);
  for (Index i = 0; i < sub.size(); ++i) counts[std::size_t(sub.labels[i])] += 1;
  for (int k = 0; k < 4; ++k) CHECK(counts[std::size_t(k)] == 5);

  // rows carry unique feature values, so picks can be identity-checked
  std::vector<double> ids;
  for (Index i = 0; i < sub.size(); ++i) ids.push_back(sub.features(i, 0));
  std::sort(ids.begin(), ids.end());
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());

  const Dataset again = subset(data, 5, 123);
  CHECK((again.features.array() == sub.features.array()).all());
  CHECK((again.labels.array() == sub.labels.array()).all());

  const Dataset other = subset(data, 5, 124);
  CHECK_FALSE((other.features.array() == sub.features.array()).all());
}

TEST_CASE("subset groups rows by class in class order") {
  const Dataset data = small_dataset(6, 3, 1);
  const Dataset sub = subset(data, 2, 9);
  Eigen::VectorXi expected(6);
  expected << 0, 0, 1, 1, 2, 2;
  CHECK((sub.labels.array() == expected.array()).all());
}

TEST_CASE("subset names the class that is too small") {
  Dataset data = small_dataset(3, 2, 1);
  // strip class 1 down to 2 samples
  Dataset trimmed;
  trimmed.num_classes = 2;
  trimmed.features.resize(5, 1);
  trimmed.labels.resize(5);
  int row = 0;
  for (Index i = 0; i < data.size(); ++i) {
    if (data.labels[i] == 1 && row >= 4) continue;
    trimmed.features.row(row) = data.features.row(i);
    trimmed.labels[row] = data.labels[i];
    ++row;
  }
  CHECK_THROWS_WITH_AS(subset(trimmed, 3, 1),
                       "subset: class 1 has only 2 samples, need 3", std::invalid_argument);
  CHECK_THROWS_AS(subset(trimmed, 0, 1), std::invalid_argument);
}

TEST_CASE("format constants") {
  CHECK(kIdxImageMagic == 2051);
  CHECK(kIdxLabelMagic == 2049);
}

}  // TEST_SUITE
