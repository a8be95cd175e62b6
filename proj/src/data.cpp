#include "nirmal/data.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace nirmal {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to '" + path.string() + "'");
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
  if (offset + 4 > bytes.size()) {
    throw std::runtime_error("IDX header truncated in '" + path.string() + "'");
  }
  return (std::uint32_t(bytes[offset]) << 24) | (std::uint32_t(bytes[offset + 1]) << 16) |
         (std::uint32_t(bytes[offset + 2]) << 8) | std::uint32_t(bytes[offset + 3]);
}

void append_be32(std::vector<std::uint8_t>& bytes, std::uint32_t value) {
  bytes.push_back(std::uint8_t(value >> 24));
  bytes.push_back(std::uint8_t(value >> 16));
  bytes.push_back(std::uint8_t(value >> 8));
  bytes.push_back(std::uint8_t(value));
}

void check_magic(std::uint32_t expected, std::uint32_t actual,
                 const std::filesystem::path& path) {
  if (actual != expected) {
    throw std::runtime_error("IDX magic mismatch in '" + path.string() + "': expected " +
                             std::to_string(expected) + ", got " + std::to_string(actual));
  }
}

void check_payload(std::size_t expected, std::size_t actual, const std::filesystem::path& path) {
  if (actual != expected) {
    throw std::runtime_error("IDX payload length mismatch in '" + path.string() +
                             "': header implies " + std::to_string(expected) + " bytes, file has " +
                             std::to_string(actual));
  }
}

}  // namespace

IdxImages load_idx_images(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  check_magic(kIdxImageMagic, read_be32(bytes, 0, path), path);
  IdxImages images;
  images.count = read_be32(bytes, 4, path);
  images.rows = read_be32(bytes, 8, path);
  images.cols = read_be32(bytes, 12, path);
  const std::size_t expected =
      std::size_t(images.count) * std::size_t(images.rows) * std::size_t(images.cols);
  check_payload(expected, bytes.size() - 16, path);
  images.pixels.assign(bytes.begin() + 16, bytes.end());
  return images;
}

IdxLabels load_idx_labels(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  check_magic(kIdxLabelMagic, read_be32(bytes, 0, path), path);
  const std::size_t count = read_be32(bytes, 4, path);
  check_payload(count, bytes.size() - 8, path);
  IdxLabels labels;
  labels.values.assign(bytes.begin() + 8, bytes.end());
  return labels;
}

void save_idx_images(const std::filesystem::path& path, const IdxImages& images) {
  if (images.pixels.size() !=
      std::size_t(images.count) * std::size_t(images.rows) * std::size_t(images.cols)) {
    throw std::invalid_argument("save_idx_images: pixel buffer does not match dims");
  }
  std::vector<std::uint8_t> bytes;
  bytes.reserve(16 + images.pixels.size());
  append_be32(bytes, kIdxImageMagic);
  append_be32(bytes, std::uint32_t(images.count));
  append_be32(bytes, std::uint32_t(images.rows));
  append_be32(bytes, std::uint32_t(images.cols));
  bytes.insert(bytes.end(), images.pixels.begin(), images.pixels.end());
  write_file(path, bytes);
}

void save_idx_labels(const std::filesystem::path& path, const IdxLabels& labels) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(8 + labels.values.size());
  append_be32(bytes, kIdxLabelMagic);
  append_be32(bytes, std::uint32_t(labels.values.size()));
  bytes.insert(bytes.end(), labels.values.begin(), labels.values.end());
  write_file(path, bytes);
}

Dataset make_dataset(const IdxImages& images, const IdxLabels& labels, int num_classes) {
  if (static_cast<std::size_t>(images.count) != labels.values.size()) {
    throw std::invalid_argument("make_dataset: " + std::to_string(images.count) + " images vs " +
                                std::to_string(labels.values.size()) + " labels");
  }
  Dataset data;
  data.num_classes = num_classes;
  const Index d = images.rows * images.cols;
  data.features.resize(images.count, d);
  data.labels.resize(images.count);
  for (Index i = 0; i < images.count; ++i) {
    for (Index j = 0; j < d; ++j) {
      data.features(i, j) = static_cast<double>(images.pixels[std::size_t(i * d + j)]) / 255.0;
    }
    data.labels[i] = labels.values[std::size_t(i)];
  }
  data.validate();
  return data;
}

IdxImages dataset_to_idx_images(const Dataset& data, Index rows, Index cols) {
  if (rows * cols != data.dim()) {
    throw std::invalid_argument("dataset_to_idx_images: rows*cols must equal feature dim");
  }
  IdxImages images;
  images.count = data.size();
  images.rows = rows;
  images.cols = cols;
  images.pixels.resize(std::size_t(data.size() * data.dim()));
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.dim(); ++j) {
      images.pixels[std::size_t(i * data.dim() + j)] =
          static_cast<std::uint8_t>(std::lround(data.features(i, j) * 255.0));
    }
  }
  return images;
}

IdxLabels dataset_to_idx_labels(const Dataset& data) {
  IdxLabels labels;
  labels.values.resize(std::size_t(data.size()));
  for (Index i = 0; i < data.size(); ++i) {
    labels.values[std::size_t(i)] = static_cast<std::uint8_t>(data.labels[i]);
  }
  return labels;
}

Dataset subset(const Dataset& data, Index n_per_class, std::uint64_t seed) {
  data.validate();
  if (n_per_class < 1) throw std::invalid_argument("subset: n_per_class must be >= 1");

  std::vector<std::vector<Index>> by_class(std::size_t(data.num_classes));
  for (Index i = 0; i < data.size(); ++i) by_class[std::size_t(data.labels[i])].push_back(i);

  RngEngine rng(seed);
  std::vector<Index> picked;
  picked.reserve(std::size_t(n_per_class) * std::size_t(data.num_classes));
  for (int k = 0; k < data.num_classes; ++k) {
    auto& pool = by_class[std::size_t(k)];
    if (static_cast<Index>(pool.size()) < n_per_class) {
      throw std::invalid_argument("subset: class " + std::to_string(k) + " has only " +
                                  std::to_string(pool.size()) + " samples, need " +
                                  std::to_string(n_per_class));
    }
    // Partial Fisher-Yates: the first n_per_class slots end up uniform.
    for (Index i = 0; i < n_per_class; ++i) {
      const auto j = i + static_cast<Index>(uniform_below(rng, std::uint64_t(pool.size() - i)));
      std::swap(pool[std::size_t(i)], pool[std::size_t(j)]);
      picked.push_back(pool[std::size_t(i)]);
    }
  }

  Dataset out;
  out.num_classes = data.num_classes;
  out.features.resize(static_cast<Index>(picked.size()), data.dim());
  out.labels.resize(static_cast<Index>(picked.size()));
  for (std::size_t r = 0; r < picked.size(); ++r) {
    out.features.row(static_cast<Index>(r)) = data.features.row(picked[r]);
    out.labels[static_cast<Index>(r)] = data.labels[picked[r]];
  }
  return out;
}

}  // namespace nirmal
