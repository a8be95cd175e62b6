#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "nirmal/models.hpp"

namespace nirmal {

// IDX binary container (the MNIST/FashionMNIST distribution format):
// magic u32 big-endian (2 zero bytes, type byte 0x08, dimension-count byte),
// one big-endian u32 per dimension, then the row-major u8 payload.
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;  // 2051, 3-D u8
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;  // 2049, 1-D u8

struct IdxImages {
  Index count = 0;
  Index rows = 0;
  Index cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major
};

struct IdxLabels {
  std::vector<std::uint8_t> values;
};

// Loaders read the whole file, validate the magic and that the header dims
// account for every payload byte, and throw std::runtime_error naming the
// problem otherwise.
IdxImages load_idx_images(const std::filesystem::path& path);
IdxLabels load_idx_labels(const std::filesystem::path& path);

void save_idx_images(const std::filesystem::path& path, const IdxImages& images);
void save_idx_labels(const std::filesystem::path& path, const IdxLabels& labels);

// Pairs images with labels, scaling pixels to [0, 1] by dividing by 255.
Dataset make_dataset(const IdxImages& images, const IdxLabels& labels, int num_classes = 10);

// Quantizes features back to bytes (inverse of make_dataset for data that
// came from u8 pixels). rows x cols must equal the feature dimension.
IdxImages dataset_to_idx_images(const Dataset& data, Index rows, Index cols);
IdxLabels dataset_to_idx_labels(const Dataset& data);

// Class-balanced deterministic subset: n_per_class samples drawn from every
// class without replacement, stable in the seed. Throws naming the first
// class with fewer than n_per_class samples.
Dataset subset(const Dataset& data, Index n_per_class, std::uint64_t seed);

}  // namespace nirmal
