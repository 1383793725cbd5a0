#pragma once

// Binary embedding file:
//   "CFSE" | u32 version (=1) | u32 d_f | u64 sample_count |
//   sample_count x (u32 label | d_f x f32)
// All integers and floats little-endian.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "hdproto/protomem.hpp"

namespace hdp {

inline constexpr std::uint32_t kEmbeddingVersion = 1;
inline constexpr std::size_t kEmbeddingHeaderBytes = 4 + 4 + 4 + 8;

struct EmbeddingHeader {
  std::uint32_t version = kEmbeddingVersion;
  std::uint32_t dim = 0;
  std::uint64_t sample_count = 0;
};

std::size_t embedding_file_size(std::uint32_t dim, std::uint64_t sample_count) noexcept;

std::vector<std::uint8_t> encode_embeddings(const LabeledFeatures& data);
LabeledFeatures decode_embeddings(const std::vector<std::uint8_t>& bytes);
EmbeddingHeader decode_embedding_header(const std::vector<std::uint8_t>& bytes);

/// Values are narrowed to 32-bit floats on write.
void write_embeddings(const std::filesystem::path& path, const LabeledFeatures& data);
LabeledFeatures read_embeddings(const std::filesystem::path& path);
EmbeddingHeader read_embedding_header(const std::filesystem::path& path);

}  // namespace hdp
