#include "hdproto/embedding_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "hdproto/error.hpp"

namespace hdp {
namespace {

constexpr char kMagic[4] = {'C', 'F', 'S', 'E'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFFu));
  }
}

template <typename T>
T get_le(const std::uint8_t* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(p[i]) << (8 * i);
  return value;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::size_t embedding_file_size(std::uint32_t dim, std::uint64_t sample_count) noexcept {
  return kEmbeddingHeaderBytes + sample_count * (4 + 4 * static_cast<std::size_t>(dim));
}

std::vector<std::uint8_t> encode_embeddings(const LabeledFeatures& data) {
  if (data.features.rows() != data.labels.size()) {
    raise(Errc::DimensionMismatch, "label count differs from sample count");
  }
  const auto dim = static_cast<std::uint32_t>(data.dim());
  std::vector<std::uint8_t> out;
  out.reserve(embedding_file_size(dim, data.size()));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kEmbeddingVersion);
  put_le<std::uint32_t>(out, dim);
  put_le<std::uint64_t>(out, data.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    put_le<std::uint32_t>(out, data.labels[n]);
    for (double v : data.features.row(n)) {
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  return out;
}

EmbeddingHeader decode_embedding_header(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    raise(Errc::BadMagic, "not an embedding file (bad magic)");
  }
  if (bytes.size() < kEmbeddingHeaderBytes) raise(Errc::TruncatedFile, "embedding header truncated");
  EmbeddingHeader h;
  h.version = get_le<std::uint32_t>(bytes.data() + 4);
  if (h.version != kEmbeddingVersion) {
    raise(Errc::VersionUnsupported, "embedding file version " + std::to_string(h.version));
  }
  h.dim = get_le<std::uint32_t>(bytes.data() + 8);
  h.sample_count = get_le<std::uint64_t>(bytes.data() + 12);
  if (h.dim == 0) raise(Errc::InvalidArgument, "embedding dimension is zero");
  const std::uint64_t record = 4 + 4 * static_cast<std::uint64_t>(h.dim);
  const std::uint64_t payload = bytes.size() - kEmbeddingHeaderBytes;
  if (h.sample_count > payload / record || payload != h.sample_count * record) {
    raise(Errc::TruncatedFile, "record bytes (" + std::to_string(payload) +
                                   ") do not match declared sample count " +
                                   std::to_string(h.sample_count));
  }
  return h;
}

LabeledFeatures decode_embeddings(const std::vector<std::uint8_t>& bytes) {
  const EmbeddingHeader h = decode_embedding_header(bytes);
  LabeledFeatures data;
  data.labels.reserve(h.sample_count);
  std::vector<double> values;
  values.reserve(h.sample_count * h.dim);
  const std::uint8_t* p = bytes.data() + kEmbeddingHeaderBytes;
  for (std::uint64_t n = 0; n < h.sample_count; ++n) {
    data.labels.push_back(get_le<std::uint32_t>(p));
    p += 4;
    for (std::uint32_t j = 0; j < h.dim; ++j, p += 4) {
      const float f = std::bit_cast<float>(get_le<std::uint32_t>(p));
      if (!std::isfinite(f)) raise(Errc::NonFiniteInput, "non-finite value in embedding record");
      values.push_back(f);
    }
  }
  data.features = Matrix(h.sample_count, h.dim, std::move(values));
  return data;
}

void write_embeddings(const std::filesystem::path& path, const LabeledFeatures& data) {
  const std::vector<std::uint8_t> bytes = encode_embeddings(data);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::IoError, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(Errc::IoError, "write failed for " + path.string());
}

LabeledFeatures read_embeddings(const std::filesystem::path& path) {
  return decode_embeddings(slurp(path));
}

EmbeddingHeader read_embedding_header(const std::filesystem::path& path) {
  return decode_embedding_header(slurp(path));
}

}  // namespace hdp
