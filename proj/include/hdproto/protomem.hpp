#pragma once

// Explicit memory of class prototypes, the memory of per-class averaged
// activations, cosine scoring/prediction and 2x holographic compression.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "hdproto/embedlayer.hpp"
#include "hdproto/hdvec.hpp"
#include "hdproto/matrix.hpp"

namespace hdp {

using ClassId = std::uint32_t;

/// Labeled feature vectors, one sample per row.
struct LabeledFeatures {
  std::vector<ClassId> labels;
  Matrix features;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return features.cols(); }
  void push_back(ClassId label, VecView values);
};

/// Prototypes in class-arrival order, one row per class.
class ExplicitMemory {
 public:
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  std::size_t dim() const noexcept { return prototypes_.cols(); }

  const Matrix& prototypes() const noexcept { return prototypes_; }
  const std::vector<ClassId>& class_ids() const noexcept { return ids_; }
  std::optional<std::size_t> index_of(ClassId id) const noexcept;

  void append(ClassId id, VecView prototype);

  /// Replaces every prototype at once; row count and width must not change.
  void replace_prototypes(Matrix prototypes);

  bool operator==(const ExplicitMemory&) const = default;

 private:
  Matrix prototypes_;
  std::vector<ClassId> ids_;
};

/// Averaged activations in class-arrival order, aligned with ExplicitMemory.
class GAAMemory {
 public:
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  const Matrix& activations() const noexcept { return activations_; }
  const std::vector<ClassId>& class_ids() const noexcept { return ids_; }
  const std::vector<std::size_t>& shot_counts() const noexcept { return shots_; }

  void append(ClassId id, VecView mean_activation, std::size_t shots);

  bool operator==(const GAAMemory&) const = default;

 private:
  Matrix activations_;
  std::vector<ClassId> ids_;
  std::vector<std::size_t> shots_;
};

struct ClassMean {
  ClassId id;
  RealVec mean;
  std::size_t count;
};

/// Per-class means in ascending class-id order.
std::vector<ClassMean> average_by_class(const LabeledFeatures& samples);

/// Appends one prototype (and, when gaam is given, one averaged activation)
/// per class in support. Every class must be new and have exactly `shots`
/// samples. Existing rows are never touched; on error nothing is modified.
void add_classes(ExplicitMemory& em, GAAMemory* gaam, const EmbedLayer& layer,
                 const LabeledFeatures& support, std::size_t shots);

/// As add_classes, but every class may have any positive sample count.
void add_classes_averaged(ExplicitMemory& em, GAAMemory* gaam, const EmbedLayer& layer,
                          const LabeledFeatures& samples);

/// Cosine scorer over a frozen set of prototypes; caches the unit-norm
/// tanh of each prototype.
class PrototypeScorer {
 public:
  explicit PrototypeScorer(const ExplicitMemory& em);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<ClassId>& class_ids() const noexcept { return ids_; }

  /// Scores an already-embedded query (pre-tanh layer output).
  RealVec score_embedded(VecView embedded) const;
  RealVec score(const EmbedLayer& layer, VecView query) const;
  ClassId predict(const EmbedLayer& layer, VecView query) const;

 private:
  Matrix unit_;
  std::vector<ClassId> ids_;
};

RealVec score(const ExplicitMemory& em, const EmbedLayer& layer, VecView query);

/// Class of the highest cosine score; ties go to the lowest memory index.
ClassId predict(const ExplicitMemory& em, const EmbedLayer& layer, VecView query);

std::size_t argmax_first(VecView scores);

RealVec readout(const ExplicitMemory& em, const EmbedLayer& layer, VecView query,
                Attention attention, const SharpenConfig& cfg);

/// Prototypes superposed two per slot after binding each with its own key.
class CompressedMemory {
 public:
  struct Member {
    ClassId id;
    KeySeed seed;
  };
  struct Slot {
    std::vector<Member> members;  // one or two
  };

  CompressedMemory(Matrix traces, std::vector<Slot> slots);

  std::size_t size() const noexcept;
  std::size_t slot_count() const noexcept { return slots_.size(); }
  std::size_t dim() const noexcept { return traces_.cols(); }
  const Matrix& traces() const noexcept { return traces_; }
  const std::vector<Slot>& slots() const noexcept { return slots_; }

  /// Noisy estimate of one prototype: correlate its slot trace with its key.
  RealVec decompress_class(ClassId id) const;

  /// All prototypes decompressed, in original memory order.
  ExplicitMemory decompress_all() const;

 private:
  Matrix traces_;
  std::vector<Slot> slots_;
};

/// Pairs consecutive classes in memory order. The member at memory index i
/// uses key seed seed_base + i.
CompressedMemory compress(const ExplicitMemory& em, KeySeed seed_base);

/// Scores against decompressed prototypes. Callers evaluating many queries
/// should decompress once and use PrototypeScorer.
ClassId predict_compressed(const CompressedMemory& cm, const EmbedLayer& layer, VecView query);

}  // namespace hdp
