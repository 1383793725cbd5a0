#include "hdproto/protomem.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "hdproto/error.hpp"
#include "hdproto/kernels.hpp"

namespace hdp {

void LabeledFeatures::push_back(ClassId label, VecView values) {
  features.append_row(values);
  labels.push_back(label);
}

std::optional<std::size_t> ExplicitMemory::index_of(ClassId id) const noexcept {
  const auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

void ExplicitMemory::append(ClassId id, VecView prototype) {
  if (index_of(id)) raise(Errc::DuplicateClass, "class " + std::to_string(id) + " already stored");
  require_finite(prototype, "prototype");
  prototypes_.append_row(prototype);
  ids_.push_back(id);
}

void ExplicitMemory::replace_prototypes(Matrix prototypes) {
  if (prototypes.rows() != prototypes_.rows() || prototypes.cols() != prototypes_.cols()) {
    raise(Errc::DimensionMismatch, "replacement prototypes change the memory shape");
  }
  require_finite(prototypes.flat(), "prototypes");
  prototypes_ = std::move(prototypes);
}

void GAAMemory::append(ClassId id, VecView mean_activation, std::size_t shots) {
  if (std::find(ids_.begin(), ids_.end(), id) != ids_.end()) {
    raise(Errc::DuplicateClass, "class " + std::to_string(id) + " already stored");
  }
  if (shots == 0) raise(Errc::EmptyClass, "class " + std::to_string(id) + " has no samples");
  activations_.append_row(mean_activation);
  ids_.push_back(id);
  shots_.push_back(shots);
}

std::vector<ClassMean> average_by_class(const LabeledFeatures& samples) {
  if (samples.features.rows() != samples.labels.size()) {
    raise(Errc::DimensionMismatch, "label count differs from sample count");
  }
  std::map<ClassId, std::size_t> slot;
  std::vector<ClassMean> means;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const ClassId id = samples.labels[n];
    auto [it, inserted] = slot.try_emplace(id, means.size());
    if (inserted) means.push_back({id, RealVec(samples.dim(), 0.0), 0});
    ClassMean& m = means[it->second];
    const VecView x = samples.features.row(n);
    for (std::size_t j = 0; j < x.size(); ++j) m.mean[j] += x[j];
    ++m.count;
  }
  for (ClassMean& m : means) {
    const double inv = static_cast<double>(m.count);
    for (double& v : m.mean) v /= inv;
  }
  std::sort(means.begin(), means.end(),
            [](const ClassMean& a, const ClassMean& b) { return a.id < b.id; });
  return means;
}

namespace {

void append_means(ExplicitMemory& em, GAAMemory* gaam, const EmbedLayer& layer,
                  const std::vector<ClassMean>& means) {
  // Validate fully before mutating either memory.
  for (const ClassMean& m : means) {
    if (em.index_of(m.id)) raise(Errc::DuplicateClass, "class " + std::to_string(m.id) + " already stored");
    if (gaam && std::find(gaam->class_ids().begin(), gaam->class_ids().end(), m.id) !=
                    gaam->class_ids().end()) {
      raise(Errc::DuplicateClass, "class " + std::to_string(m.id) + " already in GAA memory");
    }
  }
  std::vector<RealVec> prototypes;
  prototypes.reserve(means.size());
  for (const ClassMean& m : means) prototypes.push_back(layer.forward(m.mean));
  if (!em.empty() && layer.out_dim() != em.dim()) {
    raise(Errc::DimensionMismatch, "layer output dim does not match stored prototypes");
  }
  for (std::size_t i = 0; i < means.size(); ++i) {
    em.append(means[i].id, prototypes[i]);
    if (gaam) gaam->append(means[i].id, means[i].mean, means[i].count);
  }
}

void check_support(const LabeledFeatures& support, const EmbedLayer& layer) {
  if (support.size() == 0) raise(Errc::EmptyInput, "empty support set");
  if (support.dim() != layer.in_dim()) {
    raise(Errc::DimensionMismatch, "support feature dim " + std::to_string(support.dim()) +
                                       " != layer input dim " + std::to_string(layer.in_dim()));
  }
  require_finite(support.features.flat(), "support features");
}

}  // namespace

void add_classes(ExplicitMemory& em, GAAMemory* gaam, const EmbedLayer& layer,
                 const LabeledFeatures& support, std::size_t shots) {
  check_support(support, layer);
  const auto means = average_by_class(support);
  for (const ClassMean& m : means) {
    if (m.count != shots) {
      raise(Errc::ShotCountMismatch, "class " + std::to_string(m.id) + " has " +
                                         std::to_string(m.count) + " samples, expected " +
                                         std::to_string(shots));
    }
  }
  append_means(em, gaam, layer, means);
}

void add_classes_averaged(ExplicitMemory& em, GAAMemory* gaam, const EmbedLayer& layer,
                          const LabeledFeatures& samples) {
  check_support(samples, layer);
  append_means(em, gaam, layer, average_by_class(samples));
}

PrototypeScorer::PrototypeScorer(const ExplicitMemory& em)
    : unit_(em.size(), em.dim()), ids_(em.class_ids()) {
  for (std::size_t i = 0; i < em.size(); ++i) {
    const RealVec t = tanh_elem(em.prototypes().row(i));
    const double n = norm(t);
    if (!(n >= kZeroNormThreshold)) {
      raise(Errc::ZeroVector, "prototype of class " + std::to_string(ids_[i]) + " has zero norm");
    }
    auto row = unit_.row(i);
    for (std::size_t j = 0; j < t.size(); ++j) row[j] = t[j] / n;
  }
}

RealVec PrototypeScorer::score_embedded(VecView embedded) const {
  if (ids_.empty()) raise(Errc::EmptyMemory, "explicit memory is empty");
  if (embedded.size() != unit_.cols()) {
    raise(Errc::DimensionMismatch, "embedded query dim does not match prototypes");
  }
  const RealVec t = tanh_elem(embedded);
  const double n = norm(t);
  if (!(n >= kZeroNormThreshold)) raise(Errc::ZeroVector, "query embeds to a zero vector");
  RealVec scores(ids_.size());
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    scores[i] = std::clamp(k.dot(unit_.row(i).data(), t.data(), t.size()) / n, -1.0, 1.0);
  }
  return scores;
}

RealVec PrototypeScorer::score(const EmbedLayer& layer, VecView query) const {
  if (ids_.empty()) raise(Errc::EmptyMemory, "explicit memory is empty");
  return score_embedded(layer.forward(query));
}

ClassId PrototypeScorer::predict(const EmbedLayer& layer, VecView query) const {
  return ids_[argmax_first(score(layer, query))];
}

RealVec score(const ExplicitMemory& em, const EmbedLayer& layer, VecView query) {
  if (em.empty()) raise(Errc::EmptyMemory, "explicit memory is empty");
  return PrototypeScorer(em).score(layer, query);
}

ClassId predict(const ExplicitMemory& em, const EmbedLayer& layer, VecView query) {
  if (em.empty()) raise(Errc::EmptyMemory, "explicit memory is empty");
  return PrototypeScorer(em).predict(layer, query);
}

std::size_t argmax_first(VecView scores) {
  if (scores.empty()) raise(Errc::EmptyInput, "argmax of empty scores");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

RealVec readout(const ExplicitMemory& em, const EmbedLayer& layer, VecView query,
                Attention attention, const SharpenConfig& cfg) {
  return attend(score(em, layer, query), attention, cfg);
}

CompressedMemory::CompressedMemory(Matrix traces, std::vector<Slot> slots)
    : traces_(std::move(traces)), slots_(std::move(slots)) {
  if (traces_.rows() != slots_.size()) {
    raise(Errc::DimensionMismatch, "compressed memory: trace count differs from slot count");
  }
  std::set<ClassId> seen;
  for (const Slot& s : slots_) {
    if (s.members.empty() || s.members.size() > 2) {
      raise(Errc::InvalidArgument, "compressed memory slots hold one or two classes");
    }
    for (const Member& m : s.members) {
      if (!seen.insert(m.id).second) {
        raise(Errc::DuplicateClass, "class " + std::to_string(m.id) + " appears in two slots");
      }
    }
  }
}

std::size_t CompressedMemory::size() const noexcept {
  std::size_t n = 0;
  for (const Slot& s : slots_) n += s.members.size();
  return n;
}

RealVec CompressedMemory::decompress_class(ClassId id) const {
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    for (const Member& m : slots_[s].members) {
      if (m.id == id) return circ_correlate(traces_.row(s), key_from_seed(m.seed, dim()));
    }
  }
  raise(Errc::UnknownClass, "class " + std::to_string(id) + " not in compressed memory");
}

ExplicitMemory CompressedMemory::decompress_all() const {
  ExplicitMemory em;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    for (const Member& m : slots_[s].members) {
      em.append(m.id, circ_correlate(traces_.row(s), key_from_seed(m.seed, dim())));
    }
  }
  return em;
}

CompressedMemory compress(const ExplicitMemory& em, KeySeed seed_base) {
  if (em.empty()) raise(Errc::EmptyMemory, "nothing to compress");
  const std::size_t d = em.dim();
  const std::size_t slot_count = (em.size() + 1) / 2;
  Matrix traces(slot_count, d);
  std::vector<CompressedMemory::Slot> slots(slot_count);
  for (std::size_t i = 0; i < em.size(); ++i) {
    const KeySeed seed{static_cast<std::uint32_t>(seed_base.value + i)};
    const RealVec bound = circ_convolve(em.prototypes().row(i), key_from_seed(seed, d));
    auto trace = traces.row(i / 2);
    for (std::size_t j = 0; j < d; ++j) trace[j] += bound[j];
    slots[i / 2].members.push_back({em.class_ids()[i], seed});
  }
  return CompressedMemory(std::move(traces), std::move(slots));
}

ClassId predict_compressed(const CompressedMemory& cm, const EmbedLayer& layer, VecView query) {
  if (cm.size() == 0) raise(Errc::EmptyMemory, "compressed memory is empty");
  return predict(cm.decompress_all(), layer, query);
}

}  // namespace hdp
