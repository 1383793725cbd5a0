#include "hdproto/session.hpp"

#include <cmath>
#include <string>

#include "hdproto/error.hpp"

namespace hdp {

void ModeConfig::validate() const {
  const int m = static_cast<int>(mode);
  if (m < 1 || m > 3) raise(Errc::InvalidArgument, "mode must be 1, 2 or 3");
  retrain.validate();
  nudge.validate();
  sharpen.validate();
}

Learner::Learner(EmbedLayer layer, ModeConfig cfg)
    : cfg_(std::move(cfg)), layer_(layer), base_layer_(std::move(layer)) {
  cfg_.validate();
  if (cfg_.uses_gaam()) gaam_.emplace();
}

Learner Learner::restore(ModeConfig cfg, EmbedLayer layer, EmbedLayer base_layer,
                         ExplicitMemory em, std::optional<GAAMemory> gaam, std::size_t session) {
  Learner l(std::move(base_layer), std::move(cfg));
  l.layer_ = std::move(layer);
  l.em_ = std::move(em);
  if (l.cfg_.uses_gaam()) {
    if (!gaam || gaam->class_ids() != l.em_.class_ids()) {
      raise(Errc::InvalidArgument, "checkpoint GAA memory missing or misaligned with memory");
    }
    l.gaam_ = std::move(gaam);
  }
  l.session_ = session;
  l.refresh_compression();
  return l;
}

void Learner::run_base_session(const LabeledFeatures& data) {
  if (session_ != 0) raise(Errc::InvalidArgument, "base session already run");
  if (data.size() == 0) raise(Errc::EmptyClass, "base session has no samples");
  add_classes_averaged(em_, gaam_ ? &*gaam_ : nullptr, layer_, data);
  base_layer_ = layer_;
  session_ = 1;
  apply_mode_pipeline();
}

void Learner::run_incremental_session(const LabeledFeatures& support, std::size_t shots) {
  if (session_ == 0) raise(Errc::InvalidArgument, "incremental session before base session");
  add_classes(em_, gaam_ ? &*gaam_ : nullptr, layer_, support, shots);
  ++session_;
  apply_mode_pipeline();
}

void Learner::apply_mode_pipeline() {
  diag_ = SessionDiagnostics{};
  if (cfg_.mode != Mode::Averaged) {
    const Matrix& activations = gaam_->activations();
    Matrix targets;
    if (cfg_.mode == Mode::Bipolarized) {
      targets = Matrix(em_.size(), em_.dim());
      for (std::size_t i = 0; i < em_.size(); ++i) {
        const RealVec b = bipolarize(em_.prototypes().row(i));
        std::copy(b.begin(), b.end(), targets.row(i).begin());
      }
    } else {
      NudgeResult nudged = run_nudging(em_.prototypes(), cfg_.nudge);
      targets = std::move(nudged.prototypes);
      diag_.nudge_trace = std::move(nudged.trace);
    }
    EmbedLayer start = cfg_.reset_fcl ? base_layer_ : layer_;
    RetrainResult rt = retrain(std::move(start), targets, activations, cfg_.retrain);
    layer_ = std::move(rt.layer);
    diag_.retrain_trace = std::move(rt.trace);
    em_.replace_prototypes(regenerate_prototypes(layer_, activations));
  }
  diag_.crosstalk = offdiag_cosine(em_.prototypes());
  refresh_compression();
}

void Learner::refresh_compression() {
  if (!cfg_.compress_em || em_.empty()) {
    compressed_.reset();
    decompressed_ = ExplicitMemory{};
    return;
  }
  compressed_ = compress(em_, cfg_.compression_seed);
  decompressed_ = compressed_->decompress_all();
}

SessionResult Learner::evaluate(const LabeledFeatures& eval) const {
  if (eval.size() == 0) raise(Errc::EmptyEvaluation, "evaluation set is empty");
  if (em_.empty()) raise(Errc::EmptyMemory, "nothing learned yet");
  for (ClassId id : eval.labels) {
    if (!em_.index_of(id)) raise(Errc::UnknownLabel, "evaluation label " + std::to_string(id) + " not learned");
  }

  const ExplicitMemory& reference = cfg_.compress_em ? decompressed_ : em_;
  const PrototypeScorer scorer(reference);
  std::size_t correct = 0;
  double nll = 0.0;
  for (std::size_t n = 0; n < eval.size(); ++n) {
    const RealVec scores = scorer.score(layer_, eval.features.row(n));
    const ClassId truth = eval.labels[n];
    if (scorer.class_ids()[argmax_first(scores)] == truth) ++correct;
    const RealVec weights = attend(scores, cfg_.attention, cfg_.sharpen);
    nll -= std::log(weights[*reference.index_of(truth)]);
  }

  SessionResult result;
  result.session = session_;
  result.class_count = em_.size();
  result.accuracy = static_cast<double>(correct) / static_cast<double>(eval.size());
  result.diagnostics = diag_;
  result.diagnostics.mean_nll = nll / static_cast<double>(eval.size());
  return result;
}

}  // namespace hdp
