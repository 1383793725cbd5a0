#pragma once

// Session orchestration: a base session followed by few-shot incremental
// sessions. Only the memories and the embedding layer survive between
// sessions; raw samples of earlier sessions are never retained.

#include <cstddef>
#include <optional>
#include <vector>

#include "hdproto/embedlayer.hpp"
#include "hdproto/nudge.hpp"
#include "hdproto/protomem.hpp"

namespace hdp {

enum class Mode {
  Averaged = 1,     // append averaged prototypes only
  Bipolarized = 2,  // retrain the layer toward sign-quantized prototypes
  Nudged = 3,       // retrain the layer toward nudged prototypes
};

struct ModeConfig {
  Mode mode = Mode::Averaged;
  RetrainConfig retrain;
  NudgeConfig nudge;
  Attention attention = Attention::Softabs;
  SharpenConfig sharpen;
  bool reset_fcl = false;    // restore the base-session layer before each retrain
  bool compress_em = false;  // evaluate against 2x compressed prototypes
  KeySeed compression_seed{0};
  // Mode 1 normally keeps no averaged-activation memory; set to keep it anyway.
  bool keep_gaam = false;

  void validate() const;
  bool uses_gaam() const noexcept { return mode != Mode::Averaged || keep_gaam; }
};

struct SessionDiagnostics {
  std::vector<double> retrain_trace;
  std::vector<double> nudge_trace;
  CrossTalk crosstalk;
  double mean_nll = 0.0;  // attention readout loss on the evaluation set
};

struct SessionResult {
  std::size_t session = 0;  // 1-based
  std::size_t class_count = 0;
  double accuracy = 0.0;
  SessionDiagnostics diagnostics;
};

class Learner {
 public:
  Learner(EmbedLayer layer, ModeConfig cfg);

  /// Builds the memories from every sample of the base classes, then runs
  /// the mode pipeline.
  void run_base_session(const LabeledFeatures& data);

  /// Adds exactly `shots` samples for each new class, then runs the mode
  /// pipeline over all stored classes.
  void run_incremental_session(const LabeledFeatures& support, std::size_t shots);

  /// Top-1 accuracy over eval, whose labels must all be stored classes.
  SessionResult evaluate(const LabeledFeatures& eval) const;

  std::size_t session() const noexcept { return session_; }
  const ModeConfig& config() const noexcept { return cfg_; }
  const EmbedLayer& layer() const noexcept { return layer_; }
  const EmbedLayer& base_layer() const noexcept { return base_layer_; }
  const ExplicitMemory& memory() const noexcept { return em_; }
  const std::optional<GAAMemory>& gaa_memory() const noexcept { return gaam_; }
  const std::optional<CompressedMemory>& compressed() const noexcept { return compressed_; }
  const SessionDiagnostics& last_diagnostics() const noexcept { return diag_; }

  /// Restores a checkpointed state.
  static Learner restore(ModeConfig cfg, EmbedLayer layer, EmbedLayer base_layer,
                         ExplicitMemory em, std::optional<GAAMemory> gaam, std::size_t session);

 private:
  void apply_mode_pipeline();
  void refresh_compression();

  ModeConfig cfg_;
  EmbedLayer layer_;
  EmbedLayer base_layer_;
  ExplicitMemory em_;
  std::optional<GAAMemory> gaam_;
  std::optional<CompressedMemory> compressed_;
  ExplicitMemory decompressed_;  // per-session cache of the compressed prototypes
  SessionDiagnostics diag_;
  std::size_t session_ = 0;
};

}  // namespace hdp
