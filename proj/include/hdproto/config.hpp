#pragma once

// Experiment configuration, read from a JSON document. Unknown keys are
// rejected. Example:
//
//   {
//     "d": 512, "d_f": 640, "mode": 3,
//     "T": 50, "beta": 0.01, "U": 100, "gamma": 0.01,
//     "alpha": 4, "stiffness": 10, "tau": 10, "attention": "softabs",
//     "compress_em": false, "reset_fcl": false, "seed": 7,
//     "schedule": {"preset": "mini_imagenet"},
//     "paths": {"train": "train.cfse", "eval": "eval.cfse"}
//   }
//
// "schedule" may instead give {"base_class_count": N, "novel_sessions":
// [{"ways": c, "shots": k, "repeat": r}, ...]}; "paths" may instead hold an
// inline synthetic spec: {"synth": {...}}.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "hdproto/experiment.hpp"
#include "hdproto/session.hpp"
#include "hdproto/synth.hpp"

namespace hdp {

struct ExperimentConfig {
  std::size_t d = 512;
  std::size_t d_f = 640;
  Mode mode = Mode::Averaged;
  std::optional<std::size_t> iterations_retrain;  // T; default depends on mode
  double beta = 0.01;
  std::size_t iterations_nudge = 100;  // U
  double gamma = 0.01;
  SharpenConfig sharpen;
  Attention attention = Attention::Softabs;
  bool compress_em = false;
  bool reset_fcl = false;
  std::uint32_t seed = 0;
  SessionSchedule schedule = SessionSchedule::mini_imagenet();
  std::optional<std::filesystem::path> train_path;
  std::optional<std::filesystem::path> eval_path;
  std::optional<SynthSpec> synth;

  /// T used when the config leaves it unset: 10 in Mode 2, 50 in Mode 3.
  std::size_t retrain_iterations() const noexcept;

  /// Softmax attention selects the anti-correlation nudging penalty.
  ModeConfig mode_config() const;
};

ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

SynthSpec parse_synth_spec(const std::string& text);
SynthSpec load_synth_spec(const std::filesystem::path& path);

/// Loads (or generates) the dataset named by the config; relative paths
/// resolve against base_dir.
Dataset load_dataset(const ExperimentConfig& cfg, const std::filesystem::path& base_dir);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace hdp
