#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hdproto/protomem.hpp"
#include "hdproto/session.hpp"

namespace hdp {

struct NovelSession {
  std::size_t ways = 0;
  std::size_t shots = 0;
  bool operator==(const NovelSession&) const = default;
};

/// Base session plus a sequence of c-way k-shot sessions. Class ids are
/// assigned in ascending label order: the first base_class_count labels form
/// the base session, each novel session takes the next `ways` labels.
struct SessionSchedule {
  std::size_t base_class_count = 0;
  std::vector<NovelSession> novel_sessions;

  std::size_t session_count() const noexcept { return 1 + novel_sessions.size(); }
  std::size_t total_classes() const noexcept;
  /// Number of classes seen after each session (1-based session s at s-1).
  std::vector<std::size_t> class_counts() const;
  void validate() const;

  static SessionSchedule mini_imagenet();  // 60 + 8 x (5-way 5-shot)
  static SessionSchedule cifar100();       // 60 + 8 x (5-way 5-shot)
  static SessionSchedule omniglot();       // 1200 + 9 x (47-way 5-shot)
};

struct Dataset {
  LabeledFeatures train;
  LabeledFeatures eval;
};

/// Samples partitioned by session according to a schedule.
struct SessionSplit {
  std::vector<ClassId> classes;  // classes introduced in this session
  LabeledFeatures train;         // all samples (base) or first k shots (novel)
  LabeledFeatures eval;          // eval samples of every class seen so far
};

std::vector<SessionSplit> split_sessions(const Dataset& data, const SessionSchedule& schedule);

using SessionCallback = std::function<void(const SessionResult&, const Learner&)>;

std::vector<SessionResult> run_experiment(const Dataset& data, const SessionSchedule& schedule,
                                          const ModeConfig& cfg, const EmbedLayer& initial,
                                          const SessionCallback& on_session = {});

/// Seeds a random out_dim x feature-dim layer from `seed`.
std::vector<SessionResult> run_experiment(const Dataset& data, const SessionSchedule& schedule,
                                          const ModeConfig& cfg, std::size_t out_dim,
                                          std::uint32_t seed);

/// Top-1 accuracy of nearest class mean (Euclidean, feature space) using the
/// train samples of each session split; returns one value per session.
std::vector<double> nearest_mean_accuracy(const Dataset& data, const SessionSchedule& schedule);

}  // namespace hdp
