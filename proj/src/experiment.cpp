#include "hdproto/experiment.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "hdproto/error.hpp"

namespace hdp {

std::size_t SessionSchedule::total_classes() const noexcept {
  std::size_t n = base_class_count;
  for (const NovelSession& s : novel_sessions) n += s.ways;
  return n;
}

std::vector<std::size_t> SessionSchedule::class_counts() const {
  std::vector<std::size_t> counts{base_class_count};
  for (const NovelSession& s : novel_sessions) counts.push_back(counts.back() + s.ways);
  return counts;
}

void SessionSchedule::validate() const {
  if (base_class_count == 0) raise(Errc::ConfigError, "schedule needs at least one base class");
  for (const NovelSession& s : novel_sessions) {
    if (s.ways == 0 || s.shots == 0) raise(Errc::ConfigError, "novel sessions need ways >= 1 and shots >= 1");
  }
}

SessionSchedule SessionSchedule::mini_imagenet() {
  return {60, std::vector<NovelSession>(8, NovelSession{5, 5})};
}

SessionSchedule SessionSchedule::cifar100() {
  return {60, std::vector<NovelSession>(8, NovelSession{5, 5})};
}

SessionSchedule SessionSchedule::omniglot() {
  return {1200, std::vector<NovelSession>(9, NovelSession{47, 5})};
}

std::vector<SessionSplit> split_sessions(const Dataset& data, const SessionSchedule& schedule) {
  schedule.validate();
  std::set<ClassId> label_set(data.train.labels.begin(), data.train.labels.end());
  const std::vector<ClassId> labels(label_set.begin(), label_set.end());
  if (labels.size() < schedule.total_classes()) {
    raise(Errc::InvalidArgument, "dataset has " + std::to_string(labels.size()) +
                                     " classes, schedule needs " +
                                     std::to_string(schedule.total_classes()));
  }
  if (data.eval.size() != 0 && data.eval.dim() != data.train.dim()) {
    raise(Errc::DimensionMismatch, "train and eval feature dims differ");
  }

  std::vector<SessionSplit> splits(schedule.session_count());
  std::map<ClassId, std::size_t> session_of;
  std::size_t next = 0;
  for (std::size_t s = 0; s < splits.size(); ++s) {
    const std::size_t ways = s == 0 ? schedule.base_class_count : schedule.novel_sessions[s - 1].ways;
    for (std::size_t c = 0; c < ways; ++c) {
      splits[s].classes.push_back(labels[next]);
      session_of[labels[next]] = s;
      ++next;
    }
  }

  std::map<ClassId, std::size_t> taken;
  for (std::size_t n = 0; n < data.train.size(); ++n) {
    const ClassId id = data.train.labels[n];
    const auto it = session_of.find(id);
    if (it == session_of.end()) continue;
    const std::size_t s = it->second;
    if (s > 0 && taken[id] >= schedule.novel_sessions[s - 1].shots) continue;
    ++taken[id];
    splits[s].train.push_back(id, data.train.features.row(n));
  }
  for (std::size_t s = 1; s < splits.size(); ++s) {
    for (ClassId id : splits[s].classes) {
      if (taken[id] < schedule.novel_sessions[s - 1].shots) {
        raise(Errc::ShotCountMismatch, "class " + std::to_string(id) + " has fewer than " +
                                           std::to_string(schedule.novel_sessions[s - 1].shots) +
                                           " training samples");
      }
    }
  }

  for (std::size_t n = 0; n < data.eval.size(); ++n) {
    const auto it = session_of.find(data.eval.labels[n]);
    if (it == session_of.end()) continue;
    for (std::size_t s = it->second; s < splits.size(); ++s) {
      splits[s].eval.push_back(data.eval.labels[n], data.eval.features.row(n));
    }
  }
  return splits;
}

std::vector<SessionResult> run_experiment(const Dataset& data, const SessionSchedule& schedule,
                                          const ModeConfig& cfg, const EmbedLayer& initial,
                                          const SessionCallback& on_session) {
  const std::vector<SessionSplit> splits = split_sessions(data, schedule);
  Learner learner(initial, cfg);
  std::vector<SessionResult> results;
  results.reserve(splits.size());
  for (std::size_t s = 0; s < splits.size(); ++s) {
    if (s == 0) {
      learner.run_base_session(splits[s].train);
    } else {
      learner.run_incremental_session(splits[s].train, schedule.novel_sessions[s - 1].shots);
    }
    results.push_back(learner.evaluate(splits[s].eval));
    if (on_session) on_session(results.back(), learner);
  }
  return results;
}

std::vector<SessionResult> run_experiment(const Dataset& data, const SessionSchedule& schedule,
                                          const ModeConfig& cfg, std::size_t out_dim,
                                          std::uint32_t seed) {
  return run_experiment(data, schedule, cfg, EmbedLayer::random(out_dim, data.train.dim(), seed));
}

std::vector<double> nearest_mean_accuracy(const Dataset& data, const SessionSchedule& schedule) {
  const std::vector<SessionSplit> splits = split_sessions(data, schedule);
  std::vector<ClassMean> means;
  std::vector<double> accuracy;
  for (const SessionSplit& split : splits) {
    for (ClassMean& m : average_by_class(split.train)) means.push_back(std::move(m));
    if (split.eval.size() == 0) raise(Errc::EmptyEvaluation, "evaluation set is empty");
    std::size_t correct = 0;
    for (std::size_t n = 0; n < split.eval.size(); ++n) {
      const VecView x = split.eval.features.row(n);
      double best = std::numeric_limits<double>::infinity();
      ClassId best_id = 0;
      for (const ClassMean& m : means) {
        double dist = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) dist += (x[j] - m.mean[j]) * (x[j] - m.mean[j]);
        if (dist < best) {
          best = dist;
          best_id = m.id;
        }
      }
      if (best_id == split.eval.labels[n]) ++correct;
    }
    accuracy.push_back(static_cast<double>(correct) / static_cast<double>(split.eval.size()));
  }
  return accuracy;
}

}  // namespace hdp
