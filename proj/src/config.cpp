#include "hdproto/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hdproto/embedding_io.hpp"
#include "hdproto/error.hpp"

namespace hdp {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) raise(Errc::ConfigError, where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) raise(Errc::ConfigError, where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    raise(Errc::ConfigError, where + "." + key + ": " + e.what());
  }
}

template <typename T>
void get_if(const json& obj, const char* key, T& out, const std::string& where) {
  if (obj.contains(key)) out = get<T>(obj, key, where);
}

std::size_t get_count(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) raise(Errc::ConfigError, where + ": missing key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    raise(Errc::ConfigError, where + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::uint32_t get_seed(const json& obj, const std::string& where) {
  const std::size_t v = get_count(obj, "seed", where);
  if (v > 0xFFFFFFFFu) raise(Errc::ConfigError, where + ".seed: exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    raise(Errc::ConfigError, std::string("malformed JSON: ") + e.what());
  }
}

SessionSchedule parse_schedule(const json& obj) {
  if (obj.contains("preset")) {
    reject_unknown(obj, {"preset"}, "schedule");
    const auto name = get<std::string>(obj, "preset", "schedule");
    if (name == "mini_imagenet") return SessionSchedule::mini_imagenet();
    if (name == "cifar100") return SessionSchedule::cifar100();
    if (name == "omniglot") return SessionSchedule::omniglot();
    raise(Errc::ConfigError, "schedule.preset: unknown preset '" + name + "'");
  }
  reject_unknown(obj, {"base_class_count", "novel_sessions"}, "schedule");
  SessionSchedule s;
  s.base_class_count = get_count(obj, "base_class_count", "schedule");
  if (obj.contains("novel_sessions")) {
    const json& list = obj.at("novel_sessions");
    if (!list.is_array()) raise(Errc::ConfigError, "schedule.novel_sessions: expected an array");
    for (const json& item : list) {
      reject_unknown(item, {"ways", "shots", "repeat"}, "schedule.novel_sessions[]");
      const NovelSession ns{get_count(item, "ways", "novel_sessions[]"),
                            get_count(item, "shots", "novel_sessions[]")};
      const std::size_t repeat = item.contains("repeat") ? get_count(item, "repeat", "novel_sessions[]") : 1;
      s.novel_sessions.insert(s.novel_sessions.end(), repeat, ns);
    }
  }
  s.validate();
  return s;
}

SynthSpec synth_from_json(const json& obj) {
  const std::string where = "synth";
  reject_unknown(obj, {"class_count", "d_f", "cluster_center_scale", "cluster_sigma", "shots_train",
                       "shots_eval", "seed"},
                 where);
  SynthSpec s;
  if (obj.contains("class_count")) s.class_count = get_count(obj, "class_count", where);
  if (obj.contains("d_f")) s.d_f = get_count(obj, "d_f", where);
  get_if(obj, "cluster_center_scale", s.cluster_center_scale, where);
  get_if(obj, "cluster_sigma", s.cluster_sigma, where);
  if (obj.contains("shots_train")) s.shots_train = get_count(obj, "shots_train", where);
  if (obj.contains("shots_eval")) s.shots_eval = get_count(obj, "shots_eval", where);
  if (obj.contains("seed")) s.seed = get_seed(obj, where);
  s.validate();
  return s;
}

Attention parse_attention(const std::string& name) {
  if (name == "softabs") return Attention::Softabs;
  if (name == "softmax") return Attention::Softmax;
  raise(Errc::ConfigError, "attention: expected 'softabs' or 'softmax', got '" + name + "'");
}

}  // namespace

std::size_t ExperimentConfig::retrain_iterations() const noexcept {
  if (iterations_retrain) return *iterations_retrain;
  return mode == Mode::Nudged ? 50 : 10;
}

ModeConfig ExperimentConfig::mode_config() const {
  ModeConfig m;
  m.mode = mode;
  m.retrain = RetrainConfig{retrain_iterations(), beta};
  m.nudge.iterations = iterations_nudge;
  m.nudge.rate = gamma;
  m.nudge.sharpen = sharpen;
  m.nudge.variant = attention == Attention::Softmax ? NudgeVariant::AntiCorrelated : NudgeVariant::Symmetric;
  m.attention = attention;
  m.sharpen = sharpen;
  m.reset_fcl = reset_fcl;
  m.compress_em = compress_em;
  m.compression_seed = KeySeed{seed};
  m.validate();
  return m;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  const json root = parse_json(text);
  const std::string where = "config";
  reject_unknown(root, {"d", "d_f", "mode", "T", "beta", "U", "gamma", "alpha", "stiffness", "tau",
                        "attention", "compress_em", "reset_fcl", "seed", "schedule", "paths"},
                 where);
  ExperimentConfig cfg;
  if (root.contains("d")) cfg.d = get_count(root, "d", where);
  if (root.contains("d_f")) cfg.d_f = get_count(root, "d_f", where);
  if (root.contains("mode")) {
    const auto m = get_count(root, "mode", where);
    if (m < 1 || m > 3) raise(Errc::ConfigError, "config.mode: expected 1, 2 or 3");
    cfg.mode = static_cast<Mode>(m);
  }
  if (root.contains("T")) cfg.iterations_retrain = get_count(root, "T", where);
  get_if(root, "beta", cfg.beta, where);
  if (root.contains("U")) cfg.iterations_nudge = get_count(root, "U", where);
  get_if(root, "gamma", cfg.gamma, where);
  get_if(root, "alpha", cfg.sharpen.alpha, where);
  get_if(root, "stiffness", cfg.sharpen.stiffness, where);
  get_if(root, "tau", cfg.sharpen.tau, where);
  if (root.contains("attention")) cfg.attention = parse_attention(get<std::string>(root, "attention", where));
  get_if(root, "compress_em", cfg.compress_em, where);
  get_if(root, "reset_fcl", cfg.reset_fcl, where);
  if (root.contains("seed")) cfg.seed = get_seed(root, where);
  if (root.contains("schedule")) cfg.schedule = parse_schedule(root.at("schedule"));
  if (root.contains("paths")) {
    const json& paths = root.at("paths");
    reject_unknown(paths, {"train", "eval", "synth"}, "paths");
    if (paths.contains("synth")) {
      if (paths.contains("train") || paths.contains("eval")) {
        raise(Errc::ConfigError, "paths: give either synth or train/eval files, not both");
      }
      cfg.synth = synth_from_json(paths.at("synth"));
    } else {
      cfg.train_path = get<std::string>(paths, "train", "paths");
      cfg.eval_path = get<std::string>(paths, "eval", "paths");
    }
  }
  if (cfg.d == 0 || cfg.d_f == 0) raise(Errc::ConfigError, "config: d and d_f must be positive");
  if (cfg.synth && cfg.synth->d_f != cfg.d_f) {
    raise(Errc::ConfigError, "config: synth.d_f differs from d_f");
  }
  cfg.mode_config();  // validates rates and sharpening constants
  return cfg;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_text_file(path));
}

SynthSpec parse_synth_spec(const std::string& text) { return synth_from_json(parse_json(text)); }

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  return parse_synth_spec(read_text_file(path));
}

Dataset load_dataset(const ExperimentConfig& cfg, const std::filesystem::path& base_dir) {
  Dataset data;
  if (cfg.synth) {
    data = generate_synthetic(*cfg.synth);
  } else if (cfg.train_path && cfg.eval_path) {
    auto resolve = [&](const std::filesystem::path& p) { return p.is_absolute() ? p : base_dir / p; };
    data.train = read_embeddings(resolve(*cfg.train_path));
    data.eval = read_embeddings(resolve(*cfg.eval_path));
  } else {
    raise(Errc::ConfigError, "config: no data source (paths.train/eval or paths.synth)");
  }
  if (data.train.dim() != cfg.d_f) {
    raise(Errc::DimensionMismatch, "data feature dim " + std::to_string(data.train.dim()) +
                                       " != config d_f " + std::to_string(cfg.d_f));
  }
  return data;
}

}  // namespace hdp
