// Command-line front end: experiment runs, gradient checks, synthetic data,
// compression benchmark and embedding-file inspection.
//
// Exit codes: 0 success, 2 usage, 3 unexpected internal error, 10+ one per
// hdp::Errc category. Failures print a single line to stderr:
//   error: <Category>: <message>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hdproto/checkpoint.hpp"
#include "hdproto/config.hpp"
#include "hdproto/csv.hpp"
#include "hdproto/embedding_io.hpp"
#include "hdproto/error.hpp"
#include "hdproto/experiment.hpp"
#include "hdproto/gradcheck.hpp"
#include "hdproto/kernels.hpp"
#include "hdproto/synth.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;
constexpr double kGradcheckTolerance = 1e-4;

struct RunArgs {
  std::string config;
  std::optional<int> mode;
  std::string out;
  std::string checkpoint;
};

int cmd_run(const RunArgs& args) {
  hdp::ExperimentConfig cfg = hdp::load_experiment_config(args.config);
  if (args.mode) cfg.mode = static_cast<hdp::Mode>(*args.mode);
  const auto base_dir = std::filesystem::path(args.config).parent_path();
  const hdp::Dataset data = hdp::load_dataset(cfg, base_dir);
  const hdp::ModeConfig mode = cfg.mode_config();
  spdlog::info("mode {} d={} d_f={} sessions={} kernels={}", static_cast<int>(cfg.mode), cfg.d,
               cfg.d_f, cfg.schedule.session_count(), hdp::kernels::active().name);

  std::optional<hdp::Learner> last;
  const auto results = hdp::run_experiment(
      data, cfg.schedule, mode, hdp::EmbedLayer::random(cfg.d, cfg.d_f, cfg.seed),
      [&](const hdp::SessionResult& r, const hdp::Learner& learner) {
        spdlog::info("session {} classes {} accuracy {:.4f}", r.session, r.class_count, r.accuracy);
        if (!args.checkpoint.empty()) last = learner;
      });

  if (args.out.empty()) {
    hdp::write_session_csv(std::cout, results);
  } else {
    std::ofstream out(args.out, std::ios::trunc);
    if (!out) hdp::raise(hdp::Errc::IoError, "cannot create " + args.out);
    hdp::write_session_csv(out, results);
  }
  if (last) hdp::save_checkpoint(args.checkpoint, *last);
  return 0;
}

int cmd_gradcheck(std::uint32_t seed, std::size_t points) {
  const hdp::GradcheckReport report = hdp::run_gradcheck({seed, points, 1e-5});
  std::printf("layer_max_rel_err=%.3e\nnudge_max_rel_err=%.3e\npoints=%zu\n",
              report.max_rel_error_layer, report.max_rel_error_nudge, report.points);
  if (report.max_rel_error() >= kGradcheckTolerance) {
    std::fprintf(stderr, "error: GradientMismatch: max relative error %.3e >= %.0e\n",
                 report.max_rel_error(), kGradcheckTolerance);
    return 4;
  }
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out, std::string eval_out) {
  const hdp::SynthSpec spec = hdp::load_synth_spec(spec_path);
  const hdp::Dataset data = hdp::generate_synthetic(spec);
  if (eval_out.empty()) eval_out = out + ".eval";
  hdp::write_embeddings(out, data.train);
  hdp::write_embeddings(eval_out, data.eval);
  spdlog::info("wrote {} train samples to {} and {} eval samples to {}", data.train.size(), out,
               data.eval.size(), eval_out);
  return 0;
}

int cmd_compressbench(const std::string& config_path) {
  hdp::ExperimentConfig cfg = hdp::load_experiment_config(config_path);
  const hdp::Dataset data =
      hdp::load_dataset(cfg, std::filesystem::path(config_path).parent_path());
  const auto layer = hdp::EmbedLayer::random(cfg.d, cfg.d_f, cfg.seed);
  hdp::ModeConfig plain = cfg.mode_config();
  plain.compress_em = false;
  hdp::ModeConfig packed = plain;
  packed.compress_em = true;
  const auto a = hdp::run_experiment(data, cfg.schedule, plain, layer);
  const auto b = hdp::run_experiment(data, cfg.schedule, packed, layer);
  std::printf("session,classes,accuracy,accuracy_compressed,drop\n");
  for (std::size_t s = 0; s < a.size(); ++s) {
    std::printf("%zu,%zu,%.6f,%.6f,%.6f\n", a[s].session, a[s].class_count, a[s].accuracy,
                b[s].accuracy, a[s].accuracy - b[s].accuracy);
  }
  return 0;
}

int cmd_inspect(const std::string& path) {
  const hdp::EmbeddingHeader h = hdp::read_embedding_header(path);
  const hdp::LabeledFeatures data = hdp::read_embeddings(path);
  std::set<hdp::ClassId> labels(data.labels.begin(), data.labels.end());
  std::printf("version=%u\nd_f=%u\nsamples=%llu\nclasses=%zu\nbytes=%zu\n", h.version, h.dim,
              static_cast<unsigned long long>(h.sample_count), labels.size(),
              hdp::embedding_file_size(h.dim, h.sample_count));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("hdproto"));
  spdlog::cfg::load_env_levels();

  CLI::App app{"Prototype-memory continual learning engine"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a session experiment and emit per-session CSV");
  run->add_option("--config", run_args.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--mode", run_args.mode, "Override the config mode")->check(CLI::Range(1, 3));
  run->add_option("--out", run_args.out, "CSV output path (default stdout)");
  run->add_option("--checkpoint", run_args.checkpoint, "Write the final learner state (JSON)");

  std::uint32_t gc_seed = 0;
  std::size_t gc_points = 20;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of analytic gradients");
  gradcheck->add_option("--seed", gc_seed, "RNG seed");
  gradcheck->add_option("--points", gc_points, "Random points per loss")->check(CLI::PositiveNumber);

  std::string synth_spec, synth_out, synth_eval_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic Gaussian-cluster embedding file");
  synth->add_option("--spec", synth_spec, "Synthetic spec (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", synth_out, "Train embedding file")->required();
  synth->add_option("--eval-out", synth_eval_out, "Eval embedding file (default <out>.eval)");

  std::string bench_config;
  auto* bench = app.add_subcommand("compressbench", "Accuracy with and without 2x memory compression");
  bench->add_option("--config", bench_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Print an embedding file header summary");
  inspect->add_option("file", inspect_path, "Embedding file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: Usage: %s\n", e.what());
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*gradcheck) return cmd_gradcheck(gc_seed, gc_points);
    if (*synth) return cmd_synth(synth_spec, synth_out, synth_eval_out);
    if (*bench) return cmd_compressbench(bench_config);
    if (*inspect) return cmd_inspect(inspect_path);
  } catch (const hdp::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(hdp::errc_name(e.code())).c_str(), e.what());
    return hdp::errc_exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: Internal: %s\n", e.what());
    return kExitInternal;
  }
  return kExitUsage;
}
