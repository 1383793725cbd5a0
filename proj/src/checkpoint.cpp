#include "hdproto/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "hdproto/config.hpp"
#include "hdproto/error.hpp"

namespace hdp {
namespace {

using nlohmann::json;

json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()},
          {"data", std::vector<double>(m.flat().begin(), m.flat().end())}};
}

Matrix matrix_from(const json& j) {
  return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                j.at("data").get<std::vector<double>>());
}

}  // namespace

std::string checkpoint_to_json(const Learner& learner) {
  json root;
  root["format"] = "hdproto-checkpoint";
  root["version"] = 1;
  root["session"] = learner.session();
  root["layer"] = matrix_json(learner.layer().weights());
  root["base_layer"] = matrix_json(learner.base_layer().weights());
  root["memory"] = {{"class_ids", learner.memory().class_ids()},
                    {"prototypes", matrix_json(learner.memory().prototypes())}};
  if (const auto& gaam = learner.gaa_memory()) {
    root["gaa_memory"] = {{"class_ids", gaam->class_ids()},
                          {"shot_counts", gaam->shot_counts()},
                          {"activations", matrix_json(gaam->activations())}};
  }
  if (const auto& cm = learner.compressed()) {
    json slots = json::array();
    for (const auto& slot : cm->slots()) {
      json members = json::array();
      for (const auto& m : slot.members) members.push_back({{"class_id", m.id}, {"seed", m.seed.value}});
      slots.push_back(members);
    }
    root["compressed_memory"] = {{"traces", matrix_json(cm->traces())}, {"slots", slots}};
  }
  return root.dump(1);
}

Learner learner_from_json(const std::string& text, const ModeConfig& cfg) {
  try {
    const json root = json::parse(text);
    if (!root.is_object() || root.value("format", "") != "hdproto-checkpoint") {
      raise(Errc::BadMagic, "not an hdproto checkpoint");
    }
    if (root.at("version") != 1) raise(Errc::VersionUnsupported, "unsupported checkpoint version");
    ExplicitMemory em;
    const auto ids = root.at("memory").at("class_ids").get<std::vector<ClassId>>();
    const Matrix protos = matrix_from(root.at("memory").at("prototypes"));
    if (protos.rows() != ids.size()) raise(Errc::DimensionMismatch, "checkpoint memory misaligned");
    for (std::size_t i = 0; i < ids.size(); ++i) em.append(ids[i], protos.row(i));

    std::optional<GAAMemory> gaam;
    if (root.contains("gaa_memory")) {
      const json& g = root.at("gaa_memory");
      const auto gids = g.at("class_ids").get<std::vector<ClassId>>();
      const auto shots = g.at("shot_counts").get<std::vector<std::size_t>>();
      const Matrix acts = matrix_from(g.at("activations"));
      if (acts.rows() != gids.size() || shots.size() != gids.size()) {
        raise(Errc::DimensionMismatch, "checkpoint GAA memory misaligned");
      }
      gaam.emplace();
      for (std::size_t i = 0; i < gids.size(); ++i) gaam->append(gids[i], acts.row(i), shots[i]);
    }
    return Learner::restore(cfg, EmbedLayer(matrix_from(root.at("layer"))),
                            EmbedLayer(matrix_from(root.at("base_layer"))), std::move(em),
                            std::move(gaam), root.at("session").get<std::size_t>());
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::ConfigError, std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Learner& learner) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise(Errc::IoError, "cannot create " + path.string());
  out << checkpoint_to_json(learner) << '\n';
}

Learner load_checkpoint(const std::filesystem::path& path, const ModeConfig& cfg) {
  return learner_from_json(read_text_file(path), cfg);
}

}  // namespace hdp
