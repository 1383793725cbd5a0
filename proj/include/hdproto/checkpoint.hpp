#pragma once

// JSON checkpoint of a learner: both layers, the explicit memory, the GAA
// memory (when kept), the compressed memory (when enabled) and the session
// counter. Doubles are written with round-trip precision.

#include <filesystem>
#include <string>

#include "hdproto/session.hpp"

namespace hdp {

std::string checkpoint_to_json(const Learner& learner);
Learner learner_from_json(const std::string& text, const ModeConfig& cfg);

void save_checkpoint(const std::filesystem::path& path, const Learner& learner);
Learner load_checkpoint(const std::filesystem::path& path, const ModeConfig& cfg);

}  // namespace hdp
