#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "namegender/pipeline.hpp"
#include "namegender/run_config.hpp"

namespace namegender {

inline constexpr int kArtifactFormatVersion = 1;

// Featurizer, model and the run that produced them, stored as one JSON
// document. Tensors carry an explicit shape and row-major values.
struct ModelArtifact {
  int format_version = kArtifactFormatVersion;
  TrainedPipeline pipeline;
  RunConfig config;
  std::uint64_t corpus_fingerprint = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

nlohmann::json artifact_to_json(const ModelArtifact& artifact);
ModelArtifact artifact_from_json(const nlohmann::json& j);

std::string serialize_artifact(const ModelArtifact& artifact);
ModelArtifact parse_artifact(std::string_view text);

void save_artifact(const std::filesystem::path& path, const ModelArtifact& artifact);
ModelArtifact load_artifact(const std::filesystem::path& path);

std::string fingerprint_hex(std::uint64_t fingerprint);

}  // namespace namegender
