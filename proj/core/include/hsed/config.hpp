#pragma once

#include <cstdint>
#include <string>

#include "hsed/contrastive.hpp"
#include "hsed/encoders.hpp"

namespace hsed::config {

enum class Mode { Hsed, Uhsed };

// Flat key = value run configuration. Unknown keys are errors.
struct RunConfig {
  Mode mode = Mode::Hsed;
  manifold::Spec spec{manifold::Kind::PoincareBall, 1.0};
  int hidden_layers = -1;  // resolved per mode: 2 (hsed) / 1 (uhsed)
  int hidden_dim = 512;
  int epochs = 100;
  double learning_rate = 0.1;
  contrastive::AugmentationKind augmentation = contrastive::AugmentationKind::FeatureCorruption;
  double drop_rate = 0.10;
  double train_frac = 0.7;
  double test_frac = 0.2;
  double val_frac = 0.1;
  std::uint64_t seed = 0;
  int logreg_epochs = 300;

  enc::EncoderConfig encoder_config() const;
  contrastive::AugmentationSpec augmentation_spec() const;
  int resolved_hidden_layers() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& c);

}  // namespace hsed::config
