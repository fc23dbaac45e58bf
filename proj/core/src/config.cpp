#include "hsed/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hsed::config {

int RunConfig::resolved_hidden_layers() const {
  if (hidden_layers > 0) return hidden_layers;
  return mode == Mode::Hsed ? 2 : 1;
}

enc::EncoderConfig RunConfig::encoder_config() const {
  enc::EncoderConfig ec;
  ec.encoder_kind = mode == Mode::Hsed ? enc::EncoderKind::HyperbolicMLP
                                       : enc::EncoderKind::HyperbolicGCN;
  ec.spec = spec;
  ec.hidden_layers = resolved_hidden_layers();
  ec.hidden_dim = hidden_dim;
  ec.epochs = epochs;
  ec.adam.learning_rate = learning_rate;
  return ec;
}

contrastive::AugmentationSpec RunConfig::augmentation_spec() const {
  contrastive::AugmentationSpec as;
  as.kind = augmentation;
  as.drop_rate = drop_rate;
  as.seed = seed;
  return as;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string val = trim(stripped.substr(eq + 1));
    try {
      if (key == "mode") {
        if (val == "hsed") c.mode = Mode::Hsed;
        else if (val == "uhsed") c.mode = Mode::Uhsed;
        else throw std::runtime_error("mode must be hsed or uhsed");
      } else if (key == "manifold") {
        c.spec.kind = manifold::kind_from_name(val);
      } else if (key == "curvature") {
        c.spec.curvature_k = std::stod(val);
        if (c.spec.curvature_k <= 0.0) throw std::runtime_error("curvature must be positive");
      } else if (key == "hidden_layers") {
        c.hidden_layers = std::stoi(val);
      } else if (key == "hidden_dim") {
        c.hidden_dim = std::stoi(val);
      } else if (key == "epochs") {
        c.epochs = std::stoi(val);
      } else if (key == "learning_rate") {
        c.learning_rate = std::stod(val);
      } else if (key == "augmentation") {
        c.augmentation = contrastive::augmentation_from_name(val);
      } else if (key == "drop_rate") {
        c.drop_rate = std::stod(val);
      } else if (key == "train_frac") {
        c.train_frac = std::stod(val);
      } else if (key == "test_frac") {
        c.test_frac = std::stod(val);
      } else if (key == "val_frac") {
        c.val_frac = std::stod(val);
      } else if (key == "seed") {
        c.seed = std::stoull(val);
      } else if (key == "logreg_epochs") {
        c.logreg_epochs = std::stoi(val);
      } else {
        throw std::runtime_error("unknown key: " + key);
      }
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream os;
  os << "mode = " << (c.mode == Mode::Hsed ? "hsed" : "uhsed") << "\n"
     << "manifold = " << manifold::kind_name(c.spec.kind) << "\n"
     << "curvature = " << c.spec.curvature_k << "\n"
     << "hidden_layers = " << c.resolved_hidden_layers() << "\n"
     << "hidden_dim = " << c.hidden_dim << "\n"
     << "epochs = " << c.epochs << "\n"
     << "learning_rate = " << c.learning_rate << "\n"
     << "augmentation = " << contrastive::augmentation_name(c.augmentation) << "\n"
     << "drop_rate = " << c.drop_rate << "\n"
     << "train_frac = " << c.train_frac << "\n"
     << "test_frac = " << c.test_frac << "\n"
     << "val_frac = " << c.val_frac << "\n"
     << "seed = " << c.seed << "\n"
     << "logreg_epochs = " << c.logreg_epochs << "\n";
  return os.str();
}

}  // namespace hsed::config
