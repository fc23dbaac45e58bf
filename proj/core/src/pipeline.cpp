#include "hsed/pipeline.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hsed::pipeline {

using nlohmann::json;

namespace {

json layer_to_json(const enc::LayerParams& p) {
  return json{{"in", p.W.rows()},
              {"out", p.W.cols()},
              {"W", p.W.data()},
              {"b", p.b.data()}};
}

enc::LayerParams layer_from_json(const json& j) {
  const int in = j.at("in").get<int>(), out = j.at("out").get<int>();
  return enc::LayerParams{
      Tensor::leaf(in, out, j.at("W").get<std::vector<double>>(), true),
      Tensor::leaf(1, out, j.at("b").get<std::vector<double>>(), true)};
}

}  // namespace

std::string hsed_checkpoint_to_json(const enc::HsedModel& model) {
  json j;
  j["kind"] = "hsed";
  j["manifold"] = manifold::kind_name(model.config.spec.kind);
  j["curvature"] = model.config.spec.curvature_k;
  j["hidden_layers"] = model.config.hidden_layers;
  j["hidden_dim"] = model.config.hidden_dim;
  json layers = json::array();
  for (const auto& l : model.layers) layers.push_back(layer_to_json(l));
  j["layers"] = std::move(layers);
  j["decoder"] = layer_to_json(model.decoder);
  return j.dump();
}

enc::HsedModel hsed_checkpoint_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("kind").get<std::string>() != "hsed")
    throw std::runtime_error("checkpoint: not an hsed checkpoint");
  enc::HsedModel m;
  m.config.encoder_kind = enc::EncoderKind::HyperbolicMLP;
  m.config.spec.kind = manifold::kind_from_name(j.at("manifold").get<std::string>());
  m.config.spec.curvature_k = j.at("curvature").get<double>();
  m.config.hidden_layers = j.at("hidden_layers").get<int>();
  m.config.hidden_dim = j.at("hidden_dim").get<int>();
  for (const auto& l : j.at("layers")) m.layers.push_back(layer_from_json(l));
  m.decoder = layer_from_json(j.at("decoder"));
  return m;
}

void save_hsed_checkpoint(const enc::HsedModel& model, const std::string& path) {
  ingest::write_file_atomic(path, hsed_checkpoint_to_json(model));
}

enc::HsedModel load_hsed_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return hsed_checkpoint_from_json(buf.str());
}

void save_embeddings(const std::vector<double>& embeddings, int dim,
                     const std::vector<std::string>& node_ids, const std::string& path) {
  json j;
  j["num_nodes"] = node_ids.size();
  j["dim"] = dim;
  j["embeddings"] = embeddings;
  j["node_ids"] = node_ids;
  ingest::write_file_atomic(path, j.dump());
}

TrainOutcome run_hsed(const ingest::MessageGraph& g, const config::RunConfig& cfg,
                      const std::string& checkpoint_path, const std::string& report_path) {
  if (!g.labeled()) throw std::runtime_error("hsed mode requires a labeled graph");
  const auto split =
      ingest::split_dataset(g.num_nodes, cfg.train_frac, cfg.test_frac, cfg.val_frac, cfg.seed);
  auto result = enc::train_hsed(g, cfg.encoder_config(), split, cfg.seed);
  TrainOutcome out;
  out.report = result.test_report;
  out.report_text = metrics::format_report(result.test_report);
  if (!checkpoint_path.empty()) save_hsed_checkpoint(result.model, checkpoint_path);
  if (!report_path.empty()) ingest::write_file_atomic(report_path, out.report_text);
  return out;
}

TrainOutcome run_uhsed(const ingest::MessageGraph& g, const config::RunConfig& cfg,
                       const std::string& embeddings_path, const std::string& report_path) {
  auto result = contrastive::train_uhsed(g, cfg.encoder_config(), cfg.augmentation_spec(), cfg.seed);
  TrainOutcome out;
  if (g.labeled()) {
    const auto split =
        ingest::split_dataset(g.num_nodes, cfg.train_frac, cfg.test_frac, cfg.val_frac, cfg.seed);
    auto clf = contrastive::logreg_fit(result.embeddings, result.dim, g.labels, split, cfg.seed,
                                       cfg.logreg_epochs, cfg.learning_rate);
    const auto pred = contrastive::logreg_predict(clf, result.embeddings, result.dim);
    std::vector<int> truth_test, pred_test;
    for (int i : split.test) {
      truth_test.push_back(g.labels[i]);
      pred_test.push_back(pred[i]);
    }
    out.report = metrics::evaluate(truth_test, pred_test);
    out.report_text = metrics::format_report(out.report);
  } else {
    out.report_text = "unlabeled 1\n";  // embeddings only, no downstream metrics
  }
  if (!embeddings_path.empty())
    save_embeddings(result.embeddings, result.dim, g.node_ids, embeddings_path);
  if (!report_path.empty()) ingest::write_file_atomic(report_path, out.report_text);
  return out;
}

std::string run_ablation(const ingest::MessageGraph& g, const config::RunConfig& cfg) {
  std::ostringstream os;
  os << "manifold acc nmi ami ari micro_f1 macro_f1\n";
  os.setf(std::ios::fixed);
  os.precision(6);
  for (auto kind :
       {manifold::Kind::PoincareBall, manifold::Kind::Hyperboloid, manifold::Kind::Euclidean}) {
    config::RunConfig variant = cfg;
    variant.spec.kind = kind;
    const auto out = variant.mode == config::Mode::Hsed ? run_hsed(g, variant, "", "")
                                                        : run_uhsed(g, variant, "", "");
    os << manifold::kind_name(kind) << " " << out.report.acc << " " << out.report.nmi << " "
       << out.report.ami << " " << out.report.ari << " " << out.report.micro_f1 << " "
       << out.report.macro_f1 << "\n";
  }
  return os.str();
}

}  // namespace hsed::pipeline
