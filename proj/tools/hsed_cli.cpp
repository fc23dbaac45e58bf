// Command-line front end: build-graph, train, eval, synth-tree, ablate.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsed/config.hpp"
#include "hsed/contrastive.hpp"
#include "hsed/ingest.hpp"
#include "hsed/metrics.hpp"
#include "hsed/pipeline.hpp"
#include "hsed/synth.hpp"

namespace {

using namespace hsed;

config::RunConfig resolve_config(const std::string& config_path, const std::string& mode,
                                 std::int64_t seed) {
  config::RunConfig cfg;
  if (!config_path.empty()) cfg = config::load_config(config_path);
  if (!mode.empty()) {
    if (mode == "hsed") cfg.mode = config::Mode::Hsed;
    else if (mode == "uhsed") cfg.mode = config::Mode::Uhsed;
    else throw std::runtime_error("--mode must be hsed or uhsed");
  }
  if (seed >= 0) cfg.seed = std::uint64_t(seed);
  return cfg;
}

int cmd_build_graph(const std::string& input, const std::string& embeddings, int fallback_dim,
                    const std::string& out) {
  const auto records = ingest::load_messages(input);
  ingest::TokenEmbeddingTable table = embeddings.empty()
                                          ? ingest::TokenEmbeddingTable(fallback_dim)
                                          : ingest::TokenEmbeddingTable::load(embeddings);
  const auto g = ingest::build_message_graph(records, table);
  ingest::save_graph(g, out);
  std::set<int> classes(g.labels.begin(), g.labels.end());
  std::cout << "nodes " << g.num_nodes << "\nedges " << g.edges.size() << "\nclasses "
            << classes.size() << "\nfeature_dim " << g.feature_dim << "\n";
  return 0;
}

int cmd_train(const std::string& graph_path, const config::RunConfig& cfg, const std::string& out,
              std::string report_path) {
  const auto g = ingest::load_graph(graph_path);
  if (report_path.empty()) report_path = out + ".report";
  const auto outcome = cfg.mode == config::Mode::Hsed
                           ? pipeline::run_hsed(g, cfg, out, report_path)
                           : pipeline::run_uhsed(g, cfg, out, report_path);
  std::cout << outcome.report_text;
  return 0;
}

int cmd_eval(const std::string& graph_path, const std::string& checkpoint,
             const std::string& embeddings, const config::RunConfig& cfg, const std::string& out) {
  const auto g = ingest::load_graph(graph_path);
  if (!g.labeled()) throw std::runtime_error("eval requires a labeled graph");
  std::vector<int> pred;
  if (!checkpoint.empty()) {
    pred = pipeline::load_hsed_checkpoint(checkpoint).predict(g);
  } else if (!embeddings.empty()) {
    std::ifstream in(embeddings);
    if (!in) throw std::runtime_error("cannot open embeddings: " + embeddings);
    nlohmann::json j = nlohmann::json::parse(in);
    const auto emb = j.at("embeddings").get<std::vector<double>>();
    const int dim = j.at("dim").get<int>();
    if (int(j.at("num_nodes").get<std::size_t>()) != g.num_nodes)
      throw std::runtime_error("embedding dump does not match the graph");
    const auto split =
        ingest::split_dataset(g.num_nodes, cfg.train_frac, cfg.test_frac, cfg.val_frac, cfg.seed);
    const auto clf = contrastive::logreg_fit(emb, dim, g.labels, split, cfg.seed,
                                             cfg.logreg_epochs, cfg.learning_rate);
    pred = contrastive::logreg_predict(clf, emb, dim);
  } else {
    throw std::runtime_error("eval needs --input (checkpoint) or --embeddings (dump)");
  }
  const auto split =
      ingest::split_dataset(g.num_nodes, cfg.train_frac, cfg.test_frac, cfg.val_frac, cfg.seed);
  std::vector<int> truth_test, pred_test;
  for (int i : split.test) {
    truth_test.push_back(g.labels[i]);
    pred_test.push_back(pred[i]);
  }
  const std::string text = metrics::format_report(metrics::evaluate(truth_test, pred_test));
  if (!out.empty()) ingest::write_file_atomic(out, text);
  std::cout << text;
  return 0;
}

int cmd_synth_tree(const synth::TreeSpec& spec, const std::string& out) {
  const auto g = synth::make_tree_graph(spec);
  ingest::save_graph(g, out);
  std::cout << "nodes " << g.num_nodes << "\nedges " << g.edges.size() << "\nclasses "
            << spec.branching << "\n";
  return 0;
}

int cmd_ablate(const std::string& graph_path, const config::RunConfig& cfg,
               const std::string& out) {
  const auto g = ingest::load_graph(graph_path);
  const std::string table = pipeline::run_ablation(g, cfg);
  if (!out.empty()) ingest::write_file_atomic(out, table);
  std::cout << table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperbolic social event detection toolkit"};
  app.require_subcommand(1);

  std::string input, embeddings, graph, config_path, mode, out, report;
  std::int64_t seed = -1;  // -1: keep the config file's seed
  int fallback_dim = 16;
  synth::TreeSpec tree;

  auto* build = app.add_subcommand("build-graph", "Message records -> graph file");
  build->add_option("--input", input, "JSONL message records")->required();
  build->add_option("--embeddings", embeddings, "Token embedding table (TSV)");
  build->add_option("--fallback-dim", fallback_dim,
                    "Semantic dimension when no table is given (hash embeddings)");
  build->add_option("--out", out, "Output graph file")->required();

  auto* train = app.add_subcommand("train", "Train hsed/uhsed on a graph file");
  train->add_option("--graph", graph, "Graph file")->required();
  train->add_option("--config", config_path, "key = value run config");
  train->add_option("--mode", mode, "hsed | uhsed (overrides config)");
  train->add_option("--seed", seed, "Seed override");
  train->add_option("--out", out, "Checkpoint (hsed) or embedding dump (uhsed)")->required();
  train->add_option("--report", report, "Report path (default: <out>.report)");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint or embedding dump");
  ev->add_option("--graph", graph, "Labeled graph file")->required();
  ev->add_option("--input", input, "hsed checkpoint");
  ev->add_option("--embeddings", embeddings, "uhsed embedding dump");
  ev->add_option("--config", config_path, "key = value run config");
  ev->add_option("--mode", mode, "hsed | uhsed (overrides config)");
  ev->add_option("--seed", seed, "Seed override (fixes the split)");
  ev->add_option("--out", out, "Report path (default: stdout only)");

  auto* tree_cmd = app.add_subcommand("synth-tree", "Generate a labeled synthetic tree graph");
  tree_cmd->add_option("--branching", tree.branching, "Children per node");
  tree_cmd->add_option("--depth", tree.depth, "Tree depth");
  tree_cmd->add_option("--feature-dim", tree.feature_dim, "Feature dimension");
  tree_cmd->add_option("--noise", tree.feature_noise, "Feature noise scale");
  tree_cmd->add_option("--mean-scale", tree.mean_scale, "Class mean norm");
  tree_cmd->add_option("--seed", seed, "Generator seed");
  tree_cmd->add_option("--out", out, "Output graph file")->required();

  auto* ablate = app.add_subcommand("ablate", "Poincare / hyperboloid / Euclidean comparison");
  ablate->add_option("--graph", graph, "Graph file")->required();
  ablate->add_option("--config", config_path, "key = value run config");
  ablate->add_option("--mode", mode, "hsed | uhsed (overrides config)");
  ablate->add_option("--seed", seed, "Seed override");
  ablate->add_option("--out", out, "Table output path (default: stdout only)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cmd_build_graph(input, embeddings, fallback_dim, out);
    if (train->parsed()) return cmd_train(graph, resolve_config(config_path, mode, seed), out, report);
    if (ev->parsed())
      return cmd_eval(graph, input, embeddings, resolve_config(config_path, mode, seed), out);
    if (tree_cmd->parsed()) {
      if (seed >= 0) tree.seed = std::uint64_t(seed);
      return cmd_synth_tree(tree, out);
    }
    if (ablate->parsed()) return cmd_ablate(graph, resolve_config(config_path, mode, seed), out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
