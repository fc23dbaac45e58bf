#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "hsed/config.hpp"
#include "hsed/pipeline.hpp"
#include "hsed/synth.hpp"

using namespace hsed;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("hsed_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("synthetic tree graphs") {
  synth::TreeSpec spec;
  spec.branching = 3;
  spec.depth = 6;
  const auto g = synth::make_tree_graph(spec);
  CHECK(g.num_nodes == 1093);  // (3^7 - 1) / 2 complete ternary tree
  CHECK(g.edges.size() == 1092);
  CHECK(g.num_classes() == 3);
  CHECK(g.features.size() == std::size_t(1093) * spec.feature_dim);
  CHECK(g.node_ids.size() == 1093);
  for (const auto& [a, b] : g.edges) {
    CHECK(a < b);  // parent precedes child
    if (a != 0) CHECK(g.labels[a] == g.labels[b]);  // labels constant per subtree
  }
  // The three root children found the three classes.
  CHECK(std::set<int>(g.labels.begin(), g.labels.end()) == std::set<int>{0, 1, 2});

  synth::TreeSpec tiny;
  tiny.branching = 2;
  tiny.depth = 2;
  tiny.feature_noise = 0.0;
  const auto t = synth::make_tree_graph(tiny);
  CHECK(t.num_nodes == 7);
  CHECK(t.edges.size() == 6);
  // Zero noise: features are exactly the class mean, constant within a class.
  for (int i = 0; i < t.num_nodes; ++i)
    for (int j = 0; j < t.feature_dim; ++j)
      CHECK(t.features[std::size_t(i) * t.feature_dim + j] ==
            t.features[std::size_t(t.labels[i] ? 2 : 0) * t.feature_dim + j]);

  CHECK(synth::make_tree_graph(spec).features == g.features);  // seeded
  synth::TreeSpec other = spec;
  other.seed = 1;
  CHECK(synth::make_tree_graph(other).features != g.features);

  synth::TreeSpec bad = spec;
  bad.branching = 1;
  CHECK_THROWS_AS(synth::make_tree_graph(bad), std::invalid_argument);
  bad = spec;
  bad.depth = 1;
  CHECK_THROWS_AS(synth::make_tree_graph(bad), std::invalid_argument);
  bad = spec;
  bad.feature_dim = 0;
  CHECK_THROWS_AS(synth::make_tree_graph(bad), std::invalid_argument);
}

TEST_CASE("synthetic community graphs") {
  synth::CommunitySpec spec;
  spec.nodes_per_community = 40;
  const auto g = synth::make_community_graph(spec);
  CHECK(g.num_nodes == 80);
  CHECK(g.num_classes() == 2);
  for (int i = 0; i < 80; ++i) CHECK(g.labels[i] == (i < 40 ? 0 : 1));
  for (const auto& [a, b] : g.edges) {
    CHECK(a < b);
    CHECK(b < 80);
  }
  CHECK(synth::make_community_graph(spec).edges == g.edges);
  spec.nodes_per_community = 1;
  CHECK_THROWS_AS(synth::make_community_graph(spec), std::invalid_argument);
}

TEST_CASE("run configuration") {
  const auto c = config::parse_config("");
  CHECK(c.mode == config::Mode::Hsed);
  CHECK(c.spec.kind == manifold::Kind::PoincareBall);
  CHECK(c.spec.curvature_k == 1.0);
  CHECK(c.resolved_hidden_layers() == 2);
  CHECK(c.hidden_dim == 512);
  CHECK(c.epochs == 100);
  CHECK(c.learning_rate == 0.1);
  CHECK(c.augmentation == contrastive::AugmentationKind::FeatureCorruption);
  CHECK(c.drop_rate == 0.10);
  CHECK(c.train_frac == 0.7);
  CHECK(c.test_frac == 0.2);
  CHECK(c.val_frac == 0.1);
  CHECK(c.logreg_epochs == 300);

  const auto u = config::parse_config("mode = uhsed\n");
  CHECK(u.resolved_hidden_layers() == 1);
  CHECK(u.encoder_config().encoder_kind == enc::EncoderKind::HyperbolicGCN);
  CHECK(c.encoder_config().encoder_kind == enc::EncoderKind::HyperbolicMLP);

  const auto p = config::parse_config(
      "# comment\n\nmode = uhsed\nmanifold = hyperboloid\ncurvature = 2.5\n"
      "hidden_dim = 64\nepochs = 7\nlearning_rate = 0.01\n"
      "augmentation = random_masking\ndrop_rate = 0.25\nseed = 42\n");
  CHECK(p.spec.kind == manifold::Kind::Hyperboloid);
  CHECK(p.spec.curvature_k == 2.5);
  CHECK(p.hidden_dim == 64);
  CHECK(p.epochs == 7);
  CHECK(p.learning_rate == 0.01);
  CHECK(p.augmentation == contrastive::AugmentationKind::RandomMasking);
  CHECK(p.drop_rate == 0.25);
  CHECK(p.seed == 42);
  CHECK(p.augmentation_spec().seed == 42);

  // Dump / parse round trip is stable.
  const auto q = config::parse_config(config::dump_config(p));
  CHECK(config::dump_config(q) == config::dump_config(p));

  CHECK_THROWS_WITH_AS(config::parse_config("speed = 9\n"), doctest::Contains("unknown key"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(config::parse_config("mode = hsed\nepochs = many\n"),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS_AS(config::parse_config("just words\n"), std::runtime_error);
  CHECK_THROWS_AS(config::parse_config("curvature = -1\n"), std::runtime_error);
}

TEST_CASE("checkpoint serialization round trip") {
  synth::TreeSpec spec;
  spec.branching = 2;
  spec.depth = 3;
  spec.feature_dim = 4;
  const auto g = synth::make_tree_graph(spec);

  enc::EncoderConfig cfg;
  cfg.spec = {manifold::Kind::Hyperboloid, 2.0};
  cfg.hidden_layers = 2;
  cfg.hidden_dim = 6;
  const auto model = enc::init_hsed(cfg, g.feature_dim, 2, 77);

  const auto restored = pipeline::hsed_checkpoint_from_json(pipeline::hsed_checkpoint_to_json(model));
  CHECK(restored.config.spec.kind == cfg.spec.kind);
  CHECK(restored.config.spec.curvature_k == cfg.spec.curvature_k);
  REQUIRE(restored.layers.size() == model.layers.size());
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    CHECK(restored.layers[i].W.data() == model.layers[i].W.data());  // lossless doubles
    CHECK(restored.layers[i].b.data() == model.layers[i].b.data());
  }
  CHECK(restored.predict(g) == model.predict(g));

  const auto path = temp_path("ckpt.json");
  pipeline::save_hsed_checkpoint(model, path.string());
  CHECK(pipeline::load_hsed_checkpoint(path.string()).predict(g) == model.predict(g));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(pipeline::hsed_checkpoint_from_json("{\"kind\":\"other\"}"), std::exception);
}

TEST_CASE("supervised pipeline run") {
  synth::TreeSpec spec;
  spec.branching = 2;
  spec.depth = 4;
  spec.feature_dim = 4;
  spec.feature_noise = 0.2;
  const auto g = synth::make_tree_graph(spec);

  auto cfg = config::parse_config("hidden_dim = 8\nepochs = 30\nseed = 3\n");
  const auto ckpt = temp_path("run_ckpt.json"), rep = temp_path("run_report.txt");
  const auto out = pipeline::run_hsed(g, cfg, ckpt.string(), rep.string());
  CHECK(slurp(rep) == out.report_text);
  CHECK(out.report_text.find("macro_f1 ") != std::string::npos);
  CHECK(out.report.acc >= 0.0);
  CHECK(out.report.acc <= 1.0);

  // Same config and seed: byte-identical artifacts.
  const auto ckpt2 = temp_path("run_ckpt2.json"), rep2 = temp_path("run_report2.txt");
  pipeline::run_hsed(g, cfg, ckpt2.string(), rep2.string());
  CHECK(slurp(ckpt) == slurp(ckpt2));
  CHECK(slurp(rep) == slurp(rep2));
  for (const auto& p : {ckpt, rep, ckpt2, rep2}) std::filesystem::remove(p);

  ingest::MessageGraph unlabeled = g;
  unlabeled.labels.clear();
  CHECK_THROWS_AS(pipeline::run_hsed(unlabeled, cfg, "", ""), std::runtime_error);
}

TEST_CASE("contrastive pipeline run") {
  synth::CommunitySpec spec;
  spec.nodes_per_community = 15;
  spec.feature_dim = 4;
  spec.p_in = 0.3;
  spec.p_out = 0.02;
  spec.feature_noise = 0.3;
  const auto g = synth::make_community_graph(spec);

  auto cfg = config::parse_config("mode = uhsed\nhidden_dim = 6\nepochs = 5\nseed = 2\n");
  cfg.logreg_epochs = 60;
  const auto emb = temp_path("run_emb.json"), rep = temp_path("run_uh_report.txt");
  const auto out = pipeline::run_uhsed(g, cfg, emb.string(), rep.string());
  CHECK(slurp(rep) == out.report_text);

  const auto j = nlohmann::json::parse(slurp(emb));
  CHECK(j.at("num_nodes").get<int>() == g.num_nodes);
  CHECK(j.at("dim").get<int>() == 6);
  CHECK(j.at("embeddings").get<std::vector<double>>().size() == std::size_t(g.num_nodes) * 6);
  CHECK(j.at("node_ids").get<std::vector<std::string>>() == g.node_ids);
  std::filesystem::remove(emb);
  std::filesystem::remove(rep);

  // Unlabeled graphs still produce embeddings, flagged in the report.
  ingest::MessageGraph unlabeled = g;
  unlabeled.labels.clear();
  CHECK(pipeline::run_uhsed(unlabeled, cfg, "", "").report_text == "unlabeled 1\n");
}

TEST_CASE("ablation table") {
  synth::TreeSpec spec;
  spec.branching = 2;
  spec.depth = 3;
  spec.feature_dim = 4;
  const auto g = synth::make_tree_graph(spec);
  auto cfg = config::parse_config("hidden_dim = 6\nepochs = 5\nseed = 1\n");
  const auto table = pipeline::run_ablation(g, cfg);
  CHECK(table.rfind("manifold acc nmi ami ari micro_f1 macro_f1\n", 0) == 0);
  for (const char* name : {"\npoincare ", "\nhyperboloid ", "\neuclidean "})
    CHECK(table.find(std::string(name).substr(1)) != std::string::npos);
  CHECK(std::count(table.begin(), table.end(), '\n') == 4);
  CHECK(pipeline::run_ablation(g, cfg) == table);
}
