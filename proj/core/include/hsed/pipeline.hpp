#pragma once

#include <string>
#include <vector>

#include "hsed/config.hpp"
#include "hsed/contrastive.hpp"
#include "hsed/encoders.hpp"
#include "hsed/ingest.hpp"
#include "hsed/metrics.hpp"

namespace hsed::pipeline {

// Model checkpoint (config + parameter matrices), lossless JSON.
std::string hsed_checkpoint_to_json(const enc::HsedModel& model);
enc::HsedModel hsed_checkpoint_from_json(const std::string& text);
void save_hsed_checkpoint(const enc::HsedModel& model, const std::string& path);
enc::HsedModel load_hsed_checkpoint(const std::string& path);

// Embedding dump: num_nodes, dim, embeddings, node_ids.
void save_embeddings(const std::vector<double>& embeddings, int dim,
                     const std::vector<std::string>& node_ids, const std::string& path);

struct TrainOutcome {
  metrics::EvalReport report;
  std::string report_text;
};

// Supervised pipeline; writes checkpoint + report when paths are nonempty.
TrainOutcome run_hsed(const ingest::MessageGraph& g, const config::RunConfig& cfg,
                      const std::string& checkpoint_path, const std::string& report_path);

// Contrastive pipeline + downstream logistic regression (labels required only
// for the report); writes embedding dump + report when paths are nonempty.
TrainOutcome run_uhsed(const ingest::MessageGraph& g, const config::RunConfig& cfg,
                       const std::string& embeddings_path, const std::string& report_path);

// Identical seeds across {poincare, hyperboloid, euclidean}; returns a
// side-by-side table.
std::string run_ablation(const ingest::MessageGraph& g, const config::RunConfig& cfg);

}  // namespace hsed::pipeline
