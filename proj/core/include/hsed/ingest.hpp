#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hsed::ingest {

struct MessageRecord {
  std::string message_id;
  std::string text;
  std::string user_id;
  std::vector<std::string> mentioned_users;
  std::optional<std::string> retweeted_user;
  std::int64_t timestamp = 0;  // seconds since epoch, UTC
  std::optional<std::string> location;
  std::optional<int> event_label;
};

// "2022-03-10T14:30:00Z" / "+10:00" / fractional seconds accepted.
std::int64_t parse_iso8601(const std::string& s);

// Line-delimited JSON records. Order-preserving; duplicate ids rejected.
std::vector<MessageRecord> parse_messages(std::istream& in);
std::vector<MessageRecord> load_messages(const std::string& path);

class TokenEmbeddingTable {
 public:
  TokenEmbeddingTable() = default;
  explicit TokenEmbeddingTable(int dimension) : dim_(dimension) {}

  // TSV file: header line "dimension <d>", then token \t d reals per line.
  static TokenEmbeddingTable load(const std::string& path);

  int dimension() const { return dim_; }
  void insert(const std::string& token, std::vector<double> vec);
  const std::vector<double>* find(const std::string& token) const;
  std::size_t size() const { return table_.size(); }

 private:
  int dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> table_;
};

// Homogeneous message graph: features X, undirected deduplicated edges A.
struct MessageGraph {
  int num_nodes = 0;
  int feature_dim = 0;
  std::vector<double> features;  // row-major num_nodes x feature_dim
  std::vector<std::pair<int, int>> edges;  // i < j, sorted, unique, no self-loops
  std::vector<int> labels;  // empty when the dataset is unlabeled
  std::vector<std::string> node_ids;

  bool labeled() const { return !labels.empty(); }
  int num_classes() const;
};

// (day fraction within [min-day, max-day], seconds-of-day / 86400)
std::pair<double, double> time_encode(std::int64_t ts, std::int64_t dataset_min,
                                      std::int64_t dataset_max);

// Lowercase, split on non-alphanumerics. Tokens missing from the table fall
// back to a deterministic hash-seeded unit vector.
std::vector<std::string> tokenize(const std::string& text);
std::vector<double> hash_fallback_embedding(const std::string& token, int dim);
std::vector<double> embed_message(const MessageRecord& rec, const TokenEmbeddingTable& table,
                                  std::int64_t min_ts, std::int64_t max_ts);

// One node per record; an edge iff two messages share an associated user
// ({user_id} + mentions + retweeted user). Labels must be all-or-none.
MessageGraph build_message_graph(const std::vector<MessageRecord>& records,
                                 const TokenEmbeddingTable& table);

struct Split {
  std::vector<int> train, test, val;
};

// Seeded shuffle partition; sizes floor(n*train), floor(n*test), rest val.
Split split_dataset(int n, double train, double test, double val, std::uint64_t seed);

// Graph file format (JSON object with num_nodes, feature_dim, features,
// edges, labels, node_ids). Round-trips doubles losslessly.
std::string graph_to_json(const MessageGraph& g);
MessageGraph graph_from_json(const std::string& text);
void save_graph(const MessageGraph& g, const std::string& path);
MessageGraph load_graph(const std::string& path);

// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace hsed::ingest
