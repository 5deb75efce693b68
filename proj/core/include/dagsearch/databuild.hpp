#pragma once

#include <map>
#include <string>
#include <vector>

#include "dagsearch/llm_client.hpp"
#include "dagsearch/reward.hpp"

namespace dagsearch {

enum class SourceKind { news, academic };

std::string_view source_kind_name(SourceKind kind);

struct Document {
  std::string id;
  SourceKind source = SourceKind::news;
  std::string title;
  std::string body;
  std::string published;  // ISO date, may be empty
  std::vector<double> embedding;

  bool operator==(const Document&) const = default;
};

/// 2-4 semantically related documents grouped for multi-hop QA generation.
struct QABundle {
  std::string id;
  std::vector<Document> documents;
  std::string theme;
};

enum class QAKind { factual, causal, multiple_choice };

std::string_view qa_kind_name(QAKind kind);

struct QAPair {
  std::string question;
  GoldAnswer gold;
  QAKind kind = QAKind::factual;
  std::string bundle_id;
  int source_count = 0;  // bundle documents whose evidence the question needs
};

/// Drops documents whose normalized body (lowercased, whitespace-collapsed)
/// repeats an earlier one; keep-first order. Idempotent.
std::vector<Document> dedup(const std::vector<Document>& docs);

struct ClusterParams {
  double distance_threshold = 0.35;  // average-linkage cosine distance cut
  unsigned seed = 0;
  int kmeans_max_iterations = 50;
  int kmeans_restarts = 8;
};

/// Groups documents into bundles of 2-4: average-linkage agglomerative
/// clustering on cosine distance, then any cluster larger than 4 is
/// recursively split with seeded K-means (k = ceil(size/4)). Singleton
/// clusters are discarded; K-means parts are rebalanced so splitting never
/// drops a document. Throws Error(EmbeddingDimMismatch) on ragged or
/// missing embeddings.
std::vector<QABundle> bundle(const std::vector<Document>& docs, const ClusterParams& params);

struct KMeansOptions {
  unsigned seed = 0;
  int max_iterations = 50;
  int restarts = 8;
};

/// Lloyd's K-means with k-means++ seeding and seeded restarts; returns the
/// assignment of each point with the best within-cluster sum of squares.
std::vector<int> kmeans_partition(const std::vector<std::vector<double>>& points, int k,
                                  const KMeansOptions& options);

/// Prompt sent to the generator for one bundle; asks for a JSON list of
/// candidate pairs with kind and declared source_count.
std::string qa_generation_prompt(const QABundle& bundle);

/// Candidate multi-hop pairs for a bundle via the generator endpoint.
/// A malformed reply is retried once; two failures raise
/// Error(UnparsableGeneration). Transport failures raise
/// Error(GeneratorUnavailable).
std::vector<QAPair> generate_qa(const QABundle& bundle, ChatClient& generator);

struct FilterDecision {
  bool accepted = false;
  std::string reason;  // empty when accepted
};

/// Quality filters: reject pairs answerable from parametric knowledge
/// (checker answers correctly closed-book with high confidence) and pairs
/// that do not need multiple sources (declared source_count < 2, or the
/// checker confirms a single bundle document suffices).
FilterDecision filter_qa(const QAPair& pair, const QABundle& bundle, ChatClient& checker);

/// Curriculum order: stable sort ascending by (source_count, question
/// length in characters); ties keep input order.
std::vector<QAPair> curriculum_sort(std::vector<QAPair> pairs);

/// PCA projection of the embeddings onto their `target_dim` top principal
/// components (self-contained replacement for an external reduction step).
std::map<std::string, std::vector<double>> reduce_embeddings(
    const std::map<std::string, std::vector<double>>& embeddings, int target_dim);

}  // namespace dagsearch
