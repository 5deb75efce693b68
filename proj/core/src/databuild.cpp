#include "dagsearch/databuild.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Dense>
#include <json.hpp>

#include "dagsearch/errors.hpp"
#include "dagsearch/strings.hpp"

namespace dagsearch {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

double cosine_distance(const Vec& a, const Vec& b) {
  double na = norm(a);
  double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 1.0;
  double cosine = dot(a, b) / (na * nb);
  return 1.0 - std::clamp(cosine, -1.0, 1.0);
}

double squared_distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Average-linkage agglomerative clustering on a precomputed distance
// matrix (Lance-Williams update). Merging stops when the closest pair is
// farther than the threshold.
std::vector<std::vector<std::size_t>> agglomerate(const std::vector<Vec>& points,
                                                  double threshold) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<bool> active(n, true);
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    members[i] = {i};
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i][j] = dist[j][i] = cosine_distance(points[i], points[j]);
    }
  }

  while (true) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        if (dist[i][j] < best) {
          best = dist[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    if (!std::isfinite(best) || best > threshold) break;

    double wi = static_cast<double>(members[bi].size());
    double wj = static_cast<double>(members[bj].size());
    for (std::size_t r = 0; r < n; ++r) {
      if (!active[r] || r == bi || r == bj) continue;
      double merged = (wi * dist[bi][r] + wj * dist[bj][r]) / (wi + wj);
      dist[bi][r] = dist[r][bi] = merged;
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    members[bj].clear();
    active[bj] = false;
  }

  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) {
    if (active[i]) clusters.push_back(std::move(members[i]));
  }
  return clusters;
}

// Moves points between parts until no part is a singleton: the singleton
// steals its nearest point from a part that can spare one (size >= 3).
void rebalance_singletons(const std::vector<Vec>& points,
                          std::vector<std::vector<std::size_t>>& parts) {
  while (true) {
    int singleton = -1;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      if (parts[p].size() == 1) {
        singleton = static_cast<int>(p);
        break;
      }
    }
    if (singleton < 0) return;

    const Vec& anchor = points[parts[static_cast<std::size_t>(singleton)][0]];
    double best = std::numeric_limits<double>::infinity();
    int donor_part = -1;
    std::size_t donor_index = 0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      if (static_cast<int>(p) == singleton || parts[p].size() < 3) continue;
      for (std::size_t m = 0; m < parts[p].size(); ++m) {
        double d = squared_distance(anchor, points[parts[p][m]]);
        if (d < best) {
          best = d;
          donor_part = static_cast<int>(p);
          donor_index = m;
        }
      }
    }
    if (donor_part < 0) {
      // No donor can spare a point; fold the singleton into its nearest
      // part instead (recursion in the caller re-splits if it oversizes).
      double nearest = std::numeric_limits<double>::infinity();
      int target = -1;
      for (std::size_t p = 0; p < parts.size(); ++p) {
        if (static_cast<int>(p) == singleton || parts[p].empty()) continue;
        for (std::size_t member : parts[p]) {
          double d = squared_distance(anchor, points[member]);
          if (d < nearest) {
            nearest = d;
            target = static_cast<int>(p);
          }
        }
      }
      if (target < 0) return;  // single part overall; nothing to do
      parts[static_cast<std::size_t>(target)].push_back(
          parts[static_cast<std::size_t>(singleton)][0]);
      parts.erase(parts.begin() + singleton);
      continue;
    }
    auto& donor = parts[static_cast<std::size_t>(donor_part)];
    parts[static_cast<std::size_t>(singleton)].push_back(donor[donor_index]);
    donor.erase(donor.begin() + static_cast<std::ptrdiff_t>(donor_index));
  }
}

// Recursively splits an oversized cluster with K-means until every part
// has 2..4 members. Point indices refer to `points`.
void split_oversized(const std::vector<Vec>& points, std::vector<std::size_t> cluster,
                     const ClusterParams& params, unsigned salt,
                     std::vector<std::vector<std::size_t>>& out) {
  if (cluster.size() <= 4) {
    if (cluster.size() >= 2) out.push_back(std::move(cluster));
    return;
  }
  int k = static_cast<int>((cluster.size() + 3) / 4);

  std::vector<Vec> subset;
  subset.reserve(cluster.size());
  for (std::size_t index : cluster) subset.push_back(points[index]);

  KMeansOptions options;
  options.seed = params.seed + salt;
  options.max_iterations = params.kmeans_max_iterations;
  options.restarts = params.kmeans_restarts;
  std::vector<int> assignment = kmeans_partition(subset, k, options);

  std::vector<std::vector<std::size_t>> parts(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    parts[static_cast<std::size_t>(assignment[i])].push_back(cluster[i]);
  }
  parts.erase(std::remove_if(parts.begin(), parts.end(),
                             [](const auto& p) { return p.empty(); }),
              parts.end());
  rebalance_singletons(points, parts);

  for (auto& part : parts) {
    split_oversized(points, std::move(part), params, salt + 1, out);
  }
}

std::string bundle_theme(const std::vector<Document>& docs) {
  std::unordered_map<std::string, int> counts;
  for (const auto& doc : docs) {
    std::unordered_set<std::string> seen;
    for (const auto& word : split(to_lower(collapse_whitespace(doc.title)), ' ')) {
      if (word.size() > 3 && seen.insert(word).second) ++counts[word];
    }
  }
  std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::string theme;
  for (std::size_t i = 0; i < ranked.size() && i < 2; ++i) {
    if (ranked[i].second < 2 && i > 0) break;
    if (!theme.empty()) theme += " / ";
    theme += ranked[i].first;
  }
  return theme;
}

std::optional<QAKind> parse_qa_kind(std::string_view name) {
  std::string lower = to_lower(name);
  if (lower == "factual") return QAKind::factual;
  if (lower == "causal") return QAKind::causal;
  if (lower == "multiple_choice" || lower == "multiple choice" || lower == "mcq") {
    return QAKind::multiple_choice;
  }
  return std::nullopt;
}

std::vector<QAPair> parse_generation_reply(const std::string& reply, const QABundle& bundle) {
  auto open = reply.find('[');
  auto close = reply.rfind(']');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw Error(ErrorKind::UnparsableGeneration, "generator reply carries no JSON list");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(reply.substr(open, close - open + 1));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::UnparsableGeneration, std::string("generator reply is not JSON: ") + e.what());
  }
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorKind::UnparsableGeneration, "generator reply is not a nonempty list");
  }

  std::vector<QAPair> out;
  for (const auto& item : j) {
    QAPair pair;
    pair.bundle_id = bundle.id;
    try {
      pair.question = item.at("question").get<std::string>();
      auto kind = parse_qa_kind(item.at("kind").get<std::string>());
      if (!kind) throw Error(ErrorKind::UnparsableGeneration, "unknown question kind");
      pair.kind = *kind;
      pair.source_count = item.at("source_count").get<int>();
      if (pair.kind == QAKind::multiple_choice) {
        std::set<std::string> options;
        for (const auto& o : item.at("correct_options")) options.insert(o.get<std::string>());
        pair.gold = GoldAnswer::choices(std::move(options));
      } else {
        pair.gold = GoldAnswer::freeform(item.at("answer").get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::UnparsableGeneration, std::string("candidate pair malformed: ") + e.what());
    }
    out.push_back(std::move(pair));
  }
  return out;
}

std::string gold_as_text(const GoldAnswer& gold) {
  if (gold.kind == GoldKind::free_text) return gold.text;
  std::string joined;
  for (const auto& option : gold.options) {
    if (!joined.empty()) joined += ", ";
    joined += option;
  }
  return joined;
}

}  // namespace

std::string_view source_kind_name(SourceKind kind) {
  return kind == SourceKind::news ? "news" : "academic";
}

std::string_view qa_kind_name(QAKind kind) {
  switch (kind) {
    case QAKind::factual: return "factual";
    case QAKind::causal: return "causal";
    case QAKind::multiple_choice: return "multiple_choice";
  }
  return "factual";
}

std::vector<Document> dedup(const std::vector<Document>& docs) {
  std::vector<Document> out;
  std::unordered_set<std::string> seen;
  for (const auto& doc : docs) {
    std::string key = to_lower(collapse_whitespace(doc.body));
    if (seen.insert(key).second) out.push_back(doc);
  }
  return out;
}

std::vector<QABundle> bundle(const std::vector<Document>& docs, const ClusterParams& params) {
  if (docs.empty()) return {};

  const std::size_t dim = docs.front().embedding.size();
  for (const auto& doc : docs) {
    if (doc.embedding.size() != dim || dim == 0) {
      throw Error(ErrorKind::EmbeddingDimMismatch,
                  "document '" + doc.id + "' embedding dimension " +
                      std::to_string(doc.embedding.size()) + " != " + std::to_string(dim));
    }
  }

  // Cluster on unit vectors so K-means' Euclidean geometry matches the
  // cosine metric of the agglomerative stage.
  std::vector<Vec> points;
  points.reserve(docs.size());
  for (const auto& doc : docs) {
    Vec v = doc.embedding;
    double n = norm(v);
    if (n > 0.0) {
      for (double& x : v) x /= n;
    }
    points.push_back(std::move(v));
  }

  auto clusters = agglomerate(points, params.distance_threshold);

  std::vector<std::vector<std::size_t>> sized;
  for (auto& cluster : clusters) {
    if (cluster.size() < 2) continue;  // singletons cannot support multi-hop questions
    split_oversized(points, std::move(cluster), params, 1, sized);
  }

  std::vector<QABundle> bundles;
  for (std::size_t b = 0; b < sized.size(); ++b) {
    QABundle qb;
    qb.id = "bundle-" + std::to_string(b + 1);
    std::sort(sized[b].begin(), sized[b].end());
    for (std::size_t index : sized[b]) qb.documents.push_back(docs[index]);
    qb.theme = bundle_theme(qb.documents);
    bundles.push_back(std::move(qb));
  }
  return bundles;
}

std::vector<int> kmeans_partition(const std::vector<std::vector<double>>& points, int k,
                                  const KMeansOptions& options) {
  const std::size_t n = points.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("kmeans requires 1 <= k <= point count");
  }
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) {
      throw Error(ErrorKind::EmbeddingDimMismatch, "kmeans points have ragged dimensions");
    }
  }

  std::vector<int> best_assignment(n, 0);
  double best_wcss = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    std::mt19937 rng(options.seed + static_cast<unsigned>(restart) * 7919u);

    // k-means++ seeding
    std::vector<Vec> centers;
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centers.push_back(points[first(rng)]);
    std::vector<double> d2(n, 0.0);
    while (static_cast<int>(centers.size()) < k) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) nearest = std::min(nearest, squared_distance(points[i], c));
        d2[i] = nearest;
        total += nearest;
      }
      std::size_t pick = 0;
      if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double target = u(rng);
        double cumulative = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          cumulative += d2[i];
          if (cumulative >= target) {
            pick = i;
            break;
          }
        }
      } else {
        pick = first(rng);
      }
      centers.push_back(points[pick]);
    }

    std::vector<int> assignment(n, -1);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int c = 0; c < k; ++c) {
          double d = squared_distance(points[i], centers[static_cast<std::size_t>(c)]);
          if (d < nearest) {
            nearest = d;
            arg = c;
          }
        }
        if (assignment[i] != arg) {
          assignment[i] = arg;
          changed = true;
        }
      }

      std::vector<Vec> sums(static_cast<std::size_t>(k), Vec(dim, 0.0));
      std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
      for (std::size_t i = 0; i < n; ++i) {
        auto c = static_cast<std::size_t>(assignment[i]);
        ++counts[c];
        for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i][d];
      }
      for (int c = 0; c < k; ++c) {
        auto cu = static_cast<std::size_t>(c);
        if (counts[cu] == 0) {
          // Re-seed an empty cluster with the point farthest from its center.
          double farthest = -1.0;
          std::size_t pick = 0;
          for (std::size_t i = 0; i < n; ++i) {
            double d = squared_distance(points[i],
                                        centers[static_cast<std::size_t>(assignment[i])]);
            if (d > farthest) {
              farthest = d;
              pick = i;
            }
          }
          centers[cu] = points[pick];
          changed = true;
          continue;
        }
        for (std::size_t d = 0; d < dim; ++d) {
          centers[cu][d] = sums[cu][d] / static_cast<double>(counts[cu]);
        }
      }
      if (!changed) break;
    }

    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      wcss += squared_distance(points[i], centers[static_cast<std::size_t>(assignment[i])]);
    }
    if (wcss < best_wcss) {
      best_wcss = wcss;
      best_assignment = assignment;
    }
  }
  return best_assignment;
}

std::string qa_generation_prompt(const QABundle& bundle) {
  std::string prompt;
  prompt += "You are given " + std::to_string(bundle.documents.size()) +
            " documents. Write multi-hop question-answer pairs that require combining evidence "
            "from at least two of the documents. Mix factual, causal and multiple_choice kinds.\n\n";
  for (std::size_t i = 0; i < bundle.documents.size(); ++i) {
    const Document& doc = bundle.documents[i];
    prompt += "Document " + std::to_string(i + 1) + " (" + std::string(source_kind_name(doc.source)) +
              "): " + doc.title + "\n" + doc.body + "\n\n";
  }
  prompt += "Reply with a JSON list only. Each element: {\"question\": str, \"kind\": "
            "\"factual\"|\"causal\"|\"multiple_choice\", \"answer\": str, \"correct_options\": "
            "[letters, multiple_choice only], \"source_count\": int — how many of the documents "
            "the question genuinely needs}.";
  return prompt;
}

std::vector<QAPair> generate_qa(const QABundle& bundle, ChatClient& generator) {
  std::string prompt = qa_generation_prompt(bundle);
  ChatOptions options;
  options.temperature = 0.7;
  options.max_tokens = 2048;

  std::optional<Error> parse_failure;
  for (int attempt = 0; attempt < 2; ++attempt) {
    ChatResult reply;
    try {
      reply = generator.complete(prompt, options);
    } catch (const Error& e) {
      throw Error(ErrorKind::GeneratorUnavailable, std::string("generator call failed: ") + e.what());
    }
    try {
      return parse_generation_reply(reply.content, bundle);
    } catch (const Error& e) {
      parse_failure = e;
    }
  }
  throw *parse_failure;
}

FilterDecision filter_qa(const QAPair& pair, const QABundle& bundle, ChatClient& checker) {
  if (pair.source_count < 2) {
    return {false, "single-source: question declares evidence from fewer than two documents"};
  }

  ChatOptions options;
  options.temperature = 0.0;
  options.max_tokens = 256;

  // Filter 1: answerable from parametric knowledge alone?
  std::string closed_book =
      "Answer from your own knowledge only; no external evidence is provided.\n"
      "Question: " + pair.question +
      "\nReply exactly in the form:\nANSWER: <your answer>\nCONFIDENCE: <high|low>";
  ChatResult reply;
  try {
    reply = checker.complete(closed_book, options);
  } catch (const Error& e) {
    throw Error(ErrorKind::CheckerUnavailable, std::string("checker call failed: ") + e.what());
  }
  std::string lower = to_lower(reply.content);
  bool high_confidence = lower.find("confidence: high") != std::string::npos;
  bool correct = false;
  if (pair.gold.kind == GoldKind::choice_set) {
    correct = score_answer_mcq(extract_choice_labels(reply.content), pair.gold.options) == 1.0;
  } else {
    std::string got = to_lower(collapse_whitespace(reply.content));
    std::string want = to_lower(collapse_whitespace(pair.gold.text));
    correct = !want.empty() && got.find(want) != std::string::npos;
  }
  if (high_confidence && correct) {
    return {false, "parametric-knowledge: checker answered correctly without evidence"};
  }

  // Filter 2: does any single document suffice?
  std::string single_source =
      "Question: " + pair.question + "\nReference answer: " + gold_as_text(pair.gold) + "\n\n";
  for (std::size_t i = 0; i < bundle.documents.size(); ++i) {
    single_source += "Document " + std::to_string(i + 1) + ": " + bundle.documents[i].title + "\n" +
                     bundle.documents[i].body + "\n\n";
  }
  single_source +=
      "Could the question be fully answered using only ONE of these documents? Reply YES or NO.";
  try {
    reply = checker.complete(single_source, options);
  } catch (const Error& e) {
    throw Error(ErrorKind::CheckerUnavailable, std::string("checker call failed: ") + e.what());
  }
  lower = to_lower(reply.content);
  auto yes = lower.find("yes");
  auto no = lower.find("no");
  if (no == std::string::npos || (yes != std::string::npos && yes < no)) {
    return {false, "single-source-answerable: one document suffices per checker"};
  }
  return {true, ""};
}

std::vector<QAPair> curriculum_sort(std::vector<QAPair> pairs) {
  std::stable_sort(pairs.begin(), pairs.end(), [](const QAPair& a, const QAPair& b) {
    if (a.source_count != b.source_count) return a.source_count < b.source_count;
    return a.question.size() < b.question.size();
  });
  return pairs;
}

std::map<std::string, std::vector<double>> reduce_embeddings(
    const std::map<std::string, std::vector<double>>& embeddings, int target_dim) {
  if (embeddings.empty()) return {};
  const auto n = static_cast<Eigen::Index>(embeddings.size());
  const auto dim = static_cast<Eigen::Index>(embeddings.begin()->second.size());
  if (target_dim < 1) throw std::invalid_argument("target dimension must be >= 1");

  Eigen::MatrixXd data(n, dim);
  std::vector<std::string> ids;
  ids.reserve(embeddings.size());
  Eigen::Index row = 0;
  for (const auto& [id, vec] : embeddings) {
    if (static_cast<Eigen::Index>(vec.size()) != dim) {
      throw Error(ErrorKind::EmbeddingDimMismatch, "embedding for '" + id + "' has a different dimension");
    }
    ids.push_back(id);
    for (Eigen::Index c = 0; c < dim; ++c) data(row, c) = vec[static_cast<std::size_t>(c)];
    ++row;
  }

  Eigen::RowVectorXd mean = data.colwise().mean();
  Eigen::MatrixXd centered = data.rowwise() - mean;
  Eigen::MatrixXd covariance =
      (centered.adjoint() * centered) / std::max<double>(1.0, static_cast<double>(n - 1));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
  const Eigen::Index keep = std::min<Eigen::Index>(target_dim, dim);
  // Eigenvalues come back ascending; take the trailing columns.
  Eigen::MatrixXd components = solver.eigenvectors().rightCols(keep).rowwise().reverse();
  Eigen::MatrixXd projected = centered * components;

  std::map<std::string, std::vector<double>> out;
  for (Eigen::Index r = 0; r < n; ++r) {
    std::vector<double> v(static_cast<std::size_t>(keep));
    for (Eigen::Index c = 0; c < keep; ++c) v[static_cast<std::size_t>(c)] = projected(r, c);
    out[ids[static_cast<std::size_t>(r)]] = std::move(v);
  }
  return out;
}

}  // namespace dagsearch
