#pragma once

#include <map>
#include <string>
#include <vector>

#include "dagsearch/databuild.hpp"

namespace dagsearch {

/// Loads a corpus directory: one file per document, a `key: value`
/// metadata header (id, source, title, date) up to the first blank line,
/// then the body. Files are read in filename order; a missing id defaults
/// to the filename stem. Throws Error(CorpusInvalid) on malformed records,
/// Error(IoFailure) on unreadable paths.
std::vector<Document> load_corpus(const std::string& directory);

/// Embeddings sidecar: one JSON object per line, {"id": "...", "vector": [...]}.
std::map<std::string, std::vector<double>> load_embeddings(const std::string& path);

/// Copies each document's vector out of the sidecar. Documents without an
/// entry raise Error(EmbeddingDimMismatch).
void attach_embeddings(std::vector<Document>& docs,
                       const std::map<std::string, std::vector<double>>& embeddings);

/// Dataset file: one QAPair JSON record per line.
void write_dataset(const std::vector<QAPair>& pairs, const std::string& path);
std::vector<QAPair> read_dataset(const std::string& path);

}  // namespace dagsearch
