#include "dagsearch/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dagsearch/errors.hpp"
#include "dagsearch/json_io.hpp"
#include "dagsearch/strings.hpp"

namespace dagsearch {

namespace fs = std::filesystem;

std::vector<Document> load_corpus(const std::string& directory) {
  if (!fs::is_directory(directory)) {
    throw Error(ErrorKind::IoFailure, "corpus path is not a directory: " + directory);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<Document> docs;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot read " + path.string());

    Document doc;
    doc.id = path.stem().string();
    bool in_header = true;
    bool source_set = false;
    std::string line;
    std::string body;
    while (std::getline(in, line)) {
      if (in_header) {
        std::string trimmed = trim(line);
        if (trimmed.empty()) {
          in_header = false;
          continue;
        }
        auto colon = trimmed.find(':');
        if (colon == std::string::npos) {
          throw Error(ErrorKind::CorpusInvalid,
                      path.string() + ": header line without 'key: value' form: '" + trimmed + "'");
        }
        std::string key = to_lower(trim(std::string_view(trimmed).substr(0, colon)));
        std::string value = trim(std::string_view(trimmed).substr(colon + 1));
        if (key == "id") {
          doc.id = value;
        } else if (key == "source") {
          std::string lower = to_lower(value);
          if (lower == "news") {
            doc.source = SourceKind::news;
          } else if (lower == "academic") {
            doc.source = SourceKind::academic;
          } else {
            throw Error(ErrorKind::CorpusInvalid, path.string() + ": unknown source '" + value + "'");
          }
          source_set = true;
        } else if (key == "title") {
          doc.title = value;
        } else if (key == "date") {
          doc.published = value;
        }
        // unknown keys are tolerated
      } else {
        body += line;
        body += '\n';
      }
    }
    if (in_header || trim(body).empty()) {
      throw Error(ErrorKind::CorpusInvalid, path.string() + ": missing blank line or empty body");
    }
    if (!source_set) {
      throw Error(ErrorKind::CorpusInvalid, path.string() + ": missing 'source:' header");
    }
    doc.body = trim(body);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::map<std::string, std::vector<double>> load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read embeddings sidecar: " + path);

  std::map<std::string, std::vector<double>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      out[j.at("id").get<std::string>()] = j.at("vector").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::CorpusInvalid,
                  path + ":" + std::to_string(line_no) + ": bad embedding record: " + e.what());
    }
  }
  return out;
}

void attach_embeddings(std::vector<Document>& docs,
                       const std::map<std::string, std::vector<double>>& embeddings) {
  for (auto& doc : docs) {
    auto it = embeddings.find(doc.id);
    if (it == embeddings.end()) {
      throw Error(ErrorKind::EmbeddingDimMismatch, "no embedding for document '" + doc.id + "'");
    }
    doc.embedding = it->second;
  }
}

void write_dataset(const std::vector<QAPair>& pairs, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write dataset: " + path);
  for (const auto& pair : pairs) {
    out << qa_pair_to_json(pair) << '\n';
  }
  if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + path);
}

std::vector<QAPair> read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read dataset: " + path);
  std::vector<QAPair> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    out.push_back(qa_pair_from_json(line));
  }
  return out;
}

}  // namespace dagsearch
