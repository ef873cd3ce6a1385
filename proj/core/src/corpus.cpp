#include "docroute/corpus.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "docroute/errors.hpp"
#include "json.hpp"

namespace docroute {

namespace fs = std::filesystem;

std::uint32_t ChunkParams::overlap_tokens() const {
  return static_cast<std::uint32_t>(std::lround(window_size * overlap_fraction));
}

void ChunkParams::validate() const {
  if (window_size < 1) fail(ErrorKind::kInvalidArgument, "window_size must be >= 1");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    fail(ErrorKind::kInvalidArgument, "overlap_fraction must be in [0, 1)");
  }
  if (overlap_tokens() >= window_size) {
    fail(ErrorKind::kInvalidArgument, "overlap rounds up to the full window; stride would be zero");
  }
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  if (text.empty()) return tokens;

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) fail(ErrorKind::kInvalidArgument, "ICU NFC normalizer unavailable");
  const icu::UnicodeString source =
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) fail(ErrorKind::kInvalidArgument, "NFC normalization failed");

  int32_t token_start = -1;
  const int32_t length = normalized.length();
  int32_t i = 0;
  while (i < length) {
    const UChar32 c = normalized.char32At(i);
    const int32_t next = normalized.moveIndex32(i, 1);
    if (u_isUWhiteSpace(c)) {
      if (token_start >= 0) {
        std::string out;
        normalized.tempSubStringBetween(token_start, i).toUTF8String(out);
        tokens.push_back(std::move(out));
        token_start = -1;
      }
    } else if (token_start < 0) {
      token_start = i;
    }
    i = next;
  }
  if (token_start >= 0) {
    std::string out;
    normalized.tempSubStringBetween(token_start, length).toUTF8String(out);
    tokens.push_back(std::move(out));
  }
  return tokens;
}

std::string make_chunk_id(std::string_view doc_id, std::uint32_t ordinal) {
  std::string id(doc_id);
  id += '#';
  id += std::to_string(ordinal);
  return id;
}

std::vector<Chunk> chunk_document(const Document& doc, const ChunkParams& params) {
  params.validate();
  const std::vector<std::string> tokens = tokenize(doc.text);
  if (tokens.empty()) fail(ErrorKind::kEmptyDocument, "document '" + doc.doc_id + "' has no tokens");

  const std::size_t total = tokens.size();
  const std::size_t window = params.window_size;
  const std::size_t stride = params.stride();

  std::vector<Chunk> chunks;
  for (std::size_t start = 0;; start += stride) {
    const std::size_t end = std::min(start + window, total);
    Chunk chunk;
    chunk.doc_id = doc.doc_id;
    chunk.ordinal = static_cast<std::uint32_t>(chunks.size());
    chunk.chunk_id = make_chunk_id(doc.doc_id, chunk.ordinal);
    chunk.start_token = static_cast<std::uint32_t>(start);
    chunk.end_token = static_cast<std::uint32_t>(end);
    for (std::size_t t = start; t < end; ++t) {
      if (t > start) chunk.text += ' ';
      chunk.text += tokens[t];
    }
    chunks.push_back(std::move(chunk));
    if (end == total) break;
  }
  return chunks;
}

std::vector<Chunk> chunk_corpus(const std::vector<Document>& docs, const ChunkParams& params) {
  std::vector<Chunk> out;
  for (const Document& doc : docs) {
    std::vector<Chunk> chunks = chunk_document(doc, params);
    std::move(chunks.begin(), chunks.end(), std::back_inserter(out));
  }
  return out;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_document(const Document& doc, std::unordered_set<std::string>& seen) {
  if (doc.doc_id.empty()) fail(ErrorKind::kInvalidArgument, "document id must be non-empty");
  if (!seen.insert(doc.doc_id).second) fail(ErrorKind::kDuplicateId, "duplicate document id: " + doc.doc_id);
  if (tokenize(doc.text).empty()) fail(ErrorKind::kEmptyDocument, "document '" + doc.doc_id + "' has no tokens");
}

}  // namespace

std::vector<Document> parse_jsonl_corpus(std::string_view content, std::string_view source) {
  using nlohmann::json;
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) fail(ErrorKind::kParse, where + ": malformed json");
    if (!obj.contains("id") || !obj["id"].is_string()) fail(ErrorKind::kParse, where + ": missing string field 'id'");
    if (!obj.contains("text") || !obj["text"].is_string()) {
      fail(ErrorKind::kParse, where + ": missing string field 'text'");
    }

    Document doc;
    doc.doc_id = obj["id"].get<std::string>();
    doc.text = obj["text"].get<std::string>();
    if (auto it = obj.find("title"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) fail(ErrorKind::kParse, where + ": field 'title' must be a string");
      doc.title = it->get<std::string>();
    }
    check_document(doc, seen);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> load_corpus(const fs::path& path, CorpusFormat format) {
  std::error_code ec;
  if (!fs::exists(path, ec)) fail(ErrorKind::kNotFound, "corpus not found: " + path.string());

  std::vector<Document> docs;
  if (format == CorpusFormat::kJsonl) {
    docs = parse_jsonl_corpus(read_file(path), path.string());
  } else {
    if (!fs::is_directory(path)) fail(ErrorKind::kInvalidArgument, path.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
      return a.lexically_relative(path).generic_string() < b.lexically_relative(path).generic_string();
    });
    std::unordered_set<std::string> seen;
    for (const fs::path& file : files) {
      Document doc;
      doc.doc_id = file.lexically_relative(path).generic_string();
      doc.text = read_file(file);
      check_document(doc, seen);
      docs.push_back(std::move(doc));
    }
  }
  if (docs.empty()) fail(ErrorKind::kEmptyCorpus, "corpus is empty: " + path.string());
  return docs;
}

std::vector<Document> load_corpus(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) fail(ErrorKind::kNotFound, "corpus not found: " + path.string());
  return load_corpus(path, fs::is_directory(path) ? CorpusFormat::kTextDirectory : CorpusFormat::kJsonl);
}

}  // namespace docroute
