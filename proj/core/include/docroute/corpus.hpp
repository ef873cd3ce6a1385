#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace docroute {

struct Document {
  std::string doc_id;
  std::optional<std::string> title;
  std::string text;
};

/// A contiguous token window [start_token, end_token) of one document.
struct Chunk {
  std::string chunk_id;  // "<doc_id>#<ordinal>"
  std::string doc_id;
  std::uint32_t ordinal = 0;
  std::uint32_t start_token = 0;
  std::uint32_t end_token = 0;
  std::string text;

  std::uint32_t token_count() const { return end_token - start_token; }

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct ChunkParams {
  std::uint32_t window_size = 300;
  double overlap_fraction = 0.15;

  /// Tokens shared by consecutive windows: round(window * overlap).
  std::uint32_t overlap_tokens() const;
  std::uint32_t stride() const { return window_size - overlap_tokens(); }
  void validate() const;

  friend bool operator==(const ChunkParams&, const ChunkParams&) = default;
};

enum class CorpusFormat { kJsonl, kTextDirectory };

/// NFC-normalizes, then splits on maximal runs of Unicode whitespace.
std::vector<std::string> tokenize(std::string_view text);

std::string make_chunk_id(std::string_view doc_id, std::uint32_t ordinal);

std::vector<Chunk> chunk_document(const Document& doc, const ChunkParams& params);

/// Chunks every document in order; chunk lists are concatenated.
std::vector<Chunk> chunk_corpus(const std::vector<Document>& docs, const ChunkParams& params);

std::vector<Document> load_corpus(const std::filesystem::path& path, CorpusFormat format);

/// Picks jsonl for regular files and text-directory for directories.
std::vector<Document> load_corpus(const std::filesystem::path& path);

/// Parses jsonl corpus content. `source` only labels error messages.
std::vector<Document> parse_jsonl_corpus(std::string_view content, std::string_view source = "<memory>");

}  // namespace docroute
