#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace deltametry {

/// Author_Title document label. The author part never contains '_'.
class DocumentId {
 public:
  /// Splits on the first underscore. Throws Error(MalformedId).
  static DocumentId parse(std::string_view stem);

  /// True when `label` would parse as an Author_Title stem.
  static bool looks_like_id(std::string_view label);

  const std::string& author() const noexcept { return author_; }
  const std::string& title() const noexcept { return title_; }
  const std::string& raw() const noexcept { return raw_; }

  friend bool operator==(const DocumentId& a, const DocumentId& b) { return a.raw_ == b.raw_; }
  friend std::strong_ordering operator<=>(const DocumentId& a, const DocumentId& b) {
    return a.raw_ <=> b.raw_;
  }

 private:
  DocumentId(std::string author, std::string title, std::string raw)
      : author_(std::move(author)), title_(std::move(title)), raw_(std::move(raw)) {}

  std::string author_;
  std::string title_;
  std::string raw_;
};

inline DocumentId parse_document_id(std::string_view stem) { return DocumentId::parse(stem); }

enum class Splitter { LettersOnly, LettersPlusApostrophe };

struct TokenizerConfig {
  bool lowercase = true;
  Splitter splitter = Splitter::LettersPlusApostrophe;
  bool strip_numerals = true;
};

/// Splits UTF-8 text into word tokens. Hyphens and all other punctuation
/// separate tokens; with LettersPlusApostrophe an apostrophe (' or U+2019)
/// between two word characters stays inside the token as '.
/// Throws Error(Parse) on invalid UTF-8.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

class Document {
 public:
  Document(DocumentId id, std::vector<std::string> tokens);

  const DocumentId& id() const noexcept { return id_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t token_count() const noexcept { return tokens_.size(); }

 private:
  DocumentId id_;
  std::vector<std::string> tokens_;
};

struct FileError {
  std::filesystem::path file;
  std::string message;
};

struct CorpusLoad {
  std::vector<Document> documents;  // sorted by id
  std::vector<FileError> errors;

  std::size_t total_tokens() const;
};

/// Reads every *.txt file in `directory`. Files that cannot be read, are not
/// valid UTF-8, or whose stem is not Author_Title are reported in `errors`;
/// the rest are returned. Throws Error(EmptyCorpus) when no .txt file exists
/// and Error(Io) when the directory itself is missing.
CorpusLoad load_corpus(const std::filesystem::path& directory, const TokenizerConfig& config = {});

}  // namespace deltametry
