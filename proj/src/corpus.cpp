#include "deltametry/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <locale>
#include <numeric>
#include <optional>
#include <iterator>

#include "deltametry/error.hpp"
#include "parallel.hpp"

namespace deltametry {

namespace fs = std::filesystem;

DocumentId DocumentId::parse(std::string_view stem) {
  const auto cut = stem.find('_');
  if (stem.empty() || cut == std::string_view::npos || cut == 0 || cut + 1 == stem.size()) {
    throw Error(ErrorKind::MalformedId,
                "malformed document id '" + std::string(stem) + "': expected Author_Title");
  }
  return DocumentId(std::string(stem.substr(0, cut)), std::string(stem.substr(cut + 1)),
                    std::string(stem));
}

bool DocumentId::looks_like_id(std::string_view label) {
  const auto cut = label.find('_');
  if (cut == std::string_view::npos || cut == 0 || cut + 1 == label.size()) return false;
  return std::none_of(label.begin(), label.end(),
                      [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at `pos`; advances `pos`. Returns nullopt
// on malformed input.
std::optional<char32_t> next_code_point(std::string_view text, std::size_t& pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  std::size_t extra = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    return std::nullopt;
  }
  if (pos + extra >= text.size()) return std::nullopt;
  for (std::size_t k = 1; k <= extra; ++k) {
    const auto byte = static_cast<unsigned char>(text[pos + k]);
    if ((byte & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (byte & 0x3F);
  }
  static constexpr char32_t kMinForLength[] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMinForLength[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    return std::nullopt;
  }
  pos += extra + 1;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Unicode letter classes come from the C.UTF-8 locale; if the host lacks it
// only ASCII letters are recognized.
const std::ctype<wchar_t>& unicode_ctype() {
  static const std::locale locale = [] {
    for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
      try {
        return std::locale(name);
      } catch (const std::runtime_error&) {
      }
    }
    return std::locale::classic();
  }();
  return std::use_facet<std::ctype<wchar_t>>(locale);
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == U'’'; }

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  const auto& ctype = unicode_ctype();
  std::vector<char32_t> points;
  points.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const auto cp = next_code_point(text, pos);
    if (!cp) {
      throw Error(ErrorKind::Parse, "invalid UTF-8 at byte offset " + std::to_string(pos));
    }
    points.push_back(*cp);
  }

  auto is_word_char = [&](char32_t cp) {
    if (cp == 0xFEFF || cp == kReplacement) return false;
    const auto wc = static_cast<wchar_t>(cp);
    if (ctype.is(std::ctype_base::alpha, wc)) return true;
    return !config.strip_numerals && ctype.is(std::ctype_base::digit, wc);
  };

  std::vector<std::string> tokens;
  std::string current;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const char32_t cp = points[i];
    if (is_word_char(cp)) {
      const auto wc = static_cast<wchar_t>(cp);
      append_utf8(current, config.lowercase ? static_cast<char32_t>(ctype.tolower(wc)) : cp);
      continue;
    }
    if (config.splitter == Splitter::LettersPlusApostrophe && is_apostrophe(cp) &&
        !current.empty() && i + 1 < points.size() && is_word_char(points[i + 1])) {
      current.push_back('\'');
      continue;
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Document::Document(DocumentId id, std::vector<std::string> tokens)
    : id_(std::move(id)), tokens_(std::move(tokens)) {
  for (const auto& token : tokens_) {
    if (token.empty() || token.find_first_of(" \t\r\n") != std::string::npos) {
      throw Error(ErrorKind::InvalidInput,
                  "document " + id_.raw() + " has an empty or whitespace token");
    }
  }
}

std::size_t CorpusLoad::total_tokens() const {
  return std::accumulate(documents.begin(), documents.end(), std::size_t{0},
                         [](std::size_t sum, const Document& d) { return sum + d.token_count(); });
}

CorpusLoad load_corpus(const fs::path& directory, const TokenizerConfig& config) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw Error(ErrorKind::MissingInput, "corpus directory not found: " + directory.string());
  }

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.path().extension() == ".txt" && !entry.is_directory()) files.push_back(entry.path());
  }
  if (files.empty()) {
    throw Error(ErrorKind::EmptyCorpus, "no .txt files in " + directory.string());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.stem().string() < b.stem().string(); });

  std::vector<std::optional<Document>> loaded(files.size());
  std::vector<std::optional<std::string>> failures(files.size());
  detail::parallel_for(files.size(), [&](std::size_t i) {
    const auto& file = files[i];
    try {
      auto id = DocumentId::parse(file.stem().string());
      std::ifstream in(file, std::ios::binary);
      if (!in) {
        failures[i] = "cannot read file";
        return;
      }
      std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
      if (in.bad()) {
        failures[i] = "read error";
        return;
      }
      if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
      loaded[i].emplace(std::move(id), tokenize(text, config));
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  CorpusLoad result;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (loaded[i]) result.documents.push_back(std::move(*loaded[i]));
    if (failures[i]) result.errors.push_back({files[i], *failures[i]});
  }
  return result;
}

}  // namespace deltametry
