#include "deltametry/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "deltametry/delta.hpp"
#include "deltametry/report.hpp"
#include "svg.hpp"

namespace deltametry::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::pair<Output, std::string_view> kOutputNames[] = {
    {Output::Table, "table"},
    {Output::DistCsv, "dist-csv"},
    {Output::Dendrogram, "dendrogram"},
    {Output::Newick, "newick"},
    {Output::Distribution, "distribution"},
    {Output::Heatmap, "heatmap"},
    {Output::ImpostersReport, "imposters-report"},
};

const std::set<std::string> kConfigKeys = {
    "input",      "orientation",     "mfw",       "linkage",   "iterations",
    "feature_fraction", "imposters_per_iteration", "seed", "test", "highlight",
    "exclude_from_fit", "author_coloring", "outputs", "output_dir", "lowercase",
    "splitter",   "strip_numerals"};

// Written to manifests; accepted and ignored when a manifest is used as config.
const std::set<std::string> kManifestOnlyKeys = {"tool_version", "input_hash", "command", "artifacts"};

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) items.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::Usage, fmt::format("invalid value '{}' for {}", text, key));
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error(ErrorKind::Usage, fmt::format("invalid boolean '{}' for {}", text, key));
}

std::optional<TableOrientation> parse_orientation(const std::string& text) {
  if (text == "auto") return std::nullopt;
  if (text == "docs-rows") return TableOrientation::DocsRows;
  if (text == "words-rows") return TableOrientation::WordsRows;
  throw Error(ErrorKind::Usage, "orientation must be auto, docs-rows or words-rows");
}

std::string orientation_name(const std::optional<TableOrientation>& o) {
  if (!o) return "auto";
  return *o == TableOrientation::DocsRows ? "docs-rows" : "words-rows";
}

Splitter parse_splitter(const std::string& text) {
  if (text == "letters") return Splitter::LettersOnly;
  if (text == "letters-apostrophe") return Splitter::LettersPlusApostrophe;
  throw Error(ErrorKind::Usage, "splitter must be letters or letters-apostrophe");
}

std::pair<std::string, std::string> parse_highlight(const std::string& text) {
  const auto items = split_list(text);
  if (items.size() != 2) throw Error(ErrorKind::Usage, "highlight needs two author labels: A,B");
  return {items[0], items[1]};
}

std::set<Output> default_outputs(const std::string& command) {
  if (command == "freq") return {Output::Table};
  if (command == "dist") return {Output::DistCsv};
  if (command == "cluster") return {Output::Dendrogram, Output::Newick};
  if (command == "imposters") return {Output::ImpostersReport};
  if (command == "report") return {Output::Distribution, Output::Heatmap};
  return {Output::DistCsv, Output::Dendrogram, Output::Newick};
}

// Raw flag values; std::nullopt means "not given on the command line".
struct FlagValues {
  std::optional<std::string> config;
  std::optional<std::string> input;
  std::optional<std::string> orientation;
  std::optional<std::size_t> mfw;
  std::optional<std::string> linkage;
  std::optional<std::size_t> iterations;
  std::optional<double> feature_fraction;
  std::optional<std::string> imposters_per_iteration;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> test;
  std::optional<std::string> highlight;
  std::vector<std::string> exclude_from_fit;
  std::optional<std::string> author_coloring;
  std::optional<std::string> outputs;
  std::optional<std::string> output_dir;
  std::optional<std::string> lowercase;
  std::optional<std::string> splitter;
  std::optional<std::string> strip_numerals;
};

void add_common(CLI::App* sub, FlagValues& v) {
  sub->add_option("--config", v.config, "key=value configuration file");
  sub->add_option("--input", v.input, "corpus directory or frequency table file");
  sub->add_option("--orientation", v.orientation, "table orientation: auto|docs-rows|words-rows");
  sub->add_option("--mfw", v.mfw, "number of most frequent words (default 100)");
  sub->add_option("--exclude-from-fit", v.exclude_from_fit, "document left out of the z-score fit (repeatable)");
  sub->add_option("--outputs", v.outputs, "comma list of table,dist-csv,dendrogram,newick,distribution,heatmap,imposters-report");
  sub->add_option("--output-dir", v.output_dir, "directory for artifacts (default .)");
  sub->add_option("--lowercase", v.lowercase, "lowercase tokens (true|false)");
  sub->add_option("--splitter", v.splitter, "letters|letters-apostrophe");
  sub->add_option("--strip-numerals", v.strip_numerals, "drop numerals (true|false)");
}

void add_cluster(CLI::App* sub, FlagValues& v) {
  sub->add_option("--linkage", v.linkage, "ward|average|complete|single (default ward)");
  sub->add_option("--author-coloring", v.author_coloring, "color dendrogram leaves by author (true|false)");
}

void add_imposters(CLI::App* sub, FlagValues& v) {
  sub->add_option("--iterations", v.iterations, "imposters rounds (default 100)");
  sub->add_option("--feature-fraction", v.feature_fraction, "share of words sampled per round (default 0.5)");
  sub->add_option("--imposters-per-iteration", v.imposters_per_iteration, "imposter documents per round or 'all'");
  sub->add_option("--seed", v.seed, "random seed (required for imposters)");
  sub->add_option("--test", v.test, "disputed document id");
}

void add_report(CLI::App* sub, FlagValues& v) {
  sub->add_option("--highlight", v.highlight, "author pair to mark, e.g. Galbraith,Rowling");
}

std::string sha256_hex(const std::vector<std::pair<std::string, std::string>>& parts) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  for (const auto& [name, content] : parts) {
    EVP_DigestUpdate(ctx, name.data(), name.size());
    EVP_DigestUpdate(ctx, "\0", 1);
    EVP_DigestUpdate(ctx, content.data(), content.size());
    EVP_DigestUpdate(ctx, "\0", 1);
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + file.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string input_hash(const fs::path& input) {
  std::vector<std::pair<std::string, std::string>> parts;
  if (fs::is_directory(input)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input)) {
      if (entry.path().extension() == ".txt" && !entry.is_directory()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) parts.emplace_back(f.filename().string(), read_file(f));
  } else {
    parts.emplace_back("", read_file(input));
  }
  return "sha256:" + sha256_hex(parts);
}

std::string manifest_text(const RunConfig& c, const std::string& hash, const std::vector<fs::path>& artifacts) {
  std::string out = "# deltametry run manifest; usable as --config for an exact re-run\n";
  auto line = [&](std::string_view key, const std::string& value) { out += fmt::format("{}={}\n", key, value); };
  line("tool_version", std::string(kToolVersion));
  line("command", c.command);
  line("input", c.input.string());
  line("input_hash", hash);
  line("orientation", orientation_name(c.orientation));
  line("lowercase", c.tokenizer.lowercase ? "true" : "false");
  line("splitter", c.tokenizer.splitter == Splitter::LettersOnly ? "letters" : "letters-apostrophe");
  line("strip_numerals", c.tokenizer.strip_numerals ? "true" : "false");
  line("mfw", std::to_string(c.mfw));
  line("linkage", std::string(to_string(c.linkage)));
  line("author_coloring", c.author_coloring ? "true" : "false");
  line("iterations", std::to_string(c.imposters.iterations));
  line("feature_fraction", fmt::format("{}", c.imposters.feature_fraction));
  line("imposters_per_iteration",
       c.imposters.imposters_per_iteration ? std::to_string(*c.imposters.imposters_per_iteration) : "all");
  if (c.seed_given) line("seed", std::to_string(c.imposters.seed));
  if (c.test_doc) line("test", *c.test_doc);
  if (c.highlight) line("highlight", c.highlight->first + "," + c.highlight->second);
  std::string excluded;
  for (const auto& id : c.exclude_from_fit) excluded += (excluded.empty() ? "" : ",") + id;
  if (!excluded.empty()) line("exclude_from_fit", excluded);
  std::string outputs;
  for (auto o : c.outputs) outputs += (outputs.empty() ? "" : ",") + std::string(to_string(o));
  line("outputs", outputs);
  line("output_dir", c.output_dir.string());
  std::string files;
  for (const auto& a : artifacts) files += (files.empty() ? "" : ",") + a.filename().string();
  line("artifacts", files);
  return out;
}

// Runs `body` and tags any Error with the stage name.
template <typename F>
auto stage(const std::string& name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  } catch (const std::filesystem::filesystem_error& e) {
    throw StageError(name, Error(ErrorKind::Io, e.what()));
  }
}

DocumentId pick_test_document(const RunConfig& c, const FrequencyTable& table) {
  if (c.test_doc) return DocumentId::parse(*c.test_doc);
  std::map<std::string, std::vector<DocumentId>> by_author;
  for (const auto& id : table.doc_ids()) by_author[id.author()].push_back(id);
  std::vector<DocumentId> singles;
  for (const auto& [author, ids] : by_author) {
    if (ids.size() == 1) singles.push_back(ids.front());
  }
  if (singles.size() != 1) {
    std::string names;
    for (const auto& id : singles) names += " " + id.raw();
    throw Error(ErrorKind::Usage,
                "cannot infer the disputed document (need exactly one single-document author, found " +
                    std::to_string(singles.size()) + (names.empty() ? "" : ":" + names) + "); pass --test");
  }
  return singles.front();
}

}  // namespace

std::string_view to_string(Output output) {
  for (const auto& [o, name] : kOutputNames) {
    if (o == output) return name;
  }
  return "?";
}

Output parse_output(std::string_view name) {
  for (const auto& [o, n] : kOutputNames) {
    if (n == name) return o;
  }
  throw Error(ErrorKind::Usage, "unknown output '" + std::string(name) + "'");
}

std::map<std::string, std::string> read_key_values(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Usage, "cannot read config file " + file.string());
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Usage, fmt::format("{}:{}: expected key=value", file.string(), line_no));
    }
    auto key = trim(std::string_view(text).substr(0, eq));
    if (!kConfigKeys.contains(key) && !kManifestOnlyKeys.contains(key)) {
      throw Error(ErrorKind::Usage, fmt::format("{}:{}: unknown key '{}'", file.string(), line_no, key));
    }
    values[key] = trim(std::string_view(text).substr(eq + 1));
  }
  return values;
}

RunConfig cmd_parse(const std::vector<std::string>& args) {
  CLI::App app{"deltametry: Burrows' Delta stylometry toolkit"};
  app.require_subcommand(1, 1);
  FlagValues v;
  auto* freq = app.add_subcommand("freq", "build or convert a most-frequent-word table");
  auto* dist = app.add_subcommand("dist", "Delta distance matrix as CSV");
  auto* cluster = app.add_subcommand("cluster", "hierarchical clustering: dendrogram SVG and Newick");
  auto* imposters = app.add_subcommand("imposters", "General Imposters verification");
  auto* report = app.add_subcommand("report", "distance distribution and heatmap SVGs");
  auto* run_cmd = app.add_subcommand("run", "full pipeline driven by a config file");
  for (auto* sub : {freq, dist, cluster, imposters, report, run_cmd}) add_common(sub, v);
  for (auto* sub : {cluster, run_cmd}) add_cluster(sub, v);
  for (auto* sub : {imposters, run_cmd}) add_imposters(sub, v);
  for (auto* sub : {report, run_cmd}) add_report(sub, v);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorKind::Usage, e.what());
  }

  RunConfig c;
  c.command = app.get_subcommands().front()->get_name();
  const auto file = v.config ? read_key_values(*v.config) : std::map<std::string, std::string>{};

  // Flag, else config file, else nothing (the default stays).
  auto pick = [&](const std::optional<std::string>& flag, const std::string& key) -> std::optional<std::string> {
    if (flag) return flag;
    if (auto it = file.find(key); it != file.end()) return it->second;
    return std::nullopt;
  };
  auto to_text = [](const auto& opt) -> std::optional<std::string> {
    if (!opt) return std::nullopt;
    return fmt::format("{}", *opt);
  };

  if (auto s = pick(v.input, "input")) c.input = *s;
  if (c.input.empty()) throw Error(ErrorKind::Usage, "--input is required (flag or config key 'input')");
  if (auto s = pick(v.orientation, "orientation")) c.orientation = parse_orientation(*s);
  if (auto s = pick(v.lowercase, "lowercase")) c.tokenizer.lowercase = parse_bool("lowercase", *s);
  if (auto s = pick(v.splitter, "splitter")) c.tokenizer.splitter = parse_splitter(*s);
  if (auto s = pick(v.strip_numerals, "strip_numerals")) c.tokenizer.strip_numerals = parse_bool("strip_numerals", *s);
  if (auto s = pick(to_text(v.mfw), "mfw")) c.mfw = parse_number<std::size_t>("mfw", *s);
  if (c.mfw == 0) throw Error(ErrorKind::Usage, "mfw must be at least 1");
  if (auto s = pick(v.linkage, "linkage")) c.linkage = parse_linkage(*s);
  if (auto s = pick(v.author_coloring, "author_coloring")) c.author_coloring = parse_bool("author_coloring", *s);
  if (auto s = pick(to_text(v.iterations), "iterations")) c.imposters.iterations = parse_number<std::size_t>("iterations", *s);
  if (auto s = pick(to_text(v.feature_fraction), "feature_fraction")) {
    c.imposters.feature_fraction = parse_number<double>("feature_fraction", *s);
  }
  if (auto s = pick(v.imposters_per_iteration, "imposters_per_iteration"); s && *s != "all") {
    c.imposters.imposters_per_iteration = parse_number<std::size_t>("imposters_per_iteration", *s);
  }
  if (auto s = pick(to_text(v.seed), "seed")) {
    c.imposters.seed = parse_number<std::uint64_t>("seed", *s);
    c.seed_given = true;
  }
  if (auto s = pick(v.test, "test")) c.test_doc = *s;
  if (auto s = pick(v.highlight, "highlight")) c.highlight = parse_highlight(*s);
  if (!v.exclude_from_fit.empty()) {
    c.exclude_from_fit = v.exclude_from_fit;
  } else if (auto it = file.find("exclude_from_fit"); it != file.end()) {
    c.exclude_from_fit = split_list(it->second);
  }
  if (auto s = pick(v.output_dir, "output_dir")) c.output_dir = *s;
  if (auto s = pick(v.outputs, "outputs")) {
    for (const auto& name : split_list(*s)) c.outputs.insert(parse_output(name));
    if (c.outputs.empty()) throw Error(ErrorKind::Usage, "outputs list is empty");
  } else {
    c.outputs = default_outputs(c.command);
  }

  c.imposters.validate();
  if (c.outputs.contains(Output::ImpostersReport) && !c.seed_given) {
    throw Error(ErrorKind::Usage, "imposters needs --seed (or 'seed' in the config file)");
  }
  for (const auto& id : c.exclude_from_fit) DocumentId::parse(id);
  if (c.test_doc) DocumentId::parse(*c.test_doc);
  return c;
}

RunManifest run(const RunConfig& c) {
  std::vector<fs::path> written;
  try {
    const bool from_corpus = fs::is_directory(c.input);
    FrequencyTable table = from_corpus ? stage("corpus", [&] {
      auto load = load_corpus(c.input, c.tokenizer);
      if (!load.errors.empty()) {
        std::string message = fmt::format("{} file(s) failed to load:", load.errors.size());
        for (const auto& e : load.errors) message += fmt::format("\n  {}: {}", e.file.string(), e.message);
        throw Error(ErrorKind::Parse, message);
      }
      return build_frequency_table(load.documents, std::nullopt);
    })
                                       : stage(fs::exists(c.input) ? "frequencies" : "corpus",
                                               [&] { return read_stylo_table(c.input, c.orientation); });
    const std::string hash = stage("corpus", [&] { return input_hash(c.input); });
    table = stage("frequencies", [&] { return select_mfw(table, c.mfw); });

    stage("output", [&] { fs::create_directories(c.output_dir); });
    auto emit = [&](const std::string& name, const auto& writer) {
      const fs::path path = c.output_dir / name;
      written.push_back(path);
      writer(path);
    };

    RunManifest manifest;
    const auto& outputs = c.outputs;
    if (outputs.contains(Output::Table)) {
      stage("frequencies", [&] {
        emit("frequencies.txt", [&](const fs::path& p) { write_stylo_table(table, p, TableOrientation::WordsRows); });
      });
    }

    const bool needs_matrix = outputs.contains(Output::DistCsv) || outputs.contains(Output::Dendrogram) ||
                              outputs.contains(Output::Newick) || outputs.contains(Output::Distribution) ||
                              outputs.contains(Output::Heatmap);
    if (needs_matrix) {
      const auto matrix = stage("delta", [&] {
        DistanceOptions options{c.mfw, {}};
        for (const auto& id : c.exclude_from_fit) options.exclude_from_fit.push_back(DocumentId::parse(id));
        return distance_matrix(table, options);
      });
      if (outputs.contains(Output::DistCsv)) {
        stage("report", [&] { emit("distances.csv", [&](const fs::path& p) { export_distance_csv(matrix, p); }); });
      }
      if (outputs.contains(Output::Dendrogram) || outputs.contains(Output::Newick)) {
        stage("cluster", [&] {
          const auto tree = hierarchical_cluster(matrix, c.linkage);
          if (outputs.contains(Output::Dendrogram)) {
            emit("dendrogram.svg", [&](const fs::path& p) { render_dendrogram_svg(tree, p, c.author_coloring); });
          }
          if (outputs.contains(Output::Newick)) {
            emit("dendrogram.nwk", [&](const fs::path& p) {
              detail::write_text_file(p, dendrogram_to_newick(tree) + "\n");
            });
          }
        });
      }
      if (outputs.contains(Output::Distribution)) {
        stage("report", [&] {
          const auto dist = distance_distribution(matrix, c.highlight);
          emit("distribution.svg", [&](const fs::path& p) { render_distribution_svg(dist, p); });
          const auto intra = summarize(dist.intra);
          const auto inter = summarize(dist.inter);
          manifest.console += fmt::format("intra-author pairs: {} (mean {:.4f})\ninter-author pairs: {} (mean {:.4f})\n",
                                          intra.known, intra.mean, inter.known, inter.mean);
          if (!dist.highlight.empty()) {
            manifest.console += fmt::format("{} x {} pairs: {} (mean {:.4f})\n", c.highlight->first,
                                            c.highlight->second, dist.highlight.size(), summarize(dist.highlight).mean);
          }
        });
      }
      if (outputs.contains(Output::Heatmap)) {
        stage("report", [&] { emit("heatmap.svg", [&](const fs::path& p) { render_heatmap_svg(matrix, p); }); });
      }
    }

    if (outputs.contains(Output::ImpostersReport)) {
      stage("imposters", [&] {
        const auto test = pick_test_document(c, table);
        const auto report = imposters_all(test, table, c.imposters);
        const auto text = format_imposters_text(report);
        manifest.console += text;
        emit("imposters.txt", [&](const fs::path& p) { detail::write_text_file(p, text); });
        emit("imposters.json", [&](const fs::path& p) { detail::write_text_file(p, format_imposters_json(report)); });
      });
    }

    manifest.artifacts = written;
    manifest.text = manifest_text(c, hash, written);
    manifest.manifest_path = c.output_dir / "manifest.txt";
    written.push_back(manifest.manifest_path);
    stage("output", [&] { detail::write_text_file(manifest.manifest_path, manifest.text); });
    return manifest;
  } catch (...) {
    for (const auto& path : written) {
      std::error_code ec;
      fs::remove(path, ec);
    }
    throw;
  }
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::MissingInput:
    case ErrorKind::MalformedId:
    case ErrorKind::EmptyCorpus:
    case ErrorKind::Parse:
    case ErrorKind::Orientation:
    case ErrorKind::EmptyTable:
    case ErrorKind::ModelMismatch:
    case ErrorKind::Lookup:
    case ErrorKind::UnknownCandidate: return 3;
    case ErrorKind::DegenerateDocument:
    case ErrorKind::InsufficientData:
    case ErrorKind::DegenerateSetup:
    case ErrorKind::Dimension:
    case ErrorKind::InvalidInput: return 4;
    case ErrorKind::Io: return 5;
  }
  return 1;
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = cmd_parse(args);
  } catch (const HelpRequested& help) {
    out << help.what();
    return 0;
  } catch (const Error& e) {
    err << "deltametry: " << e.what() << "\nRun with --help for usage.\n";
    return exit_code(e.kind());
  }

  try {
    const auto manifest = run(config);
    out << manifest.console;
    for (const auto& path : manifest.artifacts) out << "wrote " << path.string() << "\n";
    out << "wrote " << manifest.manifest_path.string() << "\n";
    return 0;
  } catch (const StageError& e) {
    err << "deltametry: error in stage '" << e.stage() << "' (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const Error& e) {
    err << "deltametry: " << e.what() << "\n";
    return exit_code(e.kind());
  }
}

}  // namespace deltametry::cli
