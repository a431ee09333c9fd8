#include "deltametry/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "deltametry/error.hpp"
#include "svg.hpp"

namespace deltametry {

Dendrogram::Dendrogram(std::vector<DocumentId> leaves, std::vector<Merge> merges)
    : leaves_(std::move(leaves)), merges_(std::move(merges)) {
  const std::size_t n = leaves_.size();
  if (n == 0 || merges_.size() != n - 1) {
    throw Error(ErrorKind::InvalidInput,
                fmt::format("dendrogram over {} leaves needs {} merges, got {}", n,
                            n == 0 ? 0 : n - 1, merges_.size()));
  }
  std::vector<bool> used(n + merges_.size(), false);
  for (std::size_t k = 0; k < merges_.size(); ++k) {
    const auto& m = merges_[k];
    for (std::size_t child : {m.left, m.right}) {
      if (child >= n + k || used[child]) {
        throw Error(ErrorKind::InvalidInput, fmt::format("merge {} reuses or forward-references node {}", k, child));
      }
      used[child] = true;
    }
    if (m.left == m.right) throw Error(ErrorKind::InvalidInput, fmt::format("merge {} joins a node with itself", k));
    if (k > 0 && m.height < merges_[k - 1].height - 1e-12 * std::max(1.0, std::abs(m.height))) {
      throw Error(ErrorKind::InvalidInput, fmt::format("merge heights decrease at merge {}", k));
    }
  }
  std::vector<std::string> names;
  for (const auto& id : leaves_) names.push_back(id.raw());
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw Error(ErrorKind::InvalidInput, "dendrogram leaves are not distinct");
  }
}

double Dendrogram::height(std::size_t node) const {
  return is_leaf(node) ? 0.0 : merge_at(node).height;
}

std::vector<DocumentId> Dendrogram::members(std::size_t node) const {
  std::vector<DocumentId> out;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const std::size_t top = stack.back();
    stack.pop_back();
    if (is_leaf(top)) {
      out.push_back(leaves_[top]);
    } else {
      stack.push_back(merge_at(top).right);
      stack.push_back(merge_at(top).left);
    }
  }
  return out;
}

std::vector<std::pair<std::vector<std::string>, double>> Dendrogram::clusters() const {
  std::vector<std::pair<std::vector<std::string>, double>> out;
  for (std::size_t k = 0; k < merges_.size(); ++k) {
    std::vector<std::string> names;
    for (const auto& id : members(leaves_.size() + k)) names.push_back(id.raw());
    std::sort(names.begin(), names.end());
    out.emplace_back(std::move(names), merges_[k].height);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string_view to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::Ward: return "ward";
    case Linkage::Average: return "average";
    case Linkage::Complete: return "complete";
    case Linkage::Single: return "single";
  }
  return "ward";
}

Linkage parse_linkage(std::string_view name) {
  for (auto l : {Linkage::Ward, Linkage::Average, Linkage::Complete, Linkage::Single}) {
    if (name == to_string(l)) return l;
  }
  throw Error(ErrorKind::Usage, "unknown linkage '" + std::string(name) + "' (ward|average|complete|single)");
}

Dendrogram hierarchical_cluster(const DistanceMatrix& m, Linkage linkage) {
  const std::size_t n = m.size();
  if (n < 2) throw Error(ErrorKind::InsufficientData, "clustering needs at least 2 documents");
  if (!m.complete()) throw Error(ErrorKind::InvalidInput, "cannot cluster a matrix with unknown cells");
  m.validate(1e-9);

  struct Cluster {
    std::size_t node;
    std::size_t size;
    const std::string* rep;
    bool active;
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i, 1, &m.doc_ids()[i].raw(), true});

  // Working copy, updated in place; row i always belongs to clusters[i].
  std::vector<double> d = m.cells();
  auto dist = [&](std::size_t i, std::size_t j) -> double& { return d[i * n + j]; };
  auto key = [&](std::size_t i, std::size_t j) {
    const std::string* a = clusters[i].rep;
    const std::string* b = clusters[j].rep;
    return *a < *b ? std::pair{a, b} : std::pair{b, a};
  };

  std::vector<Dendrogram::Merge> merges;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t i = 0; i < n; ++i) {
      if (!clusters[i].active) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!clusters[j].active) continue;
        if (!best) {
          best = {i, j};
          continue;
        }
        const double cur = dist(i, j);
        const double top = dist(best->first, best->second);
        if (cur < top) {
          best = {i, j};
        } else if (cur == top) {
          const auto [a1, b1] = key(i, j);
          const auto [a2, b2] = key(best->first, best->second);
          if (*a1 < *a2 || (*a1 == *a2 && *b1 < *b2)) best = {i, j};
        }
      }
    }

    auto [i, j] = *best;
    if (*clusters[j].rep < *clusters[i].rep) std::swap(i, j);
    const double height = dist(i, j);
    merges.push_back({clusters[i].node, clusters[j].node, height});

    const double ni = static_cast<double>(clusters[i].size);
    const double nj = static_cast<double>(clusters[j].size);
    for (std::size_t k = 0; k < n; ++k) {
      if (!clusters[k].active || k == i || k == j) continue;
      const double nk = static_cast<double>(clusters[k].size);
      const double dki = dist(k, i);
      const double dkj = dist(k, j);
      double updated = 0.0;
      switch (linkage) {
        case Linkage::Single: updated = std::min(dki, dkj); break;
        case Linkage::Complete: updated = std::max(dki, dkj); break;
        case Linkage::Average: updated = (ni * dki + nj * dkj) / (ni + nj); break;
        case Linkage::Ward:
          updated = ((ni + nk) * dki + (nj + nk) * dkj - nk * height) / (ni + nj + nk);
          break;
      }
      dist(k, i) = updated;
      dist(i, k) = updated;
    }
    // The merged cluster keeps slot i; its representative is already the smaller one.
    clusters[i].node = n + step;
    clusters[i].size += clusters[j].size;
    clusters[j].active = false;
  }
  return Dendrogram(m.doc_ids(), std::move(merges));
}

namespace {

std::string newick_label(const std::string& label) {
  if (label.find_first_of(" \t\n()[]':;,") == std::string::npos) return label;
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out.push_back('\'');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

void emit_newick(const Dendrogram& t, std::size_t node, std::string& out) {
  if (t.is_leaf(node)) {
    out += newick_label(t.leaves()[node].raw());
    return;
  }
  const auto& m = t.merge_at(node);
  out.push_back('(');
  emit_newick(t, m.left, out);
  out += fmt::format(":{}", (m.height - t.height(m.left)) / 2.0);
  out.push_back(',');
  emit_newick(t, m.right, out);
  out += fmt::format(":{}", (m.height - t.height(m.right)) / 2.0);
  out.push_back(')');
}

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  Dendrogram parse() {
    const std::size_t root = parse_node();
    skip_blanks();
    if (peek() == ':') {
      ++pos_;
      parse_length();
      skip_blanks();
    }
    if (peek() != ';') fail("expected ';'");
    ++pos_;
    skip_blanks();
    if (pos_ != text_.size()) fail("trailing text after ';'");
    if (nodes_.size() == 1) fail("a tree needs at least two leaves");
    (void)root;

    // Merge order: by height, children before parents (post-order is stable).
    std::vector<std::size_t> internal;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      if (!nodes_[k].leaf) internal.push_back(k);
    }
    std::stable_sort(internal.begin(), internal.end(),
                     [&](std::size_t a, std::size_t b) { return nodes_[a].height < nodes_[b].height; });

    std::vector<DocumentId> leaves;
    std::vector<std::size_t> node_id(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      if (nodes_[k].leaf) {
        node_id[k] = leaves.size();
        leaves.push_back(DocumentId::parse(nodes_[k].label));
      }
    }
    std::vector<Dendrogram::Merge> merges;
    for (std::size_t k : internal) {
      node_id[k] = leaves.size() + merges.size();
      merges.push_back({node_id[nodes_[k].left], node_id[nodes_[k].right], nodes_[k].height});
    }
    return Dendrogram(std::move(leaves), std::move(merges));
  }

 private:
  struct Node {
    bool leaf = true;
    std::string label;
    std::size_t left = 0;
    std::size_t right = 0;
    double height = 0.0;
  };

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Parse, fmt::format("newick: {} at offset {}", what, pos_));
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_blanks() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string parse_label() {
    skip_blanks();
    std::string label;
    if (peek() == '\'') {
      ++pos_;
      while (true) {
        if (pos_ >= text_.size()) fail("unterminated quoted label");
        if (text_[pos_] == '\'') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '\'') {
            label.push_back('\'');
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        label.push_back(text_[pos_++]);
      }
    } else {
      while (pos_ < text_.size() && std::string_view("():;,[]' \t\n\r").find(text_[pos_]) == std::string_view::npos) {
        label.push_back(text_[pos_++]);
      }
    }
    return label;
  }

  double parse_length() {
    skip_blanks();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::string_view("0123456789+-.eE").find(text_[pos_]) != std::string_view::npos) {
      ++pos_;
    }
    try {
      std::size_t used = 0;
      const std::string token(text_.substr(start, pos_ - start));
      const double value = std::stod(token, &used);
      if (used != token.size() || value < 0.0) fail("invalid branch length");
      return value;
    } catch (const std::logic_error&) {
      fail("invalid branch length");
    }
  }

  // Returns the index of a node whose child branch length (if any) is
  // consumed by the caller.
  std::size_t parse_node() {
    skip_blanks();
    if (peek() == '(') {
      ++pos_;
      const auto [left, left_len] = parse_child();
      skip_blanks();
      if (peek() != ',') fail("expected ',' (only binary trees are supported)");
      ++pos_;
      const auto [right, right_len] = parse_child();
      skip_blanks();
      if (peek() != ')') fail("expected ')' (only binary trees are supported)");
      ++pos_;
      parse_label();  // internal labels carry no information here
      Node node;
      node.leaf = false;
      node.left = left;
      node.right = right;
      node.height = nodes_[left].height + 2.0 * left_len;
      (void)right_len;
      nodes_.push_back(std::move(node));
      return nodes_.size() - 1;
    }
    Node leaf;
    leaf.label = parse_label();
    if (leaf.label.empty()) fail("empty leaf label");
    nodes_.push_back(std::move(leaf));
    return nodes_.size() - 1;
  }

  std::pair<std::size_t, double> parse_child() {
    const std::size_t node = parse_node();
    skip_blanks();
    double length = 0.0;
    if (peek() == ':') {
      ++pos_;
      length = parse_length();
    }
    return {node, length};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

}  // namespace

std::string dendrogram_to_newick(const Dendrogram& dendrogram) {
  std::string out;
  emit_newick(dendrogram, dendrogram.root(), out);
  out.push_back(';');
  return out;
}

Dendrogram parse_newick(std::string_view text) { return NewickParser(text).parse(); }

std::string dendrogram_svg(const Dendrogram& t, bool author_coloring) {
  constexpr double kRowHeight = 20.0;
  constexpr double kTop = 30.0;
  constexpr double kLeft = 20.0;
  constexpr double kTreeWidth = 520.0;
  constexpr double kLabelWidth = 320.0;

  const auto order = t.leaf_order();
  const std::size_t n = t.leaves().size();
  const double max_height = std::max(t.merges().back().height, 1e-12);
  const double tips_x = kLeft + kTreeWidth;
  const double plot_bottom = kTop + static_cast<double>(n - 1) * kRowHeight;
  const double width = tips_x + kLabelWidth;
  const double height = plot_bottom + 60.0;

  std::map<std::string, std::size_t> author_rank;
  for (const auto& id : t.leaves()) author_rank.emplace(id.author(), 0);
  std::size_t rank = 0;
  for (auto& [author, r] : author_rank) r = rank++;

  std::map<std::string, double> leaf_y;
  for (std::size_t k = 0; k < order.size(); ++k) leaf_y[order[k].raw()] = kTop + static_cast<double>(k) * kRowHeight;

  auto x_of = [&](double h) { return tips_x - h / max_height * kTreeWidth; };
  std::vector<double> node_y(n + t.merges().size());
  for (std::size_t i = 0; i < n; ++i) node_y[i] = leaf_y[t.leaves()[i].raw()];
  for (std::size_t k = 0; k < t.merges().size(); ++k) {
    const auto& m = t.merges()[k];
    node_y[n + k] = (node_y[m.left] + node_y[m.right]) / 2.0;
  }

  auto leaf_color = [&](std::size_t leaf) {
    return author_coloring ? detail::palette_color(author_rank[t.leaves()[leaf].author()]) : std::string("#333333");
  };

  using detail::coord;
  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      coord(width), coord(height), coord(width), coord(height));
  svg += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", coord(width), coord(height));

  svg += "<g class=\"branches\" stroke-width=\"1.5\" fill=\"none\">\n";
  for (std::size_t k = 0; k < t.merges().size(); ++k) {
    const auto& m = t.merges()[k];
    const double x = x_of(m.height);
    svg += fmt::format("<line class=\"junction\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\"/>\n",
                       coord(x), coord(node_y[m.left]), coord(x), coord(node_y[m.right]));
    for (std::size_t child : {m.left, m.right}) {
      const std::string color = t.is_leaf(child) ? leaf_color(child) : std::string("#333333");
      svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\"/>\n", coord(x),
                         coord(node_y[child]), coord(x_of(t.height(child))), coord(node_y[child]), color);
    }
  }
  svg += "</g>\n<g class=\"labels\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    svg += fmt::format("<text class=\"leaf\" x=\"{}\" y=\"{}\" dominant-baseline=\"middle\" fill=\"{}\">{}</text>\n",
                       coord(tips_x + 6.0), coord(node_y[i]), leaf_color(i),
                       detail::xml_escape(t.leaves()[i].raw()));
  }
  svg += "</g>\n";

  const double axis_y = plot_bottom + 25.0;
  svg += fmt::format("<g class=\"axis\" stroke=\"#333333\">\n<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n",
                     coord(x_of(max_height)), coord(axis_y), coord(tips_x), coord(axis_y));
  for (int tick = 0; tick <= 4; ++tick) {
    const double h = max_height * tick / 4.0;
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\"/><text x=\"{0}\" y=\"{3}\" stroke=\"none\" "
        "text-anchor=\"middle\" fill=\"#333333\">{4:.3f}</text>\n",
        coord(x_of(h)), coord(axis_y), coord(axis_y + 5.0), coord(axis_y + 18.0), h);
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

void render_dendrogram_svg(const Dendrogram& dendrogram, const std::filesystem::path& out,
                           bool author_coloring) {
  detail::write_text_file(out, dendrogram_svg(dendrogram, author_coloring));
}

}  // namespace deltametry
