#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deltametry/corpus.hpp"
#include "deltametry/delta.hpp"

namespace deltametry {

/// Binary merge tree. Node ids below leaves().size() are leaves; node
/// leaves().size() + k is the cluster created by merges()[k].
class Dendrogram {
 public:
  struct Merge {
    std::size_t left;
    std::size_t right;
    double height;
  };

  /// Checks that there are exactly |leaves| - 1 merges, every node is used
  /// once as a child of a later merge, and heights never decrease.
  Dendrogram(std::vector<DocumentId> leaves, std::vector<Merge> merges);

  const std::vector<DocumentId>& leaves() const noexcept { return leaves_; }
  const std::vector<Merge>& merges() const noexcept { return merges_; }

  std::size_t root() const noexcept { return leaves_.size() + merges_.size() - 1; }
  bool is_leaf(std::size_t node) const noexcept { return node < leaves_.size(); }
  double height(std::size_t node) const;
  const Merge& merge_at(std::size_t node) const { return merges_.at(node - leaves_.size()); }

  /// Leaves below `node`, in drawing order.
  std::vector<DocumentId> members(std::size_t node) const;
  /// All leaves in drawing order (left subtree first).
  std::vector<DocumentId> leaf_order() const { return members(root()); }

  /// Every internal node as (sorted member ids, height), sorted. Two
  /// dendrograms with equal clusters() have the same topology and heights.
  std::vector<std::pair<std::vector<std::string>, double>> clusters() const;

 private:
  std::vector<DocumentId> leaves_;
  std::vector<Merge> merges_;
};

enum class Linkage { Ward, Average, Complete, Single };

std::string_view to_string(Linkage linkage);
Linkage parse_linkage(std::string_view name);  // throws Error(Usage)

/// Agglomerative clustering with Lance-Williams updates. Ward uses the
/// update on the given (unsquared) distances. Among equally close cluster
/// pairs the one whose (smaller, larger) representative ids sort first is
/// merged; a cluster's representative is its smallest leaf id.
/// Throws Error(InvalidInput) for incomplete or asymmetric matrices.
Dendrogram hierarchical_cluster(const DistanceMatrix& m, Linkage linkage = Linkage::Ward);

/// Newick text. A child's branch length is half the height difference to
/// its parent, so each merge height is twice the root-to-tip depth below it.
std::string dendrogram_to_newick(const Dendrogram& dendrogram);

/// Parses binary Newick text written by dendrogram_to_newick (or any tool
/// using the same branch-length convention). Throws Error(Parse).
Dendrogram parse_newick(std::string_view text);

/// Horizontal dendrogram as standalone SVG. With author_coloring, leaves of
/// the same author share a color.
void render_dendrogram_svg(const Dendrogram& dendrogram, const std::filesystem::path& out,
                           bool author_coloring = true);
std::string dendrogram_svg(const Dendrogram& dendrogram, bool author_coloring = true);

}  // namespace deltametry
