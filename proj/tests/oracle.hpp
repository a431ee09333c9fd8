#pragma once

// Brute-force reference computations used to check the library. They work
// on plain nested vectors and share no code with src/.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

/// Delta matrix for rows = documents, columns = words: explicit mean, sample
/// sd, z-scores and mean absolute difference, in long double. Constant
/// columns are skipped.
inline Matrix delta_matrix(const Matrix& freq) {
  const std::size_t docs = freq.size();
  const std::size_t words = freq.front().size();
  std::vector<std::size_t> kept;
  std::vector<long double> means;
  std::vector<long double> sds;
  for (std::size_t w = 0; w < words; ++w) {
    bool constant = true;
    for (std::size_t d = 1; d < docs; ++d) constant = constant && freq[d][w] == freq[0][w];
    if (constant) continue;
    long double sum = 0;
    for (std::size_t d = 0; d < docs; ++d) sum += freq[d][w];
    const long double mean = sum / docs;
    long double ss = 0;
    for (std::size_t d = 0; d < docs; ++d) ss += (freq[d][w] - mean) * (freq[d][w] - mean);
    kept.push_back(w);
    means.push_back(mean);
    sds.push_back(std::sqrt(ss / (docs - 1)));
  }
  Matrix out(docs, std::vector<double>(docs, 0.0));
  for (std::size_t a = 0; a < docs; ++a) {
    for (std::size_t b = 0; b < docs; ++b) {
      long double total = 0;
      for (std::size_t k = 0; k < kept.size(); ++k) {
        const long double za = (freq[a][kept[k]] - means[k]) / sds[k];
        const long double zb = (freq[b][kept[k]] - means[k]) / sds[k];
        total += std::fabs(za - zb);
      }
      out[a][b] = static_cast<double>(total / kept.size());
    }
  }
  return out;
}

enum class Link { Single, Complete, Average };

/// Merge heights of agglomerative clustering where the cluster distance is
/// recomputed from its definition over all leaf pairs at every step.
inline std::vector<double> merge_heights(const Matrix& d, Link link) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < d.size(); ++i) clusters.push_back({i});
  auto linkage = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    long double acc = link == Link::Single ? std::numeric_limits<long double>::infinity() : 0.0L;
    for (auto i : a) {
      for (auto j : b) {
        if (link == Link::Single) acc = std::min<long double>(acc, d[i][j]);
        if (link == Link::Complete) acc = std::max<long double>(acc, d[i][j]);
        if (link == Link::Average) acc += d[i][j];
      }
    }
    if (link == Link::Average) acc /= static_cast<long double>(a.size() * b.size());
    return static_cast<double>(acc);
  };
  std::vector<double> heights;
  while (clusters.size() > 1) {
    std::size_t bi = 0, bj = 1;
    double best = linkage(clusters[0], clusters[1]);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double v = linkage(clusters[i], clusters[j]);
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    heights.push_back(best);
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return heights;
}

}  // namespace oracle
