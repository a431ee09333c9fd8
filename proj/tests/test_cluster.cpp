#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "deltametry/cluster.hpp"
#include "deltametry/error.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace deltametry;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Usage;
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::string(1, static_cast<char>('A' + i % 3)) + "_d" + std::to_string(i));
  return out;
}

// Random Euclidean point cloud distances (a proper metric).
testing::Rows random_metric(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 10.0);
  std::vector<std::array<double, 3>> points(n);
  for (auto& p : points) p = {unit(rng), unit(rng), unit(rng)};
  testing::Rows d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < 3; ++k) s += (points[i][k] - points[j][k]) * (points[i][k] - points[j][k]);
      d[i][j] = std::sqrt(s);
    }
  }
  return d;
}

std::vector<double> heights(const Dendrogram& t) {
  std::vector<double> out;
  for (const auto& m : t.merges()) out.push_back(m.height);
  return out;
}

}  // namespace

TEST_SUITE("cluster") {
  TEST_CASE("closest pair merges first") {
    const auto m = testing::make_matrix({"A_a", "B_b", "C_c"}, {{0, 1, 10}, {1, 0, 10}, {10, 10, 0}});
    for (auto linkage : {Linkage::Ward, Linkage::Average, Linkage::Complete, Linkage::Single}) {
      const auto t = hierarchical_cluster(m, linkage);
      REQUIRE(t.merges().size() == 2);
      CHECK(t.merges()[0].left == 0);
      CHECK(t.merges()[0].right == 1);
      CHECK(t.merges()[0].height == 1.0);
    }
    // Ward on unsquared input: ((1+1)*10 + (1+1)*10 - 1*1) / 3.
    CHECK(hierarchical_cluster(m, Linkage::Ward).merges()[1].height == doctest::Approx(39.0 / 3.0));
    CHECK(hierarchical_cluster(m, Linkage::Average).merges()[1].height == 10.0);
  }

  TEST_CASE("ties merge the lexicographically smallest pair") {
    const auto m = testing::make_matrix({"D_d", "B_b", "C_c", "A_a"},
                                        {{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}});
    const auto t = hierarchical_cluster(m, Linkage::Single);
    const auto first = t.members(t.leaves().size());
    CHECK(first[0].raw() == "A_a");
    CHECK(first[1].raw() == "B_b");
  }

  TEST_CASE("Lance-Williams heights match a definition-based oracle") {
    std::mt19937_64 rng(17);
    const std::pair<Linkage, oracle::Link> pairs[] = {{Linkage::Average, oracle::Link::Average},
                                                      {Linkage::Complete, oracle::Link::Complete},
                                                      {Linkage::Single, oracle::Link::Single}};
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 6 + (trial % 3);
      const auto d = random_metric(rng, n);
      const auto m = testing::make_matrix(ids(n), d);
      for (const auto& [linkage, link] : pairs) {
        const auto got = heights(hierarchical_cluster(m, linkage));
        const auto expected = oracle::merge_heights(d, link);
        REQUIRE(got.size() == expected.size());
        for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - expected[k]) <= 1e-9);
      }
    }
  }

  TEST_CASE("dendrogram invariants on random matrices") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 2 + rng() % 12;
      const auto d = random_metric(rng, n);
      const auto names = ids(n);
      const auto m = testing::make_matrix(names, d);
      double global_min = INFINITY;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) global_min = std::min(global_min, d[i][j]);
      }
      for (auto linkage : {Linkage::Ward, Linkage::Average, Linkage::Complete, Linkage::Single}) {
        const auto t = hierarchical_cluster(m, linkage);
        CHECK(t.merges().size() == n - 1);
        auto order = t.leaf_order();
        std::vector<std::string> leaves;
        for (const auto& id : order) leaves.push_back(id.raw());
        std::sort(leaves.begin(), leaves.end());
        auto sorted = names;
        std::sort(sorted.begin(), sorted.end());
        CHECK(leaves == sorted);
        for (std::size_t k = 1; k < t.merges().size(); ++k) CHECK(t.merges()[k].height >= t.merges()[k - 1].height);
        CHECK(t.merges()[0].height == global_min);

        // Reordering the input yields the same clusters at the same heights.
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::string> pnames;
        testing::Rows pd(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
          pnames.push_back(names[perm[i]]);
          for (std::size_t j = 0; j < n; ++j) pd[i][j] = d[perm[i]][perm[j]];
        }
        const auto a = t.clusters();
        const auto b = hierarchical_cluster(testing::make_matrix(pnames, pd), linkage).clusters();
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
          CHECK(a[k].first == b[k].first);
          CHECK(std::abs(a[k].second - b[k].second) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("invalid matrices are rejected") {
    const auto asym = testing::make_matrix({"A_a", "B_b"}, {{0, 1}, {1.1, 0}});
    CHECK(kind_of([&] { hierarchical_cluster(asym); }) == ErrorKind::InvalidInput);
    CHECK(kind_of([] { hierarchical_cluster(testing::table1_excerpt()); }) == ErrorKind::InvalidInput);
    const auto one = testing::make_matrix({"A_a"}, {{0}});
    CHECK(kind_of([&] { hierarchical_cluster(one); }) == ErrorKind::InsufficientData);
    CHECK(parse_linkage("average") == Linkage::Average);
    CHECK(kind_of([] { parse_linkage("centroid"); }) == ErrorKind::Usage);
  }

  TEST_CASE("dendrogram constructor checks structure") {
    const std::vector<DocumentId> leaves = {DocumentId::parse("A_a"), DocumentId::parse("B_b"), DocumentId::parse("C_c")};
    CHECK_NOTHROW(Dendrogram(leaves, {{0, 1, 1.0}, {3, 2, 2.0}}));
    CHECK(kind_of([&] { Dendrogram(leaves, {{0, 1, 1.0}}); }) == ErrorKind::InvalidInput);
    CHECK(kind_of([&] { Dendrogram(leaves, {{0, 1, 1.0}, {0, 2, 2.0}}); }) == ErrorKind::InvalidInput);
    CHECK(kind_of([&] { Dendrogram(leaves, {{0, 1, 2.0}, {3, 2, 1.0}}); }) == ErrorKind::InvalidInput);
  }
}

TEST_SUITE("newick") {
  TEST_CASE("single merge splits the height evenly") {
    const Dendrogram t({DocumentId::parse("A_1"), DocumentId::parse("B_1")}, {{0, 1, 1.0}});
    CHECK(dendrogram_to_newick(t) == "(A_1:0.5,B_1:0.5);");
  }

  TEST_CASE("three leaves nest two merges") {
    const Dendrogram t({DocumentId::parse("A_1"), DocumentId::parse("B_1"), DocumentId::parse("C_1")},
                       {{0, 1, 1.0}, {3, 2, 3.0}});
    CHECK(dendrogram_to_newick(t) == "((A_1:0.5,B_1:0.5):1,C_1:1.5);");
  }

  TEST_CASE("labels needing quotes survive") {
    const Dendrogram t({DocumentId::parse("A_it's (one)"), DocumentId::parse("B_x,y")}, {{0, 1, 0.25}});
    const auto text = dendrogram_to_newick(t);
    CHECK(text == "('A_it''s (one)':0.125,'B_x,y':0.125);");
    const auto back = parse_newick(text);
    CHECK(back.leaves()[0].raw() == "A_it's (one)");
    CHECK(back.leaves()[1].raw() == "B_x,y");
  }

  TEST_CASE("emit and parse round trip") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 2 + rng() % 15;
      testing::Rows d(n, std::vector<double>(n, 0.0));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = unit(rng);
      }
      const auto t = hierarchical_cluster(testing::make_matrix(ids(n), d), Linkage::Average);
      const auto back = parse_newick(dendrogram_to_newick(t));
      const auto a = t.clusters();
      const auto b = back.clusters();
      REQUIRE(a.size() == b.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].first == b[k].first);
        CHECK(std::abs(a[k].second - b[k].second) <= 1e-9);
      }
    }
  }

  TEST_CASE("parser errors") {
    CHECK(kind_of([] { parse_newick("(A_1:0.5,B_1:0.5)"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_newick("(A_1,B_1,C_1);"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_newick("A_1;"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_newick("(A_1:x,B_1:1);"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { parse_newick("(A_1:1,NoUnderscore:1);"); }) == ErrorKind::MalformedId);
    CHECK_NOTHROW(parse_newick(" ( A_1 : 0.5 , B_1 : 0.5 ) root : 0 ;\n"));
  }
}

TEST_SUITE("dendrogram-svg") {
  TEST_CASE("two leaves, one junction") {
    const Dendrogram t({DocumentId::parse("A_1"), DocumentId::parse("B_1")}, {{0, 1, 1.0}});
    const auto svg = dendrogram_svg(t);
    CHECK(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    CHECK(testing::count_occurrences(svg, "class=\"leaf\"") == 2);
    CHECK(testing::count_occurrences(svg, "class=\"junction\"") == 1);
    CHECK(svg.find(">A_1</text>") != std::string::npos);
  }

  TEST_CASE("author coloring") {
    const auto m = testing::make_matrix({"A_1", "A_2", "B_1"}, {{0, 1, 4}, {1, 0, 4}, {4, 4, 0}});
    const auto t = hierarchical_cluster(m);
    const auto colored = dendrogram_svg(t, true);
    auto fill_of = [&](const std::string& svg, const std::string& label) {
      const auto end = svg.find(">" + label + "</text>");
      const auto start = svg.rfind("fill=\"", end);
      return svg.substr(start + 6, 7);
    };
    CHECK(fill_of(colored, "A_1") == fill_of(colored, "A_2"));
    CHECK(fill_of(colored, "A_1") != fill_of(colored, "B_1"));
    const auto plain = dendrogram_svg(t, false);
    CHECK(fill_of(plain, "A_1") == fill_of(plain, "B_1"));
  }

  TEST_CASE("identical input gives identical bytes") {
    std::mt19937_64 rng(3);
    const auto d = random_metric(rng, 9);
    const auto t = hierarchical_cluster(testing::make_matrix(ids(9), d));
    testing::TempDir dir;
    render_dendrogram_svg(t, dir / "a.svg");
    render_dendrogram_svg(hierarchical_cluster(testing::make_matrix(ids(9), d)), dir / "b.svg");
    auto slurp = [](const std::filesystem::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    };
    CHECK(slurp(dir / "a.svg") == slurp(dir / "b.svg"));
    CHECK(kind_of([&] { render_dendrogram_svg(t, dir / "missing" / "x.svg"); }) == ErrorKind::Io);
  }
}
