#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "deltametry/delta.hpp"
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

FrequencyTable column_table(const std::vector<double>& column) {
  testing::Rows rows;
  for (double v : column) rows.push_back({v});
  return testing::make_table(rows);
}

}  // namespace

TEST_SUITE("delta") {
  TEST_CASE("two-point sample standard deviation") {
    const auto model = fit_zscores(column_table({2.0, 4.0}));
    CHECK(model.mean[0] == 3.0);
    CHECK(model.sd[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(model.degenerate().empty());

    const auto z = zscore_transform(column_table({2.0, 4.0}), model);
    REQUIRE(z.cols() == 1);
    CHECK(z.row(0)[0] == doctest::Approx(-0.70710678118654752).epsilon(1e-14));
    CHECK(z.row(1)[0] == doctest::Approx(0.70710678118654752).epsilon(1e-14));
  }

  TEST_CASE("constant columns are degenerate and dropped") {
    const auto table = column_table({5.0, 5.0, 5.0});
    const auto model = fit_zscores(table);
    CHECK(model.mean[0] == 5.0);
    CHECK(model.sd[0] == 0.0);
    CHECK(model.degenerate() == std::vector<std::size_t>{0});
    const auto z = zscore_transform(table, model);
    CHECK(z.cols() == 0);
    CHECK(z.dropped_words == std::vector<std::string>{"w0"});

    // Rounding in the mean must not turn a constant column into noise.
    const auto tenth = fit_zscores(column_table({0.1, 0.1, 0.1}));
    CHECK(tenth.sd[0] == 0.0);
  }

  TEST_CASE("fit errors") {
    CHECK(kind_of([] { fit_zscores(column_table({1.0})); }) == ErrorKind::InsufficientData);
    const auto a = column_table({1.0, 2.0});
    auto model = fit_zscores(a);
    model.words[0] = "other";
    CHECK(kind_of([&] { zscore_transform(a, model); }) == ErrorKind::ModelMismatch);
  }

  TEST_CASE("z-model matches a brute-force mean and sd") {
    std::mt19937_64 rng(21);
    const auto rows = testing::random_rows(rng, 5, 10);
    const auto model = fit_zscores(testing::make_table(rows));
    for (std::size_t w = 0; w < 10; ++w) {
      long double sum = 0;
      for (const auto& r : rows) sum += r[w];
      const long double mean = sum / 5;
      long double ss = 0;
      for (const auto& r : rows) ss += (r[w] - mean) * (r[w] - mean);
      CHECK(std::abs(model.mean[w] - static_cast<double>(mean)) <= 1e-12);
      CHECK(std::abs(model.sd[w] - static_cast<double>(std::sqrt(ss / 4))) <= 1e-12);
    }
  }

  TEST_CASE("z columns have mean 0 and sample sd 1") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      const auto table = testing::make_table(testing::random_rows(rng, 3 + rng() % 8, 5 + rng() % 30));
      const auto z = zscore_transform(table, fit_zscores(table));
      for (std::size_t c = 0; c < z.cols(); ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < z.rows; ++r) sum += z.row(r)[c];
        const double mean = sum / static_cast<double>(z.rows);
        double ss = 0.0;
        for (std::size_t r = 0; r < z.rows; ++r) ss += (z.row(r)[c] - mean) * (z.row(r)[c] - mean);
        CHECK(std::abs(mean) <= 1e-9);
        CHECK(std::abs(std::sqrt(ss / static_cast<double>(z.rows - 1)) - 1.0) <= 1e-9);
      }
    }
  }

  TEST_CASE("burrows_delta examples") {
    const std::vector<double> a = {0.3, -1.2, 2.0};
    CHECK(burrows_delta(a, a) == 0.0);
    CHECK(burrows_delta(std::vector<double>{1, -1}, std::vector<double>{-1, 1}) == 2.0);
    CHECK(kind_of([] { burrows_delta(std::vector<double>{1}, std::vector<double>{1, 2}); }) == ErrorKind::Dimension);
    CHECK(kind_of([] { burrows_delta(std::vector<double>{}, std::vector<double>{}); }) == ErrorKind::Dimension);

    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(1 + rng() % 50);
      std::vector<double> y(x.size());
      for (auto& v : x) v = normal(rng);
      for (auto& v : y) v = normal(rng);
      long double l1 = 0;
      for (std::size_t i = 0; i < x.size(); ++i) l1 += std::fabs(static_cast<long double>(x[i]) - y[i]);
      CHECK(std::abs(burrows_delta(x, y) - static_cast<double>(l1 / x.size())) <= 1e-12);
    }
  }

  TEST_CASE("distance matrix matches the oracle") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
      const auto rows = testing::random_rows(rng, 3 + rng() % 8, 5 + rng() % 46);
      const auto expected = oracle::delta_matrix(rows);
      const auto m = distance_matrix(testing::make_table(rows), rows.front().size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows.size(); ++j) CHECK(std::abs(m.at(i, j) - expected[i][j]) <= 1e-10);
      }
    }
  }

  TEST_CASE("duplicated documents are at distance zero") {
    std::mt19937_64 rng(1);
    auto rows = testing::random_rows(rng, 4, 12);
    rows.push_back(rows[1]);
    const auto m = distance_matrix(testing::make_table(rows), 12);
    CHECK(m.at(1, 4) == 0.0);
    CHECK(m.at(4, 1) == 0.0);
    CHECK(m.at(0, 1) > 0.0);
  }

  TEST_CASE("metric properties, affine and permutation invariance") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t docs = 3 + rng() % 8;
      const std::size_t words = 5 + rng() % 30;
      auto rows = testing::random_rows(rng, docs, words);
      const auto m = distance_matrix(testing::make_table(rows), words);
      for (std::size_t i = 0; i < docs; ++i) {
        CHECK(m.at(i, i) == 0.0);
        for (std::size_t j = 0; j < docs; ++j) {
          CHECK(m.at(i, j) == m.at(j, i));
          CHECK(m.at(i, j) >= 0.0);
          for (std::size_t k = 0; k < docs; ++k) CHECK(m.at(i, k) <= m.at(i, j) + m.at(j, k) + 1e-9);
        }
      }

      const std::size_t col = rng() % words;
      const double scale = 0.5 + unit(rng);
      const double shift = 2.0 * unit(rng);
      for (auto& r : rows) r[col] = scale * r[col] + shift;
      const auto shifted = distance_matrix(testing::make_table(rows), words);
      for (std::size_t i = 0; i < m.cells().size(); ++i) CHECK(std::abs(shifted.cells()[i] - m.cells()[i]) <= 1e-9);

      std::vector<std::size_t> perm(docs);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      const auto table = testing::make_table(rows);
      const auto permuted = distance_matrix(table.with_rows(perm), words);
      for (std::size_t i = 0; i < docs; ++i) {
        for (std::size_t j = 0; j < docs; ++j) {
          CHECK(std::abs(permuted.at(i, j) - shifted.at(perm[i], perm[j])) <= 1e-12);
        }
      }
    }
  }

  TEST_CASE("truncating first gives the same matrix") {
    std::mt19937_64 rng(6);
    const auto table = testing::make_table(testing::random_rows(rng, 7, 40));
    for (std::size_t n : {1u, 5u, 17u, 40u, 80u}) {
      const auto a = distance_matrix(table, n);
      const auto b = distance_matrix(select_mfw(table, n), n);
      for (std::size_t i = 0; i < a.cells().size(); ++i) CHECK(std::abs(a.cells()[i] - b.cells()[i]) <= 1e-12);
    }
  }

  TEST_CASE("excluding a document from the fit") {
    std::mt19937_64 rng(12);
    const auto rows = testing::random_rows(rng, 5, 20);
    const auto table = testing::make_table(rows);
    DistanceOptions options{20, {table.doc_ids()[4]}};
    const auto loo = distance_matrix(table, options);
    // Oracle: z-parameters from the first four rows, applied to all five.
    const testing::Rows fit(rows.begin(), rows.begin() + 4);
    std::vector<double> mean(20), sd(20);
    for (std::size_t w = 0; w < 20; ++w) {
      for (const auto& r : fit) mean[w] += r[w] / 4.0;
      double ss = 0;
      for (const auto& r : fit) ss += (r[w] - mean[w]) * (r[w] - mean[w]);
      sd[w] = std::sqrt(ss / 3.0);
    }
    double expected = 0.0;
    for (std::size_t w = 0; w < 20; ++w) expected += std::abs((rows[0][w] - rows[4][w]) / sd[w]) / 20.0;
    CHECK(loo.at(0, 4) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(loo.at(0, 4) != doctest::Approx(distance_matrix(table, 20).at(0, 4)).epsilon(1e-9));
  }

  TEST_CASE("nearest neighbours in the published tables") {
    const auto t1 = testing::table1_excerpt();
    const auto [id1, d1] = nearest_neighbor(t1, DocumentId::parse("Galbraith_TheCuckoosCalling"));
    CHECK(id1.raw() == "Rowling_OrderOfThePhoenix");
    CHECK(d1 == doctest::Approx(0.8256).epsilon(1e-12));

    const auto t2 = testing::table2_excerpt();
    const auto [id2, d2] = nearest_neighbor(t2, DocumentId::parse("Galbraith_TheCuckoosCalling"));
    CHECK(id2.raw() == "Rowling_HalfBloodPrince");
    CHECK(d2 == doctest::Approx(1.0009).epsilon(1e-12));

    CHECK(kind_of([&] { nearest_neighbor(t1, DocumentId::parse("Nobody_Here")); }) == ErrorKind::Lookup);
  }

  TEST_CASE("nearest neighbour basics") {
    const auto two = testing::make_matrix({"A_x", "B_y"}, {{0, 3}, {3, 0}});
    CHECK(nearest_neighbor(two, DocumentId::parse("A_x")).first.raw() == "B_y");
    const auto tie = testing::make_matrix({"A_x", "C_z", "B_y"}, {{0, 1, 1}, {1, 0, 2}, {1, 2, 0}});
    CHECK(nearest_neighbor(tie, DocumentId::parse("A_x")).first.raw() == "B_y");
  }

  TEST_CASE("matrix validation") {
    CHECK(kind_of([] { testing::make_matrix({"A_x", "B_y"}, {{0, 1}, {2, 0}}).validate(); }) == ErrorKind::InvalidInput);
    CHECK(kind_of([] { testing::make_matrix({"A_x", "B_y"}, {{1, 1}, {1, 0}}).validate(); }) == ErrorKind::InvalidInput);
    CHECK(kind_of([] { testing::make_matrix({"A_x", "A_x"}, {{0, 1}, {1, 0}}); }) == ErrorKind::InvalidInput);
    CHECK_NOTHROW(testing::make_matrix({"A_x", "B_y"}, {{0, 1}, {1 + 1e-12, 0}}).validate());
  }
}
