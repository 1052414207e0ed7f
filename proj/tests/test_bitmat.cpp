#include <doctest.h>

#include <random>

#include "bitopt/bitmat.hpp"
#include "bitopt/compressed_row.hpp"
#include "bitopt/error.hpp"

using namespace bitopt;

namespace {

using Dense = std::vector<std::vector<bool>>;

Dense random_dense(std::mt19937& rng, std::uint32_t rows, std::uint32_t cols, double density) {
  std::bernoulli_distribution bit(density);
  Dense d(rows, std::vector<bool>(cols));
  for (auto& r : d)
    for (std::size_t c = 0; c < cols; ++c) r[c] = bit(rng);
  return d;
}

BitMat to_bitmat(const Dense& d, std::uint32_t cols) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t r = 0; r < d.size(); ++r)
    for (std::uint32_t c = 0; c < cols; ++c)
      if (d[r][c]) pairs.emplace_back(r + 1, c + 1);
  return BitMat::from_pairs(BitMatKind::Derived, 0, static_cast<std::uint32_t>(d.size()), cols, pairs);
}

Dense to_dense(const BitMat& bm) {
  Dense d(bm.rows(), std::vector<bool>(bm.cols()));
  for (auto [r, c] : bm.pairs()) d[r - 1][c - 1] = true;
  return d;
}

}  // namespace

TEST_SUITE("compressed_row") {
  TEST_CASE("worked examples pick run-length and positions") {
    auto rle = CompressedRow::encode_string("1110011110");
    CHECK(rle.encoding() == RowEncoding::RunLength);
    CHECK(rle.to_string() == "[1] 3 2 4 1");
    auto pos = CompressedRow::encode_string("0010010000");
    CHECK(pos.encoding() == RowEncoding::Positions);
    CHECK(pos.to_string() == "3 6");
  }

  TEST_CASE("encoding choice follows the integer count") {
    std::vector<std::uint32_t> one{5};
    CHECK(run_count(one, 10) == 3);
    CHECK(CompressedRow::encode(one, 10).encoding() == RowEncoding::Positions);
    std::vector<std::uint32_t> all{1, 2, 3, 4};
    CHECK(run_count(all, 4) == 1);
    CHECK(CompressedRow::encode(all, 4).encoding() == RowEncoding::RunLength);
  }

  TEST_CASE("empty and full rows") {
    auto empty = CompressedRow::encode_string("0000");
    CHECK(empty.popcount() == 0);
    CHECK(empty.positions().empty());
    auto full = CompressedRow::encode_string("1111");
    CHECK(full.popcount() == 4);
    CHECK(full.test(4));
    CHECK_FALSE(full.test(5));
  }

  TEST_CASE("round trip over random widths") {
    std::mt19937 rng(7);
    for (int i = 0; i < 2000; ++i) {
      std::uint32_t width = std::uniform_int_distribution<std::uint32_t>(1, 1024)(rng);
      double density = std::uniform_real_distribution<double>(0, 1)(rng);
      std::bernoulli_distribution bit(density);
      std::vector<bool> bits(width);
      for (std::uint32_t b = 0; b < width; ++b) bits[b] = bit(rng);
      auto row = CompressedRow::encode_bits(bits);
      REQUIRE(row.bits() == bits);
      auto again = CompressedRow::from_parts(row.encoding(), row.first_bit(), row.width(), row.payload());
      REQUIRE(again == row);
    }
  }

  TEST_CASE("from_parts rejects inconsistent payloads") {
    CHECK_THROWS_AS(CompressedRow::from_parts(RowEncoding::RunLength, true, 5, {2, 2}), Error);
    CHECK_THROWS_AS(CompressedRow::from_parts(RowEncoding::Positions, false, 5, {3, 2}), Error);
    CHECK_THROWS_AS(CompressedRow::from_parts(RowEncoding::Positions, false, 5, {6}), Error);
  }
}

TEST_SUITE("bitmat") {
  TEST_CASE("fold, unfold and metadata on a small matrix") {
    auto bm = BitMat::from_pairs(BitMatKind::Derived, 0, 3, 4, {{1, 2}, {1, 4}, {3, 2}});
    CHECK(bm.triple_count() == 3);
    CHECK(bm.fold(Dim::Row).positions() == std::vector<std::uint32_t>{1, 3});
    CHECK(bm.fold(Dim::Column).positions() == std::vector<std::uint32_t>{2, 4});
    BitArray mask(4);
    mask.set(4);
    bm.unfold(mask, Dim::Column);
    CHECK(bm.pairs() == std::vector<std::pair<std::uint32_t, std::uint32_t>>{{1, 4}});
    CHECK(bm.triple_count() == 1);
    CHECK(bm.nonempty_rows().positions() == std::vector<std::uint32_t>{1});
  }

  TEST_CASE("transpose is an involution") {
    std::mt19937 rng(3);
    for (int i = 0; i < 50; ++i) {
      auto d = random_dense(rng, 1 + rng() % 20, 1 + rng() % 20, 0.3);
      auto bm = to_bitmat(d, static_cast<std::uint32_t>(d[0].size()));
      CHECK(bm.transpose().transpose() == bm);
      CHECK(bm.transpose().triple_count() == bm.triple_count());
    }
  }

  TEST_CASE("bmm with identity and dimension mismatch") {
    std::mt19937 rng(5);
    auto d = random_dense(rng, 6, 6, 0.4);
    auto x = to_bitmat(d, 6);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> diag;
    for (std::uint32_t i = 1; i <= 6; ++i) diag.emplace_back(i, i);
    auto id = BitMat::from_pairs(BitMatKind::Derived, 0, 6, 6, diag);
    CHECK(bmm(x, id) == x);
    CHECK(bmm(id, x) == x);
    auto wide = BitMat(BitMatKind::Derived, 0, 5, 5);
    CHECK_THROWS_AS(bmm(x, wide), Error);
  }

  TEST_CASE("bmm is associative") {
    std::mt19937 rng(11);
    for (int i = 0; i < 30; ++i) {
      auto a = to_bitmat(random_dense(rng, 7, 5, 0.3), 5);
      auto b = to_bitmat(random_dense(rng, 5, 6, 0.3), 6);
      auto c = to_bitmat(random_dense(rng, 6, 4, 0.3), 4);
      CHECK(bmm(bmm(a, b), c) == bmm(a, bmm(b, c)));
    }
  }

  TEST_CASE("dense oracles for fold, unfold and bmm") {
    std::mt19937 rng(17);
    for (int i = 0; i < 200; ++i) {
      std::uint32_t n = 1 + rng() % 64, m = 1 + rng() % 64, k = 1 + rng() % 64;
      double density = std::uniform_real_distribution<double>(0.01, 0.5)(rng);
      auto da = random_dense(rng, n, m, density);
      auto db = random_dense(rng, m, k, density);
      auto a = to_bitmat(da, m);
      auto b = to_bitmat(db, k);

      std::vector<bool> rows(n), cols(m);
      for (std::uint32_t r = 0; r < n; ++r)
        for (std::uint32_t c = 0; c < m; ++c)
          if (da[r][c]) rows[r] = cols[c] = true;
      for (std::uint32_t r = 0; r < n; ++r) REQUIRE(a.fold(Dim::Row).test(r + 1) == rows[r]);
      for (std::uint32_t c = 0; c < m; ++c) REQUIRE(a.fold(Dim::Column).test(c + 1) == cols[c]);

      Dense prod(n, std::vector<bool>(k));
      for (std::uint32_t r = 0; r < n; ++r)
        for (std::uint32_t j = 0; j < m; ++j)
          if (da[r][j])
            for (std::uint32_t c = 0; c < k; ++c) prod[r][c] = prod[r][c] || db[j][c];
      REQUIRE(to_dense(bmm(a, b)) == prod);

      BitArray mask(m);
      for (std::uint32_t c = 1; c <= m; ++c)
        if (rng() % 2) mask.set(c);
      auto masked = a;
      masked.unfold(mask, Dim::Column);
      auto expect = da;
      for (auto& row : expect)
        for (std::uint32_t c = 0; c < m; ++c) row[c] = row[c] && mask.test(c + 1);
      REQUIRE(to_dense(masked) == expect);
      for (auto c : masked.fold(Dim::Column).positions()) REQUIRE(mask.test(c));
      std::uint64_t count = 0;
      for (const auto& row : expect) count += std::count(row.begin(), row.end(), true);
      REQUIRE(masked.triple_count() == count);
    }
  }
}
