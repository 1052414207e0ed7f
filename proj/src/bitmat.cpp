#include "bitopt/bitmat.hpp"

#include <algorithm>
#include <bit>

#include "bitopt/error.hpp"

namespace bitopt {

BitArray::BitArray(std::uint32_t width, bool value) : width_(width), words_((width + 64) / 64, 0) {
  if (value)
    for (std::uint32_t i = 1; i <= width; ++i) set(i);
}

bool BitArray::test(std::uint32_t pos) const {
  if (pos == 0 || pos > width_) return false;
  return (words_[pos / 64] >> (pos % 64)) & 1u;
}

void BitArray::set(std::uint32_t pos, bool value) {
  if (pos == 0 || pos > width_) fail(ErrorKind::Contract, "bit position out of range");
  auto bit = std::uint64_t{1} << (pos % 64);
  if (value) words_[pos / 64] |= bit;
  else words_[pos / 64] &= ~bit;
}

std::uint32_t BitArray::count() const {
  std::uint32_t total = 0;
  for (auto w : words_) total += static_cast<std::uint32_t>(std::popcount(w));
  return total;
}

std::vector<std::uint32_t> BitArray::positions() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 1; i <= width_; ++i)
    if (test(i)) out.push_back(i);
  return out;
}

BitArray& BitArray::operator&=(const BitArray& other) {
  if (other.width_ != width_) fail(ErrorKind::Contract, "bit array width mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

BitArray& BitArray::operator|=(const BitArray& other) {
  if (other.width_ != width_) fail(ErrorKind::Contract, "bit array width mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

const char* to_string(BitMatKind kind) {
  switch (kind) {
    case BitMatKind::SO: return "S-O";
    case BitMatKind::OS: return "O-S";
    case BitMatKind::PS: return "P-S";
    case BitMatKind::PO: return "P-O";
    case BitMatKind::Derived: return "derived";
  }
  return "?";
}

BitMat::BitMat(BitMatKind kind, std::uint32_t slice, std::uint32_t rows, std::uint32_t cols)
    : kind_(kind), slice_(slice), rows_(rows), cols_(cols) {
  data_.assign(rows, CompressedRow::encode({}, cols));
  refresh_meta();
}

BitMat BitMat::from_pairs(BitMatKind kind, std::uint32_t slice, std::uint32_t rows, std::uint32_t cols,
                          std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  BitMat bm;
  bm.kind_ = kind;
  bm.slice_ = slice;
  bm.rows_ = rows;
  bm.cols_ = cols;
  bm.data_.reserve(rows);
  std::size_t i = 0;
  std::vector<std::uint32_t> positions;
  for (std::uint32_t r = 1; r <= rows; ++r) {
    positions.clear();
    while (i < pairs.size() && pairs[i].first == r) positions.push_back(pairs[i++].second);
    bm.data_.push_back(CompressedRow::encode(positions, cols));
  }
  if (i != pairs.size()) fail(ErrorKind::Contract, "pair row coordinate out of range");
  bm.refresh_meta();
  return bm;
}

void BitMat::set_row(std::uint32_t r, const std::vector<std::uint32_t>& positions) {
  set_row(r, CompressedRow::encode(positions, cols_));
}

void BitMat::set_row(std::uint32_t r, CompressedRow row) {
  if (r == 0 || r > rows_) fail(ErrorKind::Contract, "row index out of range");
  if (row.width() != cols_) fail(ErrorKind::Contract, "row width does not match column extent");
  data_[r - 1] = std::move(row);
  refresh_meta();
}

bool BitMat::test(std::uint32_t r, std::uint32_t c) const {
  if (r == 0 || r > rows_) return false;
  return data_[r - 1].test(c);
}

void BitMat::refresh_meta() {
  triple_count_ = 0;
  std::vector<std::uint32_t> nonempty;
  BitArray cols(cols_);
  for (std::uint32_t r = 1; r <= rows_; ++r) {
    const auto& row = data_[r - 1];
    auto n = row.popcount();
    if (n == 0) continue;
    triple_count_ += n;
    nonempty.push_back(r);
    for (auto c : row.positions()) cols.set(c);
  }
  row_mask_ = CompressedRow::encode(nonempty, rows_);
  col_mask_ = CompressedRow::encode(cols.positions(), cols_);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> BitMat::pairs() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (auto r : row_mask_.positions())
    for (auto c : data_[r - 1].positions()) out.emplace_back(r, c);
  return out;
}

BitArray BitMat::fold(Dim retain) const {
  BitArray out(extent(retain));
  if (retain == Dim::Row) {
    for (std::uint32_t r = 1; r <= rows_; ++r)
      if (!data_[r - 1].empty()) out.set(r);
  } else {
    for (std::uint32_t r = 1; r <= rows_; ++r)
      for (auto c : data_[r - 1].positions()) out.set(c);
  }
  return out;
}

void BitMat::unfold(const BitArray& mask, Dim retain) {
  if (mask.width() != extent(retain))
    fail(ErrorKind::Contract, "unfold mask width " + std::to_string(mask.width()) + " does not match dimension extent " +
                                  std::to_string(extent(retain)));
  if (retain == Dim::Row) {
    for (std::uint32_t r = 1; r <= rows_; ++r)
      if (!mask.test(r) && !data_[r - 1].empty()) data_[r - 1] = CompressedRow::encode({}, cols_);
  } else {
    std::vector<std::uint32_t> kept;
    for (std::uint32_t r = 1; r <= rows_; ++r) {
      auto& row = data_[r - 1];
      if (row.empty()) continue;
      auto positions = row.positions();
      kept.clear();
      for (auto c : positions)
        if (mask.test(c)) kept.push_back(c);
      if (kept.size() != positions.size()) row = CompressedRow::encode(kept, cols_);
    }
  }
  refresh_meta();
}

BitMat BitMat::transpose() const {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> flipped;
  for (auto [r, c] : pairs()) flipped.emplace_back(c, r);
  BitMatKind kind = kind_ == BitMatKind::SO ? BitMatKind::OS : kind_ == BitMatKind::OS ? BitMatKind::SO : BitMatKind::Derived;
  return from_pairs(kind, slice_, cols_, rows_, std::move(flipped));
}

BitMat bmm(const BitMat& left, const BitMat& right) {
  if (left.cols() != right.rows())
    fail(ErrorKind::Contract, "bmm dimension mismatch: " + std::to_string(left.cols()) + " vs " + std::to_string(right.rows()));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (auto i : left.nonempty_rows().positions()) {
    BitArray acc(right.cols());
    for (auto j : left.row(i).positions())
      for (auto k : right.row(j).positions()) acc.set(k);
    for (auto k : acc.positions()) out.emplace_back(i, k);
  }
  return BitMat::from_pairs(BitMatKind::Derived, 0, left.rows(), right.cols(), std::move(out));
}

}  // namespace bitopt
