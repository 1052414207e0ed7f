#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bitopt/compressed_row.hpp"

namespace bitopt {

/// Fixed-width mask over one BitMat dimension. Coordinates are 1-based.
class BitArray {
 public:
  BitArray() = default;
  explicit BitArray(std::uint32_t width, bool value = false);

  std::uint32_t width() const noexcept { return width_; }
  bool test(std::uint32_t pos) const;
  void set(std::uint32_t pos, bool value = true);
  std::uint32_t count() const;
  bool any() const { return count() != 0; }
  std::vector<std::uint32_t> positions() const;

  BitArray& operator&=(const BitArray& other);
  BitArray& operator|=(const BitArray& other);

  friend bool operator==(const BitArray&, const BitArray&) = default;

 private:
  std::uint32_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class BitMatKind : std::uint32_t {
  SO = 0,  // rows subjects, columns objects, one per predicate
  OS = 1,  // transpose of SO
  PS = 2,  // rows predicates, columns subjects, one per object
  PO = 3,  // rows predicates, columns objects, one per subject
  Derived = 4,  // query-local matrices (node space, BMM products, ...)
};

const char* to_string(BitMatKind kind);

enum class Dim { Row, Column };

/// A 2D bit matrix stored as one hybrid-compressed row per row coordinate.
class BitMat {
 public:
  BitMat() = default;
  BitMat(BitMatKind kind, std::uint32_t slice, std::uint32_t rows, std::uint32_t cols);

  /// Builds a matrix from (row, col) pairs; duplicates are ignored.
  static BitMat from_pairs(BitMatKind kind, std::uint32_t slice, std::uint32_t rows, std::uint32_t cols,
                           std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs);

  BitMatKind kind() const noexcept { return kind_; }
  std::uint32_t slice() const noexcept { return slice_; }
  std::uint32_t rows() const noexcept { return rows_; }
  std::uint32_t cols() const noexcept { return cols_; }
  std::uint32_t extent(Dim d) const noexcept { return d == Dim::Row ? rows_ : cols_; }

  void set_kind(BitMatKind kind, std::uint32_t slice) {
    kind_ = kind;
    slice_ = slice;
  }

  const CompressedRow& row(std::uint32_t r) const { return data_.at(r - 1); }
  void set_row(std::uint32_t r, const std::vector<std::uint32_t>& positions);
  void set_row(std::uint32_t r, CompressedRow row);
  bool test(std::uint32_t r, std::uint32_t c) const;

  std::uint64_t triple_count() const noexcept { return triple_count_; }
  const CompressedRow& nonempty_rows() const noexcept { return row_mask_; }
  const CompressedRow& nonempty_cols() const noexcept { return col_mask_; }
  /// Recomputes the triple count and non-empty row/column masks from the rows.
  void refresh_meta();

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs() const;

  /// Projection onto `retain`: bit i is set iff coordinate i has at least one set bit.
  BitArray fold(Dim retain) const;
  /// Clears every bit whose `retain` coordinate is 0 in `mask`.
  void unfold(const BitArray& mask, Dim retain);

  BitMat transpose() const;

  friend bool operator==(const BitMat& a, const BitMat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  BitMatKind kind_ = BitMatKind::Derived;
  std::uint32_t slice_ = 0;
  std::uint32_t rows_ = 0;
  std::uint32_t cols_ = 0;
  std::vector<CompressedRow> data_;
  std::uint64_t triple_count_ = 0;
  CompressedRow row_mask_;
  CompressedRow col_mask_;
};

/// Boolean matrix product: (i,k) set iff some j has left(i,j) and right(j,k).
/// left.cols() must equal right.rows().
BitMat bmm(const BitMat& left, const BitMat& right);

}  // namespace bitopt
