#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bitopt {

enum class RowEncoding : std::uint8_t { RunLength = 0, Positions = 1 };

/// One bit-row in hybrid compressed form.
///
/// Run-length rows store alternating run lengths starting with `first_bit`.
/// Position rows store the strictly increasing 1-based positions of set bits.
/// `encode` picks positions iff the popcount is smaller than the number of runs.
class CompressedRow {
 public:
  CompressedRow() = default;

  static CompressedRow encode(std::span<const std::uint32_t> positions, std::uint32_t width);
  static CompressedRow encode_bits(const std::vector<bool>& bits);
  /// Parses a row written as a '0'/'1' string, e.g. "1110011110".
  static CompressedRow encode_string(std::string_view bits);

  /// Builds a row from an explicit payload, validating it. Used by the on-disk reader.
  static CompressedRow from_parts(RowEncoding enc, bool first_bit, std::uint32_t width,
                                  std::vector<std::uint32_t> payload);

  RowEncoding encoding() const noexcept { return encoding_; }
  bool first_bit() const noexcept { return first_bit_; }
  std::uint32_t width() const noexcept { return width_; }
  const std::vector<std::uint32_t>& payload() const noexcept { return payload_; }

  std::vector<std::uint32_t> positions() const;
  std::vector<bool> bits() const;
  std::uint32_t popcount() const;
  bool empty() const { return popcount() == 0; }
  bool test(std::uint32_t pos) const;

  /// "[1] 3 2 4 1" for run-length rows, "3 6" for position rows.
  std::string to_string() const;

  friend bool operator==(const CompressedRow&, const CompressedRow&) = default;

 private:
  RowEncoding encoding_ = RowEncoding::Positions;
  bool first_bit_ = false;
  std::uint32_t width_ = 0;
  std::vector<std::uint32_t> payload_;
};

/// Number of integers a pure run-length encoding of the row needs.
std::uint32_t run_count(std::span<const std::uint32_t> positions, std::uint32_t width);

}  // namespace bitopt
