#include "bitopt/compressed_row.hpp"

#include <algorithm>
#include <sstream>

#include "bitopt/error.hpp"

namespace bitopt {

namespace {

std::vector<std::uint32_t> runs_of(std::span<const std::uint32_t> positions, std::uint32_t width,
                                   bool& first_bit) {
  std::vector<std::uint32_t> runs;
  if (width == 0) {
    first_bit = false;
    return runs;
  }
  first_bit = !positions.empty() && positions.front() == 1;
  bool current = first_bit;
  std::uint32_t run = 0;
  std::size_t next = 0;
  for (std::uint32_t pos = 1; pos <= width; ++pos) {
    bool bit = next < positions.size() && positions[next] == pos;
    if (bit) ++next;
    if (bit == current) {
      ++run;
    } else {
      runs.push_back(run);
      current = bit;
      run = 1;
    }
  }
  runs.push_back(run);
  return runs;
}

}  // namespace

std::uint32_t run_count(std::span<const std::uint32_t> positions, std::uint32_t width) {
  if (width == 0) return 0;
  // A new run starts at position 1 and at every position whose bit differs from its predecessor.
  std::uint32_t count = 1;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    std::uint32_t p = positions[i];
    bool starts_block = (i == 0) || positions[i - 1] != p - 1;
    if (starts_block && p != 1) ++count;
    bool ends_block = (i + 1 == positions.size()) || positions[i + 1] != p + 1;
    if (ends_block && p != width) ++count;
  }
  return count;
}

CompressedRow CompressedRow::encode(std::span<const std::uint32_t> positions, std::uint32_t width) {
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (positions[i] == 0 || positions[i] > width || (i > 0 && positions[i] <= positions[i - 1]))
      fail(ErrorKind::Contract, "row positions must be strictly increasing within 1.." + std::to_string(width));
  }
  CompressedRow row;
  row.width_ = width;
  if (positions.size() < run_count(positions, width)) {
    row.encoding_ = RowEncoding::Positions;
    row.payload_.assign(positions.begin(), positions.end());
  } else {
    row.encoding_ = RowEncoding::RunLength;
    row.payload_ = runs_of(positions, width, row.first_bit_);
  }
  return row;
}

CompressedRow CompressedRow::encode_bits(const std::vector<bool>& bits) {
  std::vector<std::uint32_t> positions;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) positions.push_back(static_cast<std::uint32_t>(i + 1));
  return encode(positions, static_cast<std::uint32_t>(bits.size()));
}

CompressedRow CompressedRow::encode_string(std::string_view text) {
  std::vector<bool> bits;
  for (char c : text) {
    if (c == '1') bits.push_back(true);
    else if (c == '0') bits.push_back(false);
    else if (c == '-' || c == ' ') continue;
    else fail(ErrorKind::Parse, "bit string may only contain 0 and 1");
  }
  return encode_bits(bits);
}

CompressedRow CompressedRow::from_parts(RowEncoding enc, bool first_bit, std::uint32_t width,
                                        std::vector<std::uint32_t> payload) {
  CompressedRow row;
  row.encoding_ = enc;
  row.first_bit_ = first_bit;
  row.width_ = width;
  row.payload_ = std::move(payload);
  if (enc == RowEncoding::RunLength) {
    std::uint64_t total = 0;
    for (auto r : row.payload_) {
      if (r == 0) fail(ErrorKind::Parse, "zero-length run in run-length row");
      total += r;
    }
    if (total != width) fail(ErrorKind::Parse, "run lengths do not sum to row width");
  } else {
    for (std::size_t i = 0; i < row.payload_.size(); ++i) {
      auto p = row.payload_[i];
      if (p == 0 || p > width || (i > 0 && p <= row.payload_[i - 1]))
        fail(ErrorKind::Parse, "position row is not strictly increasing within the row width");
    }
  }
  return row;
}

std::vector<std::uint32_t> CompressedRow::positions() const {
  if (encoding_ == RowEncoding::Positions) return payload_;
  std::vector<std::uint32_t> out;
  bool bit = first_bit_;
  std::uint32_t pos = 1;
  for (auto run : payload_) {
    if (bit)
      for (std::uint32_t k = 0; k < run; ++k) out.push_back(pos + k);
    pos += run;
    bit = !bit;
  }
  return out;
}

std::vector<bool> CompressedRow::bits() const {
  std::vector<bool> out(width_, false);
  for (auto p : positions()) out[p - 1] = true;
  return out;
}

std::uint32_t CompressedRow::popcount() const {
  if (encoding_ == RowEncoding::Positions) return static_cast<std::uint32_t>(payload_.size());
  std::uint32_t count = 0;
  bool bit = first_bit_;
  for (auto run : payload_) {
    if (bit) count += run;
    bit = !bit;
  }
  return count;
}

bool CompressedRow::test(std::uint32_t pos) const {
  if (pos == 0 || pos > width_) return false;
  if (encoding_ == RowEncoding::Positions) return std::binary_search(payload_.begin(), payload_.end(), pos);
  bool bit = first_bit_;
  std::uint32_t end = 0;
  for (auto run : payload_) {
    end += run;
    if (pos <= end) return bit;
    bit = !bit;
  }
  return false;
}

std::string CompressedRow::to_string() const {
  std::ostringstream os;
  if (encoding_ == RowEncoding::RunLength) os << '[' << (first_bit_ ? 1 : 0) << ']';
  bool first = encoding_ == RowEncoding::Positions;
  for (auto v : payload_) {
    if (!first) os << ' ';
    os << v;
    first = false;
  }
  return os.str();
}

}  // namespace bitopt
