#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "bitopt/bitmat.hpp"
#include "bitopt/dictionary.hpp"

namespace bitopt {

/// A triple in dictionary ids: s is a subject id, p a predicate id, o an object id.
struct Triple {
  std::uint32_t s = 0, p = 0, o = 0;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Parses one N-Triples document into terms. Throws Error(Parse) naming the line.
std::vector<std::array<Term, 3>> parse_ntriples(std::istream& in);

/// Immutable dictionary-encoded triple set. BitMats are materialized on first
/// request and cached; concurrent readers are safe.
class TripleStore {
 public:
  TripleStore();
  TripleStore(TripleStore&&) noexcept;
  TripleStore& operator=(TripleStore&&) noexcept;
  ~TripleStore();

  static TripleStore from_terms(const std::vector<std::array<Term, 3>>& triples);
  static TripleStore from_ntriples(std::istream& in);
  static TripleStore load_file(const std::filesystem::path& path);

  /// Writes dict.tsv, one S-O BitMat file per predicate and a manifest.
  void save(const std::filesystem::path& dir) const;
  static TripleStore open(const std::filesystem::path& dir);

  const Dictionary& dict() const noexcept { return dict_; }
  /// Sorted, duplicate-free.
  const std::vector<Triple>& triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }

  /// S-O / O-S are sliced by predicate id, P-S by object id, P-O by subject id.
  /// An out-of-range slice yields an empty matrix of the right shape.
  std::shared_ptr<const BitMat> bitmat(BitMatKind kind, std::uint32_t slice) const;
  std::size_t cached_bitmats() const;

 private:
  BitMat build(BitMatKind kind, std::uint32_t slice) const;
  void index();

  Dictionary dict_;
  std::vector<Triple> triples_;
  // Per-slice triple ranges for lazy construction.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> by_p_, by_s_, by_o_;
  mutable std::unique_ptr<std::mutex> mutex_;
  mutable std::map<std::pair<BitMatKind, std::uint32_t>, std::shared_ptr<const BitMat>> cache_;
};

/// Binary BitMat file: little-endian uint32 header (kind, slice, rows, cols, triple count)
/// followed by one tagged row per matrix row.
void write_bitmat(std::ostream& out, const BitMat& bm);
BitMat read_bitmat(std::istream& in);

}  // namespace bitopt
