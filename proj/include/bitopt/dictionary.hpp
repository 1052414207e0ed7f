#pragma once

#include <cstdint>
#include <array>
#include <string>
#include <unordered_map>
#include <vector>

namespace bitopt {

enum class TermKind : std::uint8_t { Iri, Literal, Integer };

/// An RDF term. IRIs hold the bare IRI text, literals their unescaped lexical form,
/// integers their canonical decimal text.
struct Term {
  TermKind kind = TermKind::Iri;
  std::string value;

  static Term iri(std::string v) { return {TermKind::Iri, std::move(v)}; }
  static Term literal(std::string v) { return {TermKind::Literal, std::move(v)}; }
  static Term integer(long long v) { return {TermKind::Integer, std::to_string(v)}; }

  /// N-Triples rendering; also the dictionary key.
  std::string to_ntriples() const;
  /// Compact rendering for result output (IRIs in angle brackets, literals quoted, integers bare).
  std::string to_display() const;

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

inline constexpr const char* kXsdInteger = "http://www.w3.org/2001/XMLSchema#integer";

/// Dictionary encoding honoring the shared subject/object coordinate space.
///
/// Terms used as both subject and object get ids 1..|V_so| in both dimensions.
/// Subject-only terms take |V_so|+1..|V_s| and object-only terms |V_so|+1..|V_o|.
/// Predicates have their own space 1..|V_p|.
///
/// Query-local code works in a single "node" space: nodes 1..|V_s| are the subject ids,
/// object-only terms follow, then predicate-only terms.
class Dictionary {
 public:
  enum class Role { Subject, Object, Predicate };

  /// Two-pass build: classify every term, then assign ids in first-appearance order within
  /// each class. Triples are (subject, predicate, object).
  static Dictionary build(const std::vector<std::array<Term, 3>>& triples);

  /// Rebuilds from explicit id tables (used when reading a persisted store).
  static Dictionary from_tables(std::uint32_t num_so, std::vector<Term> subject_only, std::vector<Term> object_only,
                                std::vector<Term> shared, std::vector<Term> predicates);

  std::uint32_t num_subjects() const noexcept { return static_cast<std::uint32_t>(subjects_.size()); }
  std::uint32_t num_objects() const noexcept { return static_cast<std::uint32_t>(objects_.size()); }
  std::uint32_t num_predicates() const noexcept { return static_cast<std::uint32_t>(predicates_.size()); }
  std::uint32_t num_shared() const noexcept { return num_so_; }

  /// 0 when the term does not occur in that role.
  std::uint32_t subject_id(const Term& t) const;
  std::uint32_t object_id(const Term& t) const;
  std::uint32_t predicate_id(const Term& t) const;

  const Term& subject(std::uint32_t id) const { return subjects_.at(id - 1); }
  const Term& object(std::uint32_t id) const { return objects_.at(id - 1); }
  const Term& predicate(std::uint32_t id) const { return predicates_.at(id - 1); }

  std::uint32_t num_nodes() const noexcept { return num_subjects() + num_objects() - num_so_ + pred_only_; }
  std::uint32_t node_of_subject(std::uint32_t sid) const noexcept { return sid; }
  std::uint32_t node_of_object(std::uint32_t oid) const noexcept {
    return oid <= num_so_ ? oid : num_subjects() + (oid - num_so_);
  }
  std::uint32_t node_of_predicate(std::uint32_t pid) const { return pred_node_.at(pid - 1); }
  /// 0 if the node is not a subject (resp. object).
  std::uint32_t subject_of_node(std::uint32_t node) const noexcept {
    return node >= 1 && node <= num_subjects() ? node : 0;
  }
  std::uint32_t object_of_node(std::uint32_t node) const noexcept;
  std::uint32_t node_of(const Term& t) const;
  const Term& term_of_node(std::uint32_t node) const;

 private:
  void index();

  std::uint32_t num_so_ = 0;
  std::uint32_t pred_only_ = 0;
  std::vector<Term> subjects_;
  std::vector<Term> objects_;
  std::vector<Term> predicates_;
  std::vector<std::uint32_t> pred_node_;
  std::vector<std::uint32_t> pred_only_ids_;  // predicate ids of predicate-only terms, by node order
  std::unordered_map<std::string, std::uint32_t> subject_ids_;
  std::unordered_map<std::string, std::uint32_t> object_ids_;
  std::unordered_map<std::string, std::uint32_t> predicate_ids_;
};

}  // namespace bitopt
