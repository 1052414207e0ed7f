#include "bitopt/dictionary.hpp"

#include <unordered_set>

#include "bitopt/error.hpp"

namespace bitopt {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string Term::to_ntriples() const {
  switch (kind) {
    case TermKind::Iri: return "<" + value + ">";
    case TermKind::Literal: return "\"" + escape(value) + "\"";
    case TermKind::Integer: return "\"" + value + "\"^^<" + kXsdInteger + ">";
  }
  return value;
}

std::string Term::to_display() const {
  switch (kind) {
    case TermKind::Iri: return "<" + value + ">";
    case TermKind::Literal: return "\"" + escape(value) + "\"";
    case TermKind::Integer: return value;
  }
  return value;
}

Dictionary Dictionary::build(const std::vector<std::array<Term, 3>>& triples) {
  std::unordered_set<std::string> as_subject, as_object;
  for (const auto& t : triples) {
    as_subject.insert(t[0].to_ntriples());
    as_object.insert(t[2].to_ntriples());
  }

  Dictionary d;
  std::vector<Term> subject_only, object_only;
  std::unordered_set<std::string> seen_so, seen_p;
  auto visit = [&](const Term& term) {
    auto key = term.to_ntriples();
    if (!seen_so.insert(key).second) return;
    bool s = as_subject.contains(key), o = as_object.contains(key);
    if (s && o) d.subjects_.push_back(term);
    else if (s) subject_only.push_back(term);
    else object_only.push_back(term);
  };
  for (const auto& t : triples) {
    visit(t[0]);
    if (seen_p.insert(t[1].to_ntriples()).second) d.predicates_.push_back(t[1]);
    visit(t[2]);
  }
  d.num_so_ = static_cast<std::uint32_t>(d.subjects_.size());
  d.objects_ = d.subjects_;
  d.subjects_.insert(d.subjects_.end(), subject_only.begin(), subject_only.end());
  d.objects_.insert(d.objects_.end(), object_only.begin(), object_only.end());
  d.index();
  return d;
}

Dictionary Dictionary::from_tables(std::uint32_t num_so, std::vector<Term> subject_only, std::vector<Term> object_only,
                                   std::vector<Term> shared, std::vector<Term> predicates) {
  if (shared.size() != num_so) fail(ErrorKind::Parse, "dictionary shared-term count mismatch");
  Dictionary d;
  d.num_so_ = num_so;
  d.subjects_ = shared;
  d.subjects_.insert(d.subjects_.end(), subject_only.begin(), subject_only.end());
  d.objects_ = std::move(shared);
  d.objects_.insert(d.objects_.end(), object_only.begin(), object_only.end());
  d.predicates_ = std::move(predicates);
  d.index();
  return d;
}

void Dictionary::index() {
  subject_ids_.clear();
  object_ids_.clear();
  predicate_ids_.clear();
  for (std::uint32_t i = 0; i < subjects_.size(); ++i) subject_ids_.emplace(subjects_[i].to_ntriples(), i + 1);
  for (std::uint32_t i = 0; i < objects_.size(); ++i) object_ids_.emplace(objects_[i].to_ntriples(), i + 1);
  for (std::uint32_t i = 0; i < predicates_.size(); ++i) predicate_ids_.emplace(predicates_[i].to_ntriples(), i + 1);
  pred_node_.clear();
  pred_only_ids_.clear();
  std::uint32_t next = num_subjects() + num_objects() - num_so_;
  for (std::uint32_t p = 1; p <= predicates_.size(); ++p) {
    const auto& term = predicates_[p - 1];
    if (auto s = subject_id(term)) pred_node_.push_back(node_of_subject(s));
    else if (auto o = object_id(term)) pred_node_.push_back(node_of_object(o));
    else {
      pred_node_.push_back(++next);
      pred_only_ids_.push_back(p);
    }
  }
  pred_only_ = static_cast<std::uint32_t>(pred_only_ids_.size());
}

std::uint32_t Dictionary::subject_id(const Term& t) const {
  auto it = subject_ids_.find(t.to_ntriples());
  return it == subject_ids_.end() ? 0 : it->second;
}

std::uint32_t Dictionary::object_id(const Term& t) const {
  auto it = object_ids_.find(t.to_ntriples());
  return it == object_ids_.end() ? 0 : it->second;
}

std::uint32_t Dictionary::predicate_id(const Term& t) const {
  auto it = predicate_ids_.find(t.to_ntriples());
  return it == predicate_ids_.end() ? 0 : it->second;
}

std::uint32_t Dictionary::object_of_node(std::uint32_t node) const noexcept {
  if (node >= 1 && node <= num_so_) return node;
  if (node > num_subjects() && node <= num_subjects() + num_objects() - num_so_) return node - num_subjects() + num_so_;
  return 0;
}

std::uint32_t Dictionary::node_of(const Term& t) const {
  if (auto s = subject_id(t)) return node_of_subject(s);
  if (auto o = object_id(t)) return node_of_object(o);
  if (auto p = predicate_id(t)) return node_of_predicate(p);
  return 0;
}

const Term& Dictionary::term_of_node(std::uint32_t node) const {
  if (auto s = subject_of_node(node)) return subject(s);
  if (auto o = object_of_node(node)) return object(o);
  std::uint32_t base = num_subjects() + num_objects() - num_so_;
  if (node > base && node <= base + pred_only_) return predicate(pred_only_ids_[node - base - 1]);
  fail(ErrorKind::Contract, "unknown node id " + std::to_string(node));
}

}  // namespace bitopt
