#include "bitopt/oracle.hpp"

#include <algorithm>
#include <map>

#include "bitopt/error.hpp"
#include "bitopt/filter.hpp"

namespace bitopt {

namespace {

class Oracle {
 public:
  Oracle(const NodePtr& root, const TripleStore& store, const OracleOptions& opts)
      : store_(store), dict_(store.dict()), opts_(opts) {
    header_ = vars(root);
    for (std::size_t i = 0; i < header_.size(); ++i) slot_[header_[i]] = i;
  }

  const std::vector<std::string>& header() const { return header_; }

  std::vector<Row> eval(const PatternNode& n) {
    switch (n.kind) {
      case NodeKind::Bgp: return bgp(n.patterns);
      case NodeKind::Join: return join(eval(*n.left), eval(*n.right), false);
      case NodeKind::LeftJoin: return join(eval(*n.left), eval(*n.right), true);
      case NodeKind::Union: {
        auto l = eval(*n.left);
        auto r = eval(*n.right);
        l.insert(l.end(), r.begin(), r.end());
        return checked(std::move(l));
      }
      case NodeKind::Filter: {
        std::vector<Row> out;
        for (auto& row : eval(*n.left))
          if (eval_filter(n.filter, lookup(row)) == Truth::True) out.push_back(std::move(row));
        return out;
      }
    }
    return {};
  }

 private:
  std::vector<Row> checked(std::vector<Row> rows) const {
    if (rows.size() > opts_.row_limit)
      fail(ErrorKind::Limit, "oracle intermediate result exceeds " + std::to_string(opts_.row_limit) + " rows");
    return rows;
  }

  Lookup lookup(const Row& row) const {
    return [this, &row](const std::string& v) -> const Term* {
      auto it = slot_.find(v);
      if (it == slot_.end() || row[it->second] == 0) return nullptr;
      return &dict_.term_of_node(row[it->second]);
    };
  }

  // Binds `term` to `node` in `row`; false when it conflicts.
  bool bind(Row& row, const PatternTerm& term, std::uint32_t node) const {
    if (!term.is_var) return dict_.node_of(term.constant) == node && node != 0;
    auto& cell = row[slot_.at(term.var)];
    if (cell != 0 && cell != node) return false;
    cell = node;
    return true;
  }

  std::vector<Row> bgp(const std::vector<TriplePattern>& tps) {
    std::vector<Row> rows{Row(header_.size(), 0)};
    for (const auto& tp : tps) {
      std::vector<Row> next;
      for (const auto& row : rows) {
        for (const auto& t : store_.triples()) {
          Row r = row;
          if (bind(r, tp.s, dict_.node_of_subject(t.s)) && bind(r, tp.p, dict_.node_of_predicate(t.p)) &&
              bind(r, tp.o, dict_.node_of_object(t.o)))
            next.push_back(std::move(r));
        }
      }
      rows = checked(std::move(next));
    }
    return rows;
  }

  static bool compatible(const Row& a, const Row& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] && b[i] && a[i] != b[i]) return false;
    return true;
  }

  std::vector<Row> join(const std::vector<Row>& left, const std::vector<Row>& right, bool optional) const {
    std::vector<Row> out;
    for (const auto& l : left) {
      bool any = false;
      for (const auto& r : right) {
        if (!compatible(l, r)) continue;
        any = true;
        Row m = l;
        for (std::size_t i = 0; i < m.size(); ++i)
          if (!m[i]) m[i] = r[i];
        out.push_back(std::move(m));
        if (out.size() > opts_.row_limit) checked(std::move(out));
      }
      if (optional && !any) out.push_back(l);
    }
    return checked(std::move(out));
  }

  const TripleStore& store_;
  const Dictionary& dict_;
  OracleOptions opts_;
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> slot_;
};

}  // namespace

ResultSet oracle_full(const NodePtr& root, const TripleStore& store, const OracleOptions& opts) {
  Oracle o(root, store, opts);
  ResultSet rs;
  rs.header = o.header();
  rs.rows = o.eval(*root);
  return rs;
}

ResultSet oracle_eval(const Query& q, const TripleStore& store, const OracleOptions& opts) {
  auto rs = project(oracle_full(q.root, store, opts), q.projection);
  if (q.distinct) {
    sort_rows(rs);
    rs.rows.erase(std::unique(rs.rows.begin(), rs.rows.end()), rs.rows.end());
  }
  return rs;
}

}  // namespace bitopt
