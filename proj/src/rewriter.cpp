#include "bitopt/rewriter.hpp"

#include <algorithm>

#include "bitopt/filter.hpp"

namespace bitopt {

namespace {

std::vector<NodePtr> unf(const NodePtr& n, bool& rule3) {
  switch (n->kind) {
    case NodeKind::Bgp: return {n};
    case NodeKind::Union: {
      auto out = unf(n->left, rule3);
      auto r = unf(n->right, rule3);
      out.insert(out.end(), r.begin(), r.end());
      return out;
    }
    case NodeKind::Filter: {
      std::vector<NodePtr> out;
      for (const auto& d : unf(n->left, rule3)) out.push_back(PatternNode::filtered(d, n->filter));
      return out;
    }
    case NodeKind::Join:
    case NodeKind::LeftJoin: {
      auto ls = unf(n->left, rule3);
      auto rs = unf(n->right, rule3);
      if (n->kind == NodeKind::LeftJoin && rs.size() > 1) rule3 = true;
      std::vector<NodePtr> out;
      for (const auto& l : ls)
        for (const auto& r : rs)
          out.push_back(n->kind == NodeKind::Join ? PatternNode::join(l, r) : PatternNode::left_join(l, r));
      return out;
    }
  }
  return {n};
}

bool covers(const std::vector<std::string>& bound, const FilterExpr& e) {
  for (const auto& v : e.vars())
    if (std::find(bound.begin(), bound.end(), v) == bound.end()) return false;
  return true;
}

NodePtr push(const NodePtr& n);

NodePtr place(const NodePtr& node, std::vector<FilterExpr> conj) {
  if (conj.empty()) return node;
  if (node->kind == NodeKind::Filter) {
    auto inner = conjuncts(node->filter);
    inner.insert(inner.end(), conj.begin(), conj.end());
    return place(node->left, std::move(inner));
  }
  if (node->kind == NodeKind::LeftJoin) {
    auto required = vars(node->left);
    std::vector<FilterExpr> down, here;
    for (auto& c : conj) (covers(required, c) ? down : here).push_back(std::move(c));
    if (!down.empty()) {
      auto rebuilt = PatternNode::left_join(place(node->left, std::move(down)), node->right);
      return here.empty() ? rebuilt : PatternNode::filtered(rebuilt, *conjoin(here));
    }
  }
  return PatternNode::filtered(node, *conjoin(conj));
}

NodePtr push(const NodePtr& n) {
  switch (n->kind) {
    case NodeKind::Bgp: return n;
    case NodeKind::Filter: return place(push(n->left), conjuncts(n->filter));
    case NodeKind::Join: return PatternNode::join(push(n->left), push(n->right));
    case NodeKind::LeftJoin: return PatternNode::left_join(push(n->left), push(n->right));
    case NodeKind::Union: return PatternNode::union_of(push(n->left), push(n->right));
  }
  return n;
}

}  // namespace

UnfResult to_unf(const NodePtr& root) {
  UnfResult r;
  r.disjuncts = unf(root, r.rule3_used);
  return r;
}

NodePtr push_filters(const NodePtr& root) { return push(root); }

}  // namespace bitopt
