#include "bitopt/query.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "bitopt/error.hpp"

namespace bitopt {

namespace {

void add_unique(std::vector<std::string>& out, const std::string& v) {
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

const char* op_symbol(NodeKind k) {
  switch (k) {
    case NodeKind::Join: return "⋈";
    case NodeKind::LeftJoin: return "⟕";
    case NodeKind::Union: return "∪";
    default: return "?";
  }
}

std::string bgp_name(std::size_t i, BgpNaming naming) {
  if (naming == BgpNaming::Lettered && i < 26) return std::string("P") + static_cast<char>('a' + i);
  return "P" + std::to_string(i + 1);
}

}  // namespace

std::vector<std::string> TriplePattern::vars() const {
  std::vector<std::string> out;
  for (const auto* t : {&s, &p, &o})
    if (t->is_var) add_unique(out, t->var);
  return out;
}

std::string TriplePattern::to_string() const {
  return "(" + s.to_string() + " " + p.to_string() + " " + o.to_string() + ")";
}

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

FilterExpr FilterExpr::compare(CmpOp op, PatternTerm l, PatternTerm r) {
  FilterExpr e;
  e.kind = Kind::Compare;
  e.op = op;
  e.lhs = std::move(l);
  e.rhs = std::move(r);
  return e;
}

FilterExpr FilterExpr::all_of(FilterExpr a, FilterExpr b) {
  FilterExpr e;
  e.kind = Kind::And;
  e.args = {std::move(a), std::move(b)};
  return e;
}

FilterExpr FilterExpr::any_of(FilterExpr a, FilterExpr b) {
  FilterExpr e;
  e.kind = Kind::Or;
  e.args = {std::move(a), std::move(b)};
  return e;
}

FilterExpr FilterExpr::negate(FilterExpr a) {
  FilterExpr e;
  e.kind = Kind::Not;
  e.args = {std::move(a)};
  return e;
}

std::vector<std::string> FilterExpr::vars() const {
  std::vector<std::string> out;
  std::function<void(const FilterExpr&)> walk = [&](const FilterExpr& e) {
    if (e.kind == Kind::Compare) {
      if (e.lhs.is_var) add_unique(out, e.lhs.var);
      if (e.rhs.is_var) add_unique(out, e.rhs.var);
    }
    for (const auto& a : e.args) walk(a);
  };
  walk(*this);
  return out;
}

std::string FilterExpr::to_string() const {
  switch (kind) {
    case Kind::Compare: return lhs.to_string() + " " + bitopt::to_string(op) + " " + rhs.to_string();
    case Kind::And: return "(" + args[0].to_string() + " && " + args[1].to_string() + ")";
    case Kind::Or: return "(" + args[0].to_string() + " || " + args[1].to_string() + ")";
    case Kind::Not: return "!(" + args[0].to_string() + ")";
  }
  return "";
}

NodePtr PatternNode::bgp(std::vector<TriplePattern> patterns) {
  auto n = std::make_shared<PatternNode>();
  n->kind = NodeKind::Bgp;
  n->patterns = std::move(patterns);
  return n;
}

namespace {
NodePtr make_binary(NodeKind kind, NodePtr l, NodePtr r) {
  if (!l || !r) fail(ErrorKind::Contract, "binary pattern node needs two children");
  auto n = std::make_shared<PatternNode>();
  n->kind = kind;
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}
}  // namespace

NodePtr PatternNode::join(NodePtr l, NodePtr r) { return make_binary(NodeKind::Join, std::move(l), std::move(r)); }
NodePtr PatternNode::left_join(NodePtr l, NodePtr r) { return make_binary(NodeKind::LeftJoin, std::move(l), std::move(r)); }
NodePtr PatternNode::union_of(NodePtr l, NodePtr r) { return make_binary(NodeKind::Union, std::move(l), std::move(r)); }

NodePtr PatternNode::filtered(NodePtr inner, FilterExpr expr) {
  if (!inner) fail(ErrorKind::Contract, "filter needs an inner pattern");
  auto n = std::make_shared<PatternNode>();
  n->kind = NodeKind::Filter;
  n->left = std::move(inner);
  n->filter = std::move(expr);
  return n;
}

std::vector<std::string> vars(const NodePtr& node) {
  std::vector<std::string> out;
  for (const auto& tp : patterns(node))
    for (const auto& v : tp.vars()) add_unique(out, v);
  return out;
}

std::vector<TriplePattern> patterns(const NodePtr& node) {
  std::vector<TriplePattern> out;
  for (const auto& b : bgps(node)) out.insert(out.end(), b->patterns.begin(), b->patterns.end());
  return out;
}

std::vector<NodePtr> bgps(const NodePtr& node) {
  std::vector<NodePtr> out;
  std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
    if (!n) return;
    if (n->kind == NodeKind::Bgp) {
      out.push_back(n);
      return;
    }
    walk(n->left);
    walk(n->right);
  };
  walk(node);
  return out;
}

bool has_kind(const NodePtr& node, NodeKind kind) {
  if (!node) return false;
  return node->kind == kind || has_kind(node->left, kind) || has_kind(node->right, kind);
}

NodePtr leftmost_bgp(const NodePtr& node) {
  auto n = node;
  while (n && n->kind != NodeKind::Bgp) n = n->left;
  return n;
}

NodePtr renumber(const NodePtr& node) {
  int next = 0;
  std::function<NodePtr(const NodePtr&)> walk = [&](const NodePtr& n) -> NodePtr {
    switch (n->kind) {
      case NodeKind::Bgp: {
        auto tps = n->patterns;
        for (auto& tp : tps) tp.index = next++;
        return PatternNode::bgp(std::move(tps));
      }
      case NodeKind::Filter: return PatternNode::filtered(walk(n->left), n->filter);
      default: {
        auto l = walk(n->left);
        auto r = walk(n->right);
        return make_binary(n->kind, l, r);
      }
    }
  };
  return walk(node);
}

bool same_tree(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::Bgp: return a->patterns == b->patterns;
    case NodeKind::Filter: return a->filter == b->filter && same_tree(a->left, b->left);
    default: return same_tree(a->left, b->left) && same_tree(a->right, b->right);
  }
}

std::string serialize(const NodePtr& root, BgpNaming naming) {
  std::size_t next = 0;
  std::function<std::string(const NodePtr&, bool)> walk = [&](const NodePtr& n, bool nested) -> std::string {
    std::string s;
    switch (n->kind) {
      case NodeKind::Bgp: return bgp_name(next++, naming);
      case NodeKind::Filter: s = walk(n->left, true) + " F(" + n->filter.to_string() + ")"; break;
      default: {
        auto l = walk(n->left, true);
        s = l + " " + op_symbol(n->kind) + " " + walk(n->right, true);
      }
    }
    return nested ? "(" + s + ")" : s;
  };
  return walk(root, false);
}

NodePtr parse_algebra(std::string_view text, const std::vector<NodePtr>& leaves) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  };
  auto error = [&](const std::string& msg) -> NodePtr {
    fail(ErrorKind::Parse, "algebra position " + std::to_string(pos) + ": " + msg);
  };
  std::function<NodePtr()> expr;
  std::function<NodePtr()> operand = [&]() -> NodePtr {
    skip();
    if (pos < text.size() && text[pos] == '(') {
      ++pos;
      auto inner = expr();
      skip();
      if (pos >= text.size() || text[pos] != ')') return error("expected ')'");
      ++pos;
      return inner;
    }
    if (pos >= text.size() || text[pos] != 'P') return error("expected BGP name");
    ++pos;
    std::size_t index = 0;
    if (pos < text.size() && text[pos] >= 'a' && text[pos] <= 'z') {
      index = static_cast<std::size_t>(text[pos++] - 'a');
    } else {
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (start == pos) return error("expected BGP number");
      index = std::stoul(std::string(text.substr(start, pos - start))) - 1;
    }
    if (index >= leaves.size()) return error("BGP name out of range");
    return leaves[index];
  };
  expr = [&]() -> NodePtr {
    auto acc = operand();
    while (true) {
      skip();
      NodeKind kind;
      std::string_view rest = text.substr(pos);
      if (rest.starts_with("⋈")) kind = NodeKind::Join;
      else if (rest.starts_with("⟕")) kind = NodeKind::LeftJoin;
      else if (rest.starts_with("∪")) kind = NodeKind::Union;
      else return acc;
      pos += rest.starts_with("∪") ? std::string_view("∪").size() : std::string_view("⋈").size();
      acc = make_binary(kind, acc, operand());
    }
  };
  auto root = expr();
  skip();
  if (pos != text.size()) return error("trailing input");
  return root;
}

namespace {

// Walks the tree carrying the variables used by triple patterns outside the current node.
// Union branches are alternatives, so a sibling branch does not count as "outside".
void walk_outside(const NodePtr& n, const std::set<std::string>& outside,
                  const std::function<void(const NodePtr&, const std::set<std::string>&)>& visit) {
  visit(n, outside);
  if (n->kind == NodeKind::Bgp) return;
  if (n->kind == NodeKind::Filter) {
    walk_outside(n->left, outside, visit);
    return;
  }
  if (n->kind == NodeKind::Union) {
    walk_outside(n->left, outside, visit);
    walk_outside(n->right, outside, visit);
    return;
  }
  auto with = [&](const NodePtr& other) {
    auto s = outside;
    for (const auto& v : vars(other)) s.insert(v);
    return s;
  };
  walk_outside(n->left, with(n->right), visit);
  walk_outside(n->right, with(n->left), visit);
}

}  // namespace

void check_well_designed(const NodePtr& root) {
  walk_outside(root, {}, [](const NodePtr& n, const std::set<std::string>& outside) {
    if (n->kind != NodeKind::LeftJoin) return;
    auto required = vars(n->left);
    for (const auto& v : vars(n->right)) {
      if (outside.contains(v) && std::find(required.begin(), required.end(), v) == required.end())
        fail(ErrorKind::Rejected, "query is not well-designed: ?" + v + " occurs outside OPTIONAL " + serialize(n) +
                                      " but not in its required side");
    }
  });
}

void check_well_designed_unions(const NodePtr& root) {
  walk_outside(root, {}, [](const NodePtr& n, const std::set<std::string>& outside) {
    if (n->kind != NodeKind::Union) return;
    auto l = vars(n->left), r = vars(n->right);
    for (const auto& v : outside) {
      bool in_l = std::find(l.begin(), l.end(), v) != l.end();
      bool in_r = std::find(r.begin(), r.end(), v) != r.end();
      if (in_l != in_r) fail(ErrorKind::Rejected, "union is not well-designed: ?" + v + " is used outside the union but bound by one branch only");
    }
  });
}

void check_safe_filters(const NodePtr& root) {
  std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
    if (!n) return;
    if (n->kind == NodeKind::Filter) {
      auto inner = vars(n->left);
      for (const auto& v : n->filter.vars())
        if (std::find(inner.begin(), inner.end(), v) == inner.end())
          fail(ErrorKind::Rejected, "unsafe filter: ?" + v + " is not bound by the filtered pattern");
    }
    walk(n->left);
    walk(n->right);
  };
  walk(root);
}

}  // namespace bitopt
