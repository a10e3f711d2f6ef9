#include "forge/minilang/ast.hpp"

#include <unordered_map>

#include "forge/error.hpp"

namespace forge::minilang {

namespace {

const std::pair<NodeKind, const char*> kKindNames[] = {
    {NodeKind::Function, "function"}, {NodeKind::Params, "params"},
    {NodeKind::Block, "block"},       {NodeKind::If, "if"},
    {NodeKind::While, "while"},       {NodeKind::Assign, "assign"},
    {NodeKind::Return, "return"},     {NodeKind::ExprStmt, "expr_stmt"},
    {NodeKind::Binary, "binary"},     {NodeKind::Unary, "unary"},
    {NodeKind::Call, "call"},         {NodeKind::Index, "index"},
    {NodeKind::Field, "field"},       {NodeKind::Record, "record"},
    {NodeKind::FieldInit, "field_init"}, {NodeKind::Array, "array"},
    {NodeKind::Ident, "ident"},       {NodeKind::Int, "int"},
    {NodeKind::Float, "float"},       {NodeKind::Str, "str"},
    {NodeKind::Null, "null"},         {NodeKind::Op, "op"},
    {NodeKind::PreAnchor, "pre_anchor"}, {NodeKind::PostAnchor, "post_anchor"},
    {NodeKind::InvForall, "inv_forall"}, {NodeKind::InvExists, "inv_exists"},
    {NodeKind::InvContains, "inv_contains"}, {NodeKind::InvOrig, "inv_orig"},
    {NodeKind::InvReturn, "inv_return"},
};

}  // namespace

const char* node_kind_name(NodeKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "unknown";
}

NodeKind node_kind_from_name(const std::string& name) {
  for (const auto& [kind, n] : kKindNames)
    if (name == n) return kind;
  throw FormatError("ast", "unknown node kind '" + name + "'");
}

const std::vector<NodeKind>& all_node_kinds() {
  static const std::vector<NodeKind> kinds = [] {
    std::vector<NodeKind> out;
    for (const auto& [kind, name] : kKindNames) out.push_back(kind);
    return out;
  }();
  return kinds;
}

std::vector<int> Ast::renumber_preorder(int root_id) {
  std::vector<int> mapping(nodes.size(), -1);
  std::vector<AstNode> out;
  out.reserve(nodes.size());
  // Explicit stack to survive deep trees.
  std::vector<int> stack{root_id};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    mapping[id] = static_cast<int>(out.size());
    out.push_back(nodes[id]);
    const auto& ch = out.back().children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  for (AstNode& n : out) {
    n.id = mapping[n.id];
    for (int& c : n.children) c = mapping[c];
  }
  // Preorder emission makes out[i].id == i.
  nodes = std::move(out);
  return mapping;
}

std::vector<int> Ast::leaves() const {
  std::vector<int> out;
  for (const AstNode& n : nodes)
    if (n.children.empty()) out.push_back(n.id);
  return out;
}

}  // namespace forge::minilang
