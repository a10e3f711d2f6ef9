#pragma once

#include <string>
#include <vector>

namespace forge::minilang {

enum class NodeKind {
  // Nonterminals.
  Function, Params, Block, If, While, Assign, Return, ExprStmt,
  Binary, Unary, Call, Index, Field, Record, FieldInit, Array,
  // Leaves.
  Ident, Int, Float, Str, Null, Op,
  // Invariant-injection kinds (never produced by the parser).
  PreAnchor, PostAnchor, InvForall, InvExists, InvContains, InvOrig, InvReturn,
};

const char* node_kind_name(NodeKind k);
NodeKind node_kind_from_name(const std::string& name);  // FormatError on unknown
const std::vector<NodeKind>& all_node_kinds();

struct AstNode {
  int id = 0;
  NodeKind kind;
  std::string text;          // leaves only
  std::vector<int> children;  // node ids, in source order
};

// One method's tree. ids are assigned in preorder, 0..N-1, root at 0, so
// sibling order is id order and the lexical token sequence is the leaves
// sorted by id.
struct Ast {
  std::vector<AstNode> nodes;

  const AstNode& root() const { return nodes[0]; }
  bool is_leaf(int id) const { return nodes[id].children.empty(); }
  size_t size() const { return nodes.size(); }

  // Rebuilds ids so a preorder walk from `root_id` yields 0..N-1. Nodes not
  // reachable from the root are dropped. Returns the mapping old id -> new
  // id (-1 for dropped nodes).
  std::vector<int> renumber_preorder(int root_id);

  // Leaf ids in lexical order.
  std::vector<int> leaves() const;
};

}  // namespace forge::minilang
