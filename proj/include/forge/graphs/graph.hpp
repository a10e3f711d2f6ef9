#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "forge/error.hpp"
#include "forge/invariants/invariant.hpp"
#include "forge/jsonl.hpp"
#include "forge/minilang/ast.hpp"

namespace forge::graphs {

// Three reciprocal pairs: lexical adjacency, tree structure, and lexical
// use-chains between same-text identifiers.
enum class EdgeKind { NextToken, PrevToken, Child, Parent, NextUse, LastUse };
inline constexpr int kEdgeKinds = 6;

const char* edge_kind_name(EdgeKind k);
EdgeKind edge_kind_from_name(const std::string& name);
EdgeKind edge_kind_inverse(EdgeKind k);

struct Edge {
  int src = 0;
  int dst = 0;
  EdgeKind kind = EdgeKind::Child;

  bool operator==(const Edge&) const = default;
};

struct GraphNode {
  int id = 0;
  minilang::NodeKind kind = minilang::NodeKind::Function;
  std::string text;  // token leaves only

  bool operator==(const GraphNode&) const = default;
};

class MethodTooLarge : public ForgeError {
 public:
  explicit MethodTooLarge(size_t count)
      : ForgeError("method graph has " + std::to_string(count) + " nodes (limit 500)") {}
};

inline constexpr size_t kMaxGraphNodes = 500;

// Typed-edge program graph of one method, optionally carrying an injected
// invariant subtree and its noisy label.
struct MethodGraph {
  std::string method;
  std::string project;
  std::vector<GraphNode> nodes;  // nodes[i].id == i, preorder of the AST
  std::vector<Edge> edges;
  std::set<int> invariant_nodes;
  std::optional<bool> label;  // true = valid
  std::optional<double> score;

  bool operator==(const MethodGraph&) const = default;

  Json to_json() const;
  static MethodGraph from_json(const Json& v, const std::string& where);
};

// Splits at underscores and lower-to-upper camel boundaries, lowercases,
// drops empty pieces.
std::vector<std::string> subtokenize(const std::string& identifier);

// Program graph of a method AST: Child/Parent from the tree, NextToken/
// PrevToken chaining token leaves in lexical order, NextUse/LastUse
// chaining same-text identifier leaves.
MethodGraph build_graph(const minilang::Ast& ast, std::string method, std::string project);

// The AST a build_graph output came from (Child edges keep child order).
minilang::Ast graph_ast(const MethodGraph& graph);

// Grafts the invariant as an expression subtree under a precondition anchor
// (first statement of the body) or postcondition anchor (last statement),
// then rebuilds all edges so the new leaves join token and use chains.
// invariant_nodes becomes the subtree under the anchor.
MethodGraph inject_invariant(const MethodGraph& graph, const inv::Invariant& invar);

// The invariant's expression subtree alone, with its own edges; every node
// is an invariant node. Context-free baseline input.
MethodGraph invariant_graph(const inv::Invariant& invar, std::string project);

struct Vocabulary {
  std::map<std::string, int> subtokens;   // mapped subtokens, indices from 1
  std::map<std::string, int64_t> counts;  // training counts, dropped ones included
  std::map<std::string, int> kinds;       // node kind name -> index
  int unknown = 0;

  // Number of subtoken rows an embedding needs (unknown included).
  int subtoken_rows() const { return static_cast<int>(subtokens.size()) + 1; }
  int kind_rows() const { return static_cast<int>(kinds.size()); }
  int subtoken_index(const std::string& s) const;

  bool operator==(const Vocabulary&) const = default;

  Json to_json() const;
  static Vocabulary from_json(const Json& v, const std::string& where);
};

// Subtokens of every node text with count >= 2, indexed by count descending
// then lexicographic, starting at 1; 0 stays unknown. All node kinds mapped
// regardless of occurrence.
Vocabulary build_vocab(const std::vector<MethodGraph>& training);

void write_graphs(const std::string& path, const std::vector<MethodGraph>& graphs);
std::vector<MethodGraph> read_graphs(const std::string& path);

}  // namespace forge::graphs
