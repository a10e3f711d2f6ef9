#include "forge/graphs/graph.hpp"

#include <algorithm>
#include <cctype>

namespace forge::graphs {

using minilang::Ast;
using minilang::AstNode;
using minilang::NodeKind;

namespace {

const std::pair<EdgeKind, const char*> kEdgeNames[] = {
    {EdgeKind::NextToken, "next_token"}, {EdgeKind::PrevToken, "prev_token"},
    {EdgeKind::Child, "child"},          {EdgeKind::Parent, "parent"},
    {EdgeKind::NextUse, "next_use"},     {EdgeKind::LastUse, "last_use"},
};

bool is_token_kind(NodeKind k) {
  switch (k) {
    case NodeKind::Ident:
    case NodeKind::Int:
    case NodeKind::Float:
    case NodeKind::Str:
    case NodeKind::Null:
    case NodeKind::Op:
    case NodeKind::InvReturn:
      return true;
    default:
      return false;
  }
}

// Lexical token sequence: token-kind leaves in id (= preorder) order.
// Childless nonterminals (an empty params list or block) are not tokens.
std::vector<int> token_leaves(const std::vector<GraphNode>& nodes,
                              const std::vector<bool>& has_children) {
  std::vector<int> out;
  for (const GraphNode& n : nodes)
    if (!has_children[n.id] && is_token_kind(n.kind)) out.push_back(n.id);
  return out;
}

void append_edges(MethodGraph& g, const Ast& ast) {
  std::vector<bool> has_children(ast.size(), false);
  for (const AstNode& n : ast.nodes) {
    has_children[n.id] = !n.children.empty();
    for (int c : n.children) {
      g.edges.push_back({n.id, c, EdgeKind::Child});
      g.edges.push_back({c, n.id, EdgeKind::Parent});
    }
  }
  std::vector<int> toks = token_leaves(g.nodes, has_children);
  for (size_t i = 1; i < toks.size(); ++i) {
    g.edges.push_back({toks[i - 1], toks[i], EdgeKind::NextToken});
    g.edges.push_back({toks[i], toks[i - 1], EdgeKind::PrevToken});
  }
  std::map<std::string, std::vector<int>> uses;
  for (int id : toks)
    if (g.nodes[id].kind == NodeKind::Ident) uses[g.nodes[id].text].push_back(id);
  for (const auto& [text, ids] : uses) {
    for (size_t i = 1; i < ids.size(); ++i) {
      g.edges.push_back({ids[i - 1], ids[i], EdgeKind::NextUse});
      g.edges.push_back({ids[i], ids[i - 1], EdgeKind::LastUse});
    }
  }
}

int add_node(Ast& ast, NodeKind kind, std::string text = "") {
  int id = static_cast<int>(ast.nodes.size());
  ast.nodes.push_back({id, kind, std::move(text), {}});
  return id;
}

// A dotted path becomes a field-access chain so every component is an
// identifier leaf that can join use-chains.
int path_node(Ast& ast, const std::string& path) {
  size_t start = 0;
  int node = -1;
  while (start <= path.size()) {
    size_t dot = path.find('.', start);
    std::string part = path.substr(start, dot == std::string::npos ? dot : dot - start);
    int ident = add_node(ast, NodeKind::Ident, part);
    if (node < 0) {
      node = ident;
    } else {
      int field = add_node(ast, NodeKind::Field);
      ast.nodes[field].children = {node, ident};
      node = field;
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return node;
}

int term_node(Ast& ast, const inv::Term& t) {
  int core;
  switch (t.base) {
    case inv::TermBase::Var:
      core = path_node(ast, t.path);
      break;
    case inv::TermBase::Orig: {
      int inner = path_node(ast, t.path);
      core = add_node(ast, NodeKind::InvOrig);
      ast.nodes[core].children = {inner};
      break;
    }
    default:
      core = add_node(ast, NodeKind::InvReturn, "return");
      break;
  }
  if (!t.length) return core;
  int callee = add_node(ast, NodeKind::Ident, "len");
  int call = add_node(ast, NodeKind::Call);
  ast.nodes[call].children = {callee, core};
  return call;
}

int binary_node(Ast& ast, int lhs, const std::string& op, int rhs) {
  int opn = add_node(ast, NodeKind::Op, op);
  int bin = add_node(ast, NodeKind::Binary);
  ast.nodes[bin].children = {lhs, opn, rhs};
  return bin;
}

const char* rel_op_text(inv::RelOp op) {
  switch (op) {
    case inv::RelOp::Eq: return "==";
    case inv::RelOp::Lt: return "<";
    case inv::RelOp::Le: return "<=";
    case inv::RelOp::Gt: return ">";
    default: return ">=";
  }
}

int elem_pred_node(Ast& ast, const inv::Invariant& invar) {
  int elem = add_node(ast, NodeKind::Ident, "elem");
  switch (invar.elem_pred) {
    case inv::ElemPred::NotNull:
      return binary_node(ast, elem, "!=", add_node(ast, NodeKind::Null, "null"));
    case inv::ElemPred::StrEq:
      return binary_node(ast, elem, "==", add_node(ast, NodeKind::Str, invar.literal));
    case inv::ElemPred::NumEq:
      return binary_node(ast, elem, "==", add_node(ast, NodeKind::Int, std::to_string(invar.c)));
    case inv::ElemPred::NumGe:
      return binary_node(ast, elem, ">=", add_node(ast, NodeKind::Int, std::to_string(invar.c)));
    default:
      return binary_node(ast, elem, "<=", add_node(ast, NodeKind::Int, std::to_string(invar.c)));
  }
}

int invariant_expr(Ast& ast, const inv::Invariant& invar) {
  switch (invar.form) {
    case inv::Form::IsNull:
      return binary_node(ast, term_node(ast, invar.t1), "==",
                         add_node(ast, NodeKind::Null, "null"));
    case inv::Form::NotNull:
      return binary_node(ast, term_node(ast, invar.t1), "!=",
                         add_node(ast, NodeKind::Null, "null"));
    case inv::Form::StrEq:
      return binary_node(ast, term_node(ast, invar.t1), "==",
                         add_node(ast, NodeKind::Str, invar.literal));
    case inv::Form::NumEq:
      return binary_node(ast, term_node(ast, invar.t1), "==",
                         add_node(ast, NodeKind::Int, std::to_string(invar.c)));
    case inv::Form::NumGe:
      return binary_node(ast, term_node(ast, invar.t1), ">=",
                         add_node(ast, NodeKind::Int, std::to_string(invar.c)));
    case inv::Form::NumLe:
      return binary_node(ast, term_node(ast, invar.t1), "<=",
                         add_node(ast, NodeKind::Int, std::to_string(invar.c)));
    case inv::Form::AllElems: {
      int arr = term_node(ast, invar.t1);
      int pred = elem_pred_node(ast, invar);
      int n = add_node(ast, NodeKind::InvForall);
      ast.nodes[n].children = {arr, pred};
      return n;
    }
    case inv::Form::AnyElemNull: {
      int arr = term_node(ast, invar.t1);
      int elem = add_node(ast, NodeKind::Ident, "elem");
      int pred = binary_node(ast, elem, "==", add_node(ast, NodeKind::Null, "null"));
      int n = add_node(ast, NodeKind::InvExists);
      ast.nodes[n].children = {arr, pred};
      return n;
    }
    case inv::Form::RefEq:
      return binary_node(ast, term_node(ast, invar.t1), "==", term_node(ast, invar.t2));
    case inv::Form::Contains: {
      int elem = term_node(ast, invar.t1);
      int arr = term_node(ast, invar.t2);
      int n = add_node(ast, NodeKind::InvContains);
      ast.nodes[n].children = {elem, arr};
      return n;
    }
    default:
      return binary_node(ast, term_node(ast, invar.t1), rel_op_text(invar.op),
                         term_node(ast, invar.t2));
  }
}

}  // namespace

const char* edge_kind_name(EdgeKind k) {
  for (const auto& [kind, name] : kEdgeNames)
    if (kind == k) return name;
  return "unknown";
}

EdgeKind edge_kind_from_name(const std::string& name) {
  for (const auto& [kind, n] : kEdgeNames)
    if (name == n) return kind;
  throw FormatError("graph", "unknown edge kind '" + name + "'");
}

EdgeKind edge_kind_inverse(EdgeKind k) {
  switch (k) {
    case EdgeKind::NextToken: return EdgeKind::PrevToken;
    case EdgeKind::PrevToken: return EdgeKind::NextToken;
    case EdgeKind::Child: return EdgeKind::Parent;
    case EdgeKind::Parent: return EdgeKind::Child;
    case EdgeKind::NextUse: return EdgeKind::LastUse;
    default: return EdgeKind::NextUse;
  }
}

std::vector<std::string> subtokenize(const std::string& identifier) {
  std::vector<std::string> out;
  std::string piece;
  auto flush = [&] {
    if (!piece.empty()) out.push_back(piece);
    piece.clear();
  };
  for (size_t i = 0; i < identifier.size(); ++i) {
    unsigned char c = identifier[i];
    if (c == '_') {
      flush();
      continue;
    }
    if (i > 0 && std::islower(static_cast<unsigned char>(identifier[i - 1])) &&
        std::isupper(c))
      flush();
    piece.push_back(static_cast<char>(std::tolower(c)));
  }
  flush();
  return out;
}

MethodGraph build_graph(const Ast& ast, std::string method, std::string project) {
  if (ast.nodes.empty()) throw ForgeError("cannot build a graph from an empty ast");
  if (ast.size() > kMaxGraphNodes) throw MethodTooLarge(ast.size());
  MethodGraph g;
  g.method = std::move(method);
  g.project = std::move(project);
  g.nodes.reserve(ast.size());
  for (const AstNode& n : ast.nodes) g.nodes.push_back({n.id, n.kind, n.text});
  append_edges(g, ast);
  return g;
}

minilang::Ast graph_ast(const MethodGraph& graph) {
  Ast ast;
  ast.nodes.reserve(graph.nodes.size());
  for (const GraphNode& n : graph.nodes) ast.nodes.push_back({n.id, n.kind, n.text, {}});
  // Child edges were emitted parent-by-parent in child order, so replaying
  // them rebuilds each child list exactly.
  for (const Edge& e : graph.edges)
    if (e.kind == EdgeKind::Child) ast.nodes[e.src].children.push_back(e.dst);
  return ast;
}

MethodGraph inject_invariant(const MethodGraph& graph, const inv::Invariant& invar) {
  if (invar.method != graph.method)
    throw ForgeError("invariant for '" + invar.method + "' cannot be injected into '" +
                     graph.method + "'");
  for (const GraphNode& n : graph.nodes)
    if (n.kind == NodeKind::PreAnchor || n.kind == NodeKind::PostAnchor)
      throw ForgeError("graph already carries an injected invariant");

  Ast ast = graph_ast(graph);
  if (ast.root().kind != NodeKind::Function || ast.root().children.size() != 3)
    throw ForgeError("graph is not a method graph");
  int body = ast.root().children[2];
  if (ast.nodes[body].kind != NodeKind::Block)
    throw ForgeError("graph is not a method graph");

  int expr = invariant_expr(ast, invar);
  bool pre = invar.point == trace::Point::Entry;
  int anchor = add_node(ast, pre ? NodeKind::PreAnchor : NodeKind::PostAnchor);
  ast.nodes[anchor].children = {expr};
  auto& stmts = ast.nodes[body].children;
  if (pre)
    stmts.insert(stmts.begin(), anchor);
  else
    stmts.push_back(anchor);
  ast.renumber_preorder(0);

  MethodGraph out = build_graph(ast, graph.method, graph.project);
  // Preorder numbering makes the anchor's subtree one contiguous id range.
  for (const AstNode& n : ast.nodes) {
    if (n.kind != NodeKind::PreAnchor && n.kind != NodeKind::PostAnchor) continue;
    std::vector<int> stack(n.children.begin(), n.children.end());
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      out.invariant_nodes.insert(id);
      for (int c : ast.nodes[id].children) stack.push_back(c);
    }
  }
  return out;
}

MethodGraph invariant_graph(const inv::Invariant& invar, std::string project) {
  Ast ast;
  int expr = invariant_expr(ast, invar);
  ast.renumber_preorder(expr);
  MethodGraph g = build_graph(ast, invar.method, std::move(project));
  for (const GraphNode& n : g.nodes) g.invariant_nodes.insert(n.id);
  return g;
}

Json MethodGraph::to_json() const {
  Json v = Json::object();
  v["method"] = method;
  v["project"] = project;
  Json ns = Json::array();
  for (const GraphNode& n : nodes)
    ns.push_back(Json::array({n.id, node_kind_name(n.kind), n.text}));
  v["nodes"] = std::move(ns);
  Json es = Json::array();
  for (const Edge& e : edges) es.push_back(Json::array({e.src, e.dst, edge_kind_name(e.kind)}));
  v["edges"] = std::move(es);
  v["invariant_nodes"] = invariant_nodes;
  if (label) v["label"] = *label ? "valid" : "invalid";
  if (score) v["score"] = *score;
  return v;
}

MethodGraph MethodGraph::from_json(const Json& v, const std::string& where) {
  if (!v.is_object()) throw FormatError(where, "graph record must be an object");
  for (const char* f : {"method", "project", "nodes", "edges", "invariant_nodes"})
    if (!v.contains(f)) throw FormatError(where, std::string("missing '") + f + "'");
  MethodGraph g;
  if (!v["method"].is_string() || !v["project"].is_string())
    throw FormatError(where, "method/project must be strings");
  g.method = v["method"].get<std::string>();
  g.project = v["project"].get<std::string>();
  if (!v["nodes"].is_array() || v["nodes"].empty())
    throw FormatError(where, "nodes must be a non-empty array");
  for (const Json& n : v["nodes"]) {
    if (!n.is_array() || n.size() != 3 || !n[0].is_number_integer() || !n[1].is_string() ||
        !n[2].is_string())
      throw FormatError(where, "node must be [id, kind, text]");
    GraphNode node;
    node.id = n[0].get<int>();
    node.kind = minilang::node_kind_from_name(n[1].get<std::string>());
    node.text = n[2].get<std::string>();
    if (node.id != static_cast<int>(g.nodes.size()))
      throw FormatError(where, "node ids must be 0..n-1 in order");
    g.nodes.push_back(std::move(node));
  }
  if (g.nodes.size() > kMaxGraphNodes) throw MethodTooLarge(g.nodes.size());
  int n = static_cast<int>(g.nodes.size());
  if (!v["edges"].is_array()) throw FormatError(where, "edges must be an array");
  for (const Json& e : v["edges"]) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
        !e[1].is_number_integer() || !e[2].is_string())
      throw FormatError(where, "edge must be [src, dst, kind]");
    Edge edge;
    edge.src = e[0].get<int>();
    edge.dst = e[1].get<int>();
    edge.kind = edge_kind_from_name(e[2].get<std::string>());
    if (edge.src < 0 || edge.src >= n || edge.dst < 0 || edge.dst >= n)
      throw FormatError(where, "edge endpoint out of range");
    g.edges.push_back(edge);
  }
  if (!v["invariant_nodes"].is_array())
    throw FormatError(where, "invariant_nodes must be an array");
  for (const Json& id : v["invariant_nodes"]) {
    if (!id.is_number_integer() || id.get<int>() < 0 || id.get<int>() >= n)
      throw FormatError(where, "invariant node id out of range");
    g.invariant_nodes.insert(id.get<int>());
  }
  if (v.contains("label")) {
    std::string label = v["label"].is_string() ? v["label"].get<std::string>() : "";
    if (label != "valid" && label != "invalid")
      throw FormatError(where, "label must be valid|invalid");
    g.label = label == "valid";
  }
  if (v.contains("score")) {
    if (!v["score"].is_number()) throw FormatError(where, "score must be a number");
    g.score = v["score"].get<double>();
  }
  return g;
}

int Vocabulary::subtoken_index(const std::string& s) const {
  auto it = subtokens.find(s);
  return it == subtokens.end() ? unknown : it->second;
}

Vocabulary build_vocab(const std::vector<MethodGraph>& training) {
  Vocabulary vocab;
  for (const MethodGraph& g : training)
    for (const GraphNode& n : g.nodes)
      for (const std::string& tok : subtokenize(n.text)) ++vocab.counts[tok];

  std::vector<std::pair<std::string, int64_t>> keep;
  for (const auto& [tok, count] : vocab.counts)
    if (count >= 2) keep.push_back({tok, count});
  std::sort(keep.begin(), keep.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  int next = 1;
  for (const auto& [tok, count] : keep) vocab.subtokens[tok] = next++;

  int k = 0;
  for (NodeKind kind : minilang::all_node_kinds()) vocab.kinds[node_kind_name(kind)] = k++;
  return vocab;
}

Json Vocabulary::to_json() const {
  Json v = Json::object();
  v["unknown"] = unknown;
  Json subs = Json::array();
  std::vector<std::pair<int, std::string>> ordered;
  for (const auto& [tok, idx] : subtokens) ordered.push_back({idx, tok});
  std::sort(ordered.begin(), ordered.end());
  for (const auto& [idx, tok] : ordered)
    subs.push_back(Json::array({tok, idx, counts.at(tok)}));
  v["subtokens"] = std::move(subs);
  Json dropped = Json::object();
  for (const auto& [tok, count] : counts)
    if (!subtokens.count(tok)) dropped[tok] = count;
  v["dropped"] = std::move(dropped);
  Json ks = Json::object();
  for (const auto& [name, idx] : kinds) ks[name] = idx;
  v["kinds"] = std::move(ks);
  return v;
}

Vocabulary Vocabulary::from_json(const Json& v, const std::string& where) {
  if (!v.is_object() || !v.contains("subtokens") || !v.contains("kinds"))
    throw FormatError(where, "vocabulary must hold subtokens and kinds");
  Vocabulary vocab;
  if (v.contains("unknown") && (!v["unknown"].is_number_integer() || v["unknown"] != 0))
    throw FormatError(where, "unknown index must be 0");
  if (!v["subtokens"].is_array()) throw FormatError(where, "subtokens must be an array");
  for (const Json& row : v["subtokens"]) {
    if (!row.is_array() || row.size() != 3 || !row[0].is_string() ||
        !row[1].is_number_integer() || !row[2].is_number_integer())
      throw FormatError(where, "subtoken row must be [token, index, count]");
    std::string tok = row[0].get<std::string>();
    int idx = row[1].get<int>();
    // Embeddings are sized from the map, so indices must be exactly 1..n.
    if (idx != static_cast<int>(vocab.subtokens.size()) + 1 || vocab.subtokens.count(tok))
      throw FormatError(where, "bad subtoken index for '" + tok + "'");
    vocab.subtokens[tok] = idx;
    vocab.counts[tok] = row[2].get<int64_t>();
  }
  if (v.contains("dropped")) {
    if (!v["dropped"].is_object()) throw FormatError(where, "dropped must be an object");
    for (const auto& [tok, count] : v["dropped"].items()) {
      if (!count.is_number_integer()) throw FormatError(where, "dropped counts must be integers");
      vocab.counts[tok] = count.get<int64_t>();
    }
  }
  if (!v["kinds"].is_object()) throw FormatError(where, "kinds must be an object");
  for (const auto& [name, idx] : v["kinds"].items()) {
    minilang::node_kind_from_name(name);
    if (!idx.is_number_integer()) throw FormatError(where, "kind index must be an integer");
    vocab.kinds[name] = idx.get<int>();
  }
  return vocab;
}

void write_graphs(const std::string& path, const std::vector<MethodGraph>& graphs) {
  std::vector<Json> lines;
  lines.reserve(graphs.size());
  for (const MethodGraph& g : graphs) lines.push_back(g.to_json());
  write_jsonl(path, lines);
}

std::vector<MethodGraph> read_graphs(const std::string& path) {
  std::vector<MethodGraph> out;
  read_jsonl(path, [&](size_t lineno, const Json& v) {
    out.push_back(MethodGraph::from_json(v, path + ":" + std::to_string(lineno)));
  });
  return out;
}

}  // namespace forge::graphs
