#include "forge/minilang/interp.hpp"

#include <cmath>

#include "forge/minilang/errors.hpp"
#include "forge/minilang/sampling.hpp"

namespace forge::minilang {

Value Value::make_int(int64_t v) {
  Value x;
  x.kind = Kind::Int;
  x.i = v;
  return x;
}
Value Value::make_float(double v) {
  Value x;
  x.kind = Kind::Float;
  x.f = v;
  return x;
}
Value Value::make_str(std::string v) {
  Value x;
  x.kind = Kind::Str;
  x.s = std::move(v);
  return x;
}
Value Value::make_null() { return Value{}; }

Value* Obj::find(const std::string& name) {
  for (auto& [f, v] : fields)
    if (f == name) return &v;
  return nullptr;
}

size_t ExecutionReport::failures() const {
  size_t n = 0;
  for (const TestResult& r : results)
    if (!r.passed) ++n;
  return n;
}

namespace {

constexpr uint64_t kStepLimit = 10'000'000;

// Two's-complement wraparound without signed-overflow UB.
int64_t wrap_add(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) + static_cast<uint64_t>(b));
}
int64_t wrap_sub(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) - static_cast<uint64_t>(b));
}
int64_t wrap_mul(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) * static_cast<uint64_t>(b));
}

const char* kind_word(Value::Kind k) {
  switch (k) {
    case Value::Kind::Int: return "int";
    case Value::Kind::Float: return "float";
    case Value::Kind::Str: return "string";
    case Value::Kind::Null: return "null";
    case Value::Kind::Object: return "object";
    case Value::Kind::Array: return "array";
  }
  return "value";
}

class Interp {
 public:
  Interp(const Program& program, TraceSink& sink) : program_(program), sink_(sink) {}

  void run_test(const std::string& name) {
    current_test_ = name;
    steps_ = 0;
    depth_ = 0;  // a prior test may have unwound mid-call
    call_function(name, {});
  }

  std::map<std::string, uint64_t> calls;
  std::map<std::string, uint64_t> traced;

 private:
  using Env = std::map<std::string, Value>;

  struct Flow {
    bool returned = false;
    Value value;
  };

  void step() {
    if (++steps_ > kStepLimit) throw RuntimeError("step limit exceeded");
  }

  Value call_function(const std::string& name, std::vector<Value> args) {
    const FunctionDecl* fn = program_.find(name);
    if (!fn) throw RuntimeError("unknown function '" + name + "'");
    if (args.size() != fn->params.size())
      throw RuntimeError("function '" + name + "' expects " +
                         std::to_string(fn->params.size()) + " arguments, got " +
                         std::to_string(args.size()));
    if (++depth_ > 200) {
      --depth_;
      throw RuntimeError("call depth limit exceeded");
    }

    Env env;
    for (size_t i = 0; i < args.size(); ++i) env[fn->params[i]] = std::move(args[i]);

    bool instrument = program_.core.count(name) > 0;
    uint64_t call_index = 0;
    bool trace_this = false;
    std::vector<trace::ValueSnapshot> entry_snaps;
    if (instrument) {
      call_index = ++calls[name];
      trace_this = sample_decision(call_index);
      if (trace_this) {
        ++traced[name];
        entry_snaps = snapshot_params(*fn, env);
        emit(name, trace::Point::Entry, call_index, entry_snaps);
      }
    }

    const Ast& ast = fn->ast;
    int block = ast.root().children[2];
    Flow flow = exec_block(ast, block, env);
    Value ret = flow.returned ? std::move(flow.value) : Value::make_null();

    if (trace_this) {
      std::vector<trace::ValueSnapshot> vars = snapshot_params(*fn, env);
      for (trace::ValueSnapshot s : entry_snaps) {
        s.path = "orig(" + s.path + ")";
        vars.push_back(std::move(s));
      }
      vars.push_back(snapshot_value("return", ret));
      emit(name, trace::Point::Exit, call_index, std::move(vars));
    }
    --depth_;
    return ret;
  }

  void emit(const std::string& method, trace::Point point, uint64_t call_index,
            std::vector<trace::ValueSnapshot> vars) {
    trace::TraceRecord r;
    r.test = current_test_;
    r.method = method;
    r.point = point;
    r.call_index = call_index;
    r.vars = std::move(vars);
    sink_.on_record(std::move(r));
  }

  std::vector<trace::ValueSnapshot> snapshot_params(const FunctionDecl& fn, const Env& env) {
    std::vector<trace::ValueSnapshot> out;
    for (const std::string& p : fn.params) {
      auto it = env.find(p);
      // Params can be rebound but never removed.
      flatten(p, it->second, 0, out);
    }
    return out;
  }

  // Object graphs flatten to dotted paths of depth <= 2; deeper structure is
  // dropped. Arrays snapshot their elements in place (objects and nested
  // arrays as identity ids). An array whose elements mix scalar kinds cannot
  // be represented, so it degrades to a bare identity snapshot.
  void flatten(const std::string& path, const Value& v, int depth,
               std::vector<trace::ValueSnapshot>& out) {
    if (v.kind == Value::Kind::Object) {
      trace::ValueSnapshot s;
      s.path = path;
      s.kind = trace::SnapKind::Object;
      s.object_id = v.obj->id;
      out.push_back(std::move(s));
      if (depth < 2)
        for (const auto& [f, fv] : v.obj->fields) flatten(path + "." + f, fv, depth + 1, out);
      return;
    }
    out.push_back(snapshot_value(path, v));
  }

  trace::ValueSnapshot snapshot_value(const std::string& path, const Value& v) {
    trace::ValueSnapshot s;
    s.path = path;
    switch (v.kind) {
      case Value::Kind::Int:
        s.kind = trace::SnapKind::Int;
        s.int_value = v.i;
        break;
      case Value::Kind::Float:
        s.kind = trace::SnapKind::Float;
        s.float_value = v.f;
        break;
      case Value::Kind::Str:
        s.kind = trace::SnapKind::String;
        s.string_value = v.s;
        break;
      case Value::Kind::Null:
        s.kind = trace::SnapKind::Null;
        break;
      case Value::Kind::Object:
        s.kind = trace::SnapKind::Object;
        s.object_id = v.obj->id;
        break;
      case Value::Kind::Array: {
        trace::SnapKind elem_kind = trace::SnapKind::Null;
        bool seen = false, mixed = false;
        for (const Value& e : v.arr->elems) {
          trace::SnapKind k;
          switch (e.kind) {
            case Value::Kind::Int: k = trace::SnapKind::Int; break;
            case Value::Kind::Float: k = trace::SnapKind::Float; break;
            case Value::Kind::Str: k = trace::SnapKind::String; break;
            case Value::Kind::Null: continue;
            default: k = trace::SnapKind::Object; break;
          }
          if (seen && k != elem_kind) {
            mixed = true;
            break;
          }
          elem_kind = k;
          seen = true;
        }
        if (mixed) {
          s.kind = trace::SnapKind::Object;
          s.object_id = v.arr->id;
          break;
        }
        s.kind = trace::SnapKind::Array;
        for (const Value& e : v.arr->elems) {
          trace::ValueSnapshot es;
          switch (e.kind) {
            case Value::Kind::Int: es.kind = trace::SnapKind::Int; es.int_value = e.i; break;
            case Value::Kind::Float: es.kind = trace::SnapKind::Float; es.float_value = e.f; break;
            case Value::Kind::Str: es.kind = trace::SnapKind::String; es.string_value = e.s; break;
            case Value::Kind::Null: es.kind = trace::SnapKind::Null; break;
            case Value::Kind::Object: es.kind = trace::SnapKind::Object; es.object_id = e.obj->id; break;
            case Value::Kind::Array: es.kind = trace::SnapKind::Object; es.object_id = e.arr->id; break;
          }
          s.elements.push_back(std::move(es));
        }
        break;
      }
    }
    return s;
  }

  Flow exec_block(const Ast& ast, int block, Env& env) {
    for (int stmt : ast.nodes[block].children) {
      Flow f = exec_stmt(ast, stmt, env);
      if (f.returned) return f;
    }
    return {};
  }

  Flow exec_stmt(const Ast& ast, int id, Env& env) {
    step();
    const AstNode& n = ast.nodes[id];
    switch (n.kind) {
      case NodeKind::Assign: {
        Value v = eval(ast, n.children[1], env);
        assign(ast, n.children[0], std::move(v), env);
        return {};
      }
      case NodeKind::ExprStmt:
        eval(ast, n.children[0], env);
        return {};
      case NodeKind::Return: {
        Flow f;
        f.returned = true;
        f.value = n.children.empty() ? Value::make_null() : eval(ast, n.children[0], env);
        return f;
      }
      case NodeKind::If: {
        if (truthy(eval(ast, n.children[0], env))) return exec_block(ast, n.children[1], env);
        if (n.children.size() == 3) {
          const AstNode& alt = ast.nodes[n.children[2]];
          if (alt.kind == NodeKind::If) return exec_stmt(ast, n.children[2], env);
          return exec_block(ast, n.children[2], env);
        }
        return {};
      }
      case NodeKind::While: {
        while (truthy(eval(ast, n.children[0], env))) {
          step();
          Flow f = exec_block(ast, n.children[1], env);
          if (f.returned) return f;
        }
        return {};
      }
      default:
        throw RuntimeError("malformed statement node");
    }
  }

  void assign(const Ast& ast, int target, Value v, Env& env) {
    const AstNode& t = ast.nodes[target];
    switch (t.kind) {
      case NodeKind::Ident:
        env[t.text] = std::move(v);
        return;
      case NodeKind::Field: {
        Value base = eval(ast, t.children[0], env);
        if (base.kind == Value::Kind::Null) throw RuntimeError("field write on null");
        if (base.kind != Value::Kind::Object)
          throw RuntimeError(std::string("field write on ") + kind_word(base.kind));
        const std::string& fname = ast.nodes[t.children[1]].text;
        Value* slot = base.obj->find(fname);
        if (!slot) throw RuntimeError("unknown field '" + fname + "'");
        *slot = std::move(v);
        return;
      }
      case NodeKind::Index: {
        Value base = eval(ast, t.children[0], env);
        Value idx = eval(ast, t.children[1], env);
        if (base.kind == Value::Kind::Null) throw RuntimeError("index write on null");
        if (base.kind != Value::Kind::Array)
          throw RuntimeError(std::string("index write on ") + kind_word(base.kind));
        if (idx.kind != Value::Kind::Int) throw RuntimeError("array index must be int");
        if (idx.i < 0 || static_cast<size_t>(idx.i) >= base.arr->elems.size())
          throw RuntimeError("array index out of range");
        base.arr->elems[static_cast<size_t>(idx.i)] = std::move(v);
        return;
      }
      default:
        throw RuntimeError("invalid assignment target");
    }
  }

  bool truthy(const Value& v) {
    if (v.kind != Value::Kind::Int)
      throw RuntimeError(std::string("condition must be int, got ") + kind_word(v.kind));
    return v.i != 0;
  }

  Value eval(const Ast& ast, int id, Env& env) {
    step();
    const AstNode& n = ast.nodes[id];
    switch (n.kind) {
      case NodeKind::Int:
        try {
          return Value::make_int(std::stoll(n.text));
        } catch (const std::out_of_range&) {
          throw RuntimeError("integer literal out of range: " + n.text);
        }
      case NodeKind::Float:
        return Value::make_float(std::stod(n.text));
      case NodeKind::Str:
        return Value::make_str(n.text);
      case NodeKind::Null:
        return Value::make_null();
      case NodeKind::Ident: {
        auto it = env.find(n.text);
        if (it == env.end()) throw RuntimeError("unbound variable '" + n.text + "'");
        return it->second;
      }
      case NodeKind::Record: {
        auto obj = std::make_shared<Obj>();
        obj->id = ++next_identity_;
        for (int fi : n.children) {
          const AstNode& f = ast.nodes[fi];
          obj->fields.emplace_back(ast.nodes[f.children[0]].text,
                                   eval(ast, f.children[1], env));
        }
        Value v;
        v.kind = Value::Kind::Object;
        v.obj = std::move(obj);
        return v;
      }
      case NodeKind::Array: {
        auto arr = std::make_shared<Arr>();
        arr->id = ++next_identity_;
        for (int e : n.children) arr->elems.push_back(eval(ast, e, env));
        Value v;
        v.kind = Value::Kind::Array;
        v.arr = std::move(arr);
        return v;
      }
      case NodeKind::Field: {
        Value base = eval(ast, n.children[0], env);
        if (base.kind == Value::Kind::Null) throw RuntimeError("field read on null");
        if (base.kind != Value::Kind::Object)
          throw RuntimeError(std::string("field read on ") + kind_word(base.kind));
        const std::string& fname = ast.nodes[n.children[1]].text;
        Value* slot = base.obj->find(fname);
        if (!slot) throw RuntimeError("unknown field '" + fname + "'");
        return *slot;
      }
      case NodeKind::Index: {
        Value base = eval(ast, n.children[0], env);
        Value idx = eval(ast, n.children[1], env);
        if (base.kind == Value::Kind::Null) throw RuntimeError("index read on null");
        if (base.kind != Value::Kind::Array)
          throw RuntimeError(std::string("index read on ") + kind_word(base.kind));
        if (idx.kind != Value::Kind::Int) throw RuntimeError("array index must be int");
        if (idx.i < 0 || static_cast<size_t>(idx.i) >= base.arr->elems.size())
          throw RuntimeError("array index out of range");
        return base.arr->elems[static_cast<size_t>(idx.i)];
      }
      case NodeKind::Call: {
        const AstNode& callee = ast.nodes[n.children[0]];
        if (callee.kind != NodeKind::Ident)
          throw RuntimeError("call target must be a function name");
        std::vector<Value> args;
        for (size_t i = 1; i < n.children.size(); ++i)
          args.push_back(eval(ast, n.children[i], env));
        if (callee.text == "len") {
          if (args.size() != 1) throw RuntimeError("len expects 1 argument");
          const Value& a = args[0];
          if (a.kind == Value::Kind::Array)
            return Value::make_int(static_cast<int64_t>(a.arr->elems.size()));
          if (a.kind == Value::Kind::Str)
            return Value::make_int(static_cast<int64_t>(a.s.size()));
          throw RuntimeError(std::string("len of ") + kind_word(a.kind));
        }
        return call_function(callee.text, std::move(args));
      }
      case NodeKind::Unary: {
        const std::string& op = ast.nodes[n.children[0]].text;
        Value v = eval(ast, n.children[1], env);
        if (op == "-") {
          if (v.kind == Value::Kind::Int) return Value::make_int(wrap_sub(0, v.i));
          if (v.kind == Value::Kind::Float) return Value::make_float(-v.f);
          throw RuntimeError(std::string("negation of ") + kind_word(v.kind));
        }
        // op == "!"
        if (v.kind != Value::Kind::Int)
          throw RuntimeError(std::string("'!' needs int, got ") + kind_word(v.kind));
        return Value::make_int(v.i == 0 ? 1 : 0);
      }
      case NodeKind::Binary: {
        const std::string& op = ast.nodes[n.children[1]].text;
        if (op == "&&") {
          Value l = eval(ast, n.children[0], env);
          if (!truthy(l)) return Value::make_int(0);
          return Value::make_int(truthy(eval(ast, n.children[2], env)) ? 1 : 0);
        }
        if (op == "||") {
          Value l = eval(ast, n.children[0], env);
          if (truthy(l)) return Value::make_int(1);
          return Value::make_int(truthy(eval(ast, n.children[2], env)) ? 1 : 0);
        }
        Value l = eval(ast, n.children[0], env);
        Value r = eval(ast, n.children[2], env);
        return binary_op(op, std::move(l), std::move(r));
      }
      default:
        throw RuntimeError("malformed expression node");
    }
  }

  Value binary_op(const std::string& op, Value l, Value r) {
    bool num = (l.kind == Value::Kind::Int || l.kind == Value::Kind::Float) &&
               (r.kind == Value::Kind::Int || r.kind == Value::Kind::Float);
    if (op == "==" || op == "!=") {
      bool eq = values_equal(l, r);
      return Value::make_int((op == "==") == eq ? 1 : 0);
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      if (!num)
        throw RuntimeError("comparison needs numbers, got " +
                           std::string(kind_word(l.kind)) + " and " + kind_word(r.kind));
      double a = l.kind == Value::Kind::Int ? static_cast<double>(l.i) : l.f;
      double b = r.kind == Value::Kind::Int ? static_cast<double>(r.i) : r.f;
      if (l.kind == Value::Kind::Int && r.kind == Value::Kind::Int) {
        if (op == "<") return Value::make_int(l.i < r.i);
        if (op == "<=") return Value::make_int(l.i <= r.i);
        if (op == ">") return Value::make_int(l.i > r.i);
        return Value::make_int(l.i >= r.i);
      }
      if (op == "<") return Value::make_int(a < b);
      if (op == "<=") return Value::make_int(a <= b);
      if (op == ">") return Value::make_int(a > b);
      return Value::make_int(a >= b);
    }
    if (!num)
      throw RuntimeError("arithmetic needs numbers, got " +
                         std::string(kind_word(l.kind)) + " and " + kind_word(r.kind));
    if (l.kind == Value::Kind::Int && r.kind == Value::Kind::Int) {
      if (op == "+") return Value::make_int(wrap_add(l.i, r.i));
      if (op == "-") return Value::make_int(wrap_sub(l.i, r.i));
      if (op == "*") return Value::make_int(wrap_mul(l.i, r.i));
      if (r.i == 0) throw RuntimeError("division by zero");
      if (l.i == INT64_MIN && r.i == -1)
        return op == "/" ? Value::make_int(INT64_MIN) : Value::make_int(0);
      if (op == "/") return Value::make_int(l.i / r.i);
      return Value::make_int(l.i % r.i);
    }
    if (op == "%") throw RuntimeError("'%' needs ints");
    double a = l.kind == Value::Kind::Int ? static_cast<double>(l.i) : l.f;
    double b = r.kind == Value::Kind::Int ? static_cast<double>(r.i) : r.f;
    if (op == "+") return Value::make_float(a + b);
    if (op == "-") return Value::make_float(a - b);
    if (op == "*") return Value::make_float(a * b);
    if (b == 0.0) throw RuntimeError("division by zero");
    return Value::make_float(a / b);
  }

  bool values_equal(const Value& l, const Value& r) {
    bool lnum = l.kind == Value::Kind::Int || l.kind == Value::Kind::Float;
    bool rnum = r.kind == Value::Kind::Int || r.kind == Value::Kind::Float;
    if (lnum && rnum) {
      if (l.kind == Value::Kind::Int && r.kind == Value::Kind::Int) return l.i == r.i;
      double a = l.kind == Value::Kind::Int ? static_cast<double>(l.i) : l.f;
      double b = r.kind == Value::Kind::Int ? static_cast<double>(r.i) : r.f;
      return a == b;
    }
    if (l.kind != r.kind) return false;
    switch (l.kind) {
      case Value::Kind::Null: return true;
      case Value::Kind::Str: return l.s == r.s;
      case Value::Kind::Object: return l.obj->id == r.obj->id;
      case Value::Kind::Array: return l.arr->id == r.arr->id;
      default: return false;
    }
  }

  const Program& program_;
  TraceSink& sink_;
  std::string current_test_;
  uint64_t steps_ = 0;
  uint64_t next_identity_ = 0;
  int depth_ = 0;
};

}  // namespace

ExecutionReport run_tests(const Program& program, const std::set<std::string>& selected,
                          TraceSink& sink, uint64_t seed) {
  for (const std::string& t : selected)
    if (!program.tests.count(t)) throw ForgeError("'" + t + "' is not a test function");

  ExecutionReport report;
  report.seed = seed;
  Interp interp(program, sink);
  for (const std::string& t : selected) {  // std::set iterates sorted
    TestResult res;
    res.test = t;
    try {
      interp.run_test(t);
      res.passed = true;
    } catch (const RuntimeError& e) {
      res.passed = false;
      res.error = e.what();
    }
    report.results.push_back(std::move(res));
  }
  report.calls = interp.calls;
  report.traced = interp.traced;
  return report;
}

}  // namespace forge::minilang
