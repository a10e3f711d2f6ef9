#include "forge/invariants/invariant.hpp"

#include "forge/error.hpp"

namespace forge::inv {

std::string Term::record_path() const {
  switch (base) {
    case TermBase::Var: return path;
    case TermBase::Orig: return "orig(" + path + ")";
    case TermBase::Ret: return "return";
  }
  return path;
}

std::string Term::render() const {
  std::string inner = record_path();
  return length ? "len(" + inner + ")" : inner;
}

Term Term::var(std::string path, bool length) {
  Term t;
  t.base = TermBase::Var;
  t.path = std::move(path);
  t.length = length;
  return t;
}
Term Term::orig(std::string path, bool length) {
  Term t;
  t.base = TermBase::Orig;
  t.path = std::move(path);
  t.length = length;
  return t;
}
Term Term::ret(bool length) {
  Term t;
  t.base = TermBase::Ret;
  t.length = length;
  return t;
}

Term Term::from_record_path(const std::string& path, bool length) {
  if (path == "return") return ret(length);
  if (path.rfind("orig(", 0) == 0 && path.size() > 6 && path.back() == ')')
    return orig(path.substr(5, path.size() - 6), length);
  return var(path, length);
}

namespace {

std::string quote(const std::string& s) { return Json(s).dump(); }

std::string elem_pred_expr(const Invariant& inv) {
  switch (inv.elem_pred) {
    case ElemPred::NotNull: return "elem != null";
    case ElemPred::StrEq: return "elem == " + quote(inv.literal);
    case ElemPred::NumEq: return "elem == " + std::to_string(inv.c);
    case ElemPred::NumGe: return "elem >= " + std::to_string(inv.c);
    case ElemPred::NumLe: return "elem <= " + std::to_string(inv.c);
  }
  return "";
}

const char* rel_op_text(RelOp op) {
  switch (op) {
    case RelOp::Eq: return "==";
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
  }
  return "?";
}

}  // namespace

std::string Invariant::render_expr() const {
  switch (form) {
    case Form::IsNull: return t1.render() + " == null";
    case Form::NotNull: return t1.render() + " != null";
    case Form::StrEq: return t1.render() + " == " + quote(literal);
    case Form::NumEq: return t1.render() + " == " + std::to_string(c);
    case Form::NumGe: return t1.render() + " >= " + std::to_string(c);
    case Form::NumLe: return t1.render() + " <= " + std::to_string(c);
    case Form::AllElems: return "forall(" + t1.render() + ", " + elem_pred_expr(*this) + ")";
    case Form::AnyElemNull: return "exists(" + t1.render() + ", elem == null)";
    case Form::RefEq: return t1.render() + " == " + t2.render();
    case Form::Contains: return t1.render() + " in " + t2.render();
    case Form::Rel:
      return t1.render() + " " + rel_op_text(op) + " " + t2.render();
  }
  return "";
}

std::string Invariant::render() const {
  return std::string(point == trace::Point::Entry ? "pre " : "post ") + method +
         ": " + render_expr();
}

// ---- factories ----

namespace {
Invariant base_inv(Form f, std::string m, trace::Point p, Term t) {
  Invariant v;
  v.form = f;
  v.method = std::move(m);
  v.point = p;
  v.t1 = std::move(t);
  return v;
}
}  // namespace

Invariant Invariant::is_null(std::string m, trace::Point p, Term t) {
  return base_inv(Form::IsNull, std::move(m), p, std::move(t));
}
Invariant Invariant::not_null(std::string m, trace::Point p, Term t) {
  return base_inv(Form::NotNull, std::move(m), p, std::move(t));
}
Invariant Invariant::str_eq(std::string m, trace::Point p, Term t, std::string lit) {
  Invariant v = base_inv(Form::StrEq, std::move(m), p, std::move(t));
  v.literal = std::move(lit);
  return v;
}
Invariant Invariant::num(Form f, std::string m, trace::Point p, Term t, int64_t c) {
  Invariant v = base_inv(f, std::move(m), p, std::move(t));
  v.c = c;
  return v;
}
Invariant Invariant::all_elems_not_null(std::string m, trace::Point p, Term arr) {
  Invariant v = base_inv(Form::AllElems, std::move(m), p, std::move(arr));
  v.elem_pred = ElemPred::NotNull;
  return v;
}
Invariant Invariant::all_elems_str_eq(std::string m, trace::Point p, Term arr, std::string lit) {
  Invariant v = base_inv(Form::AllElems, std::move(m), p, std::move(arr));
  v.elem_pred = ElemPred::StrEq;
  v.literal = std::move(lit);
  return v;
}
Invariant Invariant::all_elems_num(ElemPred pred, std::string m, trace::Point p, Term arr, int64_t c) {
  Invariant v = base_inv(Form::AllElems, std::move(m), p, std::move(arr));
  v.elem_pred = pred;
  v.c = c;
  return v;
}
Invariant Invariant::any_elem_null(std::string m, trace::Point p, Term arr) {
  return base_inv(Form::AnyElemNull, std::move(m), p, std::move(arr));
}
Invariant Invariant::ref_eq(std::string m, trace::Point p, Term a, Term b) {
  Invariant v = base_inv(Form::RefEq, std::move(m), p, std::move(a));
  v.t2 = std::move(b);
  return v;
}
Invariant Invariant::contains(std::string m, trace::Point p, Term elem, Term arr) {
  Invariant v = base_inv(Form::Contains, std::move(m), p, std::move(elem));
  v.t2 = std::move(arr);
  return v;
}
Invariant Invariant::rel(std::string m, trace::Point p, Term a, RelOp op, Term b) {
  Invariant v = base_inv(Form::Rel, std::move(m), p, std::move(a));
  v.t2 = std::move(b);
  v.op = op;
  return v;
}

// ---- evaluation ----

namespace {

// Numeric view of a resolved term: exact for ints and lengths, double for
// floats. Kind mismatches yield no view.
struct NumView {
  bool is_int = false;
  int64_t i = 0;
  double d = 0.0;
};

const trace::ValueSnapshot* resolve(const Term& t, const trace::TraceRecord& r) {
  return r.find(t.record_path());
}

bool num_view(const Term& t, const trace::TraceRecord& r, NumView& out) {
  const trace::ValueSnapshot* s = resolve(t, r);
  if (!s) return false;
  if (t.length) {
    if (s->kind != trace::SnapKind::Array) return false;
    out.is_int = true;
    out.i = static_cast<int64_t>(s->elements.size());
    out.d = static_cast<double>(out.i);
    return true;
  }
  if (s->kind == trace::SnapKind::Int) {
    out.is_int = true;
    out.i = s->int_value;
    out.d = static_cast<double>(s->int_value);
    return true;
  }
  if (s->kind == trace::SnapKind::Float) {
    out.is_int = false;
    out.d = s->float_value;
    return true;
  }
  return false;
}

bool num_cmp(const NumView& a, RelOp op, const NumView& b) {
  if (a.is_int && b.is_int) {
    switch (op) {
      case RelOp::Eq: return a.i == b.i;
      case RelOp::Lt: return a.i < b.i;
      case RelOp::Le: return a.i <= b.i;
      case RelOp::Gt: return a.i > b.i;
      case RelOp::Ge: return a.i >= b.i;
    }
  }
  switch (op) {
    case RelOp::Eq: return a.d == b.d;
    case RelOp::Lt: return a.d < b.d;
    case RelOp::Le: return a.d <= b.d;
    case RelOp::Gt: return a.d > b.d;
    case RelOp::Ge: return a.d >= b.d;
  }
  return false;
}

NumView const_view(int64_t c) {
  NumView v;
  v.is_int = true;
  v.i = c;
  v.d = static_cast<double>(c);
  return v;
}

bool elem_satisfies(const Invariant& inv, const trace::ValueSnapshot& e) {
  switch (inv.elem_pred) {
    case ElemPred::NotNull:
      return e.kind != trace::SnapKind::Null;
    case ElemPred::StrEq:
      return e.kind == trace::SnapKind::String && e.string_value == inv.literal;
    case ElemPred::NumEq:
    case ElemPred::NumGe:
    case ElemPred::NumLe: {
      NumView v;
      if (e.kind == trace::SnapKind::Int) {
        v = const_view(e.int_value);
      } else if (e.kind == trace::SnapKind::Float) {
        v.is_int = false;
        v.d = e.float_value;
      } else {
        return false;
      }
      RelOp op = inv.elem_pred == ElemPred::NumEq   ? RelOp::Eq
                 : inv.elem_pred == ElemPred::NumGe ? RelOp::Ge
                                                    : RelOp::Le;
      return num_cmp(v, op, const_view(inv.c));
    }
  }
  return false;
}

}  // namespace

bool evaluate(const Invariant& inv, const trace::TraceRecord& r) {
  switch (inv.form) {
    case Form::IsNull: {
      const auto* s = resolve(inv.t1, r);
      if (!s) return false;
      if (inv.t1.length) return false;  // a length is never null
      return s->kind == trace::SnapKind::Null;
    }
    case Form::NotNull: {
      const auto* s = resolve(inv.t1, r);
      if (!s) return false;
      if (inv.t1.length) return s->kind == trace::SnapKind::Array;
      return s->kind != trace::SnapKind::Null;
    }
    case Form::StrEq: {
      const auto* s = resolve(inv.t1, r);
      return s && !inv.t1.length && s->kind == trace::SnapKind::String &&
             s->string_value == inv.literal;
    }
    case Form::NumEq:
    case Form::NumGe:
    case Form::NumLe: {
      NumView v;
      if (!num_view(inv.t1, r, v)) return false;
      RelOp op = inv.form == Form::NumEq   ? RelOp::Eq
                 : inv.form == Form::NumGe ? RelOp::Ge
                                           : RelOp::Le;
      return num_cmp(v, op, const_view(inv.c));
    }
    case Form::AllElems: {
      const auto* s = resolve(inv.t1, r);
      if (!s || s->kind != trace::SnapKind::Array) return false;
      for (const auto& e : s->elements)
        if (!elem_satisfies(inv, e)) return false;
      return true;  // vacuously true on empty arrays
    }
    case Form::AnyElemNull: {
      const auto* s = resolve(inv.t1, r);
      if (!s || s->kind != trace::SnapKind::Array) return false;
      for (const auto& e : s->elements)
        if (e.kind == trace::SnapKind::Null) return true;
      return false;
    }
    case Form::RefEq: {
      const auto* a = resolve(inv.t1, r);
      const auto* b = resolve(inv.t2, r);
      return a && b && a->kind == trace::SnapKind::Object &&
             b->kind == trace::SnapKind::Object && a->object_id == b->object_id;
    }
    case Form::Contains: {
      const auto* x = resolve(inv.t1, r);
      const auto* arr = resolve(inv.t2, r);
      if (!x || x->kind != trace::SnapKind::Object) return false;
      if (!arr || arr->kind != trace::SnapKind::Array) return false;
      for (const auto& e : arr->elements)
        if (e.kind == trace::SnapKind::Object && e.object_id == x->object_id)
          return true;
      return false;
    }
    case Form::Rel: {
      NumView a, b;
      if (!num_view(inv.t1, r, a) || !num_view(inv.t2, r, b)) return false;
      return num_cmp(a, inv.op, b);
    }
  }
  return false;
}

// ---- implication ----

namespace {

bool elem_pred_implies(const Invariant& j, const Invariant& i) {
  if (j.elem_pred == i.elem_pred) {
    switch (j.elem_pred) {
      case ElemPred::NotNull: return true;
      case ElemPred::StrEq: return j.literal == i.literal;
      case ElemPred::NumEq: return j.c == i.c;
      case ElemPred::NumGe: return i.c <= j.c;
      case ElemPred::NumLe: return i.c >= j.c;
    }
  }
  if (i.elem_pred == ElemPred::NotNull) return true;  // every predicate needs a value
  if (j.elem_pred == ElemPred::NumEq && i.elem_pred == ElemPred::NumGe) return i.c <= j.c;
  if (j.elem_pred == ElemPred::NumEq && i.elem_pred == ElemPred::NumLe) return i.c >= j.c;
  return false;
}

}  // namespace

bool implies(const Invariant& j, const Invariant& i) {
  if (j.method != i.method || j.point != i.point) return false;
  if (j == i) return true;

  // Anything that pins a value for t makes t non-null.
  if (i.form == Form::NotNull && i.t1 == j.t1 &&
      (j.form == Form::StrEq || j.form == Form::NumEq || j.form == Form::NumGe ||
       j.form == Form::NumLe || j.form == Form::AllElems))
    return true;

  switch (j.form) {
    case Form::NumEq:
      if (i.t1 != j.t1) return false;
      if (i.form == Form::NumGe) return i.c <= j.c;
      if (i.form == Form::NumLe) return i.c >= j.c;
      return false;
    case Form::NumGe:
      return i.form == Form::NumGe && i.t1 == j.t1 && i.c <= j.c;
    case Form::NumLe:
      return i.form == Form::NumLe && i.t1 == j.t1 && i.c >= j.c;
    case Form::AllElems:
      return i.form == Form::AllElems && i.t1 == j.t1 && elem_pred_implies(j, i);
    case Form::Rel:
      if (i.form != Form::Rel || i.t1 != j.t1 || i.t2 != j.t2) return false;
      if (j.op == RelOp::Eq) return i.op == RelOp::Le || i.op == RelOp::Ge;
      if (j.op == RelOp::Lt) return i.op == RelOp::Le;
      if (j.op == RelOp::Gt) return i.op == RelOp::Ge;
      return false;
    default:
      return false;
  }
}

// ---- serialization ----

namespace {

Json term_to_json(const Term& t) {
  Json j = Json::object();
  j["base"] = t.base == TermBase::Var ? "var" : t.base == TermBase::Orig ? "orig" : "return";
  if (t.base != TermBase::Ret) j["path"] = t.path;
  if (t.length) j["len"] = true;
  return j;
}

Term term_from_json(const Json& v, const std::string& where) {
  if (!v.is_object() || !v.contains("base") || !v["base"].is_string())
    throw FormatError(where, "bad term");
  Term t;
  std::string base = v["base"].get<std::string>();
  if (base == "var")
    t.base = TermBase::Var;
  else if (base == "orig")
    t.base = TermBase::Orig;
  else if (base == "return")
    t.base = TermBase::Ret;
  else
    throw FormatError(where, "unknown term base '" + base + "'");
  if (t.base != TermBase::Ret) {
    if (!v.contains("path") || !v["path"].is_string() || v["path"].get<std::string>().empty())
      throw FormatError(where, "term missing path");
    t.path = v["path"].get<std::string>();
  }
  if (v.contains("len")) {
    if (!v["len"].is_boolean()) throw FormatError(where, "term len must be bool");
    t.length = v["len"].get<bool>();
  }
  return t;
}

const char* form_name(Form f) {
  switch (f) {
    case Form::IsNull: return "is_null";
    case Form::NotNull: return "not_null";
    case Form::StrEq: return "str_eq";
    case Form::NumEq: return "num_eq";
    case Form::NumGe: return "num_ge";
    case Form::NumLe: return "num_le";
    case Form::AllElems: return "all_elems";
    case Form::AnyElemNull: return "any_elem_null";
    case Form::RefEq: return "ref_eq";
    case Form::Contains: return "contains";
    case Form::Rel: return "rel";
  }
  return "?";
}

const char* elem_pred_name(ElemPred p) {
  switch (p) {
    case ElemPred::NotNull: return "not_null";
    case ElemPred::StrEq: return "str_eq";
    case ElemPred::NumEq: return "num_eq";
    case ElemPred::NumGe: return "num_ge";
    case ElemPred::NumLe: return "num_le";
  }
  return "?";
}

}  // namespace

Json Invariant::to_json() const {
  Json j = Json::object();
  j["method"] = method;
  j["point"] = point == trace::Point::Entry ? "pre" : "post";
  j["form"] = form_name(form);
  j["t1"] = term_to_json(t1);
  switch (form) {
    case Form::StrEq: j["literal"] = literal; break;
    case Form::NumEq:
    case Form::NumGe:
    case Form::NumLe: j["c"] = c; break;
    case Form::AllElems:
      j["elem_pred"] = elem_pred_name(elem_pred);
      if (elem_pred == ElemPred::StrEq)
        j["literal"] = literal;
      else if (elem_pred != ElemPred::NotNull)
        j["c"] = c;
      break;
    case Form::RefEq:
    case Form::Contains: j["t2"] = term_to_json(t2); break;
    case Form::Rel:
      j["op"] = rel_op_text(op);
      j["t2"] = term_to_json(t2);
      break;
    default: break;
  }
  return j;
}

Invariant Invariant::from_json(const Json& v, const std::string& where) {
  if (!v.is_object()) throw FormatError(where, "invariant is not an object");
  for (const char* f : {"method", "point", "form", "t1"})
    if (!v.contains(f)) throw FormatError(where, std::string("invariant missing '") + f + "'");
  Invariant inv;
  if (!v["method"].is_string()) throw FormatError(where, "method must be a string");
  inv.method = v["method"].get<std::string>();
  std::string point = v["point"].is_string() ? v["point"].get<std::string>() : "";
  if (point == "pre")
    inv.point = trace::Point::Entry;
  else if (point == "post")
    inv.point = trace::Point::Exit;
  else
    throw FormatError(where, "unknown point '" + point + "'");
  std::string form = v["form"].is_string() ? v["form"].get<std::string>() : "";
  inv.t1 = term_from_json(v["t1"], where);

  auto need_c = [&]() -> int64_t {
    if (!v.contains("c") || !v["c"].is_number_integer())
      throw FormatError(where, "invariant missing integer 'c'");
    return v["c"].get<int64_t>();
  };
  auto need_literal = [&]() -> std::string {
    if (!v.contains("literal") || !v["literal"].is_string())
      throw FormatError(where, "invariant missing 'literal'");
    return v["literal"].get<std::string>();
  };
  auto need_t2 = [&]() -> Term {
    if (!v.contains("t2")) throw FormatError(where, "invariant missing 't2'");
    return term_from_json(v["t2"], where);
  };

  if (form == "is_null") {
    inv.form = Form::IsNull;
  } else if (form == "not_null") {
    inv.form = Form::NotNull;
  } else if (form == "str_eq") {
    inv.form = Form::StrEq;
    inv.literal = need_literal();
  } else if (form == "num_eq" || form == "num_ge" || form == "num_le") {
    inv.form = form == "num_eq" ? Form::NumEq : form == "num_ge" ? Form::NumGe : Form::NumLe;
    inv.c = need_c();
  } else if (form == "all_elems") {
    inv.form = Form::AllElems;
    std::string pred = v.contains("elem_pred") && v["elem_pred"].is_string()
                           ? v["elem_pred"].get<std::string>()
                           : "";
    if (pred == "not_null") {
      inv.elem_pred = ElemPred::NotNull;
    } else if (pred == "str_eq") {
      inv.elem_pred = ElemPred::StrEq;
      inv.literal = need_literal();
    } else if (pred == "num_eq" || pred == "num_ge" || pred == "num_le") {
      inv.elem_pred = pred == "num_eq" ? ElemPred::NumEq
                      : pred == "num_ge" ? ElemPred::NumGe
                                         : ElemPred::NumLe;
      inv.c = need_c();
    } else {
      throw FormatError(where, "unknown elem_pred '" + pred + "'");
    }
  } else if (form == "any_elem_null") {
    inv.form = Form::AnyElemNull;
  } else if (form == "ref_eq") {
    inv.form = Form::RefEq;
    inv.t2 = need_t2();
  } else if (form == "contains") {
    inv.form = Form::Contains;
    inv.t2 = need_t2();
  } else if (form == "rel") {
    inv.form = Form::Rel;
    inv.t2 = need_t2();
    std::string op = v.contains("op") && v["op"].is_string() ? v["op"].get<std::string>() : "";
    if (op == "==")
      inv.op = RelOp::Eq;
    else if (op == "<")
      inv.op = RelOp::Lt;
    else if (op == "<=")
      inv.op = RelOp::Le;
    else if (op == ">")
      inv.op = RelOp::Gt;
    else if (op == ">=")
      inv.op = RelOp::Ge;
    else
      throw FormatError(where, "unknown rel op '" + op + "'");
  } else {
    throw FormatError(where, "unknown form '" + form + "'");
  }
  return inv;
}

}  // namespace forge::inv
