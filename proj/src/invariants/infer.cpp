#include "forge/invariants/infer.hpp"

#include <algorithm>

#include "forge/invariants/constant_pool.hpp"

namespace forge::inv {

using trace::SnapKind;

Schema build_schema(const std::vector<const trace::TraceRecord*>& records,
                    const std::string& method, trace::Point point) {
  Schema s;
  s.method = method;
  s.point = point;
  for (const trace::TraceRecord* r : records) {
    for (const trace::ValueSnapshot& v : r->vars) {
      PathInfo& info = s.paths[v.path];
      info.kinds.insert(v.kind);
      if (v.kind == SnapKind::String) info.literals.insert(v.string_value);
      if (v.kind == SnapKind::Array) {
        for (const trace::ValueSnapshot& e : v.elements) {
          info.elem_kinds.insert(e.kind);
          if (e.kind == SnapKind::String) info.elem_literals.insert(e.string_value);
        }
      }
    }
  }
  return s;
}

namespace {

bool any_of_kinds(const std::set<SnapKind>& kinds, std::initializer_list<SnapKind> want) {
  for (SnapKind k : want)
    if (kinds.count(k)) return true;
  return false;
}

bool nullable_kinds(const std::set<SnapKind>& kinds) {
  return any_of_kinds(kinds, {SnapKind::Object, SnapKind::Array, SnapKind::String, SnapKind::Null});
}

bool numeric_kinds(const std::set<SnapKind>& kinds) {
  return any_of_kinds(kinds, {SnapKind::Int, SnapKind::Float});
}

}  // namespace

std::vector<Invariant> enumerate_candidates(const Schema& schema) {
  std::vector<Invariant> out;
  const std::string& m = schema.method;
  trace::Point pt = schema.point;

  for (const auto& [path, info] : schema.paths) {
    Term t = Term::from_record_path(path);

    if (nullable_kinds(info.kinds)) {
      out.push_back(Invariant::is_null(m, pt, t));
      out.push_back(Invariant::not_null(m, pt, t));
    }
    if (info.kinds.count(SnapKind::String))
      for (const std::string& lit : info.literals)
        out.push_back(Invariant::str_eq(m, pt, t, lit));
    if (numeric_kinds(info.kinds)) {
      for (int64_t c : constant_pool()) out.push_back(Invariant::num(Form::NumEq, m, pt, t, c));
      for (int64_t c : constant_pool()) out.push_back(Invariant::num(Form::NumGe, m, pt, t, c));
      for (int64_t c : constant_pool()) out.push_back(Invariant::num(Form::NumLe, m, pt, t, c));
    }
    if (info.kinds.count(SnapKind::Array)) {
      Term lt = Term::from_record_path(path, true);
      for (int64_t c : constant_pool()) out.push_back(Invariant::num(Form::NumEq, m, pt, lt, c));
      for (int64_t c : constant_pool()) out.push_back(Invariant::num(Form::NumGe, m, pt, lt, c));
      for (int64_t c : constant_pool()) out.push_back(Invariant::num(Form::NumLe, m, pt, lt, c));

      if (nullable_kinds(info.elem_kinds))
        out.push_back(Invariant::all_elems_not_null(m, pt, t));
      if (info.elem_kinds.count(SnapKind::String))
        for (const std::string& lit : info.elem_literals)
          out.push_back(Invariant::all_elems_str_eq(m, pt, t, lit));
      if (numeric_kinds(info.elem_kinds)) {
        for (int64_t c : constant_pool())
          out.push_back(Invariant::all_elems_num(ElemPred::NumEq, m, pt, t, c));
        for (int64_t c : constant_pool())
          out.push_back(Invariant::all_elems_num(ElemPred::NumGe, m, pt, t, c));
        for (int64_t c : constant_pool())
          out.push_back(Invariant::all_elems_num(ElemPred::NumLe, m, pt, t, c));
      }
      if (info.elem_kinds.count(SnapKind::Null))
        out.push_back(Invariant::any_elem_null(m, pt, t));
    }
  }

  // Pairwise families. Paths iterate sorted (std::map), so these blocks are
  // deterministic too.
  std::vector<Term> object_terms, array_obj_terms, numeric_terms;
  for (const auto& [path, info] : schema.paths) {
    if (info.kinds.count(SnapKind::Object))
      object_terms.push_back(Term::from_record_path(path));
    if (info.kinds.count(SnapKind::Array) && info.elem_kinds.count(SnapKind::Object))
      array_obj_terms.push_back(Term::from_record_path(path));
    if (numeric_kinds(info.kinds)) numeric_terms.push_back(Term::from_record_path(path));
    if (info.kinds.count(SnapKind::Array))
      numeric_terms.push_back(Term::from_record_path(path, true));
  }

  for (size_t i = 0; i < object_terms.size(); ++i)
    for (size_t j = i + 1; j < object_terms.size(); ++j)
      out.push_back(Invariant::ref_eq(m, pt, object_terms[i], object_terms[j]));

  for (const Term& x : object_terms)
    for (const Term& a : array_obj_terms)
      if (x.record_path() != a.record_path())
        out.push_back(Invariant::contains(m, pt, x, a));

  static const RelOp kRelOps[] = {RelOp::Eq, RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge};
  for (const Term& a : numeric_terms)
    for (const Term& b : numeric_terms) {
      if (a == b) continue;
      for (RelOp op : kRelOps) out.push_back(Invariant::rel(m, pt, a, op, b));
    }

  return out;
}

void check_resolvable(const Invariant& inv, const Schema& schema) {
  for (const Term* t : {&inv.t1, &inv.t2}) {
    if (t == &inv.t2 && inv.form != Form::RefEq && inv.form != Form::Contains &&
        inv.form != Form::Rel)
      continue;
    if (!schema.paths.count(t->record_path())) throw UnresolvableTerm(t->record_path());
  }
}

std::vector<Invariant> infer(const trace::SplitTraces& traces, const std::string& method,
                             trace::Point point, const InferenceConfig& cfg) {
  std::vector<const trace::TraceRecord*> records;
  for (const trace::TraceRecord& r : traces.records)
    if (r.method == method && r.point == point) records.push_back(&r);
  if (records.empty()) throw NoObservations(method, point);
  if (records.size() < static_cast<size_t>(cfg.min_support)) return {};

  Schema schema = build_schema(records, method, point);
  std::vector<Invariant> holding;
  for (Invariant& cand : enumerate_candidates(schema)) {
    bool ok = true;
    for (const trace::TraceRecord* r : records) {
      if (!evaluate(cand, *r)) {
        ok = false;
        break;
      }
    }
    if (ok) holding.push_back(std::move(cand));
  }

  // Strongest-only: drop anything another holding invariant implies. The
  // lattice is a partial order, so survivors are exactly its maxima.
  std::vector<Invariant> out;
  for (size_t i = 0; i < holding.size(); ++i) {
    bool dominated = false;
    for (size_t j = 0; j < holding.size() && !dominated; ++j)
      if (j != i && implies(holding[j], holding[i])) dominated = true;
    if (!dominated) out.push_back(holding[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::string, trace::Point>> method_points(
    const std::vector<trace::TraceRecord>& records) {
  std::set<std::pair<std::string, trace::Point>> seen;
  for (const trace::TraceRecord& r : records) seen.insert({r.method, r.point});
  return {seen.begin(), seen.end()};
}

}  // namespace forge::inv
