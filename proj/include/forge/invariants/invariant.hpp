#pragma once

#include <cstdint>
#include <string>
#include <tuple>

#include "forge/jsonl.hpp"
#include "forge/trace/record.hpp"

namespace forge::inv {

// A term names one observable quantity at a program point. `Orig` refers to
// the entry-time mirror recorded at exit, `Ret` to the return value; both
// are only meaningful at exit points. `length` wraps the term in len(...),
// which resolves only against array-kind snapshots.
enum class TermBase { Var, Orig, Ret };

struct Term {
  TermBase base = TermBase::Var;
  std::string path;  // empty iff base == Ret
  bool length = false;

  // The snapshot path this term reads.
  std::string record_path() const;
  std::string render() const;

  auto key() const { return std::make_tuple(base, path, length); }
  bool operator==(const Term& o) const { return key() == o.key(); }
  bool operator<(const Term& o) const { return key() < o.key(); }

  static Term var(std::string path, bool length = false);
  static Term orig(std::string path, bool length = false);
  static Term ret(bool length = false);
  // Parses a record path ("x.f", "orig(x)", "return") back into a term.
  static Term from_record_path(const std::string& path, bool length = false);
};

enum class Form {
  IsNull, NotNull, StrEq, NumEq, NumGe, NumLe,
  AllElems, AnyElemNull, RefEq, Contains, Rel,
};

enum class ElemPred { NotNull, StrEq, NumEq, NumGe, NumLe };
enum class RelOp { Eq, Lt, Le, Gt, Ge };

// One candidate invariant at a (method, point). Unused fields stay at their
// defaults so equality and ordering work on whole-struct keys.
struct Invariant {
  std::string method;
  trace::Point point = trace::Point::Entry;
  Form form = Form::IsNull;
  Term t1;                 // subject / array for AllElems + AnyElemNull / element for Contains
  Term t2;                 // RefEq partner, Contains array, Rel right side
  ElemPred elem_pred = ElemPred::NotNull;
  RelOp op = RelOp::Eq;
  int64_t c = 0;           // NumEq/NumGe/NumLe and numeric element predicates
  std::string literal;     // StrEq and string element predicates

  auto key() const {
    return std::tie(method, point, form, t1, t2, elem_pred, op, c, literal);
  }
  bool operator==(const Invariant& o) const { return key() == o.key(); }
  bool operator<(const Invariant& o) const { return key() < o.key(); }

  // `pre m: expr` / `post m: expr`; stable and parseable.
  std::string render() const;
  // Expression part only (what render() puts after "point method: ").
  std::string render_expr() const;

  Json to_json() const;
  static Invariant from_json(const Json& v, const std::string& where);

  static Invariant is_null(std::string m, trace::Point p, Term t);
  static Invariant not_null(std::string m, trace::Point p, Term t);
  static Invariant str_eq(std::string m, trace::Point p, Term t, std::string lit);
  static Invariant num(Form f, std::string m, trace::Point p, Term t, int64_t c);
  static Invariant all_elems_not_null(std::string m, trace::Point p, Term arr);
  static Invariant all_elems_str_eq(std::string m, trace::Point p, Term arr, std::string lit);
  static Invariant all_elems_num(ElemPred pred, std::string m, trace::Point p, Term arr, int64_t c);
  static Invariant any_elem_null(std::string m, trace::Point p, Term arr);
  static Invariant ref_eq(std::string m, trace::Point p, Term a, Term b);
  static Invariant contains(std::string m, trace::Point p, Term elem, Term arr);
  static Invariant rel(std::string m, trace::Point p, Term a, RelOp op, Term b);
};

// Strict three-valued collapse: a missing path, null dereference, or kind
// mismatch makes the invariant false on this record. AllElems over an empty
// array is true; AllElems/AnyElemNull/Contains over a null or missing array
// are false.
bool evaluate(const Invariant& inv, const trace::TraceRecord& record);

// Single-premise syntactic implication lattice. Transitively closed, and
// sound with respect to evaluate(): implies(j,i) means any record satisfying
// j satisfies i.
bool implies(const Invariant& j, const Invariant& i);

}  // namespace forge::inv
