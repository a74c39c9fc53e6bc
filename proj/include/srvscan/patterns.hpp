#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>

#include "srvscan/ast.hpp"

namespace srvscan {

inline U256 u256_add_one(const U256& v) {
  U256 out = v;
  for (int i = 0; i < 4; ++i) {
    if (++out.limbs[i] != 0) break;
  }
  return out;
}

namespace patterns {

// literal value of an expression, looking through casts like uint256(s)
inline std::optional<U256> literal_value(const Expr& e) {
  if (e.kind == ExprKind::Number) return U256::parse(e.text);
  if (e.kind == ExprKind::Call && e.children.size() == 2 &&
      e.callee().kind == ExprKind::Elementary)
    return literal_value(e.children[1]);
  return std::nullopt;
}

// does the expression mention `var` (through casts and indexing)?
inline bool mentions(const Expr& e, const std::string& var,
                     const NameContext& ctx) {
  return free_variables(e, ctx).count(var) > 0;
}

enum class CheckForm { None, Positive, Negated };

// v restricted to exactly {27, 28}:  require(v == 27 || v == 28)  or the
// guard-with-revert inversion  if (v != 27 && v != 28) revert(...).
inline CheckForm v_range_check(const Expr& cond, const std::string& var,
                               const NameContext& ctx, bool* saw_01 = nullptr) {
  CheckForm found = CheckForm::None;
  walk_exprs(cond, [&](const Expr& e) {
    if (e.kind != ExprKind::Binary) return;
    bool positive = e.text == "||";
    bool negated = e.text == "&&";
    if (!positive && !negated) return;
    const std::string cmp = positive ? "==" : "!=";
    bool has27 = false, has28 = false, has0 = false, has1 = false;
    std::function<void(const Expr&)> collect = [&](const Expr& side) {
      if (side.kind == ExprKind::Binary && side.text == e.text) {
        collect(side.children[0]);
        collect(side.children[1]);
        return;
      }
      if (side.kind != ExprKind::Binary || side.text != cmp) return;
      const Expr *value = nullptr, *subject = nullptr;
      if (literal_value(side.children[0])) {
        value = &side.children[0];
        subject = &side.children[1];
      } else if (literal_value(side.children[1])) {
        value = &side.children[1];
        subject = &side.children[0];
      } else {
        return;
      }
      if (!mentions(*subject, var, ctx)) return;
      auto lit = literal_value(*value);
      if (!lit) return;
      if (*lit == U256::from_u64(27)) has27 = true;
      if (*lit == U256::from_u64(28)) has28 = true;
      if (*lit == U256::from_u64(0)) has0 = true;
      if (*lit == U256::from_u64(1)) has1 = true;
    };
    collect(e.children[0]);
    collect(e.children[1]);
    if (has27 && has28)
      found = positive ? CheckForm::Positive : CheckForm::Negated;
    if (saw_01 && has0 && has1) *saw_01 = true;
  });
  return found;
}

// s bounded above by the secp256k1 half order. The positive forms guard
// directly (s <= half); the negated forms reject (s > half) inside an
// if-with-revert.
inline CheckForm s_bound_check(const Expr& cond, const std::string& var,
                               const U256& half, const NameContext& ctx) {
  const U256 half_plus_one = u256_add_one(half);
  CheckForm found = CheckForm::None;
  walk_exprs(cond, [&](const Expr& e) {
    if (e.kind != ExprKind::Binary) return;
    if (e.text != "<" && e.text != "<=" && e.text != ">" && e.text != ">=")
      return;
    const Expr& lhs = e.children[0];
    const Expr& rhs = e.children[1];
    auto llit = literal_value(lhs);
    auto rlit = literal_value(rhs);
    std::string op = e.text;
    std::optional<U256> bound;
    bool subject_on_left;
    if (rlit && mentions(lhs, var, ctx)) {
      bound = rlit;
      subject_on_left = true;
    } else if (llit && mentions(rhs, var, ctx)) {
      bound = llit;
      subject_on_left = false;
      // normalize to subject-on-left by flipping the operator
      op = op == "<" ? ">" : op == "<=" ? ">=" : op == ">" ? "<" : "<=";
    } else {
      return;
    }
    (void)subject_on_left;
    bool positive = (op == "<=" && *bound == half) ||
                    (op == "<" && (*bound == half || *bound == half_plus_one));
    bool negated = (op == ">" && *bound == half) ||
                   (op == ">=" && (*bound == half_plus_one));
    if (positive) found = CheckForm::Positive;
    else if (negated && found == CheckForm::None) found = CheckForm::Negated;
  });
  return found;
}

// variables equality-compared against `target` (an atom name or variable)
inline std::set<std::string> equality_partners(const Expr& cond,
                                               const std::string& target,
                                               const NameContext& ctx) {
  std::set<std::string> out;
  walk_exprs(cond, [&](const Expr& e) {
    if (e.kind != ExprKind::Binary || (e.text != "==" && e.text != "!="))
      return;
    for (int side = 0; side < 2; ++side) {
      auto fv = free_variables(e.children[side], ctx);
      if (fv.size() == 1 && fv.count(target)) {
        auto partner = free_variables(e.children[1 - side], ctx);
        for (const auto& p : partner)
          if (!is_atom_name(p)) out.insert(p);
      }
    }
  });
  return out;
}

inline bool is_hashing_name(const std::string& n) {
  return n == "keccak256" || n == "sha256" || n == "encode" ||
         n == "encodePacked" || n == "toEthSignedMessageHash" ||
         n == "toTypedDataHash";
}

// does the expression contain a hashing call whose arguments mention `atom`?
inline bool hash_composes(const Expr& e, const std::string& atom,
                          const NameContext& ctx) {
  bool found = false;
  walk_exprs(e, [&](const Expr& x) {
    if (x.kind != ExprKind::Call || x.children.empty()) return;
    const Expr& callee = x.callee();
    std::string name = callee.kind == ExprKind::Identifier ? callee.text
                       : callee.kind == ExprKind::Member   ? callee.text
                                                           : "";
    if (!is_hashing_name(name)) return;
    if (free_variables(x, ctx).count(atom)) found = true;
  });
  return found;
}

// does a statement body unconditionally revert? (revert call, require(false),
// or a throw-like opaque)
inline bool body_reverts(const Stmt& s) {
  bool reverts = false;
  walk_stmts(s, [&](const Stmt& inner) {
    if (inner.kind != StmtKind::ExprStmt || !inner.expr) return;
    walk_exprs(*inner.expr, [&](const Expr& e) {
      if (e.kind != ExprKind::Call || e.children.empty()) return;
      if (e.callee().is_ident("revert")) reverts = true;
      if (e.callee().is_ident("require") && e.children.size() > 1 &&
          e.children[1].kind == ExprKind::BoolLit &&
          e.children[1].text == "false")
        reverts = true;
    });
  });
  return reverts;
}

// variables compared for equality against a subtree containing `node`
// (typically: `owner` in require(owner == ecrecover(...)))
inline std::set<std::string> partners_of_node(const Expr& root, NodeId node,
                                              const NameContext& ctx) {
  std::set<std::string> out;
  std::function<bool(const Expr&)> contains = [&](const Expr& e) {
    if (e.id == node) return true;
    for (const auto& c : e.children)
      if (contains(c)) return true;
    return false;
  };
  walk_exprs(root, [&](const Expr& e) {
    if (e.kind != ExprKind::Binary || (e.text != "==" && e.text != "!="))
      return;
    for (int side = 0; side < 2; ++side) {
      if (contains(e.children[side])) {
        auto fv = free_variables(e.children[1 - side], ctx);
        for (const auto& p : fv)
          if (!is_atom_name(p)) out.insert(p);
      }
    }
  });
  return out;
}

}  // namespace patterns
}  // namespace srvscan
