#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "srvscan/ast.hpp"

namespace srvscan {

namespace detail {

// Clones AST subtrees while assigning fresh NodeIds; spans are copied from
// the originals so cloned nodes still point at their source text.
class IdCloner {
 public:
  IdCloner(std::map<NodeId, SourceSpan>& index, NodeId next)
      : index_(index), next_(next) {}

  NodeId next_id() const { return next_; }

  Expr clone(const Expr& e) {
    Expr out = e;
    out.id = remap(e.id);
    out.children.clear();
    for (const auto& c : e.children) out.children.push_back(clone(c));
    return out;
  }

  Stmt clone(const Stmt& s) {
    Stmt out = s;
    out.id = remap(s.id);
    if (s.init) out.init = clone(*s.init);
    if (s.expr) out.expr = clone(*s.expr);
    if (s.post) out.post = clone(*s.post);
    out.pre.clear();
    out.body.clear();
    out.else_body.clear();
    for (const auto& c : s.pre) out.pre.push_back(clone(c));
    for (const auto& c : s.body) out.body.push_back(clone(c));
    for (const auto& c : s.else_body) out.else_body.push_back(clone(c));
    return out;
  }

  FunctionDef clone(const FunctionDef& f) {
    FunctionDef out = f;
    out.id = remap(f.id);
    for (auto& p : out.params) p.id = remap(p.id);
    for (auto& p : out.returns) p.id = remap(p.id);
    out.modifier_calls.clear();
    for (const auto& m : f.modifier_calls)
      out.modifier_calls.push_back(clone(m));
    if (f.body) out.body = clone(*f.body);
    return out;
  }

 private:
  std::map<NodeId, SourceSpan>& index_;
  NodeId next_;

  NodeId remap(NodeId old) {
    NodeId id = next_++;
    auto it = index_.find(old);
    index_.emplace(id, it != index_.end() ? it->second : SourceSpan{});
    return id;
  }
};

inline const ContractDef* find_by_name(const AstUnit& unit,
                                       const std::string& name) {
  for (const auto& c : unit.contracts)
    if (c.name == name) return &c;
  return nullptr;
}

// Solidity-style C3 linearization: most-derived first, direct bases merged in
// reverse declaration order. Bases not present in the unit are skipped.
inline std::vector<const ContractDef*> linearize(
    const AstUnit& unit, const ContractDef& contract,
    std::map<std::string, std::vector<const ContractDef*>>& cache,
    std::vector<std::string>& visiting) {
  if (auto it = cache.find(contract.name); it != cache.end()) return it->second;
  if (std::find(visiting.begin(), visiting.end(), contract.name) !=
      visiting.end())
    throw CycleError("cyclic inheritance involving '" + contract.name + "'");
  visiting.push_back(contract.name);

  std::vector<const ContractDef*> direct;
  for (auto it = contract.bases.rbegin(); it != contract.bases.rend(); ++it)
    if (const ContractDef* b = find_by_name(unit, *it)) direct.push_back(b);

  std::vector<std::vector<const ContractDef*>> seqs;
  for (const ContractDef* b : direct)
    seqs.push_back(linearize(unit, *b, cache, visiting));
  seqs.push_back(direct);

  std::vector<const ContractDef*> result = {&contract};
  auto in_tail = [&](const ContractDef* c) {
    for (const auto& s : seqs)
      for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] == c) return true;
    return false;
  };
  for (;;) {
    bool all_empty = true;
    const ContractDef* picked = nullptr;
    for (auto& s : seqs) {
      if (s.empty()) continue;
      all_empty = false;
      if (!in_tail(s.front())) {
        picked = s.front();
        break;
      }
    }
    if (all_empty) break;
    if (!picked)
      throw CycleError("cannot linearize inheritance of '" + contract.name + "'");
    for (auto& s : seqs)
      std::erase(s, picked);
    result.push_back(picked);
  }

  visiting.pop_back();
  cache[contract.name] = result;
  return result;
}

inline const ModifierDef* find_modifier(
    const std::vector<const ContractDef*>& lin, const std::string& name) {
  for (const ContractDef* c : lin)
    for (const auto& m : c->modifiers)
      if (m.name == name) return &m;
  return nullptr;
}

// Splices a modifier body around the function body: statements before the
// first `_;` become leading guards, statements after it trail the body.
// Modifier parameters are bound with synthetic declarations.
inline void inline_modifier(FunctionDef& fn, const ModifierDef& mod,
                            const Expr& invocation, IdCloner& cloner) {
  if (!fn.body) return;
  std::vector<Stmt> pre, post;
  bool seen_placeholder = false;
  for (const auto& s : mod.body.body) {
    if (s.kind == StmtKind::Placeholder) {
      seen_placeholder = true;
      continue;
    }
    (seen_placeholder ? post : pre).push_back(cloner.clone(s));
  }
  std::vector<Stmt> bindings;
  std::size_t argc = invocation.kind == ExprKind::Call
                         ? invocation.children.size() - 1
                         : 0;
  for (std::size_t i = 0; i < mod.params.size() && i < argc; ++i) {
    Stmt bind;
    bind.kind = StmtKind::VarDecl;
    bind.id = cloner.clone(invocation.children[i + 1]).id;  // fresh id, arg span
    bind.decl_type = mod.params[i].type_text;
    bind.decl_names.push_back(mod.params[i].name);
    bind.init = cloner.clone(invocation.children[i + 1]);
    bind.span = bind.init->span;
    bindings.push_back(std::move(bind));
  }
  auto& stmts = fn.body->body;
  stmts.insert(stmts.begin(), pre.begin(), pre.end());
  stmts.insert(stmts.begin(), bindings.begin(), bindings.end());
  stmts.insert(stmts.end(), post.begin(), post.end());
}

}  // namespace detail

// Flattens each contract's callable surface into its resolved function table
// (C3 override order, most-derived definition wins) and inlines modifier
// bodies as guard statements. Idempotent: a resolved unit is returned as-is.
inline AstUnit resolve_inheritance(const AstUnit& input) {
  if (input.resolved) return input;
  AstUnit unit = input;

  NodeId next = 1;
  for (const auto& [id, span] : unit.node_index)
    next = std::max(next, id + 1);
  detail::IdCloner cloner(unit.node_index, next);

  std::map<std::string, std::vector<const ContractDef*>> lin_cache;
  for (const auto& c : unit.contracts) {
    std::vector<std::string> visiting;
    detail::linearize(unit, c, lin_cache, visiting);
  }

  for (auto& contract : unit.contracts) {
    const auto& lin = lin_cache[contract.name];
    contract.resolved.clear();

    // most-derived definition of each (name, arity) wins
    std::vector<std::pair<const ContractDef*, const FunctionDef*>> picked;
    std::set<std::string> seen;
    for (const ContractDef* origin : lin) {
      for (const auto& fn : origin->functions) {
        if (fn.is_constructor && origin != &contract) continue;
        std::string key = fn.name + "/" + std::to_string(fn.params.size());
        if (seen.insert(key).second) picked.emplace_back(origin, &fn);
      }
    }

    for (auto& [origin, fn] : picked) {
      ResolvedFunction rf;
      rf.qualified_name = contract.name + "." + fn->name;
      rf.origin_contract = origin->name;
      rf.fn = cloner.clone(*fn);
      for (const auto& inv : rf.fn.modifier_calls) {
        const Expr& callee =
            inv.kind == ExprKind::Call ? inv.callee() : inv;
        if (callee.kind != ExprKind::Identifier) continue;
        if (const ModifierDef* mod = detail::find_modifier(lin, callee.text))
          detail::inline_modifier(rf.fn, *mod, inv, cloner);
      }
      contract.resolved.push_back(std::move(rf));
    }
  }

  unit.resolved = true;
  return unit;
}

// All state variables visible on a contract, base-most first.
inline std::vector<const StateVar*> visible_state_vars(const AstUnit& unit,
                                                       const ContractDef& c) {
  std::map<std::string, std::vector<const ContractDef*>> cache;
  std::vector<std::string> visiting;
  auto lin = detail::linearize(unit, c, cache, visiting);
  std::vector<const StateVar*> out;
  std::set<std::string> seen;
  for (auto it = lin.rbegin(); it != lin.rend(); ++it)
    for (const auto& v : (*it)->state_vars)
      if (seen.insert(v.name).second) out.push_back(&v);
  return out;
}

}  // namespace srvscan
