#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "srvscan/ast.hpp"
#include "srvscan/inheritance.hpp"

namespace srvscan {

enum class SinkKind {
  BareEcrecover,      // ecrecover(hash, v, r, s)
  LibraryRecover,     // ECDSA.recover(...) or using-for digest.recover(...)
  LibraryTryRecover,  // ECDSA.tryRecover(...)
  AssemblyOpaque,     // found inside an inline-assembly block
};

inline std::string_view sink_kind_name(SinkKind k) {
  switch (k) {
    case SinkKind::BareEcrecover: return "ecrecover";
    case SinkKind::LibraryRecover: return "library-recover";
    case SinkKind::LibraryTryRecover: return "library-try-recover";
    case SinkKind::AssemblyOpaque: return "assembly-opaque";
  }
  return "?";
}

// A canonicalized signature-recovery call site.
struct SinkSite {
  NodeId id = k_no_node;    // the call expression (or opaque statement)
  NodeId stmt = k_no_node;  // enclosing statement node
  std::string contract;
  std::string enclosing_function;  // qualified: Contract.function
  SinkKind kind = SinkKind::BareEcrecover;
  std::optional<ExprRef> hash_arg, v_arg, r_arg, s_arg;
  std::optional<ExprRef> sig_arg;  // combined `bytes signature` argument
  std::string library;  // resolved library name for the Library* kinds
};

namespace detail {

inline bool is_recover_name(const std::string& n) {
  return n == "recover" || n == "tryRecover";
}

inline bool names_ecdsa_library(const AstUnit& unit, const std::string& name) {
  for (const auto& c : unit.contracts)
    if (c.name == name && c.kind == ContractKind::Library) return true;
  // unresolved import: accept the conventional names
  return name.find("ECDSA") != std::string::npos ||
         name == "SignatureChecker";
}

inline bool raw_mentions_ecrecover(const std::string& raw) {
  std::size_t at = 0;
  while ((at = raw.find("ecrecover", at)) != std::string::npos) {
    bool left_ok = at == 0 || !(std::isalnum(static_cast<unsigned char>(raw[at - 1])) ||
                                raw[at - 1] == '_');
    std::size_t end = at + 9;
    bool right_ok = end >= raw.size() ||
                    !(std::isalnum(static_cast<unsigned char>(raw[end])) ||
                      raw[end] == '_');
    if (left_ok && right_ok) return true;
    at = end;
  }
  return false;
}

}  // namespace detail

inline SourceSpan node_span(const AstUnit& unit, NodeId id) {
  auto it = unit.node_index.find(id);
  return it != unit.node_index.end() ? it->second : SourceSpan{};
}

// Walks every function defined by each contract (inherited copies are skipped
// so each syntactic occurrence yields exactly one site) and canonicalizes all
// signature-recovery calls.
inline std::vector<SinkSite> locate_sinks(const AstUnit& unit) {
  std::vector<SinkSite> sinks;
  NameContext ctx = NameContext::for_unit(unit);
  std::set<std::size_t> seen_offsets;

  for (const auto& contract : unit.contracts) {
    bool has_using_for_recover = false;
    std::string using_for_library;
    for (const auto& u : contract.using_fors) {
      if (detail::names_ecdsa_library(unit, u.library)) {
        has_using_for_recover = true;
        using_for_library = u.library;
      }
    }

    for (const auto& rf : contract.resolved) {
      if (rf.origin_contract != contract.name) continue;
      if (!rf.fn.body) continue;

      walk_stmts(*rf.fn.body, [&](const Stmt& st) {
        if (st.kind == StmtKind::Opaque) {
          if (!detail::raw_mentions_ecrecover(st.raw)) return;
          if (!seen_offsets.insert(st.span.offset).second) return;
          SinkSite s;
          s.id = st.id;
          s.stmt = st.id;
          s.contract = contract.name;
          s.enclosing_function = rf.qualified_name;
          s.kind = SinkKind::AssemblyOpaque;
          sinks.push_back(std::move(s));
          return;
        }
        walk_stmt_exprs(st, [&](const Expr& e) {
          if (e.kind != ExprKind::Call || e.children.empty()) return;
          const Expr& callee = e.callee();
          auto arg = [&](std::size_t i) -> const Expr* {
            return i + 1 < e.children.size() ? &e.children[i + 1] : nullptr;
          };
          std::size_t argc = e.children.size() - 1;

          SinkSite s;
          s.id = e.id;
          s.stmt = st.id;
          s.contract = contract.name;
          s.enclosing_function = rf.qualified_name;

          if (callee.is_ident("ecrecover")) {
            s.kind = SinkKind::BareEcrecover;
            if (const Expr* a = arg(0)) s.hash_arg = make_expr_ref(*a, ctx);
            if (const Expr* a = arg(1)) s.v_arg = make_expr_ref(*a, ctx);
            if (const Expr* a = arg(2)) s.r_arg = make_expr_ref(*a, ctx);
            if (const Expr* a = arg(3)) s.s_arg = make_expr_ref(*a, ctx);
          } else if (callee.kind == ExprKind::Member &&
                     detail::is_recover_name(callee.text)) {
            const Expr& base = callee.children.front();
            bool library_call =
                base.kind == ExprKind::Identifier &&
                detail::names_ecdsa_library(unit, base.text);
            bool using_for_call = !library_call && has_using_for_recover;
            if (!library_call && !using_for_call) return;
            s.kind = callee.text == "tryRecover" ? SinkKind::LibraryTryRecover
                                                 : SinkKind::LibraryRecover;
            s.library = library_call ? base.text : using_for_library;
            if (library_call) {
              if (const Expr* a = arg(0)) s.hash_arg = make_expr_ref(*a, ctx);
              if (argc == 4) {
                s.v_arg = make_expr_ref(*arg(1), ctx);
                s.r_arg = make_expr_ref(*arg(2), ctx);
                s.s_arg = make_expr_ref(*arg(3), ctx);
              } else if (argc == 2) {
                s.sig_arg = make_expr_ref(*arg(1), ctx);
              }
            } else {
              // digest.recover(signature[, v, r, s])
              s.hash_arg = make_expr_ref(base, ctx);
              if (argc == 3) {
                s.v_arg = make_expr_ref(*arg(0), ctx);
                s.r_arg = make_expr_ref(*arg(1), ctx);
                s.s_arg = make_expr_ref(*arg(2), ctx);
              } else if (argc == 1) {
                s.sig_arg = make_expr_ref(*arg(0), ctx);
              }
            }
          } else {
            return;
          }
          if (!seen_offsets.insert(node_span(unit, e.id).offset).second) return;
          sinks.push_back(std::move(s));
        });
      });
    }
  }
  return sinks;
}

}  // namespace srvscan
