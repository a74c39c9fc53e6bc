#pragma once

#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "srvscan/ast.hpp"
#include "srvscan/inheritance.hpp"

namespace srvscan {

enum class EdgeKind { Data, Control, Call };

inline std::string_view edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Data: return "DATA";
    case EdgeKind::Control: return "CONTROL";
    case EdgeKind::Call: return "CALL";
  }
  return "?";
}

struct IpdgEdge {
  NodeId from, to;
  EdgeKind kind;
  friend auto operator<=>(const IpdgEdge&, const IpdgEdge&) = default;
};

enum class AccessKind { Read, Write };

// One state-variable access with its mapping key expression's variables,
// recorded so the signature-state detector can do key-aware matching.
struct StateAccess {
  std::string var;
  AccessKind kind = AccessKind::Read;
  std::set<std::string> key_vars;
  bool has_key = false;
  bool in_guard = false;
};

struct IpdgNodeInfo {
  std::string contract;
  std::string function;  // qualified; empty for state declarations
  StmtKind stmt_kind = StmtKind::Block;
  bool is_decl = false;
  bool is_guard = false;    // require/assert/if/loop header
  bool is_return = false;
  bool is_opaque = false;
  int seq = 0;              // pre-order position within the function
  std::set<std::string> reads;   // variables and environment atoms
  std::set<std::string> writes;
  std::set<std::string> callee_names;      // syntactic callee identifiers
  std::set<std::string> resolved_callees;  // qualified in-unit callees
  std::vector<StateAccess> accesses;
  std::optional<Expr> guard_cond;  // condition copy for pattern checks
  const Stmt* stmt = nullptr;      // borrowed from the unit
};

struct IpdgFunctionInfo {
  std::string contract;
  std::string visibility;
  bool is_constructor = false;
  std::vector<NodeId> nodes;        // pre-order
  std::vector<NodeId> return_nodes;
  std::vector<std::string> params;
  std::set<std::string> callees;    // qualified
};

// Inter-contract program dependency graph. Immutable after build_ipdg; all
// queries are read-only. Node info borrows statements from the AstUnit, which
// must outlive the graph.
struct Ipdg {
  std::set<NodeId> nodes;
  std::set<IpdgEdge> edges;
  std::map<std::string, NodeId> entry_points;  // qualified function -> node

  std::map<NodeId, IpdgNodeInfo> info;
  std::map<std::string, IpdgFunctionInfo> functions;
  std::map<std::string, NodeId> state_decls;  // "Contract.var" -> decl node
  std::map<std::string, std::vector<std::pair<std::string, NodeId>>>
      param_uses;  // fn -> (param, use node)
  std::map<std::string, std::vector<NodeId>> callsites;  // fn -> call sites
  NodeId unknown_node = k_no_node;  // synthetic target of external calls

  std::map<NodeId, std::vector<std::pair<NodeId, EdgeKind>>> fwd, bwd;

  void add_edge(NodeId from, NodeId to, EdgeKind kind) {
    if (edges.insert({from, to, kind}).second) {
      fwd[from].push_back({to, kind});
      bwd[to].push_back({from, kind});
    }
  }

  const IpdgNodeInfo* node_info(NodeId id) const {
    auto it = info.find(id);
    return it != info.end() ? &it->second : nullptr;
  }
};

enum class Direction { Backward, Forward };

// Transitive closure along the requested edge kinds, start set included.
inline std::set<NodeId> dependencies(const Ipdg& g, const std::set<NodeId>& start,
                                     Direction dir,
                                     const std::set<EdgeKind>& kinds) {
  std::set<NodeId> seen;
  std::vector<NodeId> work(start.begin(), start.end());
  for (NodeId n : work) seen.insert(n);
  while (!work.empty()) {
    NodeId n = work.back();
    work.pop_back();
    const auto& adj = dir == Direction::Forward ? g.fwd : g.bwd;
    auto it = adj.find(n);
    if (it == adj.end()) continue;
    for (const auto& [next, kind] : it->second) {
      if (!kinds.count(kind)) continue;
      if (seen.insert(next).second) work.push_back(next);
    }
  }
  return seen;
}

namespace detail {

inline std::string root_of(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Identifier: return e.text;
    case ExprKind::Index:
    case ExprKind::Member: return root_of(e.children.front());
    default: return {};
  }
}

// free variables of the key expressions along an index chain
inline void key_vars_of(const Expr& e, const NameContext& ctx,
                        std::set<std::string>& out) {
  if (e.kind == ExprKind::Index) {
    auto keys = free_variables(e.children[1], ctx);
    out.insert(keys.begin(), keys.end());
    key_vars_of(e.children.front(), ctx, out);
  } else if (e.kind == ExprKind::Member) {
    key_vars_of(e.children.front(), ctx, out);
  }
}

struct StmtFacts {
  std::set<std::string> reads, writes;
  std::vector<StateAccess> accesses;  // key info; filled for state vars later
};

inline void expr_facts(const Expr& e, const NameContext& ctx, StmtFacts& f,
                       bool reading = true);

inline void assignment_facts(const Expr& lhs, const Expr* rhs,
                             const std::string& op, const NameContext& ctx,
                             StmtFacts& f) {
  std::string root = root_of(lhs);
  if (!root.empty()) {
    f.writes.insert(root);
    StateAccess acc;
    acc.var = root;
    acc.kind = AccessKind::Write;
    key_vars_of(lhs, ctx, acc.key_vars);
    acc.has_key = lhs.kind == ExprKind::Index;
    f.accesses.push_back(std::move(acc));
  }
  std::set<std::string> keys;
  key_vars_of(lhs, ctx, keys);
  f.reads.insert(keys.begin(), keys.end());
  if (op != "=" && !root.empty()) f.reads.insert(root);
  if (rhs) expr_facts(*rhs, ctx, f);
}

inline void expr_facts(const Expr& e, const NameContext& ctx, StmtFacts& f,
                       bool reading) {
  switch (e.kind) {
    case ExprKind::Assign:
      assignment_facts(e.children[0], &e.children[1], e.text, ctx, f);
      return;
    case ExprKind::Unary:
      if (e.text == "++" || e.text == "--" || e.text == "++post" ||
          e.text == "--post" || e.text == "delete") {
        bool reads_old = e.text != "delete";
        const Expr& target = e.children.front();
        std::string root = root_of(target);
        if (!root.empty()) {
          f.writes.insert(root);
          if (reads_old) f.reads.insert(root);
          StateAccess acc;
          acc.var = root;
          acc.kind = AccessKind::Write;
          key_vars_of(target, ctx, acc.key_vars);
          acc.has_key = target.kind == ExprKind::Index;
          f.accesses.push_back(std::move(acc));
        }
        std::set<std::string> keys;
        key_vars_of(target, ctx, keys);
        f.reads.insert(keys.begin(), keys.end());
        return;
      }
      break;
    case ExprKind::Index: {
      // read access with key info
      std::string root = root_of(e);
      if (!root.empty()) {
        StateAccess acc;
        acc.var = root;
        acc.kind = AccessKind::Read;
        key_vars_of(e, ctx, acc.key_vars);
        acc.has_key = true;
        f.accesses.push_back(std::move(acc));
      }
      break;
    }
    default:
      break;
  }
  auto fv = free_variables(e, ctx);
  f.reads.insert(fv.begin(), fv.end());
  // nested assignments / increments inside calls still count as writes
  for (const auto& c : e.children) {
    if (c.kind == ExprKind::Assign ||
        (c.kind == ExprKind::Unary &&
         (c.text == "++" || c.text == "--" || c.text == "++post" ||
          c.text == "--post" || c.text == "delete"))) {
      expr_facts(c, ctx, f, reading);
    } else if (c.kind == ExprKind::Index) {
      expr_facts(c, ctx, f, reading);
    } else if (!c.children.empty()) {
      // descend looking for nested effects only
      StmtFacts sub;
      expr_facts(c, ctx, sub, reading);
      f.writes.insert(sub.writes.begin(), sub.writes.end());
      for (auto& a : sub.accesses) f.accesses.push_back(a);
    }
  }
}

inline bool is_guard_call(const Expr& e) {
  return e.kind == ExprKind::Call && !e.children.empty() &&
         (e.callee().is_ident("require") || e.callee().is_ident("assert"));
}

inline StmtFacts facts_for(const Stmt& s, const NameContext& ctx) {
  StmtFacts f;
  switch (s.kind) {
    case StmtKind::VarDecl:
      for (const auto& n : s.decl_names) f.writes.insert(n);
      if (s.init) expr_facts(*s.init, ctx, f);
      return f;
    case StmtKind::Opaque:
      f.reads.insert(s.asm_reads.begin(), s.asm_reads.end());
      f.writes.insert(s.asm_writes.begin(), s.asm_writes.end());
      return f;
    default:
      if (s.expr) expr_facts(*s.expr, ctx, f);
      if (s.post) expr_facts(*s.post, ctx, f);
      return f;
  }
}

}  // namespace detail

// Builds the I-PDG for an inheritance-resolved unit. Deterministic: node and
// edge sets depend only on the unit contents.
class IpdgBuilder {
 public:
  explicit IpdgBuilder(const AstUnit& unit)
      : unit_(unit), ctx_(NameContext::for_unit(unit)) {}

  Ipdg build() {
    collect_state_decls();
    for (const auto& c : unit_.contracts)
      for (const auto& rf : c.resolved)
        if (rf.fn.body) add_function(c, rf);

    // synthetic sink of unresolved external calls
    g_.unknown_node = next_synthetic_id();
    g_.nodes.insert(g_.unknown_node);
    IpdgNodeInfo un;
    un.function = "$unknown";
    g_.info.emplace(g_.unknown_node, un);

    for (const auto& c : unit_.contracts)
      for (const auto& rf : c.resolved)
        if (rf.fn.body) wire_function(c, rf);

    wire_state_edges();
    for (const auto& [fn, uses] : param_uses_)
      for (const auto& u : uses) g_.param_uses[fn].push_back({u.var, u.node});
    g_.callsites = callsites_of_;
    return std::move(g_);
  }

 private:
  const AstUnit& unit_;
  NameContext ctx_;
  Ipdg g_;

  // per-function bookkeeping gathered during the local pass
  struct PendingUse {
    std::string var;
    NodeId node;
  };
  std::map<std::string, std::vector<PendingUse>> param_uses_;   // fn -> uses
  std::map<std::string, std::vector<NodeId>> callsites_of_;     // fn -> sites
  std::map<std::string, std::set<std::string>> state_names_;    // contract -> vars
  std::vector<std::pair<NodeId, std::string>> state_reads_, state_writes_;

  NodeId next_synthetic_id() const {
    NodeId next = 1;
    if (!unit_.node_index.empty()) next = unit_.node_index.rbegin()->first + 1;
    for (NodeId n : g_.nodes) next = std::max(next, n + 1);
    return next;
  }

  void collect_state_decls() {
    for (const auto& c : unit_.contracts) {
      auto& names = state_names_[c.name];
      for (const StateVar* v : visible_state_vars(unit_, c))
        names.insert(v->name);
      for (const auto& v : c.state_vars) {
        g_.nodes.insert(v.id);
        IpdgNodeInfo info;
        info.contract = c.name;
        info.is_decl = true;
        info.stmt_kind = StmtKind::VarDecl;
        if (v.init) {
          detail::StmtFacts f;
          detail::expr_facts(*v.init, ctx_, f);
          info.reads = f.reads;
        }
        info.writes.insert(v.name);
        g_.info.emplace(v.id, std::move(info));
        g_.state_decls[c.name + "." + v.name] = v.id;
      }
    }
  }

  bool is_graph_stmt(const Stmt& s) const {
    return s.kind != StmtKind::Block && s.kind != StmtKind::Unchecked &&
           s.kind != StmtKind::Placeholder;
  }

  void add_function(const ContractDef& c, const ResolvedFunction& rf) {
    IpdgFunctionInfo fi;
    fi.contract = c.name;
    fi.visibility = rf.fn.visibility;
    fi.is_constructor = rf.fn.is_constructor;
    for (const auto& p : rf.fn.params)
      if (!p.name.empty()) fi.params.push_back(p.name);

    int seq = 0;
    std::function<void(const Stmt&)> visit = [&](const Stmt& s) {
      if (is_graph_stmt(s)) {
        g_.nodes.insert(s.id);
        fi.nodes.push_back(s.id);
        IpdgNodeInfo info;
        info.contract = c.name;
        info.function = rf.qualified_name;
        info.stmt_kind = s.kind;
        info.seq = seq++;
        info.stmt = &s;
        info.is_opaque = s.kind == StmtKind::Opaque;
        info.is_return = s.kind == StmtKind::Return;
        detail::StmtFacts f = detail::facts_for(s, ctx_);
        info.reads = f.reads;
        info.writes = f.writes;
        info.accesses = std::move(f.accesses);
        if (s.kind == StmtKind::If || s.kind == StmtKind::While ||
            s.kind == StmtKind::For) {
          info.is_guard = true;
          info.guard_cond = s.expr;
        } else if (s.kind == StmtKind::ExprStmt && s.expr &&
                   detail::is_guard_call(*s.expr)) {
          info.is_guard = true;
          if (s.expr->children.size() > 1) info.guard_cond = s.expr->children[1];
        }
        for (auto& a : info.accesses) a.in_guard = info.is_guard;
        if (s.expr) collect_callees(*s.expr, info);
        if (s.init) collect_callees(*s.init, info);
        if (s.post) collect_callees(*s.post, info);
        if (s.kind == StmtKind::Return) fi.return_nodes.push_back(s.id);
        g_.info.emplace(s.id, std::move(info));
        if (g_.entry_points.find(rf.qualified_name) == g_.entry_points.end())
          g_.entry_points[rf.qualified_name] = s.id;
      }
      for (const auto& child : s.pre) visit(child);
      for (const auto& child : s.body) visit(child);
      for (const auto& child : s.else_body) visit(child);
    };
    visit(*rf.fn.body);
    g_.functions[rf.qualified_name] = std::move(fi);
  }

  void collect_callees(const Expr& e, IpdgNodeInfo& info) {
    walk_exprs(e, [&](const Expr& x) {
      if (x.kind != ExprKind::Call || x.children.empty()) return;
      const Expr& callee = x.callee();
      if (callee.kind == ExprKind::Identifier) {
        if (NameContext::builtins().count(callee.text)) return;
        if (ctx_.types.count(callee.text)) return;  // cast or struct literal
        info.callee_names.insert(callee.text);
      } else if (callee.kind == ExprKind::Member) {
        info.callee_names.insert(callee.text);
      }
    });
  }

  // ---- local data flow ----------------------------------------------------

  using Defs = std::map<std::string, std::set<NodeId>>;

  static Defs merge(const Defs& a, const Defs& b) {
    Defs out = a;
    for (const auto& [k, v] : b) out[k].insert(v.begin(), v.end());
    return out;
  }

  void wire_function(const ContractDef& c, const ResolvedFunction& rf) {
    const auto& state_names = state_names_[c.name];
    std::set<std::string> params(g_.functions[rf.qualified_name].params.begin(),
                                 g_.functions[rf.qualified_name].params.end());

    std::vector<NodeId> guard_stack;

    auto visit_node = [&](const Stmt& s, Defs& d) {
      const IpdgNodeInfo& info = g_.info.at(s.id);
      for (NodeId guard : guard_stack)
        if (guard != s.id) g_.add_edge(guard, s.id, EdgeKind::Control);
      for (const auto& var : info.reads) {
        if (is_atom_name(var)) continue;
        auto it = d.find(var);
        if (it != d.end()) {
          for (NodeId def : it->second) g_.add_edge(def, s.id, EdgeKind::Data);
        } else if (params.count(var)) {
          param_uses_[rf.qualified_name].push_back({var, s.id});
        } else if (state_names.count(var)) {
          state_reads_.push_back({s.id, var});
        }
      }
      for (const auto& var : info.writes) {
        if (s.kind != StmtKind::VarDecl && state_names.count(var) &&
            !d.count(var)) {
          state_writes_.push_back({s.id, var});
        } else {
          d[var] = {s.id};  // strong update; declarations always bind locally
        }
      }
      resolve_calls(c, rf, s.id, info);
    };

    std::function<void(const Stmt&, Defs&)> flow = [&](const Stmt& s, Defs& d) {
      if (is_graph_stmt(s)) visit_node(s, d);
      switch (s.kind) {
        case StmtKind::Block:
        case StmtKind::Unchecked: {
          std::size_t mark = guard_stack.size();
          for (const auto& child : s.body) flow(child, d);
          guard_stack.resize(mark);  // requires scope to their block
          return;
        }
        case StmtKind::If: {
          guard_stack.push_back(s.id);
          Defs d_then = d, d_else = d;
          for (const auto& child : s.body) flow(child, d_then);
          for (const auto& child : s.else_body) flow(child, d_else);
          guard_stack.pop_back();
          d = merge(d_then, d_else);
          return;
        }
        case StmtKind::While:
        case StmtKind::For: {
          guard_stack.push_back(s.id);
          for (const auto& child : s.pre) flow(child, d);
          // two passes expose loop-carried definitions
          Defs d1 = d;
          for (const auto& child : s.body) flow(child, d1);
          Defs d2 = merge(d, d1);
          for (const auto& child : s.body) flow(child, d2);
          guard_stack.pop_back();
          d = merge(d, d2);
          return;
        }
        case StmtKind::ExprStmt:
          if (s.expr && detail::is_guard_call(*s.expr))
            guard_stack.push_back(s.id);  // dominates the rest of the block
          return;
        default:
          return;
      }
    };

    Defs d0;
    std::size_t mark = guard_stack.size();
    for (const auto& s : rf.fn.body->body) flow(s, d0);
    guard_stack.resize(mark);
  }

  void resolve_calls(const ContractDef& c, const ResolvedFunction& rf,
                     NodeId site, const IpdgNodeInfo& info_in) {
    IpdgNodeInfo& info = g_.info.at(site);
    auto& fn_info = g_.functions.at(rf.qualified_name);
    (void)info_in;
    for (const auto& name : info.callee_names) {
      std::string resolved = resolve_callee(c, name);
      if (resolved.empty()) {
        g_.add_edge(site, g_.unknown_node, EdgeKind::Call);
        g_.add_edge(g_.unknown_node, site, EdgeKind::Data);  // tainted return
        continue;
      }
      info.resolved_callees.insert(resolved);
      fn_info.callees.insert(resolved);
      callsites_of_[resolved].push_back(site);
      auto entry = g_.entry_points.find(resolved);
      if (entry != g_.entry_points.end())
        g_.add_edge(site, entry->second, EdgeKind::Call);
    }
  }

  // Resolution order: own resolved table, then any unit contract or library
  // providing the name. Unresolvable callees go to the unknown node.
  std::string resolve_callee(const ContractDef& c, const std::string& name) {
    for (const auto& rf : c.resolved) {
      auto slash = rf.qualified_name.rfind('.');
      if (rf.qualified_name.substr(slash + 1) == name)
        return rf.qualified_name;
    }
    for (const auto& other : unit_.contracts) {
      for (const auto& rf : other.resolved) {
        auto slash = rf.qualified_name.rfind('.');
        if (rf.qualified_name.substr(slash + 1) == name && rf.fn.body)
          return rf.qualified_name;
      }
    }
    return {};
  }

  void wire_state_edges() {
    // state-variable defs in any function reach uses in any function
    std::map<std::string, std::vector<NodeId>> defs_by_var;  // contract-local name
    for (const auto& [decl_key, decl_node] : g_.state_decls) {
      auto dot = decl_key.rfind('.');
      defs_by_var[decl_key.substr(dot + 1)].push_back(decl_node);
    }
    for (const auto& [node, var] : state_writes_) defs_by_var[var].push_back(node);
    for (const auto& [node, var] : state_reads_) {
      auto it = defs_by_var.find(var);
      if (it == defs_by_var.end()) continue;
      for (NodeId def : it->second)
        if (def != node) g_.add_edge(def, node, EdgeKind::Data);
    }
    // argument-to-parameter and return-value flow
    for (const auto& [fn, uses] : param_uses_) {
      auto sites = callsites_of_.find(fn);
      if (sites == callsites_of_.end()) continue;
      for (const auto& use : uses)
        for (NodeId site : sites->second)
          g_.add_edge(site, use.node, EdgeKind::Data);
    }
    for (const auto& [fn, fi] : g_.functions) {
      if (fi.return_nodes.empty()) continue;
      auto sites = callsites_of_.find(fn);
      if (sites == callsites_of_.end()) continue;
      for (NodeId ret : fi.return_nodes)
        for (NodeId site : sites->second)
          g_.add_edge(ret, site, EdgeKind::Data);
    }
  }
};

inline Ipdg build_ipdg(const AstUnit& unit) { return IpdgBuilder(unit).build(); }

// ---------------------------------------------------------------------------
// Dumps

inline std::string dump_ipdg_text(const Ipdg& g) {
  std::ostringstream os;
  for (const auto& e : g.edges)
    os << e.from << " -> " << e.to << " [" << edge_kind_name(e.kind) << "]\n";
  return os.str();
}

inline std::string dump_ipdg_dot(const Ipdg& g) {
  std::ostringstream os;
  os << "digraph ipdg {\n";
  for (NodeId n : g.nodes) {
    const auto* info = g.node_info(n);
    os << "  n" << n << " [label=\"" << n;
    if (info && !info->function.empty()) os << "\\n" << info->function;
    os << "\"];\n";
  }
  for (const auto& e : g.edges) {
    const char* color = e.kind == EdgeKind::Data      ? "red"
                        : e.kind == EdgeKind::Control ? "blue"
                                                      : "green";
    os << "  n" << e.from << " -> n" << e.to << " [color=" << color << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace srvscan
