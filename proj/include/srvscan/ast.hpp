#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "srvscan/core.hpp"

namespace srvscan {

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind {
  Identifier,
  Number,
  String,
  BoolLit,
  Member,       // base.member            children: [base], text = member
  Index,        // base[key]              children: [base, key]
  Call,         // callee(args...)        children: [callee, args...]
  Binary,       // a op b                 children: [lhs, rhs], text = op
  Unary,        // op a / a op            children: [operand], text = op
  Assign,       // lhs op rhs             children: [lhs, rhs], text = op
  Conditional,  // c ? a : b              children: [c, a, b]
  Tuple,        // (a, b, ...)            children: elements
  New,          // new T(...)             children: args, text = T
  Elementary,   // elementary type used as expression (casts): address, uint256
};

struct Expr {
  NodeId id = k_no_node;
  ExprKind kind = ExprKind::Identifier;
  std::string text;  // identifier / literal lexeme / operator / member name
  std::vector<Expr> children;
  std::vector<std::string> arg_names;  // named call arguments ({a: x, b: y})
  SourceSpan span;

  const Expr& callee() const { return children.front(); }
  bool is_ident(std::string_view name) const {
    return kind == ExprKind::Identifier && text == name;
  }
};

// ---------------------------------------------------------------------------
// Statements

enum class StmtKind {
  Block,
  VarDecl,      // decl_type decl_names = init
  ExprStmt,     // expr  (includes require/assert/revert calls)
  If,           // expr = condition, body = then, else_body = else
  While,        // expr = condition
  For,          // pre = init stmt (0..1), expr = condition, post = post expr
  Return,
  Emit,
  Opaque,       // inline assembly or out-of-subset construct; raw text plus
                // recorded identifier reads/writes, never silently dropped
  Placeholder,  // `_;` inside a modifier
  Break,
  Continue,
  Unchecked,    // body
};

struct Stmt {
  NodeId id = k_no_node;
  StmtKind kind = StmtKind::Block;
  SourceSpan span;

  std::string decl_type;
  std::string decl_location;  // memory / storage / calldata
  std::vector<std::string> decl_names;
  std::optional<Expr> init;  // VarDecl initializer
  std::optional<Expr> expr;  // condition / expression / return value
  std::optional<Expr> post;  // for-loop post expression
  std::vector<Stmt> pre;     // for-loop init statement
  std::vector<Stmt> body;
  std::vector<Stmt> else_body;

  std::string raw;  // assembly source text
  std::vector<std::string> asm_reads, asm_writes;
};

// ---------------------------------------------------------------------------
// Declarations

struct Param {
  NodeId id = k_no_node;
  std::string type_text;
  std::string location;
  std::string name;
  SourceSpan span;
};

// leading identifier of a type: "Identity[]" -> "Identity"
inline std::string base_type_name(const std::string& type_text) {
  auto cut = type_text.find_first_of(".[ (");
  return cut == std::string::npos ? type_text : type_text.substr(0, cut);
}

struct StateVar {
  NodeId id = k_no_node;
  std::string type_text;
  std::string name;
  std::string visibility;
  bool is_constant = false;
  bool is_immutable = false;
  bool is_mapping = false;
  std::optional<Expr> init;
  SourceSpan span;  // covers the whole declaration
};

struct FunctionDef {
  NodeId id = k_no_node;
  std::string name;  // "constructor" for constructors
  std::vector<Param> params;
  std::vector<Param> returns;
  std::string visibility = "public";
  std::string mutability;            // pure / view / payable / ""
  std::vector<Expr> modifier_calls;  // invocation expressions
  std::optional<Stmt> body;          // absent on interface declarations
  bool is_constructor = false;
  SourceSpan span;  // full text, signature through closing brace
};

struct ModifierDef {
  NodeId id = k_no_node;
  std::string name;
  std::vector<Param> params;
  Stmt body;
  SourceSpan span;
};

struct StructDef {
  NodeId id = k_no_node;
  std::string name;
  std::vector<Param> fields;
  SourceSpan span;
};

struct EventDef {
  NodeId id = k_no_node;
  std::string name;
  SourceSpan span;
};

struct UsingFor {
  std::string library;
  std::string type_text;  // "*" or a type
};

enum class ContractKind { Contract, Interface, Library };

// One entry in a contract's flattened function table.
struct ResolvedFunction {
  std::string qualified_name;    // "Contract.function"
  std::string origin_contract;   // contract that provided the winning body
  FunctionDef fn;                // body copy with modifier guards inlined
};

struct ContractDef {
  NodeId id = k_no_node;
  ContractKind kind = ContractKind::Contract;
  std::string name;
  std::vector<std::string> bases;  // as written, left to right
  std::vector<StateVar> state_vars;
  std::vector<FunctionDef> functions;
  std::vector<ModifierDef> modifiers;
  std::vector<StructDef> structs;
  std::vector<EventDef> events;
  std::vector<UsingFor> using_fors;
  SourceSpan span;

  std::vector<ResolvedFunction> resolved;  // filled by resolve_inheritance
};

struct AstUnit {
  std::string source_path;
  std::string source_text;
  std::string pragma_version;  // recorded, not interpreted
  std::vector<ContractDef> contracts;
  std::vector<StructDef> file_structs;  // file-level struct declarations
  std::map<NodeId, SourceSpan> node_index;
  bool resolved = false;

  const ContractDef* find_contract(std::string_view name) const {
    for (const auto& c : contracts)
      if (c.name == name) return &c;
    return nullptr;
  }

  std::string span_text(const SourceSpan& s) const {
    if (s.offset + s.length > source_text.size()) return {};
    return source_text.substr(s.offset, s.length);
  }
};

// ---------------------------------------------------------------------------
// Expression references with their free variables

struct ExprRef {
  NodeId node = k_no_node;
  std::set<std::string> free_variables;
  std::set<std::string> calls;  // function names invoked inside the expression
};

// Names that must not be treated as data variables when collecting free
// variables: called functions, declared types, events, builtins.
struct NameContext {
  std::set<std::string> callables;
  std::set<std::string> types;

  static const std::set<std::string>& builtins() {
    static const std::set<std::string> k = {
        "keccak256", "sha256",  "ripemd160", "ecrecover", "abi",
        "require",   "assert",  "revert",    "addmod",    "mulmod",
        "payable",   "type",    "super",     "selfdestruct",
        "blockhash", "gasleft", "emit",      "delete"};
    return k;
  }

  static const std::set<std::string>& elementary_types() {
    static const std::set<std::string> k = [] {
      std::set<std::string> s = {"address", "bool", "string", "bytes", "uint", "int"};
      for (int bits = 8; bits <= 256; bits += 8) {
        s.insert("uint" + std::to_string(bits));
        s.insert("int" + std::to_string(bits));
      }
      for (int n = 1; n <= 32; ++n) s.insert("bytes" + std::to_string(n));
      return s;
    }();
    return k;
  }

  bool is_type_name(const std::string& n) const {
    return types.count(n) || elementary_types().count(n);
  }

  bool is_callable(const std::string& n) const {
    return callables.count(n) || builtins().count(n);
  }

  static NameContext for_unit(const AstUnit& unit) {
    NameContext ctx;
    for (const auto& s : unit.file_structs) ctx.types.insert(s.name);
    for (const auto& c : unit.contracts) {
      ctx.types.insert(c.name);
      for (const auto& s : c.structs) ctx.types.insert(s.name);
      for (const auto& f : c.functions) ctx.callables.insert(f.name);
      for (const auto& m : c.modifiers) ctx.callables.insert(m.name);
      for (const auto& e : c.events) ctx.callables.insert(e.name);
    }
    return ctx;
  }
};

namespace detail {

inline void collect_free_vars(const Expr& e, const NameContext& ctx,
                              std::set<std::string>& out) {
  switch (e.kind) {
    case ExprKind::Identifier: {
      if (e.text == "this") {
        out.insert(std::string(atom_name(Atom::AddressThis)));
      } else if (!ctx.is_callable(e.text) && !ctx.is_type_name(e.text) &&
                 e.text != "msg" && e.text != "block" && e.text != "tx" &&
                 e.text != "now" && e.text != "true" && e.text != "false" &&
                 e.text != "_") {
        out.insert(e.text);
      }
      return;
    }
    case ExprKind::Member: {
      const Expr& base = e.children.front();
      if (base.kind == ExprKind::Identifier) {
        std::string dotted = base.text + "." + e.text;
        if (auto a = atom_from_name(dotted)) {
          out.insert(std::string(atom_name(*a)));
          return;
        }
        if (base.text == "msg" || base.text == "block" || base.text == "tx" ||
            base.text == "abi")
          return;  // non-atom builtin member (e.g. block.number): ignore
        if (ctx.is_type_name(base.text) && ctx.callables.count(e.text))
          return;  // library member reference: ECDSA.recover
      }
      collect_free_vars(base, ctx, out);
      return;
    }
    case ExprKind::Call: {
      // `address(this)` canonicalizes to the atom
      const Expr& callee = e.callee();
      if (callee.is_ident("address") && e.children.size() == 2 &&
          e.children[1].kind == ExprKind::Identifier &&
          e.children[1].text == "this") {
        out.insert(std::string(atom_name(Atom::AddressThis)));
        return;
      }
      // skip the callee identifier / member name, keep its base when it is
      // a value (x.recover(...) reads x)
      if (callee.kind == ExprKind::Member) {
        collect_free_vars(callee, ctx, out);
      } else if (callee.kind != ExprKind::Identifier &&
                 callee.kind != ExprKind::Elementary) {
        collect_free_vars(callee, ctx, out);
      }
      for (std::size_t i = 1; i < e.children.size(); ++i)
        collect_free_vars(e.children[i], ctx, out);
      return;
    }
    case ExprKind::Number:
    case ExprKind::String:
    case ExprKind::BoolLit:
    case ExprKind::Elementary:
      return;
    default:
      for (const auto& c : e.children) collect_free_vars(c, ctx, out);
      return;
  }
}

}  // namespace detail

inline std::set<std::string> free_variables(const Expr& e, const NameContext& ctx) {
  std::set<std::string> out;
  detail::collect_free_vars(e, ctx, out);
  return out;
}

inline ExprRef make_expr_ref(const Expr& e, const NameContext& ctx);

// ---------------------------------------------------------------------------
// Walkers

inline void walk_exprs(const Expr& e, const std::function<void(const Expr&)>& f) {
  f(e);
  for (const auto& c : e.children) walk_exprs(c, f);
}

inline void walk_stmts(const Stmt& s, const std::function<void(const Stmt&)>& f) {
  f(s);
  for (const auto& c : s.pre) walk_stmts(c, f);
  for (const auto& c : s.body) walk_stmts(c, f);
  for (const auto& c : s.else_body) walk_stmts(c, f);
}

inline void walk_stmt_exprs(const Stmt& s,
                            const std::function<void(const Expr&)>& f) {
  if (s.init) walk_exprs(*s.init, f);
  if (s.expr) walk_exprs(*s.expr, f);
  if (s.post) walk_exprs(*s.post, f);
}

// Called function names syntactically reachable from an expression.
inline std::set<std::string> called_names(const Expr& e) {
  std::set<std::string> out;
  walk_exprs(e, [&](const Expr& x) {
    if (x.kind != ExprKind::Call || x.children.empty()) return;
    const Expr& callee = x.callee();
    if (callee.kind == ExprKind::Identifier)
      out.insert(callee.text);
    else if (callee.kind == ExprKind::Member)
      out.insert(callee.text);  // member name: recover, transfer, ...
  });
  return out;
}

inline ExprRef make_expr_ref(const Expr& e, const NameContext& ctx) {
  ExprRef ref;
  ref.node = e.id;
  ref.free_variables = free_variables(e, ctx);
  for (const auto& n : called_names(e))
    if (!NameContext::builtins().count(n)) ref.calls.insert(n);
  return ref;
}

}  // namespace srvscan
