#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "srvscan/ast.hpp"
#include "srvscan/lexer.hpp"

namespace srvscan {

// Recursive-descent parser for the supported Solidity subset. Constructs the
// parser does not model (try/catch, do-while, inline assembly) become Opaque
// statements carrying their raw text and identifier reads/writes.
class Parser {
 public:
  Parser(std::string source, std::string path)
      : src_(std::move(source)), path_(std::move(path)) {
    tokens_ = lex(src_);
  }

  AstUnit parse() {
    AstUnit unit;
    unit.source_path = path_;
    unit.source_text = src_;
    while (!at_end()) {
      if (cur().is("pragma")) {
        advance();
        std::string version;
        while (!cur().is(";") && !at_end()) {
          if (!cur().is("solidity")) version += cur().text;
          advance();
        }
        expect(";");
        unit.pragma_version = version;
      } else if (cur().is("import")) {
        while (!cur().is(";") && !at_end()) advance();
        expect(";");
      } else if (cur().is("contract") || cur().is("interface") ||
                 cur().is("library") || cur().is("abstract")) {
        unit.contracts.push_back(parse_contract());
      } else if (cur().is("struct")) {
        unit.file_structs.push_back(parse_struct());
      } else if (cur().is("enum")) {
        skip_enum();
      } else if (cur().is("function")) {
        // file-level function: keep it analyzable under a synthetic contract
        ContractDef* file_scope = nullptr;
        for (auto& c : unit.contracts)
          if (c.name == "$file") file_scope = &c;
        if (!file_scope) {
          ContractDef c;
          c.id = fresh(cur());
          c.name = "$file";
          unit.contracts.push_back(std::move(c));
          file_scope = &unit.contracts.back();
        }
        file_scope->functions.push_back(parse_function());
      } else {
        throw err("unexpected token '" + cur().text + "' at file level");
      }
    }
    unit.node_index = std::move(node_index_);
    return unit;
  }

 private:
  std::string src_, path_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  NodeId next_id_ = 1;
  std::map<NodeId, SourceSpan> node_index_;

  // -- token plumbing -------------------------------------------------------

  const Token& cur() const { return tokens_[pos_]; }
  const Token& peek(std::size_t n = 1) const {
    return tokens_[std::min(pos_ + n, tokens_.size() - 1)];
  }
  bool at_end() const { return cur().kind == TokenKind::End; }
  const Token& advance() { return tokens_[pos_++]; }

  bool accept(std::string_view t) {
    if (cur().is(t)) {
      advance();
      return true;
    }
    return false;
  }

  const Token& expect(std::string_view t) {
    if (!cur().is(t)) throw err("expected '" + std::string(t) + "', found '" + cur().text + "'");
    return advance();
  }

  ParseError err(const std::string& msg) const {
    return ParseError(msg, cur().line, cur().column);
  }

  std::size_t token_end(const Token& t) const {
    return t.offset + std::max<std::size_t>(t.text.size(), 1);
  }

  SourceSpan span_from(const Token& begin) const {
    const Token& prev = tokens_[pos_ > 0 ? pos_ - 1 : 0];
    SourceSpan s;
    s.file = path_;
    s.line = begin.line;
    s.column = begin.column;
    s.offset = begin.offset;
    s.length = token_end(prev) > begin.offset ? token_end(prev) - begin.offset : 0;
    return s;
  }

  NodeId fresh(const Token& begin) {
    NodeId id = next_id_++;
    SourceSpan s;
    s.file = path_;
    s.line = begin.line;
    s.column = begin.column;
    s.offset = begin.offset;
    s.length = std::max<std::size_t>(begin.text.size(), 1);
    node_index_.emplace(id, s);
    return id;
  }

  void close_span(NodeId id, const Token& begin) {
    node_index_[id] = span_from(begin);
  }

  // -- types ----------------------------------------------------------------

  bool at_elementary_type() const {
    return cur().is_ident() && NameContext::elementary_types().count(cur().text) > 0;
  }

  bool at_type_start() const {
    return at_elementary_type() || cur().is("mapping");
  }

  std::string parse_type_text() {
    std::string text;
    if (accept("mapping")) {
      text = "mapping(";
      expect("(");
      text += parse_type_text();
      expect("=>");
      text += " => " + parse_type_text();
      expect(")");
      text += ")";
    } else {
      if (!cur().is_ident()) throw err("expected type name");
      text = advance().text;
      if (text == "address" && cur().is("payable")) {
        advance();
        text += " payable";
      }
      while (cur().is(".")) {  // qualified: Lib.Type
        advance();
        text += "." + advance().text;
      }
    }
    while (cur().is("[")) {
      advance();
      text += "[";
      if (!cur().is("]")) text += advance().text;
      expect("]");
      text += "]";
    }
    return text;
  }

  static std::string base_type_name(const std::string& type_text) {
    auto cut = type_text.find_first_of(".[ ");
    return cut == std::string::npos ? type_text : type_text.substr(0, cut);
  }

  // -- declarations ---------------------------------------------------------

  ContractDef parse_contract() {
    const Token& begin = cur();
    accept("abstract");
    ContractDef c;
    c.kind = cur().is("interface")  ? ContractKind::Interface
             : cur().is("library") ? ContractKind::Library
                                   : ContractKind::Contract;
    advance();
    c.id = fresh(cur());
    c.name = advance().text;
    if (accept("is")) {
      do {
        c.bases.push_back(advance().text);
        skip_balanced("(", ")");  // base constructor args
      } while (accept(","));
    }
    expect("{");
    while (!cur().is("}")) {
      if (at_end()) throw err("unterminated contract body");
      if (cur().is("using")) {
        advance();
        UsingFor u;
        u.library = advance().text;
        expect("for");
        u.type_text = cur().is("*") ? advance().text : parse_type_text();
        expect(";");
        c.using_fors.push_back(std::move(u));
      } else if (cur().is("struct")) {
        c.structs.push_back(parse_struct());
      } else if (cur().is("enum")) {
        skip_enum();
      } else if (cur().is("event")) {
        const Token& eb = cur();
        advance();
        EventDef e;
        e.id = fresh(eb);
        e.name = advance().text;
        skip_balanced("(", ")");
        accept("anonymous");
        expect(";");
        close_span(e.id, eb);
        c.events.push_back(std::move(e));
      } else if (cur().is("modifier")) {
        c.modifiers.push_back(parse_modifier());
      } else if (cur().is("function") || cur().is("constructor") ||
                 cur().is("receive") || cur().is("fallback")) {
        c.functions.push_back(parse_function());
      } else if (cur().is("error")) {  // custom error declaration
        while (!cur().is(";") && !at_end()) advance();
        expect(";");
      } else {
        c.state_vars.push_back(parse_state_var());
      }
    }
    expect("}");
    close_span(c.id, begin);
    return c;
  }

  StructDef parse_struct() {
    const Token& begin = cur();
    expect("struct");
    StructDef s;
    s.id = fresh(begin);
    s.name = advance().text;
    expect("{");
    while (!cur().is("}")) {
      Param f;
      const Token& fb = cur();
      f.type_text = parse_type_text();
      f.name = advance().text;
      f.id = fresh(fb);
      close_span(f.id, fb);
      expect(";");
      s.fields.push_back(std::move(f));
    }
    expect("}");
    close_span(s.id, begin);
    return s;
  }

  void skip_enum() {
    expect("enum");
    advance();  // name
    skip_balanced("{", "}");
  }

  // consumes a balanced open...close region; no-op when not at `open`
  void skip_balanced(std::string_view open, std::string_view close) {
    if (!cur().is(open)) return;
    advance();
    int depth = 1;
    while (depth > 0) {
      if (at_end()) throw err("unterminated '" + std::string(open) + "'");
      if (cur().is(open)) ++depth;
      if (cur().is(close)) --depth;
      advance();
    }
  }

  std::vector<Param> parse_param_list() {
    std::vector<Param> params;
    expect("(");
    while (!cur().is(")")) {
      Param p;
      const Token& pb = cur();
      p.type_text = parse_type_text();
      if (cur().is("memory") || cur().is("storage") || cur().is("calldata"))
        p.location = advance().text;
      accept("indexed");
      if (cur().is_ident() && !cur().is(",") && !cur().is(")"))
        p.name = advance().text;
      p.id = fresh(pb);
      close_span(p.id, pb);
      params.push_back(std::move(p));
      if (!cur().is(")")) expect(",");
    }
    expect(")");
    return params;
  }

  FunctionDef parse_function() {
    const Token& begin = cur();
    FunctionDef f;
    if (cur().is("constructor")) {
      advance();
      f.name = "constructor";
      f.is_constructor = true;
    } else if (cur().is("receive") || cur().is("fallback")) {
      f.name = advance().text;
    } else {
      expect("function");
      f.name = advance().text;
    }
    f.id = fresh(begin);
    f.params = parse_param_list();
    // attribute soup: visibility, mutability, virtual/override, modifiers,
    // returns(...) in any order
    while (!cur().is("{") && !cur().is(";")) {
      if (cur().is("public") || cur().is("external") || cur().is("internal") ||
          cur().is("private")) {
        f.visibility = advance().text;
      } else if (cur().is("pure") || cur().is("view") || cur().is("payable")) {
        f.mutability = advance().text;
      } else if (cur().is("virtual")) {
        advance();
      } else if (cur().is("override")) {
        advance();
        skip_balanced("(", ")");
      } else if (cur().is("returns")) {
        advance();
        f.returns = parse_param_list();
      } else if (cur().is_ident()) {
        Expr inv = parse_postfix(parse_primary());
        f.modifier_calls.push_back(std::move(inv));
      } else {
        throw err("unexpected token '" + cur().text + "' in function header");
      }
    }
    if (accept(";")) {
      close_span(f.id, begin);
      return f;  // declaration only (interface / abstract)
    }
    f.body = parse_block();
    close_span(f.id, begin);
    return f;
  }

  ModifierDef parse_modifier() {
    const Token& begin = cur();
    expect("modifier");
    ModifierDef m;
    m.id = fresh(begin);
    m.name = advance().text;
    if (cur().is("(")) m.params = parse_param_list();
    while (!cur().is("{")) advance();  // virtual/override noise
    m.body = parse_block();
    close_span(m.id, begin);
    return m;
  }

  StateVar parse_state_var() {
    const Token& begin = cur();
    StateVar v;
    v.id = fresh(begin);
    v.type_text = parse_type_text();
    v.is_mapping = v.type_text.starts_with("mapping");
    for (;;) {
      if (cur().is("public") || cur().is("internal") || cur().is("private")) {
        v.visibility = advance().text;
      } else if (cur().is("constant")) {
        advance();
        v.is_constant = true;
      } else if (cur().is("immutable")) {
        advance();
        v.is_immutable = true;
      } else if (cur().is("override")) {
        advance();
        skip_balanced("(", ")");
      } else {
        break;
      }
    }
    v.name = advance().text;
    if (accept("=")) v.init = parse_expression();
    expect(";");
    close_span(v.id, begin);
    return v;
  }

  // -- statements -----------------------------------------------------------

  Stmt parse_block() {
    const Token& begin = cur();
    expect("{");
    Stmt b;
    b.kind = StmtKind::Block;
    b.id = fresh(begin);
    while (!cur().is("}")) {
      if (at_end()) throw err("unterminated block");
      b.body.push_back(parse_statement());
    }
    expect("}");
    close_span(b.id, begin);
    return b;
  }

  Stmt parse_statement() {
    const Token& begin = cur();
    if (cur().is("{")) return parse_block();
    if (cur().is("if")) {
      advance();
      Stmt s;
      s.kind = StmtKind::If;
      s.id = fresh(begin);
      expect("(");
      s.expr = parse_expression();
      expect(")");
      s.body.push_back(parse_statement());
      if (accept("else")) s.else_body.push_back(parse_statement());
      close_span(s.id, begin);
      return s;
    }
    if (cur().is("while")) {
      advance();
      Stmt s;
      s.kind = StmtKind::While;
      s.id = fresh(begin);
      expect("(");
      s.expr = parse_expression();
      expect(")");
      s.body.push_back(parse_statement());
      close_span(s.id, begin);
      return s;
    }
    if (cur().is("for")) {
      advance();
      Stmt s;
      s.kind = StmtKind::For;
      s.id = fresh(begin);
      expect("(");
      if (!cur().is(";")) s.pre.push_back(parse_simple_statement());
      else advance();
      if (!cur().is(";")) s.expr = parse_expression();
      expect(";");
      if (!cur().is(")")) s.post = parse_expression();
      expect(")");
      s.body.push_back(parse_statement());
      close_span(s.id, begin);
      return s;
    }
    if (cur().is("return")) {
      advance();
      Stmt s;
      s.kind = StmtKind::Return;
      s.id = fresh(begin);
      if (!cur().is(";")) s.expr = parse_expression();
      expect(";");
      close_span(s.id, begin);
      return s;
    }
    if (cur().is("emit")) {
      advance();
      Stmt s;
      s.kind = StmtKind::Emit;
      s.id = fresh(begin);
      s.expr = parse_expression();
      expect(";");
      close_span(s.id, begin);
      return s;
    }
    if (cur().is("assembly")) {
      return parse_assembly(begin);
    }
    if (cur().is("unchecked")) {
      advance();
      Stmt s = parse_block();
      s.kind = StmtKind::Unchecked;
      return s;
    }
    if (cur().is("break") || cur().is("continue")) {
      Stmt s;
      s.kind = cur().is("break") ? StmtKind::Break : StmtKind::Continue;
      advance();
      s.id = fresh(begin);
      expect(";");
      close_span(s.id, begin);
      return s;
    }
    if (cur().is("_") && peek().is(";")) {
      advance();
      advance();
      Stmt s;
      s.kind = StmtKind::Placeholder;
      s.id = fresh(begin);
      close_span(s.id, begin);
      return s;
    }
    if (cur().is("try") || cur().is("do")) {
      return parse_opaque_statement(begin);
    }
    if (cur().is("revert") && peek().is_ident()) {
      // `revert CustomError(args);` — normalize to a revert call
      advance();
      Stmt s;
      s.kind = StmtKind::ExprStmt;
      s.id = fresh(begin);
      Expr callee;
      callee.kind = ExprKind::Identifier;
      callee.text = "revert";
      callee.id = fresh(begin);
      Expr inner = parse_expression();
      Expr call;
      call.kind = ExprKind::Call;
      call.id = fresh(begin);
      call.children.push_back(std::move(callee));
      call.children.push_back(std::move(inner));
      s.expr = std::move(call);
      expect(";");
      close_span(s.id, begin);
      return s;
    }
    Stmt s = parse_simple_statement();
    return s;
  }

  // declaration or expression statement, consuming the trailing ';'
  Stmt parse_simple_statement() {
    const Token& begin = cur();
    if (looks_like_declaration()) {
      Stmt s;
      s.kind = StmtKind::VarDecl;
      s.id = fresh(begin);
      s.decl_type = parse_type_text();
      if (cur().is("memory") || cur().is("storage") || cur().is("calldata"))
        s.decl_location = advance().text;
      s.decl_names.push_back(advance().text);
      if (accept("=")) s.init = parse_expression();
      expect(";");
      close_span(s.id, begin);
      return s;
    }
    Stmt s;
    s.kind = StmtKind::ExprStmt;
    s.id = fresh(begin);
    s.expr = parse_expression();
    expect(";");
    close_span(s.id, begin);
    return s;
  }

  bool looks_like_declaration() const {
    if (at_type_start()) return true;
    if (!cur().is_ident()) return false;
    // reserved words that start expressions
    if (cur().is("delete") || cur().is("new") || cur().is("true") ||
        cur().is("false") || cur().is("payable") || cur().is("type"))
      return false;
    std::size_t i = pos_ + 1;
    // optional qualification A.B
    while (tokens_[i].is(".") && tokens_[i + 1].is_ident()) i += 2;
    // optional array suffix
    while (tokens_[i].is("[")) {
      std::size_t j = i + 1;
      if (tokens_[j].is("]")) {
        i = j + 1;
        continue;
      }
      if (tokens_[j].kind == TokenKind::Number && tokens_[j + 1].is("]")) {
        i = j + 2;
        continue;
      }
      return false;  // `name[expr...` is an index expression
    }
    if (tokens_[i].is("memory") || tokens_[i].is("storage") ||
        tokens_[i].is("calldata"))
      return true;
    return tokens_[i].is_ident() && tokens_[i + 1].kind == TokenKind::Punct &&
           (tokens_[i + 1].is("=") || tokens_[i + 1].is(";"));
  }

  Stmt parse_assembly(const Token& begin) {
    expect("assembly");
    if (cur().kind == TokenKind::String) advance();  // "memory-safe"
    if (cur().is("(")) skip_balanced("(", ")");
    const Token& open = cur();
    expect("{");
    int depth = 1;
    std::size_t body_start = pos_;
    while (depth > 0) {
      if (at_end()) throw err("unterminated assembly block");
      if (cur().is("{")) ++depth;
      if (cur().is("}")) --depth;
      if (depth > 0) advance();
    }
    std::size_t body_end = pos_;
    const Token& close = cur();
    expect("}");

    Stmt s;
    s.kind = StmtKind::Opaque;
    s.id = fresh(begin);
    s.raw = src_.substr(open.offset, token_end(close) - open.offset);
    scan_opaque_accesses(body_start, body_end, s);
    close_span(s.id, begin);
    return s;
  }

  // try/catch, do-while: capture verbatim with identifier accesses recorded
  Stmt parse_opaque_statement(const Token& begin) {
    std::size_t start = pos_;
    // consume until the statement's closing brace chain ends
    while (!cur().is("{") && !at_end()) advance();
    skip_balanced("{", "}");
    // trailing clauses: catch {...}, while (...) ;
    for (;;) {
      if (cur().is("catch")) {
        advance();
        if (cur().is("(")) skip_balanced("(", ")");
        if (cur().is_ident() && peek().is("(")) {
          advance();
          skip_balanced("(", ")");
        }
        skip_balanced("{", "}");
        continue;
      }
      if (cur().is("while")) {
        advance();
        skip_balanced("(", ")");
        accept(";");
        continue;
      }
      break;
    }
    std::size_t end = pos_;
    Stmt s;
    s.kind = StmtKind::Opaque;
    s.id = fresh(begin);
    s.raw = src_.substr(begin.offset, token_end(tokens_[end - 1]) - begin.offset);
    scan_opaque_accesses(start, end, s);
    close_span(s.id, begin);
    return s;
  }

  static const std::set<std::string>& yul_builtins() {
    static const std::set<std::string> k = {
        "mload",    "mstore",   "mstore8",  "calldataload", "calldatacopy",
        "add",      "sub",      "mul",      "div",          "mod",
        "lt",       "gt",       "eq",       "iszero",       "and",
        "or",       "xor",      "not",      "shl",          "shr",
        "sar",      "sload",    "sstore",   "let",          "if",
        "for",      "switch",   "case",     "default",      "function",
        "leave",    "revert",   "return",   "keccak256",    "staticcall",
        "call",     "delegatecall", "callcode", "gas",      "caller",
        "callvalue","chainid",  "timestamp","address",      "origin",
        "returndatasize", "returndatacopy", "pop",          "byte",
        "exp",      "signextend", "slt",    "sgt",          "sdiv",
        "smod",     "balance",  "extcodesize", "extcodecopy", "extcodehash",
        "create",   "create2",  "log0",     "log1",         "log2",
        "log3",     "log4",     "number",   "difficulty",   "coinbase",
        "gaslimit", "gasprice", "blockhash","selfbalance",  "invalid",
        "stop",     "msize",    "pc",       "codesize",     "codecopy",
        "try",      "catch",    "do",       "while"};
    return k;
  }

  void scan_opaque_accesses(std::size_t from, std::size_t to, Stmt& s) {
    std::set<std::string> reads, writes;
    for (std::size_t i = from; i < to; ++i) {
      const Token& t = tokens_[i];
      if (t.kind != TokenKind::Identifier) continue;
      if (yul_builtins().count(t.text)) continue;
      if (i + 1 < to && tokens_[i + 1].is(":="))
        writes.insert(t.text);
      else
        reads.insert(t.text);
    }
    // a slot read on the left of := (x.slot) is still a write to x
    s.asm_reads.assign(reads.begin(), reads.end());
    s.asm_writes.assign(writes.begin(), writes.end());
  }

  // -- expressions ----------------------------------------------------------

  Expr parse_expression() { return parse_assignment(); }

  Expr parse_assignment() {
    Expr lhs = parse_conditional();
    static const std::set<std::string> kAssignOps = {
        "=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>="};
    if (cur().kind == TokenKind::Punct && kAssignOps.count(cur().text)) {
      const Token& op = advance();
      Expr rhs = parse_assignment();
      Expr a;
      a.kind = ExprKind::Assign;
      a.text = op.text;
      a.id = fresh(op);
      a.span = node_index_[a.id];
      a.children.push_back(std::move(lhs));
      a.children.push_back(std::move(rhs));
      return a;
    }
    return lhs;
  }

  Expr parse_conditional() {
    Expr c = parse_binary(0);
    if (accept("?")) {
      Expr t = parse_expression();
      expect(":");
      Expr f = parse_expression();
      Expr e;
      e.kind = ExprKind::Conditional;
      e.id = next_id_++;
      node_index_.emplace(e.id, c.span);
      e.children.push_back(std::move(c));
      e.children.push_back(std::move(t));
      e.children.push_back(std::move(f));
      return e;
    }
    return c;
  }

  static int binary_tier(const std::string& op) {
    static const std::vector<std::set<std::string>> kTiers = {
        {"||"},
        {"&&"},
        {"|"},
        {"^"},
        {"&"},
        {"==", "!="},
        {"<", ">", "<=", ">="},
        {"<<", ">>"},
        {"+", "-"},
        {"*", "/", "%"},
        {"**"},
    };
    for (std::size_t i = 0; i < kTiers.size(); ++i)
      if (kTiers[i].count(op)) return static_cast<int>(i);
    return -1;
  }

  Expr parse_binary(int min_tier) {
    Expr lhs = parse_unary();
    for (;;) {
      if (cur().kind != TokenKind::Punct) return lhs;
      int tier = binary_tier(cur().text);
      if (tier < min_tier) return lhs;
      const Token& op = advance();
      Expr rhs = parse_binary(tier + 1);
      Expr e;
      e.kind = ExprKind::Binary;
      e.text = op.text;
      e.id = fresh(op);
      e.span = node_index_[e.id];
      e.children.push_back(std::move(lhs));
      e.children.push_back(std::move(rhs));
      lhs = std::move(e);
    }
  }

  Expr parse_unary() {
    if (cur().is("!") || cur().is("~") || cur().is("-") || cur().is("+") ||
        cur().is("++") || cur().is("--") || cur().is("delete")) {
      const Token& op = advance();
      Expr e;
      e.kind = ExprKind::Unary;
      e.text = op.text;
      e.id = fresh(op);
      e.children.push_back(parse_unary());
      close_span(e.id, op);
      e.span = node_index_[e.id];
      return e;
    }
    if (cur().is("new")) {
      const Token& op = advance();
      Expr e;
      e.kind = ExprKind::New;
      e.id = fresh(op);
      e.text = parse_type_text();
      if (cur().is("(")) {
        auto args = parse_call_args(e);
        for (auto& a : args) e.children.push_back(std::move(a));
      }
      close_span(e.id, op);
      e.span = node_index_[e.id];
      return e;
    }
    return parse_postfix(parse_primary());
  }

  std::vector<Expr> parse_call_args(Expr& call_node) {
    std::vector<Expr> args;
    expect("(");
    if (accept("{")) {  // named arguments
      while (!cur().is("}")) {
        call_node.arg_names.push_back(advance().text);
        expect(":");
        args.push_back(parse_expression());
        if (!cur().is("}")) expect(",");
      }
      expect("}");
    } else {
      while (!cur().is(")")) {
        args.push_back(parse_expression());
        if (!cur().is(")")) expect(",");
      }
    }
    expect(")");
    return args;
  }

  Expr parse_postfix(Expr base) {
    for (;;) {
      const Token& begin = cur();
      if (cur().is("(")) {
        Expr call;
        call.kind = ExprKind::Call;
        call.id = fresh(begin);
        call.span = base.span;
        Expr callee = std::move(base);
        auto args = parse_call_args(call);
        call.children.push_back(std::move(callee));
        for (auto& a : args) call.children.push_back(std::move(a));
        close_span(call.id, begin);
        base = std::move(call);
      } else if (cur().is("[")) {
        advance();
        Expr idx;
        idx.kind = ExprKind::Index;
        idx.id = fresh(begin);
        idx.span = base.span;
        Expr key = parse_expression();
        expect("]");
        idx.children.push_back(std::move(base));
        idx.children.push_back(std::move(key));
        close_span(idx.id, begin);
        base = std::move(idx);
      } else if (cur().is(".")) {
        advance();
        Expr mem;
        mem.kind = ExprKind::Member;
        mem.id = fresh(begin);
        mem.span = base.span;
        mem.text = advance().text;
        mem.children.push_back(std::move(base));
        close_span(mem.id, begin);
        base = std::move(mem);
      } else if (cur().is("++") || cur().is("--")) {
        const Token& op = advance();
        Expr e;
        e.kind = ExprKind::Unary;
        e.text = op.text + "post";
        e.id = fresh(op);
        e.children.push_back(std::move(base));
        base = std::move(e);
      } else {
        return base;
      }
    }
  }

  Expr parse_primary() {
    const Token& begin = cur();
    if (cur().kind == TokenKind::Number) {
      Expr e;
      e.kind = ExprKind::Number;
      e.id = fresh(begin);
      e.text = advance().text;
      // number units (wei/ether/days/...) are irrelevant to the analyses
      if (cur().is("ether") || cur().is("wei") || cur().is("gwei") ||
          cur().is("seconds") || cur().is("minutes") || cur().is("hours") ||
          cur().is("days") || cur().is("weeks"))
        advance();
      e.span = node_index_[e.id];
      return e;
    }
    if (cur().kind == TokenKind::String) {
      Expr e;
      e.kind = ExprKind::String;
      e.id = fresh(begin);
      e.text = advance().text;
      e.span = node_index_[e.id];
      return e;
    }
    if (cur().is("true") || cur().is("false")) {
      Expr e;
      e.kind = ExprKind::BoolLit;
      e.id = fresh(begin);
      e.text = advance().text;
      e.span = node_index_[e.id];
      return e;
    }
    if (cur().is("(")) {
      advance();
      std::vector<Expr> elems;
      while (!cur().is(")")) {
        elems.push_back(parse_expression());
        if (!cur().is(")")) expect(",");
      }
      expect(")");
      if (elems.size() == 1) return std::move(elems.front());
      Expr t;
      t.kind = ExprKind::Tuple;
      t.id = fresh(begin);
      t.children = std::move(elems);
      close_span(t.id, begin);
      t.span = node_index_[t.id];
      return t;
    }
    if (cur().is("[")) {
      advance();
      Expr t;
      t.kind = ExprKind::Tuple;
      t.text = "[]";
      t.id = fresh(begin);
      while (!cur().is("]")) {
        t.children.push_back(parse_expression());
        if (!cur().is("]")) expect(",");
      }
      expect("]");
      close_span(t.id, begin);
      t.span = node_index_[t.id];
      return t;
    }
    if (cur().is_ident()) {
      Expr e;
      e.kind = at_elementary_type() ? ExprKind::Elementary : ExprKind::Identifier;
      e.id = fresh(begin);
      e.text = advance().text;
      e.span = node_index_[e.id];
      return e;
    }
    throw err("unexpected token '" + cur().text + "' in expression");
  }
};

inline AstUnit parse_source(std::string source_text, std::string path) {
  return Parser(std::move(source_text), std::move(path)).parse();
}

}  // namespace srvscan
