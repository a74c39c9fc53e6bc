#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "srvscan/net.hpp"
#include "srvscan/parser.hpp"
#include "srvscan/patterns.hpp"
#include "srvscan/prompts.hpp"
#include "srvscan/slicer.hpp"
#include "srvscan/taint.hpp"

namespace srvscan {

enum class OracleMode { Live, Replay, Heuristic };
enum class OracleKind { KeyVariables, SanitizedVariables, FunctionSequence };

inline std::string_view oracle_mode_name(OracleMode m) {
  switch (m) {
    case OracleMode::Live: return "live";
    case OracleMode::Replay: return "replay";
    case OracleMode::Heuristic: return "heuristic";
  }
  return "?";
}

inline std::optional<OracleMode> oracle_mode_from_name(std::string_view s) {
  if (s == "live") return OracleMode::Live;
  if (s == "replay") return OracleMode::Replay;
  if (s == "heuristic") return OracleMode::Heuristic;
  return std::nullopt;
}

inline std::string_view oracle_kind_name(OracleKind k) {
  switch (k) {
    case OracleKind::KeyVariables: return "key-variables";
    case OracleKind::SanitizedVariables: return "sanitized-variables";
    case OracleKind::FunctionSequence: return "function-sequence";
  }
  return "?";
}

inline std::optional<OracleKind> oracle_kind_from_name(std::string_view s) {
  if (s == "key-variables") return OracleKind::KeyVariables;
  if (s == "sanitized-variables") return OracleKind::SanitizedVariables;
  if (s == "function-sequence") return OracleKind::FunctionSequence;
  return std::nullopt;
}

struct OracleRequest {
  OracleKind kind = OracleKind::KeyVariables;
  std::string rendered_prompt;
  std::string context_digest;  // content hash of the code placed in the prompt
};

struct OracleResponse {
  OracleKind kind = OracleKind::KeyVariables;
  // KeyVariables payload
  bool signature_verification = true;
  std::vector<std::string> key_variables;
  std::string reason;
  // SanitizedVariables payload
  std::map<SrvType, std::vector<std::string>> sanitized;
  // FunctionSequence payload: warning function -> ordered sequences
  std::map<std::string, std::vector<std::vector<std::string>>> sequences;

  int attempts = 1;        // 1..3
  int dropped_names = 0;   // identifiers that failed slice name-matching
  std::string raw_text;
};

// ---------------------------------------------------------------------------
// Transcript: append-only JSON Lines record of oracle exchanges keyed by
// (context_digest, kind); replays deterministically offline.

struct TranscriptEntry {
  std::string context_digest;
  OracleKind kind = OracleKind::KeyVariables;
  std::string raw_text;
};

class OracleTranscript {
 public:
  std::string mode_recorded = "heuristic";

  void append(TranscriptEntry e) {
    std::string key = make_key(e.context_digest, e.kind);
    if (index_.count(key)) return;  // deterministic modes re-record identically
    index_[key] = entries_.size();
    entries_.push_back(std::move(e));
  }

  std::optional<std::string> lookup(const std::string& digest,
                                    OracleKind kind) const {
    auto it = index_.find(make_key(digest, kind));
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].raw_text;
  }

  const std::vector<TranscriptEntry>& entries() const { return entries_; }

  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open transcript: " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) throw IoError("malformed transcript line in " + path);
      if (j.contains("mode_recorded")) {
        mode_recorded = j["mode_recorded"].get<std::string>();
        continue;
      }
      TranscriptEntry e;
      e.context_digest = j.value("context_digest", "");
      auto kind = oracle_kind_from_name(j.value("kind", ""));
      if (!kind) throw IoError("unknown oracle kind in transcript: " + path);
      e.kind = *kind;
      e.raw_text = j.value("raw_text", "");
      append(std::move(e));
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write transcript: " + path);
    nlohmann::ordered_json header;
    header["mode_recorded"] = mode_recorded;
    out << header.dump() << "\n";
    for (const auto& e : entries_) {
      nlohmann::ordered_json j;
      j["context_digest"] = e.context_digest;
      j["kind"] = std::string(oracle_kind_name(e.kind));
      j["raw_text"] = e.raw_text;
      out << j.dump() << "\n";
    }
  }

 private:
  static std::string make_key(const std::string& digest, OracleKind kind) {
    return digest + "/" + std::string(oracle_kind_name(kind));
  }
  std::vector<TranscriptEntry> entries_;
  std::map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// Response-text handling

// The model keeps chain-of-thought before the final JSON, so take the last
// well-formed JSON object in the text.
inline std::optional<nlohmann::json> extract_last_json(const std::string& text) {
  for (std::size_t end = text.rfind('}'); end != std::string::npos;
       end = end == 0 ? std::string::npos : text.rfind('}', end - 1)) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = end + 1; i-- > 0;) {
      char c = text[i];
      if (in_string) {
        if (c == '"' && (i == 0 || text[i - 1] != '\\')) in_string = false;
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '}') {
        ++depth;
      } else if (c == '{') {
        --depth;
        if (depth == 0) {
          auto j = nlohmann::json::parse(text.substr(i, end - i + 1), nullptr,
                                         false);
          if (!j.is_discarded() && j.is_object()) return j;
          break;  // malformed candidate; try an earlier '}'
        }
      }
    }
    if (end == 0) break;
  }
  return std::nullopt;
}

// word-boundary identifier search used for payload name-matching
inline bool contains_identifier(const std::string& code, const std::string& name) {
  if (name.empty()) return false;
  auto is_word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
  };
  std::size_t at = 0;
  while ((at = code.find(name, at)) != std::string::npos) {
    bool left_ok = at == 0 || !is_word(code[at - 1]);
    std::size_t end = at + name.size();
    bool right_ok = end >= code.size() || !is_word(code[end]);
    if (left_ok && right_ok) return true;
    at = end;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Heuristic oracle: a pure function of the provided code text. It mirrors the
// structure of the live analysis so transcripts from either mode replay the
// same way.

namespace heuristic {

inline std::optional<AstUnit> try_parse_snippet(const std::string& text) {
  try {
    return resolve_inheritance(parse_source(text, "<oracle>"));
  } catch (const ParseError&) {
  }
  try {
    return resolve_inheritance(
        parse_source("contract $snippet {\n" + text + "\n}", "<oracle>"));
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

// assignment graph: lhs variable -> free variables of its right-hand sides
inline std::map<std::string, std::set<std::string>> assignment_deps(
    const AstUnit& unit, const NameContext& ctx) {
  std::map<std::string, std::set<std::string>> deps;
  auto note = [&](const std::string& var, const Expr& rhs) {
    for (const auto& v : free_variables(rhs, ctx))
      if (!is_atom_name(v)) deps[var].insert(v);
  };
  for (const auto& c : unit.contracts) {
    for (const auto& sv : c.state_vars)
      if (sv.init) note(sv.name, *sv.init);
    for (const auto& rf : c.resolved) {
      if (rf.origin_contract != c.name || !rf.fn.body) continue;
      walk_stmts(*rf.fn.body, [&](const Stmt& s) {
        if (s.kind == StmtKind::VarDecl && s.init && !s.decl_names.empty()) {
          note(s.decl_names.front(), *s.init);
        } else if (s.kind == StmtKind::ExprStmt && s.expr &&
                   s.expr->kind == ExprKind::Assign) {
          std::string root = detail::root_of(s.expr->children[0]);
          if (!root.empty()) note(root, s.expr->children[1]);
        }
      });
    }
  }
  return deps;
}

inline nlohmann::ordered_json key_variables_payload(const std::string& code) {
  nlohmann::ordered_json out;
  auto unit = try_parse_snippet(code);
  if (!unit) {
    out["signature_verification"] = false;
    out["key_variables"] = nlohmann::json::array();
    out["reason"] = "code block could not be parsed";
    return out;
  }
  auto sinks = locate_sinks(*unit);
  if (sinks.empty()) {
    out["signature_verification"] = false;
    out["key_variables"] = nlohmann::json::array();
    out["reason"] = "no signature verification";
    return out;
  }
  NameContext ctx = NameContext::for_unit(*unit);
  auto deps = assignment_deps(*unit, ctx);
  std::set<std::string> vars;
  auto seed = [&](const std::optional<ExprRef>& ref) {
    if (!ref) return;
    for (const auto& v : ref->free_variables)
      if (!is_atom_name(v)) vars.insert(v);
  };
  for (const auto& s : sinks) {
    seed(s.hash_arg);
    seed(s.v_arg);
    seed(s.r_arg);
    seed(s.s_arg);
    seed(s.sig_arg);
  }
  std::vector<std::string> work(vars.begin(), vars.end());
  while (!work.empty()) {
    std::string v = work.back();
    work.pop_back();
    auto it = deps.find(v);
    if (it == deps.end()) continue;
    for (const auto& dep : it->second)
      if (vars.insert(dep).second) work.push_back(dep);
  }
  out["signature_verification"] = true;
  out["key_variables"] = std::vector<std::string>(vars.begin(), vars.end());
  out["reason"] = "variables reaching the recovery call arguments";
  return out;
}

inline nlohmann::ordered_json sanitized_payload(const std::string& code,
                                                const std::set<SrvType>& types) {
  nlohmann::ordered_json result;
  nlohmann::ordered_json table = nlohmann::ordered_json::object();
  auto unit = try_parse_snippet(code);
  if (!unit) {
    result["sanitized_variables"] = table;
    return result;
  }
  NameContext ctx = NameContext::for_unit(*unit);
  std::map<SrvType, std::set<std::string>> found;

  std::set<std::string> contract_types;
  for (const auto& c : unit->contracts)
    if (c.kind != ContractKind::Library) contract_types.insert(c.name);

  for (const auto& c : unit->contracts) {
    std::set<std::string> state_names;
    for (const StateVar* v : visible_state_vars(*unit, c))
      state_names.insert(v->name);

    for (const auto& rf : c.resolved) {
      if (rf.origin_contract != c.name || !rf.fn.body) continue;
      bool is_valid_sig_fn = short_name(rf.qualified_name) == "isValidSignature";
      std::set<std::string> identity_params;
      for (const auto& p : rf.fn.params)
        if (contract_types.count(base_type_name(p.type_text)))
          identity_params.insert(p.name);

      std::set<std::string> guarded_maps, written_maps;
      walk_stmts(*rf.fn.body, [&](const Stmt& s) {
        // guard conditions
        const Expr* cond = nullptr;
        if ((s.kind == StmtKind::If || s.kind == StmtKind::While ||
             s.kind == StmtKind::For) &&
            s.expr)
          cond = &*s.expr;
        else if (s.kind == StmtKind::ExprStmt && s.expr &&
                 detail::is_guard_call(*s.expr) && s.expr->children.size() > 1)
          cond = &s.expr->children[1];

        if (cond) {
          if (types.count(SrvType::XCra))
            for (const auto& p : patterns::equality_partners(
                     *cond, std::string(atom_name(Atom::BlockChainid)), ctx))
              found[SrvType::XCra].insert(p);
          if (types.count(SrvType::XPra))
            for (const auto& p : patterns::equality_partners(
                     *cond, std::string(atom_name(Atom::AddressThis)), ctx))
              found[SrvType::XPra].insert(p);
          if (types.count(SrvType::Casr)) {
            for (const auto& idp : identity_params)
              for (const auto& p : patterns::equality_partners(*cond, idp, ctx))
                found[SrvType::Casr].insert(p);
            if (is_valid_sig_fn)
              for (const auto& p : patterns::equality_partners(
                       *cond, std::string(atom_name(Atom::AddressThis)), ctx))
                found[SrvType::Casr].insert(p);
          }
          if (types.count(SrvType::Sma)) {
            for (const auto& v : free_variables(*cond, ctx)) {
              if (is_atom_name(v)) continue;
              if (patterns::v_range_check(*cond, v, ctx) !=
                  patterns::CheckForm::None)
                found[SrvType::Sma].insert(v);
              if (patterns::s_bound_check(*cond, v,
                                          U256::secp256k1_half_order(), ctx) !=
                  patterns::CheckForm::None)
                found[SrvType::Sma].insert(v);
            }
          }
          // mapping reads inside guards
          walk_exprs(*cond, [&](const Expr& e) {
            if (e.kind != ExprKind::Index) return;
            std::string root = detail::root_of(e);
            if (state_names.count(root)) guarded_maps.insert(root);
          });
        }

        // sanitization by hash composition and mapping writes
        auto scan_write = [&](const Expr& target) {
          std::string root = detail::root_of(target);
          if (state_names.count(root) && target.kind == ExprKind::Index)
            written_maps.insert(root);
        };
        const Expr* rhs = nullptr;
        std::string lhs_var;
        if (s.kind == StmtKind::VarDecl && s.init && !s.decl_names.empty()) {
          rhs = &*s.init;
          lhs_var = s.decl_names.front();
        } else if (s.kind == StmtKind::ExprStmt && s.expr &&
                   s.expr->kind == ExprKind::Assign) {
          rhs = &s.expr->children[1];
          lhs_var = detail::root_of(s.expr->children[0]);
          scan_write(s.expr->children[0]);
        }
        walk_stmt_exprs(s, [&](const Expr& e) {
          if (e.kind == ExprKind::Unary &&
              (e.text == "++" || e.text == "--" || e.text == "++post" ||
               e.text == "--post" || e.text == "delete"))
            scan_write(e.children.front());
        });
        if (rhs && !lhs_var.empty()) {
          if (types.count(SrvType::XCra) &&
              patterns::hash_composes(*rhs,
                                      std::string(atom_name(Atom::BlockChainid)),
                                      ctx))
            found[SrvType::XCra].insert(lhs_var);
          if (types.count(SrvType::XPra) &&
              patterns::hash_composes(*rhs,
                                      std::string(atom_name(Atom::AddressThis)),
                                      ctx))
            found[SrvType::XPra].insert(lhs_var);
          if (types.count(SrvType::Casr)) {
            for (const auto& idp : identity_params)
              if (patterns::hash_composes(*rhs, idp, ctx))
                found[SrvType::Casr].insert(lhs_var);
          }
        }
      });

      if (types.count(SrvType::Ssmi)) {
        for (const auto& m : guarded_maps)
          if (written_maps.count(m)) found[SrvType::Ssmi].insert(m);
      }
    }
  }

  for (SrvType t : all_srv_types()) {
    if (!types.count(t)) continue;
    auto it = found.find(t);
    if (it == found.end() || it->second.empty()) continue;
    table[std::string(srv_name(t))] =
        std::vector<std::string>(it->second.begin(), it->second.end());
  }
  result["sanitized_variables"] = table;
  return result;
}

inline nlohmann::ordered_json sequences_payload(
    const std::vector<std::string>& warning_functions, const std::string& code) {
  nlohmann::ordered_json mapping = nlohmann::ordered_json::object();
  auto unit = try_parse_snippet(code);
  std::map<std::string, std::set<std::string>> calls;  // short name graph
  std::set<std::string> entries;
  if (unit) {
    for (const auto& c : unit->contracts) {
      for (const auto& rf : c.resolved) {
        if (!rf.fn.body) continue;
        std::string fn = short_name(rf.qualified_name);
        if (rf.fn.visibility == "public" || rf.fn.visibility == "external")
          if (!rf.fn.is_constructor) entries.insert(fn);
        walk_stmts(*rf.fn.body, [&](const Stmt& s) {
          walk_stmt_exprs(s, [&](const Expr& e) {
            if (e.kind != ExprKind::Call || e.children.empty()) return;
            const Expr& callee = e.callee();
            std::string name = callee.kind == ExprKind::Identifier
                                   ? callee.text
                                   : callee.kind == ExprKind::Member
                                         ? callee.text
                                         : "";
            if (name.empty() || NameContext::builtins().count(name)) return;
            // only in-contract functions with bodies: no interfaces, no events
            for (const auto& other : unit->contracts)
              for (const auto& orf : other.resolved)
                if (orf.fn.body && short_name(orf.qualified_name) == name)
                  calls[fn].insert(name);
          });
        });
      }
    }
  }

  for (const auto& target : warning_functions) {
    std::vector<std::vector<std::string>> seqs;
    // breadth-first path enumeration, shortest first, bounded
    std::vector<std::vector<std::string>> frontier;
    for (const auto& e : entries) frontier.push_back({e});
    std::size_t depth = 0;
    while (!frontier.empty() && seqs.size() < 5 && depth < 4) {
      ++depth;
      std::vector<std::vector<std::string>> next;
      for (const auto& path : frontier) {
        if (path.back() == target) {
          if (seqs.size() < 5) seqs.push_back(path);
          continue;
        }
        auto it = calls.find(path.back());
        if (it == calls.end()) continue;
        for (const auto& callee : it->second) {
          if (std::find(path.begin(), path.end(), callee) != path.end())
            continue;
          auto longer = path;
          longer.push_back(callee);
          next.push_back(std::move(longer));
        }
      }
      frontier = std::move(next);
    }
    mapping[target] = seqs;
  }
  nlohmann::ordered_json out;
  out["warnings"] = mapping;
  return out;
}

}  // namespace heuristic

// ---------------------------------------------------------------------------
// Payload parsing shared by all modes, with slice name-matching.

inline OracleResponse parse_payload(OracleKind kind, const nlohmann::json& j,
                                    const std::string& match_code) {
  OracleResponse r;
  r.kind = kind;
  auto keep = [&](const std::string& name) {
    if (contains_identifier(match_code, name)) return true;
    ++r.dropped_names;
    return false;
  };
  switch (kind) {
    case OracleKind::KeyVariables: {
      r.signature_verification = j.value("signature_verification", true);
      r.reason = j.value("reason", "");
      if (j.contains("key_variables") && j["key_variables"].is_array())
        for (const auto& v : j["key_variables"])
          if (v.is_string() && keep(v.get<std::string>()))
            r.key_variables.push_back(v.get<std::string>());
      break;
    }
    case OracleKind::SanitizedVariables: {
      const nlohmann::json* table = nullptr;
      if (j.contains("sanitized_variables") && j["sanitized_variables"].is_object())
        table = &j["sanitized_variables"];
      else if (j.is_object())
        table = &j;
      if (table) {
        for (auto it = table->begin(); it != table->end(); ++it) {
          auto type = srv_from_name(it.key());
          if (!type || !it.value().is_array()) continue;
          for (const auto& v : it.value())
            if (v.is_string() && keep(v.get<std::string>()))
              r.sanitized[*type].push_back(v.get<std::string>());
        }
      }
      break;
    }
    case OracleKind::FunctionSequence: {
      const nlohmann::json* table = nullptr;
      if (j.contains("warnings") && j["warnings"].is_object())
        table = &j["warnings"];
      else if (j.is_object())
        table = &j;
      if (table) {
        for (auto it = table->begin(); it != table->end(); ++it) {
          if (!contains_identifier(match_code, it.key())) {
            ++r.dropped_names;
            continue;
          }
          auto& seqs = r.sequences[it.key()];
          if (!it.value().is_array()) continue;
          auto add_sequence = [&](const nlohmann::json& arr) {
            if (seqs.size() >= 5) return;
            std::vector<std::string> seq;
            for (const auto& fn : arr) {
              if (!fn.is_string()) continue;
              if (seq.size() >= 4) break;
              if (keep(fn.get<std::string>()))
                seq.push_back(fn.get<std::string>());
            }
            if (!seq.empty()) seqs.push_back(std::move(seq));
          };
          bool nested = !it.value().empty() && it.value().front().is_array();
          if (nested) {
            for (const auto& arr : it.value()) add_sequence(arr);
          } else if (!it.value().empty()) {
            add_sequence(it.value());
          }
        }
      }
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Oracle facade

struct OracleConfig {
  OracleMode mode = OracleMode::Heuristic;
  std::string endpoint;  // http(s)://host[:port]
  std::string chat_path = "/v1/chat/completions";
  std::string model = "deepseek-chat";
  std::string api_key_env = "SRVSCAN_ORACLE_API_KEY";
  std::size_t input_budget = 120000;  // characters
  double temperature = 0.0;
  int max_attempts = 3;
  std::string transcript_path;
  bool record_transcript = false;
  int rate_limit_per_s = 0;  // 0 = unlimited
};

class Oracle {
 public:
  explicit Oracle(OracleConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.mode == OracleMode::Replay) {
      if (cfg_.transcript_path.empty())
        throw ConfigError("replay mode requires a transcript path");
      transcript_.load(cfg_.transcript_path);
    }
    transcript_.mode_recorded =
        cfg_.mode == OracleMode::Live ? "live" : "heuristic";
  }

  const OracleConfig& config() const { return cfg_; }
  const OracleTranscript& transcript() const { return transcript_; }
  long live_requests() const { return live_requests_; }
  long live_characters() const { return live_characters_; }

  OracleResponse extract_key_variables(const std::string& code_block) {
    OracleRequest req = make_request(
        OracleKind::KeyVariables, render_prompt_key_variables(code_block),
        code_block);
    return run(req, code_block, [&] {
      return heuristic::key_variables_payload(code_block);
    });
  }

  OracleResponse identify_sanitized_variables(const std::string& slice_text,
                                              const std::set<SrvType>& types) {
    std::string context = slice_text;
    for (SrvType t : all_srv_types())
      if (types.count(t)) context += "\x1f" + std::string(srv_name(t));
    OracleRequest req = make_request(
        OracleKind::SanitizedVariables,
        render_prompt_sanitized_variables(slice_text, types), context);
    return run(req, slice_text, [&] {
      return heuristic::sanitized_payload(slice_text, types);
    });
  }

  OracleResponse propose_function_sequences(const std::vector<Warning>& warnings,
                                            const std::string& slice_text) {
    std::vector<std::string> fns;
    for (const auto& w : warnings) {
      std::string fn = short_name(w.function);
      if (std::find(fns.begin(), fns.end(), fn) == fns.end())
        fns.push_back(fn);
    }
    std::vector<std::string> lines;
    for (const auto& w : warnings)
      lines.push_back(std::string(srv_name(w.srv_type)) + " in " +
                      short_name(w.function));
    std::string context = slice_text;
    for (const auto& l : lines) context += "\x1f" + l;
    OracleRequest req = make_request(
        OracleKind::FunctionSequence,
        render_prompt_function_sequence(lines, slice_text), context);
    return run(req, slice_text,
               [&] { return heuristic::sequences_payload(fns, slice_text); });
  }

  void save_transcript() {
    if (!cfg_.transcript_path.empty() && cfg_.record_transcript)
      transcript_.save(cfg_.transcript_path);
  }

 private:
  OracleConfig cfg_;
  OracleTranscript transcript_;
  std::mutex mu_;
  long live_requests_ = 0;
  long live_characters_ = 0;
  std::chrono::steady_clock::time_point last_request_{};

  OracleRequest make_request(OracleKind kind, std::string prompt,
                             const std::string& context) {
    if (prompt.size() > cfg_.input_budget)
      throw BudgetExceeded("oracle prompt exceeds input budget (" +
                           std::to_string(prompt.size()) + " > " +
                           std::to_string(cfg_.input_budget) + ")");
    OracleRequest req;
    req.kind = kind;
    req.rendered_prompt = std::move(prompt);
    req.context_digest = digest_hex(std::string(oracle_kind_name(kind)) +
                                    "\x1f" + context);
    return req;
  }

  template <typename HeuristicFn>
  OracleResponse run(const OracleRequest& req, const std::string& match_code,
                     HeuristicFn&& compute) {
    switch (cfg_.mode) {
      case OracleMode::Heuristic: {
        nlohmann::ordered_json payload = compute();
        OracleResponse r = parse_payload(req.kind, payload, match_code);
        r.raw_text = payload.dump();
        record(req, r.raw_text);
        return r;
      }
      case OracleMode::Replay: {
        auto raw = transcript_.lookup(req.context_digest, req.kind);
        if (!raw)
          throw ReplayMiss("no transcript entry for digest " +
                           req.context_digest + " kind " +
                           std::string(oracle_kind_name(req.kind)));
        auto j = extract_last_json(*raw);
        if (!j)
          throw MalformedResponse("transcript entry has no JSON payload");
        OracleResponse r = parse_payload(req.kind, *j, match_code);
        r.raw_text = *raw;
        return r;
      }
      case OracleMode::Live: {
        int attempts = 0;
        std::string raw = query_live(req.rendered_prompt, attempts);
        auto j = extract_last_json(raw);
        if (!j)
          throw MalformedResponse(
              "no JSON object could be extracted from the oracle response");
        OracleResponse r = parse_payload(req.kind, *j, match_code);
        r.attempts = attempts;
        r.raw_text = raw;
        record(req, raw);
        return r;
      }
    }
    throw Error("unreachable oracle mode");
  }

  void record(const OracleRequest& req, const std::string& raw) {
    std::lock_guard<std::mutex> lock(mu_);
    transcript_.append({req.context_digest, req.kind, raw});
  }

  void rate_limit() {
    if (cfg_.rate_limit_per_s <= 0) return;
    std::lock_guard<std::mutex> lock(mu_);
    auto min_gap = std::chrono::milliseconds(1000 / cfg_.rate_limit_per_s);
    auto now = std::chrono::steady_clock::now();
    if (last_request_.time_since_epoch().count() != 0 &&
        now - last_request_ < min_gap)
      std::this_thread::sleep_for(min_gap - (now - last_request_));
    last_request_ = std::chrono::steady_clock::now();
  }

  // Retries up to max_attempts; the last malformed round surfaces as
  // MalformedResponse from run(), transport exhaustion as OracleUnavailable.
  std::string query_live(const std::string& prompt, int& attempts) {
    if (cfg_.endpoint.empty())
      throw ConfigError("live oracle mode requires --oracle-endpoint");
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    nlohmann::ordered_json body;
    body["model"] = cfg_.model;
    body["temperature"] = cfg_.temperature;
    body["messages"] =
        nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
    std::map<std::string, std::string> headers;
    if (key) headers["Authorization"] = std::string("Bearer ") + key;

    std::string last_error;
    for (attempts = 1; attempts <= cfg_.max_attempts; ++attempts) {
      rate_limit();
      try {
        auto res = net::http_post_json(cfg_.endpoint, cfg_.chat_path,
                                       body.dump(), headers);
        {
          std::lock_guard<std::mutex> lock(mu_);
          ++live_requests_;
          live_characters_ += static_cast<long>(prompt.size() + res.body.size());
        }
        if (res.status != 200) {
          last_error = "status " + std::to_string(res.status);
          continue;
        }
        auto j = nlohmann::json::parse(res.body, nullptr, false);
        if (j.is_discarded() || !j.contains("choices") || j["choices"].empty()) {
          last_error = "unexpected response shape";
          continue;
        }
        const auto& choice = j["choices"].front();
        if (!choice.contains("message") || !choice["message"].contains("content")) {
          last_error = "missing message content";
          continue;
        }
        return choice["message"]["content"].get<std::string>();
      } catch (const HttpError& e) {
        last_error = e.what();
      }
    }
    attempts = cfg_.max_attempts;
    throw OracleUnavailable("oracle unavailable after " +
                            std::to_string(cfg_.max_attempts) +
                            " attempts: " + last_error);
  }
};

// transcript_io per the module surface: record appends, replay parses the
// stored response exactly as live mode would.
inline std::optional<OracleResponse> transcript_io(OracleTranscript& transcript,
                                                   bool replay,
                                                   const OracleRequest& request,
                                                   const std::string& raw_text,
                                                   const std::string& match_code) {
  if (!replay) {
    transcript.append({request.context_digest, request.kind, raw_text});
    return std::nullopt;
  }
  auto raw = transcript.lookup(request.context_digest, request.kind);
  if (!raw)
    throw ReplayMiss("no transcript entry for digest " + request.context_digest);
  auto j = extract_last_json(*raw);
  if (!j) throw MalformedResponse("transcript entry has no JSON payload");
  OracleResponse r = parse_payload(request.kind, *j, match_code);
  r.raw_text = *raw;
  return r;
}

}  // namespace srvscan
