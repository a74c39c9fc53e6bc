#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "srvscan/ipdg.hpp"
#include "srvscan/sinks.hpp"

namespace srvscan {

// A function-level slice around one sink. Functions are never split; the text
// is a deterministic, declaration-ordered rendering of the included units
// with each function's original source preserved verbatim.
struct Slice {
  SinkSite sink;
  std::vector<std::string> functions;  // qualified, insertion unique
  std::set<NodeId> state_decls;
  std::string text;
  std::vector<std::string> omitted;  // functions dropped to fit the budget
};

inline constexpr std::size_t k_default_slice_budget = 120000;

namespace detail {

inline void add_function(Slice& s, const std::string& qualified) {
  if (std::find(s.functions.begin(), s.functions.end(), qualified) ==
      s.functions.end())
    s.functions.push_back(qualified);
}

inline void add_touched_state(const Ipdg& g, Slice& s) {
  for (const auto& fq : s.functions) {
    auto it = g.functions.find(fq);
    if (it == g.functions.end()) continue;
    for (NodeId n : it->second.nodes) {
      const IpdgNodeInfo* info = g.node_info(n);
      if (!info) continue;
      for (const auto& var : info->reads) {
        auto decl = g.state_decls.find(info->contract + "." + var);
        if (decl != g.state_decls.end()) s.state_decls.insert(decl->second);
      }
      for (const auto& var : info->writes) {
        auto decl = g.state_decls.find(info->contract + "." + var);
        if (decl != g.state_decls.end()) s.state_decls.insert(decl->second);
      }
    }
  }
}

// call-graph distance from the sink's function, undirected; used to decide
// which functions to drop when the rendering exceeds the oracle budget
inline std::map<std::string, int> call_distances(const Ipdg& g,
                                                 const std::string& from) {
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& [fn, fi] : g.functions)
    for (const auto& callee : fi.callees) {
      adj[fn].insert(callee);
      adj[callee].insert(fn);
    }
  std::map<std::string, int> dist;
  dist[from] = 0;
  std::vector<std::string> frontier = {from};
  int d = 0;
  while (!frontier.empty()) {
    ++d;
    std::vector<std::string> next;
    for (const auto& fn : frontier)
      for (const auto& nb : adj[fn])
        if (!dist.count(nb)) {
          dist[nb] = d;
          next.push_back(nb);
        }
    frontier = std::move(next);
  }
  return dist;
}

inline void render_slice(const AstUnit& unit, Slice& s) {
  std::ostringstream os;
  for (const auto& contract : unit.contracts) {
    std::vector<std::pair<std::size_t, std::string>> members;  // offset, text
    std::set<std::size_t> seen;
    for (const auto& v : contract.state_vars)
      if (s.state_decls.count(v.id) && seen.insert(v.span.offset).second)
        members.push_back({v.span.offset, unit.span_text(v.span)});
    for (const auto& rf : contract.resolved) {
      if (std::find(s.functions.begin(), s.functions.end(),
                    rf.qualified_name) == s.functions.end())
        continue;
      const SourceSpan& span = node_span(unit, rf.fn.id);
      if (seen.insert(span.offset).second)
        members.push_back({span.offset, unit.span_text(span)});
    }
    if (members.empty()) continue;
    std::sort(members.begin(), members.end());
    os << (contract.kind == ContractKind::Library     ? "library "
           : contract.kind == ContractKind::Interface ? "interface "
                                                      : "contract ")
       << contract.name << " {\n";
    for (const auto& [off, text] : members) os << "    " << text << "\n";
    os << "}\n";
  }
  s.text = os.str();
}

inline void fit_budget(const AstUnit& unit, const Ipdg& g, Slice& s,
                       std::size_t budget) {
  render_slice(unit, s);
  if (s.text.size() <= budget) return;
  auto dist = call_distances(g, s.sink.enclosing_function);
  while (s.text.size() > budget && s.functions.size() > 1) {
    // drop the farthest function from the sink; ties resolve alphabetically
    auto worst = s.functions.end();
    int worst_d = -1;
    for (auto it = s.functions.begin(); it != s.functions.end(); ++it) {
      if (*it == s.sink.enclosing_function) continue;
      auto d = dist.count(*it) ? dist[*it] : 1 << 20;
      if (d > worst_d || (d == worst_d && worst != s.functions.end() &&
                          *it > *worst)) {
        worst_d = d;
        worst = it;
      }
    }
    if (worst == s.functions.end()) break;
    s.omitted.push_back(*worst);
    s.functions.erase(worst);
    s.state_decls.clear();
    add_touched_state(g, s);
    render_slice(unit, s);
  }
  if (s.text.size() > budget)
    throw BudgetExceeded("slice for " + s.sink.enclosing_function +
                         " exceeds the oracle input budget (" +
                         std::to_string(s.text.size()) + " > " +
                         std::to_string(budget) + ")");
}

}  // namespace detail

// The sink's function plus everything it transitively depends on: functions
// reachable backward over data and call edges, and the state declarations
// those functions touch.
inline Slice initial_code_block(const Ipdg& g, const AstUnit& unit,
                                const SinkSite& sink,
                                std::size_t budget = k_default_slice_budget) {
  Slice s;
  s.sink = sink;
  detail::add_function(s, sink.enclosing_function);
  auto closure = dependencies(g, {sink.stmt}, Direction::Backward,
                              {EdgeKind::Data, EdgeKind::Call});
  std::set<std::string> fns;
  for (NodeId n : closure) {
    const IpdgNodeInfo* info = g.node_info(n);
    if (!info) continue;
    if (info->is_decl) s.state_decls.insert(n);
    if (!info->function.empty() && info->function != "$unknown")
      fns.insert(info->function);
  }
  for (const auto& fn : fns) detail::add_function(s, fn);
  detail::add_touched_state(g, s);
  detail::fit_budget(unit, g, s, budget);
  return s;
}

// Extends the seed with every function containing a statement in the data
// dependency closure of the key variables. Never splits a function;
// re-running on its own output is a fixed point.
inline Slice function_level_slice(const Ipdg& g, const AstUnit& unit,
                                  const std::set<std::string>& key_vars,
                                  const Slice& seed,
                                  std::size_t budget = k_default_slice_budget) {
  Slice s = seed;
  if (key_vars.empty()) return s;

  std::set<NodeId> mentions;
  for (NodeId n : g.nodes) {
    const IpdgNodeInfo* info = g.node_info(n);
    if (!info) continue;
    bool hit = false;
    for (const auto& kv : key_vars) {
      if (info->reads.count(kv) || info->writes.count(kv) ||
          info->callee_names.count(kv)) {
        hit = true;
        break;
      }
    }
    if (hit) mentions.insert(n);
  }
  auto closure = dependencies(g, mentions, Direction::Backward, {EdgeKind::Data});
  auto fwd = dependencies(g, mentions, Direction::Forward, {EdgeKind::Data});
  closure.insert(fwd.begin(), fwd.end());

  std::set<std::string> fns;
  for (NodeId n : closure) {
    const IpdgNodeInfo* info = g.node_info(n);
    if (!info) continue;
    if (info->is_decl) s.state_decls.insert(n);
    if (!info->function.empty() && info->function != "$unknown")
      fns.insert(info->function);
  }
  for (const auto& fn : fns) detail::add_function(s, fn);
  detail::add_touched_state(g, s);
  detail::fit_budget(unit, g, s, budget);
  return s;
}

}  // namespace srvscan
