#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "srvscan/ipdg.hpp"
#include "srvscan/sinks.hpp"

namespace srvscan {

// Taint source labels: the closed environment-atom set plus the two
// attacker-controlled families.
inline const std::set<std::string>& default_taint_sources() {
  static const std::set<std::string> k = {
      std::string(atom_name(Atom::MsgSender)),
      std::string(atom_name(Atom::MsgValue)),
      std::string(atom_name(Atom::MsgData)),
      std::string(atom_name(Atom::BlockChainid)),
      std::string(atom_name(Atom::BlockTimestamp)),
      std::string(atom_name(Atom::AddressThis)),
      std::string(atom_name(Atom::TxOrigin)),
      "external.call",  // return values of unresolved external calls
      "calldata",       // parameters of public/external functions
  };
  return k;
}

struct TaintState {
  std::map<NodeId, std::set<std::string>> tainted;  // node -> source atoms
  std::set<std::pair<NodeId, SrvType>> sanitized_cuts;
};

enum class Confidence { High, Low };

// Pre-verification suspicion produced by the detectors.
struct Warning {
  std::string function;  // qualified
  SrvType srv_type = SrvType::Sma;
  std::set<NodeId> evidence;  // nonempty
  Confidence confidence = Confidence::High;
  std::vector<std::string> notes;
  NodeId sink_id = k_no_node;
  NodeId sink_stmt = k_no_node;
};

// Monotone fixpoint from explicit seed nodes. Taint enters a cut node but
// does not propagate out of it.
inline TaintState propagate_from(const Ipdg& g,
                                 const std::map<NodeId, std::set<std::string>>& seeds,
                                 const std::set<NodeId>& cuts) {
  TaintState st;
  std::vector<NodeId> work;
  for (const auto& [n, atoms] : seeds) {
    st.tainted[n].insert(atoms.begin(), atoms.end());
    work.push_back(n);
  }
  while (!work.empty()) {
    NodeId n = work.back();
    work.pop_back();
    if (cuts.count(n)) continue;
    auto it = g.fwd.find(n);
    if (it == g.fwd.end()) continue;
    const auto& atoms = st.tainted[n];
    for (const auto& [next, kind] : it->second) {
      if (kind == EdgeKind::Call) continue;
      auto& dst = st.tainted[next];
      std::size_t before = dst.size();
      dst.insert(atoms.begin(), atoms.end());
      if (dst.size() != before) work.push_back(next);
    }
  }
  return st;
}

// Seed nodes for a source-atom set: atom readers, external-call returns and
// public/external function parameter uses (attackers control calldata).
inline std::map<NodeId, std::set<std::string>> taint_seeds(
    const Ipdg& g, const std::set<std::string>& sources) {
  std::map<NodeId, std::set<std::string>> seeds;
  for (NodeId n : g.nodes) {
    const IpdgNodeInfo* info = g.node_info(n);
    if (!info) continue;
    for (const auto& r : info->reads)
      if (is_atom_name(r) && sources.count(r)) seeds[n].insert(r);
  }
  if (sources.count("external.call") && g.unknown_node != k_no_node) {
    auto it = g.fwd.find(g.unknown_node);
    if (it != g.fwd.end())
      for (const auto& [next, kind] : it->second)
        if (kind == EdgeKind::Data) seeds[next].insert("external.call");
  }
  if (sources.count("calldata")) {
    for (const auto& [fn, uses] : g.param_uses) {
      auto fi = g.functions.find(fn);
      if (fi == g.functions.end()) continue;
      const auto& vis = fi->second.visibility;
      if (vis != "public" && vis != "external" && !vis.empty()) continue;
      for (const auto& [var, node] : uses) seeds[node].insert("calldata");
    }
  }
  return seeds;
}

inline TaintState propagate(const Ipdg& g, const AstUnit& unit,
                            const std::set<std::string>& sources,
                            const std::vector<std::pair<NodeId, SrvType>>& cuts,
                            SrvType for_type) {
  (void)unit;
  std::set<NodeId> cut_nodes;
  TaintState st;
  for (const auto& [n, t] : cuts) {
    st.sanitized_cuts.insert({n, t});
    if (t == for_type) cut_nodes.insert(n);
  }
  TaintState prop = propagate_from(g, taint_seeds(g, sources), cut_nodes);
  prop.sanitized_cuts = st.sanitized_cuts;
  return prop;
}

// Forward closure over data and control edges from the definition nodes of
// sanitized variables; gives the context nodes the detectors inspect.
inline std::set<NodeId> collect_warning_nodes(const Ipdg& g,
                                              const std::set<NodeId>& sanitized_defs) {
  if (sanitized_defs.empty()) return {};
  return dependencies(g, sanitized_defs, Direction::Forward,
                      {EdgeKind::Data, EdgeKind::Control});
}

// Definition nodes of a variable: state declaration, every write, and (for
// parameters, which have no declaration node) the guards that check it.
inline std::set<NodeId> find_definition_nodes(const Ipdg& g,
                                              const std::string& var) {
  std::set<NodeId> defs;
  for (NodeId n : g.nodes) {
    const IpdgNodeInfo* info = g.node_info(n);
    if (!info) continue;
    if (info->writes.count(var)) defs.insert(n);
  }
  if (defs.empty()) {
    for (NodeId n : g.nodes) {
      const IpdgNodeInfo* info = g.node_info(n);
      if (info && info->is_guard && info->reads.count(var)) defs.insert(n);
    }
  }
  return defs;
}

// ---------------------------------------------------------------------------
// Backward influence of one sink argument: which atoms and variables can
// reach it. This is the hash-binding question the X-CRA/X-PRA/CASR rules ask.

struct Influence {
  std::set<std::string> atoms;
  std::set<std::string> vars;
  std::set<NodeId> nodes;
};

inline std::string short_name(const std::string& qualified) {
  auto dot = qualified.rfind('.');
  return dot == std::string::npos ? qualified : qualified.substr(dot + 1);
}

inline Influence influence_of_arg(const Ipdg& g, const ExprRef& arg,
                                  NodeId sink_stmt) {
  Influence out;
  for (const auto& v : arg.free_variables) {
    if (is_atom_name(v))
      out.atoms.insert(v);
    else
      out.vars.insert(v);
  }

  std::set<NodeId> seeds;
  const IpdgNodeInfo* sink_info = g.node_info(sink_stmt);
  auto preds = g.bwd.find(sink_stmt);
  if (preds != g.bwd.end()) {
    for (const auto& [from, kind] : preds->second) {
      if (kind != EdgeKind::Data) continue;
      const IpdgNodeInfo* info = g.node_info(from);
      if (!info) continue;
      bool writes_arg_var = false;
      for (const auto& v : out.vars)
        if (info->writes.count(v)) writes_arg_var = true;
      // return-value flow into a call made inside the argument expression
      bool feeds_call = info->is_return && sink_info &&
                        arg.calls.count(short_name(info->function)) &&
                        sink_info->resolved_callees.count(info->function);
      if (writes_arg_var || feeds_call) seeds.insert(from);
    }
  }
  auto closure = dependencies(g, seeds, Direction::Backward, {EdgeKind::Data});
  out.nodes = closure;
  out.nodes.insert(sink_stmt);
  for (NodeId n : closure) {
    const IpdgNodeInfo* info = g.node_info(n);
    if (!info) continue;
    for (const auto& r : info->reads) {
      if (is_atom_name(r))
        out.atoms.insert(r);
      else
        out.vars.insert(r);
    }
    for (const auto& w : info->writes)
      if (!is_atom_name(w)) out.vars.insert(w);
  }
  return out;
}

}  // namespace srvscan
