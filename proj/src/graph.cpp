#include "issf/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "issf/errors.hpp"
#include "issf/hashing.hpp"

namespace issf {

namespace {

using nlohmann::json;

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json* v = find(obj, key);
  if (v == nullptr || !v->is_string() || v->get<std::string>().empty())
    throw ParseError(where + ": missing or empty string field '" + key + "'");
  return v->get<std::string>();
}

double require_number(const json& obj, const char* key, const std::string& where) {
  const json* v = find(obj, key);
  if (v == nullptr || !v->is_number())
    throw ParseError(where + ": missing numeric field '" + key + "'");
  return v->get<double>();
}

double optional_number(const json& obj, const char* key, double fallback) {
  const json* v = find(obj, key);
  if (v == nullptr || v->is_null()) return fallback;
  if (!v->is_number()) throw ParseError(std::string("config field '") + key + "' must be numeric");
  return v->get<double>();
}

EnvironmentConfig parse_config(const json* cfg) {
  EnvironmentConfig c;
  if (cfg == nullptr) return c;
  if (!cfg->is_object()) throw ParseError("'config' must be an object");
  c.max_episode_length = static_cast<int>(optional_number(*cfg, "max_episode_length", c.max_episode_length));
  c.scan_true_positive_rate = optional_number(*cfg, "scan_true_positive_rate", c.scan_true_positive_rate);
  c.scan_false_positive_rate = optional_number(*cfg, "scan_false_positive_rate", c.scan_false_positive_rate);
  c.scan_cost = optional_number(*cfg, "scan_cost", c.scan_cost);
  c.scan_gain_per_new_suspicious =
      optional_number(*cfg, "scan_gain_per_new_suspicious", c.scan_gain_per_new_suspicious);
  c.connect_cost = optional_number(*cfg, "connect_cost", c.connect_cost);
  c.restore_cost = optional_number(*cfg, "restore_cost", c.restore_cost);
  c.remediate_base_cost = optional_number(*cfg, "remediate_base_cost", c.remediate_base_cost);
  c.invalid_action_cost = optional_number(*cfg, "invalid_action_cost", c.invalid_action_cost);
  c.reimage_duration_steps =
      static_cast<int>(optional_number(*cfg, "reimage_duration_steps", c.reimage_duration_steps));
  return c;
}

void validate_config(const EnvironmentConfig& c) {
  if (c.max_episode_length < 1) throw ValidationError("max_episode_length must be >= 1");
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate_ok(c.scan_true_positive_rate) || !rate_ok(c.scan_false_positive_rate))
    throw ValidationError("scan rates must lie in [0, 1]");
  if (c.scan_cost < 0 || c.connect_cost < 0 || c.restore_cost < 0 || c.remediate_base_cost < 0 ||
      c.invalid_action_cost < 0 || c.scan_gain_per_new_suspicious < 0)
    throw ValidationError("costs and gains must be non-negative");
  if (c.restore_cost <= c.connect_cost)
    throw ValidationError("restore_cost must exceed connect_cost");
  if (c.reimage_duration_steps < 1) throw ValidationError("reimage_duration_steps must be >= 1");
}

VulnerabilityOutcome parse_outcome(const json& v, const std::string& where) {
  const json* outcome = find(v, "outcome");
  if (outcome == nullptr || !outcome->is_object())
    throw ParseError(where + ": missing 'outcome' object");
  const json* reveal = find(*outcome, "reveal_nodes");
  const json* leak = find(*outcome, "leak_credential");
  if ((reveal != nullptr) == (leak != nullptr))
    throw ParseError(where + ": outcome must have exactly one of 'reveal_nodes'/'leak_credential'");
  if (reveal != nullptr) {
    if (!reveal->is_array()) throw ParseError(where + ": 'reveal_nodes' must be an array");
    RevealNodesOutcome out;
    for (const auto& n : *reveal) {
      if (!n.is_string()) throw ParseError(where + ": 'reveal_nodes' entries must be strings");
      out.nodes.push_back(n.get<std::string>());
    }
    std::sort(out.nodes.begin(), out.nodes.end());
    out.nodes.erase(std::unique(out.nodes.begin(), out.nodes.end()), out.nodes.end());
    return out;
  }
  if (!leak->is_string()) throw ParseError(where + ": 'leak_credential' must be a string");
  return LeakCredentialOutcome{leak->get<std::string>()};
}

}  // namespace

std::string_view to_string(AttackVector v) {
  return v == AttackVector::Local ? "local" : "remote";
}

AttackVector attack_vector_from_string(std::string_view s) {
  if (s == "local") return AttackVector::Local;
  if (s == "remote") return AttackVector::Remote;
  throw ParseError("unknown attack vector '" + std::string(s) + "'");
}

std::string_view to_string(EdgeKind k) {
  return k == EdgeKind::Endpoint ? "endpoint" : "credential";
}

DynamicAccessGraph DynamicAccessGraph::from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("scenario document must be a JSON object");
  DynamicAccessGraph g;
  g.scenario_id_ = require_string(doc, "id", "scenario");
  g.content_hash_ = sha256_hex(doc.dump());
  g.config_ = parse_config(find(doc, "config"));
  validate_config(g.config_);

  const json* nodes = find(doc, "nodes");
  if (nodes == nullptr || !nodes->is_array() || nodes->empty())
    throw ParseError("scenario requires a non-empty 'nodes' array");

  const json* creds = find(doc, "credentials");
  if (creds != nullptr && !creds->is_array()) throw ParseError("'credentials' must be an array");
  if (creds != nullptr) {
    for (const auto& c : *creds) {
      if (!c.is_object()) throw ParseError("credential entries must be objects");
      Credential cred;
      cred.id = require_string(c, "id", "credential");
      cred.target_node = require_string(c, "target", "credential '" + cred.id + "'");
      g.credentials_.push_back(std::move(cred));
    }
  }
  std::sort(g.credentials_.begin(), g.credentials_.end(),
            [](const Credential& a, const Credential& b) { return a.id < b.id; });
  for (int i = 0; i < static_cast<int>(g.credentials_.size()); ++i) {
    if (!g.credential_index_.emplace(g.credentials_[i].id, i).second)
      throw ValidationError("duplicate credential id '" + g.credentials_[i].id + "'");
  }

  for (const auto& n : *nodes) {
    if (!n.is_object()) throw ParseError("node entries must be objects");
    NodeSpec node;
    node.id = require_string(n, "id", "node");
    const std::string where = "node '" + node.id + "'";
    node.asset_value = require_number(n, "asset_value", where);
    if (node.asset_value < 0) throw ValidationError(where + ": asset_value must be non-negative");
    if (const json* v = find(n, "goal"); v != nullptr && !v->is_null()) node.is_goal = v->get<bool>();
    if (const json* v = find(n, "landing"); v != nullptr && !v->is_null()) node.is_landing = v->get<bool>();
    if (const json* v = find(n, "required_credential"); v != nullptr && !v->is_null()) {
      if (!v->is_string()) throw ParseError(where + ": 'required_credential' must be a string");
      node.required_credential = v->get<std::string>();
    }
    if (const json* vulns = find(n, "vulnerabilities"); vulns != nullptr && !vulns->is_null()) {
      if (!vulns->is_array()) throw ParseError(where + ": 'vulnerabilities' must be an array");
      for (const auto& v : *vulns) {
        Vulnerability vuln;
        vuln.id = require_string(v, "id", where + " vulnerability");
        const std::string vwhere = where + " vulnerability '" + vuln.id + "'";
        vuln.vector = attack_vector_from_string(require_string(v, "vector", vwhere));
        vuln.impact = require_number(v, "impact", vwhere);
        vuln.exploitability = require_number(v, "exploitability", vwhere);
        if (vuln.impact < 0 || vuln.impact > 10 || vuln.exploitability < 0 || vuln.exploitability > 10)
          throw ValidationError(vwhere + ": subscores must lie in [0, 10]");
        vuln.outcome = parse_outcome(v, vwhere);
        node.vulnerabilities.push_back(std::move(vuln));
      }
    }
    g.nodes_.push_back(std::move(node));
  }
  std::sort(g.nodes_.begin(), g.nodes_.end(),
            [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
  for (int i = 0; i < static_cast<int>(g.nodes_.size()); ++i) {
    if (!g.node_index_.emplace(g.nodes_[i].id, i).second)
      throw ValidationError("duplicate node id '" + g.nodes_[i].id + "'");
    if (g.nodes_[i].is_landing) g.landing_nodes_.push_back(i);
    if (g.nodes_[i].is_goal) g.goal_nodes_.push_back(i);
  }
  if (g.landing_nodes_.empty()) throw ValidationError("scenario requires at least one landing node");
  if (g.goal_nodes_.empty()) throw ValidationError("scenario requires at least one goal node");

  // Referential integrity + global toolkit consistency.
  std::set<std::string> toolkit_ids;
  for (const auto& node : g.nodes_) {
    const std::string where = "node '" + node.id + "'";
    if (node.required_credential && g.credential_index_.find(*node.required_credential) == g.credential_index_.end())
      throw ValidationError(where + ": unknown required_credential '" + *node.required_credential + "'");
    std::set<std::string> seen;
    for (const auto& vuln : node.vulnerabilities) {
      if (!seen.insert(vuln.id).second)
        throw ValidationError(where + ": vulnerability '" + vuln.id + "' listed twice");
      toolkit_ids.insert(vuln.id);
      if (const auto* reveal = std::get_if<RevealNodesOutcome>(&vuln.outcome)) {
        for (const auto& target : reveal->nodes) {
          if (g.node_index_.find(target) == g.node_index_.end())
            throw ValidationError(where + ": vulnerability '" + vuln.id + "' reveals unknown node '" + target + "'");
        }
      } else {
        const auto& leak = std::get<LeakCredentialOutcome>(vuln.outcome);
        if (g.credential_index_.find(leak.credential) == g.credential_index_.end())
          throw ValidationError(where + ": vulnerability '" + vuln.id + "' leaks unknown credential '" +
                                leak.credential + "'");
      }
    }
  }
  for (const auto& cred : g.credentials_) {
    if (g.node_index_.find(cred.target_node) == g.node_index_.end())
      throw ValidationError("credential '" + cred.id + "' targets unknown node '" + cred.target_node + "'");
  }

  for (const auto& id : toolkit_ids) {
    ToolkitEntry entry;
    entry.id = id;
    bool first = true;
    for (const auto& node : g.nodes_) {
      for (const auto& vuln : node.vulnerabilities) {
        if (vuln.id != id) continue;
        if (first) {
          entry.vector = vuln.vector;
          entry.impact = vuln.impact;
          entry.exploitability = vuln.exploitability;
          first = false;
        } else if (vuln.vector != entry.vector || vuln.impact != entry.impact ||
                   vuln.exploitability != entry.exploitability) {
          throw ValidationError("vulnerability '" + id + "' has conflicting definitions across nodes");
        }
      }
    }
    int idx = static_cast<int>(g.toolkit_.size());
    g.toolkit_index_.emplace(id, idx);
    (entry.vector == AttackVector::Local ? g.local_toolkit_ : g.remote_toolkit_).push_back(idx);
    g.toolkit_.push_back(std::move(entry));
  }

  g.edges_ = derive_edges(g);
  return g;
}

int DynamicAccessGraph::node_index(std::string_view id) const {
  auto it = node_index_.find(std::string(id));
  if (it == node_index_.end()) throw UnknownIdError("unknown node '" + std::string(id) + "'");
  return it->second;
}

int DynamicAccessGraph::credential_index(std::string_view id) const {
  auto it = credential_index_.find(std::string(id));
  if (it == credential_index_.end()) throw UnknownIdError("unknown credential '" + std::string(id) + "'");
  return it->second;
}

int DynamicAccessGraph::toolkit_index(std::string_view id) const {
  auto it = toolkit_index_.find(std::string(id));
  if (it == toolkit_index_.end()) throw UnknownIdError("unknown vulnerability '" + std::string(id) + "'");
  return it->second;
}

int DynamicAccessGraph::vuln_position(int node, std::string_view vuln_id) const {
  const auto& vulns = nodes_.at(node).vulnerabilities;
  for (int i = 0; i < static_cast<int>(vulns.size()); ++i)
    if (vulns[i].id == vuln_id) return i;
  return -1;
}

std::string DynamicAccessGraph::shape_signature() const {
  std::ostringstream out;
  out << "n" << node_count() << ".c" << credential_count() << ".t" << toolkit_count() << ".v";
  for (const auto& entry : toolkit_) out << (entry.vector == AttackVector::Local ? 'L' : 'R');
  return out.str();
}

std::vector<EdgeSpec> derive_edges(const DynamicAccessGraph& graph) {
  std::vector<EdgeSpec> edges;
  for (const auto& node : graph.nodes()) {
    for (const auto& vuln : node.vulnerabilities) {
      if (const auto* reveal = std::get_if<RevealNodesOutcome>(&vuln.outcome)) {
        for (const auto& target : reveal->nodes)
          edges.push_back({node.id, target, EdgeKind::Endpoint});
      } else {
        const auto& leak = std::get<LeakCredentialOutcome>(vuln.outcome);
        const auto& cred = graph.credentials()[graph.credential_index(leak.credential)];
        edges.push_back({node.id, cred.target_node, EdgeKind::Credential});
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [](const EdgeSpec& a, const EdgeSpec& b) {
    if (a.source != b.source) return a.source < b.source;
    if (a.target != b.target) return a.target < b.target;
    return a.kind < b.kind;
  });
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

DynamicAccessGraph load_graph(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open scenario file '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_graph_text(buf.str());
}

DynamicAccessGraph load_graph_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return DynamicAccessGraph::from_json(doc);
}

nlohmann::json environment_config_to_json(const EnvironmentConfig& c) {
  return nlohmann::json{{"max_episode_length", c.max_episode_length},
                        {"scan_true_positive_rate", c.scan_true_positive_rate},
                        {"scan_false_positive_rate", c.scan_false_positive_rate},
                        {"scan_cost", c.scan_cost},
                        {"scan_gain_per_new_suspicious", c.scan_gain_per_new_suspicious},
                        {"connect_cost", c.connect_cost},
                        {"restore_cost", c.restore_cost},
                        {"remediate_base_cost", c.remediate_base_cost},
                        {"invalid_action_cost", c.invalid_action_cost},
                        {"reimage_duration_steps", c.reimage_duration_steps}};
}

}  // namespace issf
