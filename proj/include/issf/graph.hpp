#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace issf {

enum class AttackVector { Local, Remote };

std::string_view to_string(AttackVector v);
AttackVector attack_vector_from_string(std::string_view s);

// Outcome of a successful exploit: either the attacker learns about other
// nodes, or a credential leaks.
struct RevealNodesOutcome {
  std::vector<std::string> nodes;  // node ids, deduplicated, sorted
};

struct LeakCredentialOutcome {
  std::string credential;  // credential id
};

using VulnerabilityOutcome = std::variant<RevealNodesOutcome, LeakCredentialOutcome>;

struct Vulnerability {
  std::string id;
  AttackVector vector = AttackVector::Local;
  VulnerabilityOutcome outcome;
  double impact = 0.0;          // CVSS impact subscore, the attacker's gain
  double exploitability = 0.0;  // CVSS exploitability subscore, the attacker's cost
};

struct Credential {
  std::string id;
  std::string target_node;  // node this credential unlocks
};

struct NodeSpec {
  std::string id;
  double asset_value = 0.0;
  std::optional<std::string> required_credential;
  std::vector<Vulnerability> vulnerabilities;
  bool is_goal = false;
  bool is_landing = false;
};

enum class EdgeKind { Endpoint, Credential };

std::string_view to_string(EdgeKind k);

// Knowledge-level edge implied by vulnerability outcomes. An Endpoint edge
// means exploiting something on `source` reveals `target`; a Credential edge
// means it leaks a credential whose target is `target`.
struct EdgeSpec {
  std::string source;
  std::string target;
  EdgeKind kind;

  friend bool operator==(const EdgeSpec&, const EdgeSpec&) = default;
};

struct EnvironmentConfig {
  int max_episode_length = 2000;
  double scan_true_positive_rate = 0.95;
  double scan_false_positive_rate = 0.05;
  double scan_cost = 0.5;
  double scan_gain_per_new_suspicious = 1.0;
  double connect_cost = 2.0;
  double restore_cost = 10.0;
  double remediate_base_cost = 1.0;
  double invalid_action_cost = 1.0;
  int reimage_duration_steps = 1;
};

// One entry per distinct vulnerability id used anywhere in the graph. The
// attacker plans against this global list; per-node presence decides whether
// an attempt succeeds.
struct ToolkitEntry {
  std::string id;
  AttackVector vector = AttackVector::Local;
  double impact = 0.0;
  double exploitability = 0.0;
};

class DynamicAccessGraph {
 public:
  // Parses and validates a scenario document. Throws ParseError on malformed
  // input and ValidationError on structural violations.
  static DynamicAccessGraph from_json(const nlohmann::json& doc);

  const std::string& scenario_id() const { return scenario_id_; }
  // SHA-256 over the canonicalized document; whitespace-insensitive.
  const std::string& content_hash() const { return content_hash_; }

  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const std::vector<Credential>& credentials() const { return credentials_; }
  const std::vector<ToolkitEntry>& toolkit() const { return toolkit_; }
  const std::vector<EdgeSpec>& edges() const { return edges_; }
  const EnvironmentConfig& config() const { return config_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int credential_count() const { return static_cast<int>(credentials_.size()); }
  int toolkit_count() const { return static_cast<int>(toolkit_.size()); }

  // Index lookups throw UnknownIdError.
  int node_index(std::string_view id) const;
  int credential_index(std::string_view id) const;
  int toolkit_index(std::string_view id) const;

  // Position of the vulnerability inside nodes()[node].vulnerabilities, or -1
  // when the node does not carry it.
  int vuln_position(int node, std::string_view vuln_id) const;

  const std::vector<int>& landing_nodes() const { return landing_nodes_; }
  const std::vector<int>& goal_nodes() const { return goal_nodes_; }
  // Toolkit indices by attack vector, ascending.
  const std::vector<int>& local_toolkit() const { return local_toolkit_; }
  const std::vector<int>& remote_toolkit() const { return remote_toolkit_; }

  // Compact description of everything encoders and action indexers depend
  // on. Two graphs with equal signatures accept the same trained models.
  std::string shape_signature() const;

 private:
  std::string scenario_id_;
  std::string content_hash_;
  std::vector<NodeSpec> nodes_;
  std::vector<Credential> credentials_;
  std::vector<ToolkitEntry> toolkit_;
  std::vector<EdgeSpec> edges_;
  EnvironmentConfig config_;
  std::vector<int> landing_nodes_;
  std::vector<int> goal_nodes_;
  std::vector<int> local_toolkit_;
  std::vector<int> remote_toolkit_;
  std::unordered_map<std::string, int> node_index_;
  std::unordered_map<std::string, int> credential_index_;
  std::unordered_map<std::string, int> toolkit_index_;
};

// Recomputes the implied edge set from node/vulnerability declarations:
// RevealNodes yields Endpoint edges, LeakCredential yields a Credential edge
// to the credential's target node. Sorted by (source, target, kind) and
// deduplicated. Pure.
std::vector<EdgeSpec> derive_edges(const DynamicAccessGraph& graph);

DynamicAccessGraph load_graph(const std::filesystem::path& file);
DynamicAccessGraph load_graph_text(std::string_view text);

nlohmann::json environment_config_to_json(const EnvironmentConfig& config);

}  // namespace issf
