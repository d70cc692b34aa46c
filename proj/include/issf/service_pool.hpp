#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "issf/agents.hpp"

namespace issf {

struct ServiceEnv {
  std::string scenario_id;
  std::string scenario_hash;
};

// What pool/<id>/manifest.json stores. `created_at` is informational and
// excluded from every digest. `adversary`/`pretrain` are service ids ("NA"
// when absent; comma-joined when several adversaries rotated).
struct ServiceManifest {
  std::string id;
  Role role = Role::Attacker;
  ServiceEnv env;
  std::string algorithm;
  std::string adversary = "NA";
  std::string pretrain = "NA";
  std::string created_at;
  nlohmann::json learner_config;
  std::string blob_fingerprint;  // sha256 of the policy.bin bytes
};

nlohmann::json manifest_to_json(const ServiceManifest& manifest);
ServiceManifest manifest_from_json(const nlohmann::json& doc);

// Directory-backed registry of trained security services. Layout:
// root/<id>/manifest.json + root/<id>/policy.bin. Publishes are staged in a
// temp directory and renamed into place, so a crash never leaves a
// half-written service visible.
class ServicePool {
 public:
  explicit ServicePool(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Validates identity, lineage and blob consistency, then persists.
  // Returns the service id.
  std::string publish(ServiceManifest manifest, const nlohmann::json& blob);

  bool contains(const std::string& id) const;
  std::vector<std::string> ids() const;  // sorted
  ServiceManifest manifest(const std::string& id) const;
  nlohmann::json blob(const std::string& id) const;  // verifies the fingerprint
  std::unique_ptr<ActionDecisionModel> load_model(const std::string& id) const;

  struct Filter {
    std::optional<Role> role;
    std::optional<std::string> algorithm;
    std::optional<std::string> scenario_hash;
    std::optional<std::string> adversary;
  };
  std::vector<ServiceManifest> query(const Filter& filter) const;

  // [self, pretrain, pretrain-of-pretrain, ...]; ends at a from-scratch
  // service.
  std::vector<ServiceManifest> lineage(const std::string& id) const;

 private:
  std::filesystem::path dir_of(const std::string& id) const;
  std::filesystem::path root_;
};

// Adversary ids are stored comma-joined; "NA" round-trips to an empty list.
std::vector<std::string> split_adversary_field(const std::string& field);

}  // namespace issf
