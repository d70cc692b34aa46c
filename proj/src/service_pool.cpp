#include "issf/service_pool.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "issf/errors.hpp"
#include "issf/hashing.hpp"

namespace issf {

namespace {

bool id_ok(const std::string& id) {
  // a leading dot is reserved for staging directories
  if (id.empty() || id == "NA" || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw NotFoundError("cannot read '" + p.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PoolError("failed writing '" + p.string() + "'");
}

}  // namespace

std::vector<std::string> split_adversary_field(const std::string& field) {
  std::vector<std::string> out;
  if (field.empty() || field == "NA") return out;
  std::stringstream ss(field);
  std::string part;
  while (std::getline(ss, part, ','))
    if (!part.empty()) out.push_back(part);
  return out;
}

nlohmann::json manifest_to_json(const ServiceManifest& m) {
  return {{"id", m.id},
          {"role", to_string(m.role)},
          {"env", {{"scenario", m.env.scenario_id}, {"scenario_hash", m.env.scenario_hash}}},
          {"algorithm", m.algorithm},
          {"adversary", m.adversary},
          {"pretrain", m.pretrain},
          {"created_at", m.created_at},
          {"learner_config", m.learner_config},
          {"blob", {{"file", "policy.bin"}, {"sha256", m.blob_fingerprint}}}};
}

ServiceManifest manifest_from_json(const nlohmann::json& doc) {
  try {
    ServiceManifest m;
    m.id = doc.at("id").get<std::string>();
    m.role = role_from_string(doc.at("role").get<std::string>());
    m.env.scenario_id = doc.at("env").at("scenario").get<std::string>();
    m.env.scenario_hash = doc.at("env").at("scenario_hash").get<std::string>();
    m.algorithm = doc.at("algorithm").get<std::string>();
    m.adversary = doc.value("adversary", "NA");
    m.pretrain = doc.value("pretrain", "NA");
    m.created_at = doc.value("created_at", "");
    m.learner_config = doc.value("learner_config", nlohmann::json::object());
    m.blob_fingerprint = doc.at("blob").at("sha256").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptBlobError(std::string("malformed manifest: ") + e.what());
  }
}

ServicePool::ServicePool(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

std::filesystem::path ServicePool::dir_of(const std::string& id) const { return root_ / id; }

std::string ServicePool::publish(ServiceManifest manifest, const nlohmann::json& blob) {
  if (!id_ok(manifest.id))
    throw ValidationError("service id '" + manifest.id + "' is not a valid identifier");
  if (contains(manifest.id)) throw DuplicateIdError("service '" + manifest.id + "' already exists");

  // Lineage discipline: defense services record the attacker they trained
  // against; every referenced service must already be published, which keeps
  // lineage acyclic by construction.
  auto adversaries = split_adversary_field(manifest.adversary);
  if (manifest.adversary != "NA" && adversaries.empty())
    throw LineageError("adversary field must be 'NA' or a comma-joined id list");
  if (manifest.role == Role::Defender && adversaries.empty())
    throw LineageError("defense service '" + manifest.id + "' requires a training adversary");
  for (const auto& adv : adversaries) {
    if (!contains(adv))
      throw LineageError("adversary '" + adv + "' is not in the pool");
    if (this->manifest(adv).role != opposite(manifest.role))
      throw LineageError("adversary '" + adv + "' has the wrong role");
  }
  if (manifest.pretrain != "NA") {
    if (!contains(manifest.pretrain))
      throw LineageError("pretrain service '" + manifest.pretrain + "' is not in the pool");
    if (this->manifest(manifest.pretrain).role != manifest.role)
      throw LineageError("pretrain service '" + manifest.pretrain + "' has the wrong role");
  }

  if (!blob.is_object() || blob.value("format", "") != "issf-policy")
    throw CorruptBlobError("policy blob is not an issf-policy document");
  if (blob.value("role", "") != std::string(to_string(manifest.role)))
    throw RoleMismatchError("blob role does not match manifest role");
  if (blob.value("graph_fingerprint", "") != manifest.env.scenario_hash)
    throw HashMismatchError("blob was trained on a different scenario document");

  std::string bytes = blob.dump();
  manifest.blob_fingerprint = sha256_hex(bytes);
  if (manifest.created_at.empty()) manifest.created_at = now_iso8601();

  auto stage = root_ / (".stage-" + manifest.id);
  std::filesystem::remove_all(stage);
  std::filesystem::create_directories(stage);
  write_file(stage / "policy.bin", bytes);
  write_file(stage / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
  std::error_code ec;
  std::filesystem::rename(stage, dir_of(manifest.id), ec);
  if (ec) {
    std::filesystem::remove_all(stage);
    throw PoolError("failed to publish '" + manifest.id + "': " + ec.message());
  }
  return manifest.id;
}

bool ServicePool::contains(const std::string& id) const {
  return id_ok(id) && std::filesystem::exists(dir_of(id) / "manifest.json");
}

std::vector<std::string> ServicePool::ids() const {
  std::vector<std::string> out;
  if (!std::filesystem::exists(root_)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (!entry.is_directory()) continue;
    std::string name = entry.path().filename().string();
    if (name.starts_with(".")) continue;
    if (std::filesystem::exists(entry.path() / "manifest.json")) out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ServiceManifest ServicePool::manifest(const std::string& id) const {
  if (!contains(id)) throw NotFoundError("service '" + id + "' is not in the pool");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(dir_of(id) / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw CorruptBlobError("manifest for '" + id + "' is not valid JSON: " + e.what());
  }
  return manifest_from_json(doc);
}

nlohmann::json ServicePool::blob(const std::string& id) const {
  ServiceManifest m = manifest(id);
  std::string bytes = read_file(dir_of(id) / "policy.bin");
  if (sha256_hex(bytes) != m.blob_fingerprint)
    throw HashMismatchError("policy blob for '" + id + "' does not match its fingerprint");
  try {
    return nlohmann::json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptBlobError("policy blob for '" + id + "' is not valid JSON: " + e.what());
  }
}

std::unique_ptr<ActionDecisionModel> ServicePool::load_model(const std::string& id) const {
  return deserialize_model(blob(id));
}

std::vector<ServiceManifest> ServicePool::query(const Filter& filter) const {
  std::vector<ServiceManifest> out;
  for (const auto& id : ids()) {
    ServiceManifest m = manifest(id);
    if (filter.role && m.role != *filter.role) continue;
    if (filter.algorithm && m.algorithm != *filter.algorithm) continue;
    if (filter.scenario_hash && m.env.scenario_hash != *filter.scenario_hash) continue;
    if (filter.adversary) {
      auto advs = split_adversary_field(m.adversary);
      if (std::find(advs.begin(), advs.end(), *filter.adversary) == advs.end()) continue;
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<ServiceManifest> ServicePool::lineage(const std::string& id) const {
  std::vector<ServiceManifest> chain;
  std::set<std::string> seen;
  std::string cursor = id;
  while (cursor != "NA") {
    if (!seen.insert(cursor).second)
      throw LineageError("lineage of '" + id + "' contains a cycle");
    chain.push_back(manifest(cursor));
    cursor = chain.back().pretrain;
  }
  return chain;
}

}  // namespace issf
