#include "helpers.hpp"

namespace issf::test {

std::vector<AttackerAction> optimal_chain_script(const DynamicAccessGraph& g) {
  auto node = [&](const char* id) { return g.node_index(id); };
  auto vuln = [&](const char* id) { return g.toolkit_index(id); };
  auto cred = [&](const char* id) { return g.credential_index(id); };

  const int gateway = node("api_gateway");
  std::vector<AttackerAction> script;
  script.push_back(LocalAttack{gateway, vuln("CVE-2020-15257")});

  // Chain A: hop through sa1, own sa2, then the database.
  script.push_back(RemoteAttack{gateway, node("sa1"), vuln("CVE-2019-14271")});
  script.push_back(RemoteAttack{gateway, node("sa1"), vuln("CVE-2021-21334")});
  script.push_back(Connect{gateway, node("sa2"), cred("cred_sa2")});
  script.push_back(LocalAttack{node("sa2"), vuln("CVE-2020-15257")});
  script.push_back(LocalAttack{node("sa2"), vuln("CVE-2020-8564")});
  script.push_back(Connect{node("sa2"), node("dba"), cred("cred_dba")});

  // Chain B: sb2 is never owned, both of its remote services are enough.
  script.push_back(RemoteAttack{gateway, node("sb1"), vuln("CVE-2019-14271")});
  script.push_back(RemoteAttack{gateway, node("sb2"), vuln("CVE-2019-14271")});
  script.push_back(RemoteAttack{gateway, node("sb2"), vuln("CVE-2021-21334")});
  script.push_back(Connect{gateway, node("dbb"), cred("cred_dbb")});

  // Chain C: sc2 must be owned for its local reveal.
  script.push_back(RemoteAttack{gateway, node("sc1"), vuln("CVE-2019-14271")});
  script.push_back(RemoteAttack{gateway, node("sc1"), vuln("CVE-2021-21334")});
  script.push_back(Connect{gateway, node("sc2"), cred("cred_sc2")});
  script.push_back(LocalAttack{node("sc2"), vuln("CVE-2020-15257")});
  script.push_back(RemoteAttack{gateway, node("sc2"), vuln("CVE-2021-21334")});
  script.push_back(Connect{node("sc2"), node("dbc"), cred("cred_dbc")});
  return script;
}

}  // namespace issf::test
