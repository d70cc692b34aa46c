// Python bindings for the main operations: scenario loading, training,
// simulation, the service pool and tournaments. Heavy calls drop the GIL.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "issf/benchmark.hpp"
#include "issf/errors.hpp"
#include "issf/service_pool.hpp"
#include "issf/trainer.hpp"

namespace py = pybind11;
using namespace issf;
using nlohmann::json;

namespace {

py::object to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(to_py(item));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = to_py(value);
      return out;
    }
    default:
      return py::none();
  }
}

json to_json(const py::handle& obj) {
  if (obj.is_none()) return nullptr;
  if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
  if (py::isinstance<py::int_>(obj)) return obj.cast<long long>();
  if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
  if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
  if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
    json out = json::array();
    for (const auto& item : obj) out.push_back(to_json(item));
    return out;
  }
  if (py::isinstance<py::dict>(obj)) {
    json out = json::object();
    for (const auto& [key, value] : obj.cast<py::dict>())
      out[key.cast<std::string>()] = to_json(value);
    return out;
  }
  throw ValidationError("value is not JSON-representable");
}

json parse_doc(const py::object& doc) {
  if (py::isinstance<py::str>(doc)) return json::parse(doc.cast<std::string>());
  return to_json(doc);
}

std::shared_ptr<DynamicAccessGraph> load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  json doc = json::parse(in, nullptr, true);
  return std::make_shared<DynamicAccessGraph>(DynamicAccessGraph::from_json(doc));
}

std::shared_ptr<DynamicAccessGraph> scenario_from_doc(const py::object& doc) {
  json parsed = parse_doc(doc);
  return std::make_shared<DynamicAccessGraph>(DynamicAccessGraph::from_json(parsed));
}

std::shared_ptr<ActionDecisionModel> pool_model(const std::optional<std::string>& pool,
                                                const std::string& id,
                                                const DynamicAccessGraph& graph, Role role) {
  if (!pool) throw ValidationError("service '" + id + "' needs a pool path");
  ServicePool store(*pool);
  std::shared_ptr<ActionDecisionModel> model = store.load_model(id);
  check_model_role(*model, role);
  check_model_fits(*model, graph);
  return model;
}

using AttackerFactory = std::function<std::unique_ptr<AttackerAgent>()>;
using DefenderFactory = std::function<std::unique_ptr<DefenderAgent>()>;

AttackerFactory attacker_factory(const std::string& spec,
                                 std::shared_ptr<DynamicAccessGraph> graph,
                                 const std::optional<std::string>& pool) {
  if (spec == "NA") throw ValidationError("attacker 'NA' is not playable");
  if (spec == "random")
    return [] { return std::make_unique<RandomAttackerAgent>(); };
  auto model = pool_model(pool, spec, *graph, Role::Attacker);
  return [model, graph] { return std::make_unique<ModelAttackerAgent>(model, *graph); };
}

DefenderFactory defender_factory(const std::string& spec,
                                 std::shared_ptr<DynamicAccessGraph> graph,
                                 const std::optional<std::string>& pool) {
  if (spec == "NA")
    return [] { return std::make_unique<NullDefenderAgent>(); };
  if (spec == "random")
    return [] { return std::make_unique<RandomDefenderAgent>(); };
  auto model = pool_model(pool, spec, *graph, Role::Defender);
  return [model, graph] { return std::make_unique<ModelDefenderAgent>(model, *graph); };
}

json scenario_summary(const DynamicAccessGraph& g) {
  json goals = json::array(), landing = json::array(), nodes = json::array();
  for (int i : g.goal_nodes()) goals.push_back(g.nodes()[i].id);
  for (int i : g.landing_nodes()) landing.push_back(g.nodes()[i].id);
  for (const auto& n : g.nodes()) nodes.push_back(n.id);
  return json{{"id", g.scenario_id()},
              {"content_hash", g.content_hash()},
              {"nodes", nodes},
              {"node_count", g.node_count()},
              {"credential_count", g.credential_count()},
              {"toolkit_count", g.toolkit_count()},
              {"goal_nodes", goals},
              {"landing_nodes", landing}};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adversarial security service simulator";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NotFoundError& e) {
      PyErr_SetString(PyExc_KeyError, e.what());
    } catch (const DuplicateIdError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const LineageError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const PoolError& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    } catch (const ParseError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ValidationError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const UnknownIdError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ShapeMismatchError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const RoleMismatchError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const AdversaryRequiredError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const InsufficientServicesError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const PlanError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const json::parse_error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const Error& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  py::class_<DynamicAccessGraph, std::shared_ptr<DynamicAccessGraph>>(m, "Scenario")
      .def_property_readonly("id", &DynamicAccessGraph::scenario_id)
      .def_property_readonly("content_hash", &DynamicAccessGraph::content_hash)
      .def_property_readonly("node_count", &DynamicAccessGraph::node_count)
      .def_property_readonly("credential_count", &DynamicAccessGraph::credential_count)
      .def_property_readonly("toolkit_count", &DynamicAccessGraph::toolkit_count)
      .def("summary", [](const DynamicAccessGraph& g) { return to_py(scenario_summary(g)); })
      .def("__repr__", [](const DynamicAccessGraph& g) {
        return "<Scenario '" + g.scenario_id() + "' " + std::to_string(g.node_count()) + " nodes>";
      });

  m.def("load_scenario", &load_scenario, py::arg("path"),
        "Load and validate a scenario JSON file.");
  m.def("scenario_from_json", &scenario_from_doc, py::arg("doc"),
        "Build a scenario from a JSON string or a dict.");

  m.def(
      "train",
      [](std::shared_ptr<DynamicAccessGraph> scenario, const std::string& pool,
         const std::string& id, const std::string& role, const std::string& algorithm,
         const std::vector<std::string>& adversaries, const std::optional<std::string>& pretrain,
         std::uint64_t seed, std::optional<long> timesteps, bool stochastic_adversaries,
         const py::object& config) {
        PlanEntry entry;
        json overrides = config.is_none() ? json::object() : parse_doc(config);
        overrides["algorithm"] = algorithm;
        entry.config = learner_config_from_json(overrides);
        entry.config.seed = seed;
        if (timesteps) entry.config.total_timesteps = *timesteps;
        entry.id = id;
        entry.role = role_from_string(role);
        entry.adversaries = adversaries;
        entry.pretrain = pretrain.value_or("NA");
        entry.stochastic_adversaries = stochastic_adversaries;

        json manifest;
        {
          py::gil_scoped_release release;
          ServicePool store{pool};
          std::string published = train_and_publish(*scenario, entry, store);
          manifest = manifest_to_json(store.manifest(published));
        }
        return to_py(manifest);
      },
      py::arg("scenario"), py::arg("pool"), py::arg("id"), py::arg("role"),
      py::arg("algorithm") = "qlearning", py::arg("adversaries") = std::vector<std::string>{},
      py::arg("pretrain") = std::nullopt, py::arg("seed") = 0,
      py::arg("timesteps") = std::nullopt, py::arg("stochastic_adversaries") = false,
      py::arg("config") = py::none(),
      "Train one service and publish it into the pool; returns the manifest.");

  m.def(
      "run_plan",
      [](std::shared_ptr<DynamicAccessGraph> scenario, const std::string& pool,
         const py::object& plan) {
        json doc = parse_doc(plan);
        std::vector<std::string> ids;
        {
          py::gil_scoped_release release;
          TrainingPlan parsed = training_plan_from_json(doc);
          ServicePool store{pool};
          ids = run_training_plan(*scenario, parsed, store);
        }
        return ids;
      },
      py::arg("scenario"), py::arg("pool"), py::arg("plan"),
      "Run a training plan (dict or JSON string); returns published ids in order.");

  m.def(
      "simulate",
      [](std::shared_ptr<DynamicAccessGraph> scenario, const std::string& attacker,
         const std::string& defender, int episodes, std::uint64_t seed,
         const std::optional<std::string>& pool, int parallel, std::optional<int> max_length,
         bool trace) {
        if (episodes < 1) throw ValidationError("episodes must be >= 1");
        auto make_attacker = attacker_factory(attacker, scenario, pool);
        auto make_defender = defender_factory(defender, scenario, pool);
        json out;
        std::ostringstream traces;
        {
          py::gil_scoped_release release;
          SimulateOptions options;
          options.parallel = parallel;
          if (max_length) {
            if (*max_length < 1) throw ValidationError("max_length must be >= 1");
            options.episode.max_length = *max_length;
          }
          if (trace)
            options.on_episode = [&](const EpisodeTrace& t) {
              write_trace_jsonl(*scenario, t, traces);
            };
          auto metrics = simulate(*scenario, make_attacker, make_defender, episodes, seed, options);
          out = metrics_to_json(metrics);
        }
        py::dict result = to_py(out).cast<py::dict>();
        if (trace) result["trace_jsonl"] = traces.str();
        return result;
      },
      py::arg("scenario"), py::arg("attacker"), py::arg("defender"), py::arg("episodes") = 10,
      py::arg("seed") = 0, py::arg("pool") = std::nullopt, py::arg("parallel") = 1,
      py::arg("max_length") = std::nullopt, py::arg("trace") = false,
      "Run seeded episodes; 'random'/'NA' or pool ids select the agents.");

  m.def(
      "tournament",
      [](std::shared_ptr<DynamicAccessGraph> scenario, const std::vector<std::string>& services,
         const std::string& pool, int simulations, int episodes, std::uint64_t seed,
         int parallel) {
        json out;
        std::string rendered;
        {
          py::gil_scoped_release release;
          ServicePool store{pool};
          std::vector<TournamentService> entrants;
          for (const auto& id : services) {
            std::shared_ptr<ActionDecisionModel> model = store.load_model(id);
            check_model_fits(*model, *scenario);
            TournamentService svc;
            svc.id = id;
            svc.role = model->role();
            if (svc.role == Role::Attacker)
              svc.attacker = [model, scenario] {
                return std::make_unique<ModelAttackerAgent>(model, *scenario);
              };
            else
              svc.defender = [model, scenario] {
                return std::make_unique<ModelDefenderAgent>(model, *scenario);
              };
            entrants.push_back(std::move(svc));
          }
          TournamentOptions options;
          options.simulations_per_pairing = simulations;
          options.episodes_per_simulation = episodes;
          options.base_seed = seed;
          options.parallel = parallel;
          auto report = run_tournament(*scenario, entrants, options);
          out = tournament_report_to_json(report);
          rendered = render_leaderboard(report);
        }
        py::dict result = to_py(out).cast<py::dict>();
        result["rendered"] = rendered;
        return result;
      },
      py::arg("scenario"), py::arg("services"), py::arg("pool"), py::arg("simulations") = 25,
      py::arg("episodes") = 50, py::arg("seed") = 0, py::arg("parallel") = 1,
      "ELO tournament over pool services; returns the full report.");

  m.def(
      "pool_ids", [](const std::string& pool) { return ServicePool{pool}.ids(); },
      py::arg("pool"), "Sorted ids of the services in a pool.");

  m.def(
      "manifest",
      [](const std::string& pool, const std::string& id) {
        return to_py(manifest_to_json(ServicePool{pool}.manifest(id)));
      },
      py::arg("pool"), py::arg("id"), "Manifest of one published service.");

  m.def(
      "lineage",
      [](const std::string& pool, const std::string& id) {
        py::list out;
        for (const auto& manifest : ServicePool{pool}.lineage(id))
          out.append(to_py(manifest_to_json(manifest)));
        return out;
      },
      py::arg("pool"), py::arg("id"),
      "Manifest chain [self, pretrain, ...] back to a from-scratch service.");

  m.def("elo_expected", &EloTable::expected_score, py::arg("rating_i"), py::arg("rating_j"),
        "Expected score of i against j.");
}
