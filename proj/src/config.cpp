#include "lagsync/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lagsync {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    fail("invalid JSON in '" + path + "': " + e.what());
  }
}

// A section may be written inline or given as a path to a JSON file holding
// it, resolved relative to the experiment file.
json resolve_section(const json& value, const std::string& base_dir) {
  if (!value.is_string()) return value;
  const std::string path = value.get<std::string>();
  if (!base_dir.empty() && !path.empty() && path.front() != '/') {
    return read_json_file(base_dir + "/" + path);
  }
  return read_json_file(path);
}

const json& get(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing key '") + key + "'");
  return *it;
}

double get_number(const json& j, const char* key) {
  const json& v = get(j, key);
  if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

Vec vec_or_scalar(const json& v, int n, const char* key) {
  if (v.is_number()) return Vec::Constant(n, v.get<double>());
  if (v.is_array()) {
    if (static_cast<int>(v.size()) != n) {
      fail(std::string("'") + key + "' needs " + std::to_string(n) +
           " entries");
    }
    Vec out(n);
    for (int i = 0; i < n; ++i) {
      if (!v[i].is_number()) fail(std::string("'") + key + "' entries must be numbers");
      out[i] = v[i].get<double>();
    }
    return out;
  }
  fail(std::string("'") + key + "' must be a number or an array");
}

std::shared_ptr<const LagrangianModel> make_model_checked(
    const json& j, std::shared_ptr<const LagrangianModel> model) {
  if (j.contains("n") && j["n"].get<int>() != model->dof()) {
    fail("model '" + model->name() + "' has " +
         std::to_string(model->dof()) + " joints, config says " +
         std::to_string(j["n"].get<int>()));
  }
  return model;
}

std::shared_ptr<const LagrangianModel> model_from_json(const json& j) {
  const std::string kind = get(j, "kind").get<std::string>();
  const double scale = j.value("scale", 1.0);
  if (scale <= 0.0) fail("model scale must be positive");
  const json params = j.value("params", json::object());
  auto p = [&](const char* key, double fallback) {
    return params.value(key, fallback);
  };
  if (kind == "two-link-arm") {
    TwoLinkArmParams d;
    d.m1 = p("m1", d.m1);
    d.l1 = p("l1", d.l1);
    d.lc1 = p("lc1", d.lc1);
    d.I1 = p("I1", d.I1);
    d.me = p("me", d.me);
    d.lce = p("lce", d.lce);
    d.Ie = p("Ie", d.Ie);
    d.delta_e = p("delta_e", d.delta_e);
    return make_model_checked(j, std::make_shared<TwoLinkArm>(d, scale));
  }
  if (kind == "cart-double-pendulum") {
    CartDoublePendulumParams d;
    d.m0 = p("m0", d.m0);
    d.m1 = p("m1", d.m1);
    d.m2 = p("m2", d.m2);
    d.l1 = p("l1", d.l1);
    d.lc1 = p("lc1", d.lc1);
    d.lc2 = p("lc2", d.lc2);
    d.I1 = p("I1", d.I1);
    d.I2 = p("I2", d.I2);
    const bool gravity_on = j.value("gravity_on", true);
    return make_model_checked(
        j, std::make_shared<CartDoublePendulum>(d, gravity_on, scale));
  }
  fail("unknown model kind '" + kind +
       "' (expected two-link-arm or cart-double-pendulum)");
}

CouplingGraph graph_from_json(const json& j, int n) {
  const std::string kind = get(j, "kind").get<std::string>();
  const int p = static_cast<int>(get_number(j, "p"));
  GraphOptions options;
  if (j.contains("partial_mask")) {
    options.partial_mask = vec_or_scalar(j["partial_mask"], n, "partial_mask");
  }
  if (j.contains("inhibitory_link")) {
    const json& link = j["inhibitory_link"];
    if (!link.is_array() || link.size() != 2) {
      fail("'inhibitory_link' must be [a, b] (1-based members)");
    }
    options.inhibitory_link =
        std::make_pair(link[0].get<int>() - 1, link[1].get<int>() - 1);
  }
  if (j.contains("edges")) {
    const json& edges = j["edges"];
    if (!edges.is_array()) fail("'edges' must be an array of arrays");
    for (const auto& row : edges) {
      std::vector<int> in;
      for (const auto& e : row) in.push_back(e.get<int>() - 1);
      options.edges.push_back(std::move(in));
    }
  }
  options.directed = j.value("directed", false);

  GraphKind gk;
  if (kind == "ring") gk = GraphKind::Ring;
  else if (kind == "inline") gk = GraphKind::Inline;
  else if (kind == "regular-digraph") gk = GraphKind::RegularDigraph;
  else if (kind == "custom-regular") gk = GraphKind::CustomRegular;
  else fail("unknown graph kind '" + kind + "'");

  try {
    return build_graph(gk, p, options);
  } catch (const ContractViolation& e) {
    fail(std::string("graph: ") + e.what());
  }
}

Gains gains_from_json(const json& j, int n, int dim_a) {
  Gains g;
  g.k1 = vec_or_scalar(get(j, "K1"), n, "K1");
  g.k2 = vec_or_scalar(get(j, "K2"), n, "K2");
  g.lambda = vec_or_scalar(get(j, "Lambda"), n, "Lambda");
  if (j.contains("Gamma")) {
    if (dim_a <= 0) fail("'Gamma' given for a model without parameters");
    const Vec diag = vec_or_scalar(j["Gamma"], dim_a, "Gamma");
    g.gamma = Mat(diag.asDiagonal());
  }
  if (j.contains("K_inhib")) {
    g.k_inhib = vec_or_scalar(j["K_inhib"], n, "K_inhib");
  }
  return g;
}

DesiredTrajectory trajectory_from_json(const json& j, int n) {
  const std::string type = j.value("type", "analytic");
  if (type == "none") return DesiredTrajectory::zero(n);
  if (type == "rest") {
    return DesiredTrajectory::rest(vec_or_scalar(get(j, "q"), n, "q"));
  }
  if (type != "analytic") fail("unknown trajectory type '" + type + "'");
  const json& joints = get(j, "joints");
  if (!joints.is_array() || static_cast<int>(joints.size()) != n) {
    fail("'joints' needs one wave per joint (" + std::to_string(n) + ")");
  }
  std::vector<JointWave> waves;
  for (const auto& joint : joints) {
    JointWave w;
    const std::string wt = get(joint, "type").get<std::string>();
    if (wt == "const") {
      w.type = JointWave::Type::Constant;
      w.offset = joint.value("value", 0.0);
    } else if (wt == "ramp") {
      w.type = JointWave::Type::Ramp;
      w.amplitude = get_number(joint, "rate");
      w.offset = joint.value("offset", 0.0);
    } else {
      if (wt == "sin") w.type = JointWave::Type::Sin;
      else if (wt == "cos") w.type = JointWave::Type::Cos;
      else if (wt == "one-minus-cos") w.type = JointWave::Type::OneMinusCos;
      else fail("unknown joint wave type '" + wt + "'");
      w.amplitude = get_number(joint, "amplitude");
      w.omega = get_number(joint, "omega");
      w.offset = joint.value("offset", 0.0);
    }
    waves.push_back(w);
  }
  return DesiredTrajectory::analytic(std::move(waves));
}

ControlLaw law_from_string(const std::string& law) {
  if (law == "tracking-sync") return ControlLaw::TrackingSync;
  if (law == "adaptive") return ControlLaw::Adaptive;
  if (law == "pd") return ControlLaw::Pd;
  if (law == "velocity-only") return ControlLaw::VelocityOnly;
  if (law == "partial") return ControlLaw::Partial;
  if (law == "delayed") return ControlLaw::Delayed;
  fail("unknown controller law '" + law + "'");
}

GroupSpec group_from_json(const json& j, int group_index,
                          const std::string& base_dir) {
  GroupSpec group;
  const auto model =
      model_from_json(resolve_section(get(j, "model"), base_dir));
  const int n = model->dof();
  const int dim_a = static_cast<int>(model->params().size());

  group.graph = graph_from_json(resolve_section(get(j, "graph"), base_dir), n);
  group.gains =
      gains_from_json(resolve_section(get(j, "gains"), base_dir), n, dim_a);

  const json controller = j.value("controller", json::object());
  group.controller.law =
      law_from_string(controller.value("law", "tracking-sync"));
  group.controller.delay_T = controller.value("delay_T", 0.0);
  if (controller.contains("a_hat0")) {
    group.controller.a_hat0 =
        vec_or_scalar(controller["a_hat0"], dim_a, "a_hat0");
  }
  if (group.controller.law == ControlLaw::VelocityOnly) {
    group.gains.lambda.setZero();
  }

  group.members.assign(group.graph.p, model);

  if (controller.contains("inhibition")) {
    const json& inh = controller["inhibition"];
    if (!inh.is_array() || inh.size() != 3) {
      fail("'inhibition' must be [a, b, K] (1-based members)");
    }
    const Vec k = vec_or_scalar(inh[2], n, "inhibition K");
    try {
      apply_inhibition(group.graph, group.gains, inh[0].get<int>() - 1,
                       inh[1].get<int>() - 1, k);
    } catch (const ContractViolation& e) {
      fail(std::string("inhibition: ") + e.what());
    }
  }

  if (j.contains("relay")) {
    const json& relay_json = j["relay"];
    RelaySpec relay;
    relay.from_group = get(relay_json, "from_group").get<int>() - 1;
    for (const auto& s : get(relay_json, "sources")) {
      relay.sources.push_back(s.get<int>() - 1);
    }
    relay.scale = relay_json.value("scale", 1.0);
    if (relay_json.contains("offset")) {
      relay.offset = vec_or_scalar(relay_json["offset"], n, "offset");
    }
    group.relay = relay;
    group.hp_tau = relay_json.value("hp_tau", 0.01);
  } else if (j.contains("trajectory")) {
    group.trajectory =
        trajectory_from_json(resolve_section(j["trajectory"], base_dir), n);
  } else {
    fail("group " + std::to_string(group_index + 1) +
         ": needs either 'trajectory' or 'relay'");
  }
  return group;
}

SimConfig sim_from_json(const json& j) {
  SimConfig sim;
  sim.dt = j.value("dt", 1e-3);
  sim.t_final = get_number(j, "t_final");
  sim.decimation = j.value("decimation", 10);
  sim.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("initial_conditions")) {
    const json& ic = j["initial_conditions"];
    sim.ic.q_bound = ic.value("q_bound", sim.ic.q_bound);
    sim.ic.qdot_bound = ic.value("qdot_bound", sim.ic.qdot_bound);
    if (ic.contains("states")) {
      for (const auto& s : ic["states"]) {
        const json& q = get(s, "q");
        const json& qdot = get(s, "qdot");
        Vec qv(q.size()), vv(qdot.size());
        for (std::size_t i = 0; i < q.size(); ++i) qv[i] = q[i].get<double>();
        for (std::size_t i = 0; i < qdot.size(); ++i) {
          vv[i] = qdot[i].get<double>();
        }
        sim.ic.explicit_states.emplace_back(qv, vv);
      }
    }
  }
  if (j.contains("disturbance")) {
    const json& d = j["disturbance"];
    const std::string kind = d.value("kind", "none");
    if (kind == "none") sim.disturbance.kind = DisturbanceSpec::Kind::None;
    else if (kind == "sinusoid") {
      sim.disturbance.kind = DisturbanceSpec::Kind::Sinusoid;
    } else if (kind == "noise") {
      sim.disturbance.kind = DisturbanceSpec::Kind::Noise;
    } else {
      fail("unknown disturbance kind '" + kind + "'");
    }
    sim.disturbance.magnitude = d.value("magnitude", 0.0);
    sim.disturbance.freq_hz = d.value("freq_hz", 0.5);
  }
  return sim;
}

ExperimentConfig parse_experiment_impl(const json& j,
                                       const std::string& base_dir) {
  ExperimentConfig config;
  config.name = j.value("name", "experiment");
  config.sim = sim_from_json(resolve_section(get(j, "sim"), base_dir));

  const std::string scenario_kind =
      j.contains("scenario") ? j["scenario"].value("kind", "single-group")
                             : std::string("single-group");
  if (scenario_kind == "single-group") {
    config.concurrent = false;
    config.scenario.groups.push_back(group_from_json(j, 0, base_dir));
  } else if (scenario_kind == "concurrent-hierarchy") {
    config.concurrent = true;
    const json& groups = get(j, "groups");
    if (!groups.is_array() || groups.empty()) {
      fail("'groups' must be a non-empty array");
    }
    int index = 0;
    for (const auto& g : groups) {
      config.scenario.groups.push_back(group_from_json(g, index++, base_dir));
    }
  } else {
    fail("unknown scenario kind '" + scenario_kind + "'");
  }

  try {
    config.scenario.validate(config.sim.dt);
  } catch (const ContractViolation& e) {
    fail(e.what());
  }
  return config;
}

}  // namespace

ExperimentConfig parse_experiment(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  return parse_experiment_impl(j, "");
}

ExperimentConfig load_experiment(const std::string& path) {
  const json j = read_json_file(path);
  std::string base_dir;
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) base_dir = path.substr(0, slash);
  return parse_experiment_impl(j, base_dir);
}

}  // namespace lagsync
