#include "maze/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "maze/bench.hpp"

namespace maze {

using nlohmann::json;

std::string pairing_name(PairingStrategy s) {
  switch (s) {
    case PairingStrategy::Fixed: return "fixed";
    case PairingStrategy::Random: return "random";
    case PairingStrategy::Best: return "best";
    case PairingStrategy::Worst: return "worst";
  }
  return "?";
}

PairingStrategy parse_pairing(const std::string& name) {
  if (name == "fixed") return PairingStrategy::Fixed;
  if (name == "random") return PairingStrategy::Random;
  if (name == "best") return PairingStrategy::Best;
  if (name == "worst") return PairingStrategy::Worst;
  throw ConfigError("pairing: unknown strategy '" + name + "'");
}

namespace {

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": wrong type");
  }
}

}  // namespace

CoevoConfig RunConfig::scaled_coevo(std::uint64_t seed) const {
  CoevoConfig cfg = coevo;
  cfg.ppo = coevo.ppo.scaled(scale);
  cfg.seed = seed;
  return cfg;
}

void RunConfig::validate() const {
  if (!(scale > 0.0 && scale <= 1.0))
    throw ConfigError("scale: must be in (0, 1]");
  if (seeds.empty()) throw ConfigError("seeds: must be nonempty");
  std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
  if (distinct.size() != seeds.size())
    throw ConfigError("seeds: must be distinct");
  if (layout.empty()) throw ConfigError("layout: must be set");
  try {
    parse_method(method);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("method: ") + e.what());
  }
  if (cook_time == 0 || cook_time < -1)
    throw ConfigError("cook_time: must be positive (or unset)");
  if (horizon == 0 || horizon < -1)
    throw ConfigError("horizon: must be positive (or unset)");
  if (env.deliver_reward <= 0.0)
    throw ConfigError("env.deliver_reward: must be positive");
  try {
    coevo.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::string trimmed = text;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  if (trimmed.empty()) {
    cfg.validate();
    return cfg;
  }

  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  reject_unknown(root, "config",
                 {"layout", "method", "seeds", "scale", "out", "cook_time",
                  "horizon", "env", "coevo", "ppo"});

  read_field(root, "layout", cfg.layout);
  read_field(root, "method", cfg.method);
  read_field(root, "seeds", cfg.seeds);
  read_field(root, "scale", cfg.scale);
  read_field(root, "out", cfg.out);
  read_field(root, "cook_time", cfg.cook_time);
  read_field(root, "horizon", cfg.horizon);

  if (root.contains("env")) {
    const json& env = root.at("env");
    reject_unknown(env, "env",
                   {"deliver_reward", "onion_potted", "dish_picked",
                    "soup_picked"});
    read_field(env, "deliver_reward", cfg.env.deliver_reward);
    read_field(env, "onion_potted", cfg.env.onion_potted);
    read_field(env, "dish_picked", cfg.env.dish_picked);
    read_field(env, "soup_picked", cfg.env.soup_picked);
  }

  if (root.contains("coevo")) {
    const json& co = root.at("coevo");
    reject_unknown(co, "coevo",
                   {"n_p", "n_q", "generations", "updates_per_generation",
                    "archive_capacity", "pairing", "eval_episodes",
                    "random_no_replacement", "threshold_coef",
                    "absolute_threshold", "hidden"});
    read_field(co, "n_p", cfg.coevo.n_p);
    read_field(co, "n_q", cfg.coevo.n_q);
    read_field(co, "generations", cfg.coevo.generations);
    read_field(co, "updates_per_generation", cfg.coevo.updates_per_generation);
    read_field(co, "archive_capacity", cfg.coevo.archive_capacity);
    if (co.contains("pairing"))
      cfg.coevo.pairing = parse_pairing(co.at("pairing").get<std::string>());
    read_field(co, "eval_episodes", cfg.coevo.eval_episodes);
    read_field(co, "random_no_replacement", cfg.coevo.random_no_replacement);
    read_field(co, "threshold_coef", cfg.coevo.threshold_coef);
    read_field(co, "absolute_threshold", cfg.coevo.absolute_threshold);
    read_field(co, "hidden", cfg.coevo.hidden);
  }

  if (root.contains("ppo")) {
    const json& ppo = root.at("ppo");
    reject_unknown(ppo, "ppo",
                   {"learning_rate", "gamma", "gae_lambda", "clip",
                    "value_coef", "max_grad_norm", "minibatch_size",
                    "num_minibatches", "iteration_timesteps", "parallel_envs",
                    "alpha", "shaping_horizon", "entropy_coef"});
    PpoConfig& p = cfg.coevo.ppo;
    read_field(ppo, "learning_rate", p.learning_rate);
    read_field(ppo, "gamma", p.gamma);
    read_field(ppo, "gae_lambda", p.gae_lambda);
    read_field(ppo, "clip", p.clip);
    read_field(ppo, "value_coef", p.value_coef);
    read_field(ppo, "max_grad_norm", p.max_grad_norm);
    read_field(ppo, "minibatch_size", p.minibatch_size);
    read_field(ppo, "num_minibatches", p.num_minibatches);
    read_field(ppo, "iteration_timesteps", p.iteration_timesteps);
    read_field(ppo, "parallel_envs", p.parallel_envs);
    read_field(ppo, "alpha", p.alpha);
    read_field(ppo, "shaping_horizon", p.shaping_horizon);
    read_field(ppo, "entropy_coef", p.entropy_coef);
  }

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_text(const RunConfig& cfg) {
  json root;
  root["layout"] = cfg.layout;
  root["method"] = cfg.method;
  root["seeds"] = cfg.seeds;
  root["scale"] = cfg.scale;
  root["out"] = cfg.out;
  root["cook_time"] = cfg.cook_time;
  root["horizon"] = cfg.horizon;
  root["env"] = {{"deliver_reward", cfg.env.deliver_reward},
                 {"onion_potted", cfg.env.onion_potted},
                 {"dish_picked", cfg.env.dish_picked},
                 {"soup_picked", cfg.env.soup_picked}};
  root["coevo"] = {
      {"n_p", cfg.coevo.n_p},
      {"n_q", cfg.coevo.n_q},
      {"generations", cfg.coevo.generations},
      {"updates_per_generation", cfg.coevo.updates_per_generation},
      {"archive_capacity", cfg.coevo.archive_capacity},
      {"pairing", pairing_name(cfg.coevo.pairing)},
      {"eval_episodes", cfg.coevo.eval_episodes},
      {"random_no_replacement", cfg.coevo.random_no_replacement},
      {"threshold_coef", cfg.coevo.threshold_coef},
      {"absolute_threshold", cfg.coevo.absolute_threshold},
      {"hidden", cfg.coevo.hidden}};
  const PpoConfig& p = cfg.coevo.ppo;
  root["ppo"] = {{"learning_rate", p.learning_rate},
                 {"gamma", p.gamma},
                 {"gae_lambda", p.gae_lambda},
                 {"clip", p.clip},
                 {"value_coef", p.value_coef},
                 {"max_grad_norm", p.max_grad_norm},
                 {"minibatch_size", p.minibatch_size},
                 {"num_minibatches", p.num_minibatches},
                 {"iteration_timesteps", p.iteration_timesteps},
                 {"parallel_envs", p.parallel_envs},
                 {"alpha", p.alpha},
                 {"shaping_horizon", p.shaping_horizon},
                 {"entropy_coef", p.entropy_coef}};
  return root.dump(2) + "\n";
}

}  // namespace maze
