#include "verimark/scenario_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace verimark {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : object.items()) {
        if (!allowed.count(key))
            throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
}

template <typename T>
T get_or(const json& object, const std::string& key, T fallback) {
    if (!object.contains(key)) return fallback;
    try {
        return object.at(key).get<T>();
    } catch (const json::exception& err) {
        throw ConfigError("bad value for \"" + key + "\": " + err.what());
    }
}

InputSpec parse_function(const json& object) {
    reject_unknown_keys(object,
                        {"kind", "input_bytes", "iterations", "grid_width", "grid_height",
                         "object_rate"},
                        "function");
    InputSpec spec;
    std::string kind = get_or<std::string>(object, "kind", "identity");
    if (kind == "identity")
        spec.kind = InputSpec::Kind::Identity;
    else if (kind == "iterated_hash")
        spec.kind = InputSpec::Kind::IteratedHash;
    else if (kind == "grid_detector")
        spec.kind = InputSpec::Kind::GridDetector;
    else
        throw ConfigError("unknown function kind \"" + kind + "\"");
    spec.input_bytes = get_or<std::uint32_t>(object, "input_bytes", spec.input_bytes);
    spec.iterations = get_or<std::uint32_t>(object, "iterations", spec.iterations);
    spec.grid_width = get_or<std::uint32_t>(object, "grid_width", spec.grid_width);
    spec.grid_height = get_or<std::uint32_t>(object, "grid_height", spec.grid_height);
    spec.object_rate = get_or<double>(object, "object_rate", spec.object_rate);
    return spec;
}

NetworkModel parse_network(const json& object) {
    reject_unknown_keys(
        object, {"latency_min", "latency_max", "drop_response_rate", "tamper", "tamper_rate"},
        "network");
    NetworkModel net;
    net.latency_min = get_or<std::uint64_t>(object, "latency_min", net.latency_min);
    net.latency_max = get_or<std::uint64_t>(object, "latency_max", net.latency_max);
    net.drop_response_rate =
        get_or<double>(object, "drop_response_rate", net.drop_response_rate);
    std::string tamper = get_or<std::string>(object, "tamper", "none");
    if (tamper == "none")
        net.tamper = NetworkModel::Tamper::None;
    else if (tamper == "response_payload")
        net.tamper = NetworkModel::Tamper::ResponsePayload;
    else if (tamper == "input_payload")
        net.tamper = NetworkModel::Tamper::InputPayload;
    else
        throw ConfigError("unknown tamper rule \"" + tamper + "\"");
    net.tamper_rate = get_or<double>(object, "tamper_rate", net.tamper_rate);
    return net;
}

}  // namespace

ScenarioConfig scenario_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& err) {
        throw ConfigError(std::string("config is not valid JSON: ") + err.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    reject_unknown_keys(root,
                        {"name", "threat", "seed", "total_inputs", "interval_size",
                         "function", "network", "economics", "qos", "deadline_ticks",
                         "similarity_threshold", "pool_size", "batching", "threat_params"},
                        "config root");

    ScenarioConfig cfg;
    cfg.name = get_or<std::string>(root, "name", cfg.name);
    std::string threat = get_or<std::string>(root, "threat", "honest");
    if (auto id = threat_from_name(threat))
        cfg.threat = *id;
    else
        throw ConfigError("unknown threat \"" + threat + "\"");
    cfg.seed = get_or<std::uint64_t>(root, "seed", cfg.seed);
    cfg.total_inputs = get_or<std::uint32_t>(root, "total_inputs", cfg.total_inputs);
    cfg.interval_size = get_or<std::uint32_t>(root, "interval_size", cfg.interval_size);
    if (root.contains("function")) cfg.input = parse_function(root.at("function"));
    if (root.contains("network")) cfg.network = parse_network(root.at("network"));

    if (root.contains("economics")) {
        const json& econ = root.at("economics");
        reject_unknown_keys(econ,
                            {"reward_per_input", "fee", "bounty", "worker_deposit",
                             "outsourcer_deposit", "initial_balance",
                             "contest_verifier_reward", "honest_cost", "dishonest_cost", "q"},
                            "economics");
        cfg.reward_per_input = get_or<Currency>(econ, "reward_per_input", cfg.reward_per_input);
        cfg.fee = get_or<Currency>(econ, "fee", cfg.fee);
        cfg.bounty = get_or<Currency>(econ, "bounty", cfg.bounty);
        cfg.worker_deposit = get_or<Currency>(econ, "worker_deposit", cfg.worker_deposit);
        cfg.outsourcer_deposit =
            get_or<Currency>(econ, "outsourcer_deposit", cfg.outsourcer_deposit);
        cfg.initial_balance = get_or<Currency>(econ, "initial_balance", cfg.initial_balance);
        cfg.contest_verifier_reward =
            get_or<Currency>(econ, "contest_verifier_reward", cfg.contest_verifier_reward);
        cfg.honest_cost = get_or<double>(econ, "honest_cost", cfg.honest_cost);
        cfg.dishonest_cost = get_or<double>(econ, "dishonest_cost", cfg.dishonest_cost);
        cfg.q = get_or<double>(econ, "q", cfg.q);
    }

    if (root.contains("qos")) {
        const json& qos = root.at("qos");
        reject_unknown_keys(qos, {"max_response_time", "min_response_rate", "timeout"}, "qos");
        cfg.qos.max_response_time =
            get_or<std::uint64_t>(qos, "max_response_time", cfg.qos.max_response_time);
        if (qos.contains("min_response_rate")) {
            double rate = get_or<double>(qos, "min_response_rate", 0.5);
            if (rate < 0 || rate > 1)
                throw ConfigError("min_response_rate must lie in [0, 1]");
            cfg.qos.min_response_rate_ppm =
                static_cast<std::uint32_t>(std::llround(rate * 1e6));
        }
        cfg.qos.timeout = get_or<std::uint64_t>(qos, "timeout", cfg.qos.timeout);
    }

    cfg.deadline_ticks = get_or<std::uint64_t>(root, "deadline_ticks", cfg.deadline_ticks);
    cfg.similarity_threshold =
        get_or<double>(root, "similarity_threshold", cfg.similarity_threshold);
    cfg.pool_size = get_or<std::uint32_t>(root, "pool_size", cfg.pool_size);

    if (root.contains("batching")) {
        const json& batching = root.at("batching");
        reject_unknown_keys(batching, {"enabled", "batch_size"}, "batching");
        cfg.batching = get_or<bool>(batching, "enabled", cfg.batching);
        cfg.batch_size = get_or<std::uint32_t>(batching, "batch_size", cfg.batch_size);
    }

    if (root.contains("threat_params")) {
        const json& params = root.at("threat_params");
        reject_unknown_keys(
            params, {"cheat_rate", "slow_delay_ticks", "t6_hand_picked", "t8_drop_flavor"},
            "threat_params");
        cfg.cheat_rate = get_or<double>(params, "cheat_rate", cfg.cheat_rate);
        cfg.slow_delay_ticks =
            get_or<std::uint64_t>(params, "slow_delay_ticks", cfg.slow_delay_ticks);
        cfg.t6_hand_picked = get_or<bool>(params, "t6_hand_picked", cfg.t6_hand_picked);
        cfg.t8_drop_flavor = get_or<bool>(params, "t8_drop_flavor", cfg.t8_drop_flavor);
    }
    return cfg;
}

ScenarioConfig scenario_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return scenario_from_json_text(buffer.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
    json function{{"kind", cfg.input.kind == InputSpec::Kind::Identity       ? "identity"
                           : cfg.input.kind == InputSpec::Kind::IteratedHash ? "iterated_hash"
                                                                             : "grid_detector"},
                  {"input_bytes", cfg.input.input_bytes},
                  {"iterations", cfg.input.iterations},
                  {"grid_width", cfg.input.grid_width},
                  {"grid_height", cfg.input.grid_height},
                  {"object_rate", cfg.input.object_rate}};
    json network{{"latency_min", cfg.network.latency_min},
                 {"latency_max", cfg.network.latency_max},
                 {"drop_response_rate", cfg.network.drop_response_rate},
                 {"tamper", cfg.network.tamper == NetworkModel::Tamper::None
                                ? "none"
                                : cfg.network.tamper == NetworkModel::Tamper::ResponsePayload
                                      ? "response_payload"
                                      : "input_payload"},
                 {"tamper_rate", cfg.network.tamper_rate}};
    json root{
        {"name", cfg.name},
        {"threat", threat_name(cfg.threat)},
        {"seed", cfg.seed},
        {"total_inputs", cfg.total_inputs},
        {"interval_size", cfg.interval_size},
        {"function", function},
        {"network", network},
        {"economics",
         {{"reward_per_input", cfg.reward_per_input},
          {"fee", cfg.fee},
          {"bounty", cfg.bounty},
          {"worker_deposit", cfg.worker_deposit},
          {"outsourcer_deposit", cfg.outsourcer_deposit},
          {"initial_balance", cfg.initial_balance},
          {"contest_verifier_reward", cfg.contest_verifier_reward},
          {"honest_cost", cfg.honest_cost},
          {"dishonest_cost", cfg.dishonest_cost},
          {"q", cfg.q}}},
        {"qos",
         {{"max_response_time", cfg.qos.max_response_time},
          {"min_response_rate", cfg.qos.min_response_rate()},
          {"timeout", cfg.qos.timeout}}},
        {"deadline_ticks", cfg.deadline_ticks},
        {"similarity_threshold", cfg.similarity_threshold},
        {"pool_size", cfg.pool_size},
        {"batching", {{"enabled", cfg.batching}, {"batch_size", cfg.batch_size}}},
        {"threat_params",
         {{"cheat_rate", cfg.cheat_rate},
          {"slow_delay_ticks", cfg.slow_delay_ticks},
          {"t6_hand_picked", cfg.t6_hand_picked},
          {"t8_drop_flavor", cfg.t8_drop_flavor}}},
    };
    return root.dump(2);
}

}  // namespace verimark
