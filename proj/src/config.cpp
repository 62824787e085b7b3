#include "polypuzzle/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "polypuzzle/errors.hpp"

namespace polypuzzle {

namespace {

using nlohmann::json;

double number_at(const json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("config key " + key + " must be a number");
    return j.get<double>();
}

int int_at(const json& j, const std::string& key) {
    if (!j.is_number_integer()) throw ConfigError("config key " + key + " must be an integer");
    return j.get<int>();
}

}  // namespace

RunConfig config_from_json(const std::string& text) {
    json parsed;
    try {
        parsed = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }
    if (!parsed.is_object()) throw ConfigError("config root must be a JSON object");

    RunConfig config;
    for (const auto& [key, value] : parsed.items()) {
        if (key == "poly") {
            if (!value.is_string()) throw ConfigError("config key poly must be a string");
            config.poly = value.get<std::string>();
        } else if (key == "box") {
            if (!value.is_array() || value.size() != 4)
                throw ConfigError("config key box must be [x0, y0, x1, y1]");
            config.box = {number_at(value[0], "box"), number_at(value[1], "box"),
                          number_at(value[2], "box"), number_at(value[3], "box")};
        } else if (key == "res") {
            if (!value.is_array()) throw ConfigError("config key res must be an array");
            config.resolutions.clear();
            for (const json& r : value) config.resolutions.push_back(int_at(r, "res"));
        } else if (key == "max_iter") {
            config.max_iter = int_at(value, "max_iter");
        } else if (key == "level") {
            config.level = number_at(value, "level");
        } else if (key == "depth") {
            config.depth = int_at(value, "depth");
        } else if (key == "eps") {
            if (!value.is_array()) throw ConfigError("config key eps must be an array");
            config.epsilons.clear();
            for (const json& e : value) config.epsilons.push_back(number_at(e, "eps"));
        } else if (key == "out") {
            if (!value.is_string()) throw ConfigError("config key out must be a string");
            config.out_dir = value.get<std::string>();
        } else if (key == "seed") {
            if (!value.is_number_unsigned() && !value.is_number_integer())
                throw ConfigError("config key seed must be an integer");
            config.seed = value.get<std::uint64_t>();
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }
    return config;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot read config file " + path);
    std::ostringstream text;
    text << file.rdbuf();
    return config_from_json(text.str());
}

std::string config_json(const RunConfig& config) {
    // The output directory is deliberately left out: runs of the same
    // experiment hash alike no matter where their files land.
    nlohmann::ordered_json j;
    j["poly"] = config.poly;
    j["box"] = {config.box.x0, config.box.y0, config.box.x1, config.box.y1};
    j["res"] = config.resolutions;
    j["max_iter"] = config.max_iter;
    j["level"] = config.level;
    j["depth"] = config.depth;
    j["eps"] = config.epsilons;
    j["seed"] = config.seed;
    return j.dump(2) + "\n";
}

}  // namespace polypuzzle
