#ifndef MMS_IO_HPP
#define MMS_IO_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "mms/instance.hpp"

namespace mms {

/// Instance file format: JSON with keys `d`, `n`, `columns` (n arrays of d
/// integers), `probs` (n numbers), `c` (d integers), `count_coord` (0-based;
/// -1 when the instance has none). Optional: `uniform_target` (bool).
inline nlohmann::json instance_to_json(const Instance& inst) {
    nlohmann::json j;
    j["d"] = inst.dim;
    j["n"] = inst.num_types;
    j["columns"] = inst.columns;
    j["probs"] = inst.probs;
    j["c"] = inst.target;
    j["count_coord"] = inst.count_coord ? *inst.count_coord : -1;
    if (inst.uniform_target) j["uniform_target"] = true;
    return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
    Instance inst;
    try {
        inst.dim = j.at("d").get<int>();
        inst.num_types = j.at("n").get<int>();
        inst.columns = j.at("columns").get<std::vector<Vec>>();
        inst.probs = j.at("probs").get<std::vector<double>>();
        inst.target = j.at("c").get<Vec>();
        int cc = j.at("count_coord").get<int>();
        if (cc >= 0) inst.count_coord = cc;
        inst.uniform_target = j.value("uniform_target", false);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed instance file: ") + e.what());
    }
    return validate_instance(inst);
}

inline void write_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << instance_to_json(inst).dump(2) << "\n";
}

inline Instance read_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed instance file ") + path + ": " + e.what());
    }
    return instance_from_json(j);
}

/// Solutions serialize as {"x": [n integers]}.
inline nlohmann::json solution_to_json(const Solution& x) {
    return nlohmann::json{{"x", x}};
}

inline Solution solution_from_json(const nlohmann::json& j) {
    try {
        return j.at("x").get<Vec>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed solution record: ") + e.what());
    }
}

}  // namespace mms

#endif  // MMS_IO_HPP
