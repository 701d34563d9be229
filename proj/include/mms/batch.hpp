#ifndef MMS_BATCH_HPP
#define MMS_BATCH_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mms/chains.hpp"
#include "mms/io.hpp"

namespace mms {

inline nlohmann::json report_to_json(const SampleReport& rep) {
    nlohmann::json j;
    j["x"] = rep.solution;
    j["iterations_used"] = rep.iterations_used;
    j["restarts"] = rep.restarts;
    j["accepted"] = rep.accepted;
    j["exact_enumeration"] = rep.exact_enumeration;
    if (rep.start_state) j["start_state"] = *rep.start_state;
    j["rng_seed"] = rep.rng_seed;
    return j;
}

inline nlohmann::json config_to_json(const ChainConfig& cfg) {
    nlohmann::json j;
    j["algorithm"] = algorithm_name(cfg.algorithm);
    j["gamma"] = cfg.gamma;
    j["k"] = cfg.k;
    j["t"] = cfg.t;
    j["top_n"] = cfg.top_n;
    j["omega"] = cfg.omega;
    j["seed"] = cfg.seed;
    j["max_restarts"] = cfg.max_restarts;
    return j;
}

struct BlockResult {
    std::string file;
    uint64_t derived_seed = 0;
    std::string status;  // "sampled" | "enumerated-exact" | "failed:<reason>"
    bool failed = false;
};

struct RunManifest {
    std::string command_line;
    nlohmann::json config;
    uint64_t base_seed = 0;
    std::string tool_version;
    std::string started_at;
    std::string finished_at;
    std::vector<BlockResult> blocks;

    bool any_failed() const {
        for (const auto& b : blocks)
            if (b.failed) return true;
        return false;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command_line"] = command_line;
        j["config"] = config;
        j["base_seed"] = base_seed;
        j["tool_version"] = tool_version;
        j["started_at"] = started_at;
        j["finished_at"] = finished_at;
        j["blocks"] = nlohmann::json::array();
        for (const auto& b : blocks)
            j["blocks"].push_back({{"file", b.file},
                                   {"derived_seed", b.derived_seed},
                                   {"status", b.status}});
        return j;
    }
};

namespace detail {

inline std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace detail

/// Samples one solution per instance file in `instance_dir`, writing
/// `<name>.out.json` next to the manifest in `out_dir`. Blocks run
/// independently across `workers` threads; each block derives its seed as
/// base_seed XOR hash(filename), so outputs are byte-identical for a fixed
/// base seed regardless of worker count or completion order. Per-block
/// failures are recorded in the manifest instead of aborting the run.
inline RunManifest run_batch(const std::string& instance_dir, const ChainConfig& cfg,
                             int workers, const std::string& out_dir,
                             const std::string& command_line = "",
                             const std::string& tool_version = "mms") {
    namespace fs = std::filesystem;
    if (workers < 1) throw ValidationError("run_batch: workers must be >= 1");
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(instance_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("run_batch: no .json instances in " + instance_dir);
    fs::create_directories(out_dir);

    RunManifest manifest;
    manifest.command_line = command_line;
    manifest.config = config_to_json(cfg);
    manifest.base_seed = cfg.seed;
    manifest.tool_version = tool_version;
    manifest.started_at = detail::iso_timestamp();
    manifest.blocks.resize(files.size());

    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            size_t idx = cursor.fetch_add(1);
            if (idx >= files.size()) return;
            const std::string& path = files[idx];
            BlockResult& result = manifest.blocks[idx];
            std::string name = fs::path(path).filename().string();
            result.file = name;
            result.derived_seed = cfg.seed ^ hash_string(name);
            try {
                Instance inst = read_instance(path);
                ChainConfig block_cfg = cfg;
                block_cfg.seed = result.derived_seed;
                SwapCache cache(inst);
                SampleReport rep = draw_sample(inst, block_cfg, cache);
                result.status = rep.exact_enumeration ? "enumerated-exact" : "sampled";
                std::string out_path =
                    (fs::path(out_dir) / (fs::path(name).stem().string() + ".out.json")).string();
                std::ofstream out(out_path);
                if (!out) throw Error("cannot write " + out_path);
                out << report_to_json(rep).dump(2) << "\n";
            } catch (const std::exception& e) {
                result.status = std::string("failed:") + e.what();
                result.failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    manifest.finished_at = detail::iso_timestamp();
    std::ofstream mout((fs::path(out_dir) / "manifest.json").string());
    mout << manifest.to_json().dump(2) << "\n";
    return manifest;
}

}  // namespace mms

#endif  // MMS_BATCH_HPP
