#include "run_record.hpp"

#include <filesystem>

#include "uiground/hashing.hpp"
#include "uiground/version.hpp"

namespace uiground::cli {

RunRecord::RunRecord(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)) {}

void RunRecord::add_input(const std::string& path) { inputs_.push_back(path); }
void RunRecord::add_output(const std::string& path) { outputs_.push_back(path); }

void RunRecord::fail(int exit_code, const std::string& message) {
    exit_code_ = exit_code;
    error_ = message;
}

namespace {

nlohmann::ordered_json file_entries(const std::vector<std::string>& paths) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& p : paths) {
        nlohmann::ordered_json e;
        e["path"] = p;
        std::error_code ec;
        if (std::filesystem::is_regular_file(p, ec)) {
            e["sha256"] = sha256_file_hex(p);
            e["bytes"] = std::filesystem::file_size(p, ec);
        } else {
            e["sha256"] = nullptr;
        }
        arr.push_back(std::move(e));
    }
    return arr;
}

}  // namespace

std::string RunRecord::dump() const {
    nlohmann::ordered_json j;
    j["tool"] = "uiground";
    j["version"] = std::string(kVersion);
    j["command"] = command_;
    j["argv"] = argv_;
    j["seed"] = seed_ ? nlohmann::ordered_json(*seed_) : nlohmann::ordered_json(nullptr);
    j["inputs"] = file_entries(inputs_);
    j["outputs"] = file_entries(outputs_);
    j["counts"] = counts_;
    j["exit_code"] = exit_code_;
    if (!error_.empty()) j["error"] = error_;
    return j.dump(2) + "\n";
}

}  // namespace uiground::cli
