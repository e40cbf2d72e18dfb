#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace uiground::cli {

/// Machine-readable account of one CLI run: what went in, what came out, with
/// which seed and version. Deliberately free of timestamps and host details so
/// identical runs produce identical records.
class RunRecord {
public:
    RunRecord(std::string command, std::vector<std::string> argv);

    void set_seed(std::uint64_t seed) { seed_ = seed; }
    void add_input(const std::string& path);
    void add_output(const std::string& path);
    nlohmann::ordered_json& counts() { return counts_; }
    void fail(int exit_code, const std::string& message);

    std::string dump() const;

private:
    std::string command_;
    std::vector<std::string> argv_;
    std::optional<std::uint64_t> seed_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
    nlohmann::ordered_json counts_ = nlohmann::ordered_json::object();
    int exit_code_ = 0;
    std::string error_;
};

}  // namespace uiground::cli
