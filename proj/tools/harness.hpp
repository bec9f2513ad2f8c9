#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace weylab::cli {

inline constexpr const char* schema = "weylab/1";
inline constexpr const char* tool_version = "0.1.0";

enum exit_code : int { ok = 0, config_failure = 2, infeasible_failure = 3, io_failure = 4 };

/// Header plus rows, emitted in the given order.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Everything a subcommand hands back to the emitter.
struct RunOutput {
    nlohmann::ordered_json config;
    nlohmann::ordered_json result;
    CsvTable csv;
    nlohmann::ordered_json evaluations = nlohmann::ordered_json::object();
    std::vector<std::uint64_t> seeds;
};

/// 17 significant digits, the format used for every CSV number.
std::string format_number(double v);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// The result document: schema, command, resolved config and result.
nlohmann::ordered_json make_document(const std::string& command, const RunOutput& out);

void write_json(const nlohmann::ordered_json& doc, const std::filesystem::path& path);
void write_csv(const CsvTable& table, const std::filesystem::path& path);

/// Runs one subcommand. args[0] is the subcommand name. The result document
/// goes to `out`; a machine readable error document goes to `err`. Returns
/// the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace weylab::cli
