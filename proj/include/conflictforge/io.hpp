#pragma once
// Artifact I/O: schema-versioned CSV writers, JSONL helpers and the
// up-to-date stamps that make pipeline stages idempotent.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "conflictforge/common.hpp"

namespace conflictforge::io {

namespace fs = std::filesystem;

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::string& schema, const std::string& header)
        : out_(path, std::ios::binary) {
        if (!out_) throw UserError("cannot write file: " + path.string());
        out_ << "# " << schema << "\n" << header << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

inline void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UserError("cannot write file: " + path.string());
    out << j.dump(2) << "\n";
}

inline nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UserError("missing artifact: " + path.string());
    nlohmann::json j;
    in >> j;
    return j;
}

// Reads a whole schema-versioned CSV back, skipping the schema comment.
struct CsvContent {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline CsvContent read_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UserError("missing artifact: " + path.string());
    CsvContent content;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line, ',');
        if (!header_done) {
            content.header = std::move(cells);
            header_done = true;
        } else {
            content.rows.push_back(std::move(cells));
        }
    }
    return content;
}

// ---------------------------------------------------------------------------
// Stage stamps

inline std::uint64_t hash_files_and_config(const std::vector<fs::path>& files,
                                           const std::string& config_fingerprint) {
    std::uint64_t h = fnv1a(config_fingerprint);
    for (const auto& f : files) {
        h = fnv1a(f.string(), h);
        if (fs::exists(f)) h = fnv1a(read_file(f.string()), h);
    }
    return h;
}

// True when the stage already ran on identical inputs and every output is
// still present.
inline bool stage_up_to_date(const fs::path& out_dir, const std::string& stage,
                             std::uint64_t input_hash, const std::vector<std::string>& outputs) {
    fs::path stamp = out_dir / (stage + ".stamp");
    if (!fs::exists(stamp)) return false;
    nlohmann::json j;
    try {
        j = read_json(stamp);
    } catch (...) {
        return false;
    }
    if (!j.contains("input_hash") || j["input_hash"].get<std::string>() !=
                                         std::to_string(input_hash))
        return false;
    for (const auto& o : outputs)
        if (!fs::exists(out_dir / o)) return false;
    return true;
}

inline void write_stamp(const fs::path& out_dir, const std::string& stage,
                        std::uint64_t input_hash, const std::vector<std::string>& outputs) {
    nlohmann::json j;
    j["stage"] = stage;
    j["input_hash"] = std::to_string(input_hash);
    j["outputs"] = outputs;
    write_json(out_dir / (stage + ".stamp"), j);
}

inline void require_artifact(const fs::path& out_dir, const std::string& name,
                             const std::string& producing_command) {
    if (!fs::exists(out_dir / name))
        throw UserError("missing artifact '" + name + "' in " + out_dir.string() + "; run `" +
                        producing_command + "` first");
}

}  // namespace conflictforge::io
