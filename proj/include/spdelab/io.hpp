#pragma once

// CSV and manifest output.  Numbers are written with 17 significant digits and
// LF newlines so reruns with identical configuration produce byte-identical
// files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdelab/config.hpp"
#include "spdelab/grid.hpp"

namespace spdelab {

inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) : path_(path) {
        out_.open(path, std::ios::binary | std::ios::trunc);
        if (!out_) throw std::runtime_error("cannot open output file " + path.string());
        out_ << header << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

// Field serialisation: header x,u_0[,u_1,...], one row per gridpoint.
inline void write_field_csv(const std::filesystem::path& path, const Field& f) {
    std::string header = "x";
    for (int c = 0; c < f.components(); ++c) header += ",u_" + std::to_string(c);
    CsvWriter csv(path, header);
    for (int j = 0; j < f.size(); ++j) {
        std::vector<std::string> cells{csv_number(f.grid().point(j))};
        for (int c = 0; c < f.components(); ++c) cells.push_back(csv_number(f(c, j)));
        csv.row(cells);
    }
}

// Several same-grid single-component fields side by side.
inline void write_fields_csv(const std::filesystem::path& path,
                             const std::vector<std::string>& names,
                             const std::vector<const Field*>& fields) {
    std::string header = "x";
    for (size_t i = 0; i < fields.size(); ++i) {
        for (int c = 0; c < fields[i]->components(); ++c) {
            header += "," + names[i];
            if (fields[i]->components() > 1) header += "_" + std::to_string(c);
        }
    }
    CsvWriter csv(path, header);
    const Field& first = *fields.front();
    for (int j = 0; j < first.size(); ++j) {
        std::vector<std::string> cells{csv_number(first.grid().point(j))};
        for (const Field* f : fields) {
            for (int c = 0; c < f->components(); ++c) cells.push_back(csv_number((*f)(c, j)));
        }
        csv.row(cells);
    }
}

struct RunManifest {
    ExperimentConfig config;
    std::string code_version;
    double wall_clock_seconds = 0.0;
    std::vector<std::string> output_files;  // relative to the output directory
};

inline void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest) {
    nlohmann::json j;
    j["experiment"] = manifest.config.experiment_id;
    j["master_seed"] = manifest.config.master_seed;
    j["run_ids"] = manifest.config.run_ids;
    j["code_version"] = manifest.code_version;
    j["wall_clock_seconds"] = manifest.wall_clock_seconds;
    j["config"] = emit_config(manifest.config);
    j["outputs"] = manifest.output_files;

    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << j.dump(2) << "\n";
}

}  // namespace spdelab
