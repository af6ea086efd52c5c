#include "mfrac/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mfrac {

nlohmann::json grid_function_to_json(const GridFunction& f) {
    nlohmann::json j;
    j["dimension"] = f.dimension();
    j["level"] = f.level();
    j["values"] = std::vector<double>(f.values().begin(), f.values().end());
    j["nonneg"] = f.nonneg();
    return j;
}

GridFunction grid_function_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("level") ||
        !j.contains("values"))
        throw ConfigError("grid function JSON needs dimension, level and values");
    const int dim = j.at("dimension").get<int>();
    const int level = j.at("level").get<int>();
    auto values = j.at("values").get<std::vector<double>>();
    const bool nonneg = j.value("nonneg", false);
    return GridFunction(dim, level, std::move(values), nonneg);
}

std::string grid_function_to_csv(const GridFunction& f) {
    std::ostringstream os;
    os << "# dimension=" << f.dimension() << "\n# level=" << f.level() << "\n";
    char buf[64];
    for (double v : f.values()) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf << "\n";
    }
    return os.str();
}

GridFunction grid_function_from_csv(std::istream& in) {
    std::string line;
    int dim = -1, level = -1;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(1, eq - 1);
            const std::string val = line.substr(eq + 1);
            if (key.find("dimension") != std::string::npos) dim = std::stoi(val);
            if (key.find("level") != std::string::npos) level = std::stoi(val);
            continue;
        }
        values.push_back(std::stod(line));
    }
    if (dim < 0 || level < 0) throw ConfigError("CSV header must set dimension and level");
    return GridFunction(dim, level, std::move(values));
}

void write_grid_function(const std::filesystem::path& path, const GridFunction& f) {
    if (path.extension() == ".csv") {
        save_text(path, grid_function_to_csv(f));
    } else {
        save_text(path, canonical_dump(grid_function_to_json(f)));
    }
}

GridFunction read_grid_function(const std::filesystem::path& path) {
    if (path.extension() == ".csv") {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open " + path.string());
        return grid_function_from_csv(in);
    }
    return grid_function_from_json(load_json(path));
}

std::string canonical_dump(const nlohmann::json& j) {
    return j.dump(2) + "\n";
}

nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

void save_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

} // namespace mfrac
