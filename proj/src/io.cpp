#include "isingnet/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace isingnet::io {

using nlohmann::json;

std::string model_to_json(const IsingModel& model) {
    nlohmann::ordered_json j;
    j["p"] = model.p();
    auto& m = j["m"] = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < model.p(); ++s) m.push_back(model.field(s));
    auto& edges = j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : model.edges()) edges.push_back(nlohmann::ordered_json::array({e.s, e.t, e.weight}));
    return j.dump(2) + "\n";
}

IsingModel model_from_json(const std::string& text) {
    const json j = json::parse(text);
    const auto p = j.at("p").get<std::size_t>();
    const auto& m = j.at("m");
    if (m.size() != p) throw std::invalid_argument("model json: m must have p entries");
    Eigen::VectorXd fields(static_cast<Eigen::Index>(p));
    for (std::size_t s = 0; s < p; ++s) fields(static_cast<Eigen::Index>(s)) = m[s].get<double>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        if (e.size() != 3) throw std::invalid_argument("model json: edges are [s, t, w] triples");
        auto s = e[0].get<std::size_t>();
        auto t = e[1].get<std::size_t>();
        if (s > t) std::swap(s, t);
        edges.push_back({s, t, e[2].get<double>()});
    }
    return IsingModel::from_edges(std::move(fields), edges);
}

void write_model(const IsingModel& model, const std::filesystem::path& path) {
    write_text(path, model_to_json(model));
}

IsingModel read_model(const std::filesystem::path& path) { return model_from_json(read_text(path)); }

void write_dataset(const BinaryDataset& data, std::ostream& out) {
    std::string line;
    for (std::size_t i = 0; i < data.n(); ++i) {
        line.clear();
        for (std::size_t j = 0; j < data.p(); ++j) {
            if (j) line.push_back(',');
            line.push_back(data(i, j) ? '1' : '0');
        }
        line.push_back('\n');
        out << line;
    }
}

BinaryDataset read_dataset(std::istream& in) {
    std::vector<std::vector<std::uint8_t>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::uint8_t> row;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            const auto first = cell.find_first_not_of(" \t");
            const auto last = cell.find_last_not_of(" \t");
            const auto trimmed = first == std::string::npos ? std::string() : cell.substr(first, last - first + 1);
            if (trimmed != "0" && trimmed != "1") {
                throw std::invalid_argument("dataset csv line " + std::to_string(line_no) +
                                            ": expected 0 or 1, got '" + trimmed + "'");
            }
            row.push_back(trimmed == "1" ? 1 : 0);
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::invalid_argument("dataset csv line " + std::to_string(line_no) + ": wrong column count");
        }
        rows.push_back(std::move(row));
    }
    return BinaryDataset::from_rows(rows);
}

void write_dataset(const BinaryDataset& data, const std::filesystem::path& path) {
    std::ostringstream out;
    write_dataset(data, out);
    write_text(path, out.str());
}

BinaryDataset read_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_dataset(in);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace isingnet::io
