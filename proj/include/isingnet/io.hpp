#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "isingnet/model.hpp"

namespace isingnet::io {

/// {"p": p, "m": [...], "edges": [[s, t, w], ...]} with edges in lexicographic order.
std::string model_to_json(const IsingModel& model);
IsingModel model_from_json(const std::string& text);

void write_model(const IsingModel& model, const std::filesystem::path& path);
IsingModel read_model(const std::filesystem::path& path);

/// Headerless CSV of 0/1 integers, one row per observation.
void write_dataset(const BinaryDataset& data, std::ostream& out);
BinaryDataset read_dataset(std::istream& in);

void write_dataset(const BinaryDataset& data, const std::filesystem::path& path);
BinaryDataset read_dataset(const std::filesystem::path& path);

/// Writes `text` to `path`, throwing std::runtime_error on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace isingnet::io
