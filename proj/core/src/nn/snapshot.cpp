#include "distil/nn/snapshot.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "distil/errors.hpp"

namespace distil::nn {

namespace {

constexpr const char* kMagic = "MLPSNAPSHOT v1";

std::string expect_prefix(std::istream& in, const std::string& prefix) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(prefix, 0) != 0) {
    throw ArgumentError("snapshot: expected line starting with '" + prefix + "'");
  }
  return line.substr(prefix.size());
}

void write_matrix(std::ostream& out, const std::string& tag, const Matrix& m) {
  out << tag;
  for (double v : m.values()) out << ' ' << format_real(v);
  out << '\n';
}

void read_matrix(std::istream& in, const std::string& tag, Matrix& m) {
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("snapshot: missing " + tag);
  std::istringstream fields(line);
  std::string head;
  fields >> head;
  if (head != tag) throw ArgumentError("snapshot: expected " + tag + ", found '" + head + "'");
  std::string token;
  std::size_t i = 0;
  auto values = m.values();
  while (fields >> token) {
    if (i >= values.size()) throw ArgumentError("snapshot: too many values for " + tag);
    values[i++] = parse_real(token);
  }
  if (i != values.size()) throw ArgumentError("snapshot: too few values for " + tag);
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc{}) throw ArgumentError("format_real: conversion failed");
  return std::string(buf, end);
}

double parse_real(const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw ArgumentError("invalid number '" + token + "'");
  return v;
}

std::string snapshot_to_string(const MlpNet& net) {
  std::ostringstream out;
  out << kMagic << '\n';
  out << "layers:";
  for (std::size_t s : net.layer_sizes()) out << ' ' << s;
  out << '\n';
  out << "activation: " << to_string(net.activation()) << '\n';
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    write_matrix(out, "W" + std::to_string(k), net.weights()[k]);
    write_matrix(out, "b" + std::to_string(k), net.biases()[k]);
  }
  return out.str();
}

MlpNet snapshot_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw ArgumentError("snapshot: missing '" + std::string(kMagic) + "' header");
  }
  std::vector<std::size_t> sizes;
  {
    std::istringstream fields(expect_prefix(in, "layers:"));
    std::size_t s = 0;
    while (fields >> s) sizes.push_back(s);
  }
  std::string act = expect_prefix(in, "activation:");
  act.erase(0, act.find_first_not_of(' '));
  MlpNet net(sizes, activation_from_string(act));
  for (std::size_t k = 0; k < net.num_layers(); ++k) {
    read_matrix(in, "W" + std::to_string(k), net.weights()[k]);
    read_matrix(in, "b" + std::to_string(k), net.biases()[k]);
  }
  return net;
}

void save_snapshot(const MlpNet& net, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write snapshot " + path.string());
  out << snapshot_to_string(net);
  if (!out) throw IoError("failed writing snapshot " + path.string());
}

MlpNet load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read snapshot " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return snapshot_from_string(buf.str());
}

}  // namespace distil::nn
