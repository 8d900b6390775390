#include "spttn/tns_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

namespace spttn {

CooTensor read_tns(std::istream& in) {
  CooTensor coo;
  std::string line;
  int64_t lineno = 0;
  int order = -1;
  while (std::getline(in, line)) {
    ++lineno;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> fields;
    std::string f;
    while (ls >> f) fields.push_back(f);
    if (fields.size() < 2)
      throw parse_error("tns parse error at line " + std::to_string(lineno) +
                        ": expected coordinates and a value");
    if (order < 0) {
      order = static_cast<int>(fields.size()) - 1;
      coo.indices.assign(order, Index{"", 0});
    } else if (static_cast<int>(fields.size()) != order + 1) {
      throw parse_error("tns parse error at line " + std::to_string(lineno) +
                        ": inconsistent field count");
    }
    std::vector<int64_t> coord(order);
    for (int k = 0; k < order; ++k) {
      char* end = nullptr;
      const int64_t c = std::strtoll(fields[k].c_str(), &end, 10);
      if (end == fields[k].c_str() || *end != '\0')
        throw parse_error("tns parse error at line " + std::to_string(lineno) +
                          ": bad coordinate '" + fields[k] + "'");
      if (c < 1)
        throw parse_error("tns parse error at line " + std::to_string(lineno) +
                          ": coordinates are 1-based, got " + fields[k]);
      coord[k] = c - 1;
      coo.indices[k].dim = std::max(coo.indices[k].dim, c);
    }
    char* end = nullptr;
    const double v = std::strtod(fields[order].c_str(), &end);
    if (end == fields[order].c_str() || *end != '\0')
      throw parse_error("tns parse error at line " + std::to_string(lineno) + ": bad value '" +
                        fields[order] + "'");
    coo.entries.emplace_back(std::move(coord), v);
  }
  coo.normalize();
  return coo;
}

CooTensor read_tns_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open tensor file: " + path);
  return read_tns(in);
}

namespace {

std::string shortest_float(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = std::strtod(buf, nullptr);
  if (back == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char probe[64];
      std::snprintf(probe, sizeof probe, "%.*g", prec, v);
      if (std::strtod(probe, nullptr) == v) return probe;
    }
  }
  return buf;
}

}  // namespace

void write_tns(std::ostream& out, const CooTensor& coo) {
  for (const auto& e : coo.entries) {
    for (int64_t c : e.first) out << c + 1 << " ";
    out << shortest_float(e.second) << "\n";
  }
}

void write_tns_dense(std::ostream& out, const DenseTensor& t) {
  const int64_t d = t.order();
  std::vector<int64_t> coord(d, 0);
  for (int64_t off = 0; off < t.size(); ++off) {
    for (int64_t c : coord) out << c + 1 << " ";
    out << shortest_float(t.values[off]) << "\n";
    for (int64_t k = d - 1; k >= 0; --k) {
      if (++coord[k] < t.indices[k].dim) break;
      coord[k] = 0;
    }
  }
}

namespace {

// Bounded draw by rejection; avoids implementation-defined distributions so
// seeded runs reproduce everywhere.
uint64_t bounded(std::mt19937_64& rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double unit_value(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace

CooTensor gen_random(const std::vector<Index>& indices, double density, uint64_t seed) {
  if (!(density > 0.0) || density > 1.0)
    throw std::invalid_argument("gen_random: density must be in (0, 1]");
  uint64_t total = 1;
  for (const auto& ix : indices) {
    if (ix.dim < 1) throw std::invalid_argument("gen_random: dimensions must be >= 1");
    total *= static_cast<uint64_t>(ix.dim);
  }
  const uint64_t count = static_cast<uint64_t>(std::ceil(density * static_cast<double>(total)));

  std::mt19937_64 rng(seed);
  // Floyd's sampling: k distinct cells out of [0, total).
  std::unordered_set<uint64_t> chosen;
  chosen.reserve(count * 2);
  for (uint64_t j = total - count; j < total; ++j) {
    const uint64_t t = bounded(rng, j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }

  std::vector<uint64_t> cells(chosen.begin(), chosen.end());
  std::sort(cells.begin(), cells.end());

  CooTensor coo;
  coo.indices = indices;
  const int d = static_cast<int>(indices.size());
  for (uint64_t cell : cells) {
    std::vector<int64_t> coord(d);
    uint64_t rest = cell;
    for (int k = d - 1; k >= 0; --k) {
      coord[k] = static_cast<int64_t>(rest % static_cast<uint64_t>(indices[k].dim));
      rest /= static_cast<uint64_t>(indices[k].dim);
    }
    coo.entries.emplace_back(std::move(coord), unit_value(rng));
  }
  coo.normalize();
  return coo;
}

DenseTensor gen_dense(const std::vector<Index>& indices, uint64_t seed) {
  DenseTensor t(indices);
  std::mt19937_64 rng(seed);
  for (auto& v : t.values) v = unit_value(rng);
  return t;
}

uint64_t stable_hash(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace spttn
