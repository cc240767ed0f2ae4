#ifndef SEASON_IO_HPP
#define SEASON_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "season/metrics.hpp"
#include "season/sampler.hpp"

namespace season {

using Json = nlohmann::json;

inline constexpr int kCheckpointVersion = 1;

/// Fixed 17-significant-digit rendering used by every CSV cell.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// In-memory CSV table; rendered once with a header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw ValidationError("csv: row width differs from header");
    rows_.push_back(std::move(cells));
  }

  std::size_t rows() const { return rows_.size(); }

  std::string str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// One row per sample: coordinates, chain index, chain seed.
inline CsvTable samples_csv(const Batch& samples, std::uint64_t seed) {
  const std::size_t d = samples.empty() ? 1 : samples.front().size();
  std::vector<std::string> header;
  for (std::size_t i = 0; i < d; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("chain");
  header.push_back("seed");
  CsvTable t(std::move(header));
  for (std::size_t c = 0; c < samples.size(); ++c) {
    std::vector<std::string> row;
    for (double v : samples[c]) row.push_back(format_double(v));
    row.push_back(std::to_string(c));
    row.push_back(std::to_string(chain_seed(seed, c)));
    t.add_row(std::move(row));
  }
  return t;
}

/// Support, base weight, ratio and refined weight per point.
inline CsvTable refined_csv(const DiscreteDistribution& base, const RefinedDiscrete& r) {
  std::vector<std::string> header;
  for (std::size_t i = 0; i < base.dim(); ++i) header.push_back("x" + std::to_string(i));
  header.insert(header.end(), {"base_weight", "ratio", "refined_weight"});
  CsvTable t(std::move(header));
  for (std::size_t j = 0; j < base.size(); ++j) {
    std::vector<std::string> row;
    for (double v : base.point(j)) row.push_back(format_double(v));
    row.push_back(format_double(base.weight(j)));
    row.push_back(format_double(r.ratio[j]));
    row.push_back(format_double(r.refined.weight(j)));
    t.add_row(std::move(row));
  }
  return t;
}

/// Versioned checkpoint: layer shapes, row-major weights, output bias and
/// generator name. Doubles round-trip bit-exactly.
inline Json discriminator_to_json(const Discriminator& d) {
  Json layers = Json::array();
  const auto& p = d.net().parameters();
  std::size_t off = 0;
  for (const auto& s : d.net().shapes()) {
    const std::size_t nw = s.in * s.out;
    layers.push_back({{"in", s.in},
                      {"out", s.out},
                      {"weights", std::vector<double>(p.begin() + off, p.begin() + off + nw)},
                      {"biases", std::vector<double>(p.begin() + off + nw, p.begin() + off + nw + s.out)}});
    off += nw + s.out;
  }
  return {{"format", "season.discriminator"},
          {"version", kCheckpointVersion},
          {"generator", std::string(d.generator().name())},
          {"activation", std::string(activation_name(d.net().activation()))},
          {"bias", d.bias()},
          {"layers", layers}};
}

namespace detail {

/// Reads j[key] as T, reporting the JSON path on failure.
template <class T>
T json_get(const Json& j, const std::string& path, const std::string& key) {
  const std::string where = path + "/" + key;
  if (!j.is_object() || !j.contains(key)) throw ValidationError("missing field at " + where);
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ValidationError("wrong type at " + where);
  }
}

template <class T>
T json_get_or(const Json& j, const std::string& path, const std::string& key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return json_get<T>(j, path, key);
}

}  // namespace detail

inline Discriminator discriminator_from_json(const Json& j) {
  using detail::json_get;
  if (json_get<std::string>(j, "", "format") != "season.discriminator")
    throw ValidationError("unexpected checkpoint format at /format");
  if (const int v = json_get<int>(j, "", "version"); v != kCheckpointVersion)
    throw ValidationError("unsupported checkpoint version " + std::to_string(v) + " at /version");
  const auto gen = Generator::from_name(json_get<std::string>(j, "", "generator"));
  const auto act = activation_from_name(json_get<std::string>(j, "", "activation"));
  const double bias = json_get<double>(j, "", "bias");
  if (!j.contains("layers") || !j["layers"].is_array()) throw ValidationError("missing array at /layers");
  std::vector<Mlp::Shape> shapes;
  std::vector<double> params;
  for (std::size_t l = 0; l < j["layers"].size(); ++l) {
    const auto& L = j["layers"][l];
    const std::string path = "/layers/" + std::to_string(l);
    const auto in = json_get<std::size_t>(L, path, "in");
    const auto out = json_get<std::size_t>(L, path, "out");
    const auto w = json_get<std::vector<double>>(L, path, "weights");
    const auto b = json_get<std::vector<double>>(L, path, "biases");
    if (w.size() != in * out) throw ValidationError("weights length != in*out at " + path + "/weights");
    if (b.size() != out) throw ValidationError("biases length != out at " + path + "/biases");
    shapes.push_back({in, out});
    params.insert(params.end(), w.begin(), w.end());
    params.insert(params.end(), b.begin(), b.end());
  }
  return Discriminator(Mlp(std::move(shapes), act, std::move(params)), gen, bias);
}

inline Json to_json(const Estimate& e) { return {{"value", e.value}, {"se", e.se}}; }

inline Json to_json(const BoundReport& r) {
  return {{"d_H_lhs", r.d_H_lhs},     {"D_fH", r.D_fH},         {"gain_If", r.gain_If},
          {"rademacher", r.rademacher}, {"slow_rate", r.slow_rate}, {"norm_H", r.norm_H},
          {"delta", r.delta},         {"n", r.n},               {"rhs", r.rhs()},
          {"tolerance", r.tolerance}, {"lhs_is_lower_bound", r.lhs_is_lower_bound},
          {"holds", r.holds}};
}

/// Collects output files in memory and writes them together at the end,
/// each through a temporary file and a rename, so a failed run leaves no
/// partial outputs.
class OutputSet {
 public:
  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }
  void add_json(std::string name, const Json& j) { add(std::move(name), j.dump(2) + "\n"); }
  void add_csv(std::string name, const CsvTable& t) { add(std::move(name), t.str()); }

  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

  void commit(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files_) {
      const auto target = dir / name;
      auto tmp = target;
      tmp += ".tmp";
      {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os << content;
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
      }
      std::filesystem::rename(tmp, target);
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace season

#endif  // SEASON_IO_HPP
