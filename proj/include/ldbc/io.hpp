#pragma once

// .bcf grid files: one text header line, then an n*n row-major payload of
// little-endian f64 (kind=field) or u8 codes (labels, edges, mask).

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "ldbc/errors.hpp"
#include "ldbc/model.hpp"

namespace ldbc::io {

enum class Kind { Field, Labels, Edges, Mask };

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::Field: return "field";
    case Kind::Labels: return "labels";
    case Kind::Edges: return "edges";
    case Kind::Mask: return "mask";
  }
  return "?";
}

struct Header {
  GridSpec grid;
  double f0 = 0.0;
  double fB = 0.0;
  double fF = 0.0;
  double gamma = 0.5;
  double mu = 0.0;
  double e_p = 0.0;
  Kind kind = Kind::Field;
  std::optional<double> sigma;  // edges only

  friend bool operator==(const Header&, const Header&) = default;
};

struct BcfFile {
  Header header;
  std::vector<double> reals;         // kind == Field
  std::vector<std::uint8_t> codes;   // otherwise
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view key, std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw IoError("bcf header: bad value for " + std::string(key) + ": '" + std::string(s) + "'");
  return v;
}

template <typename T>
void put_le(std::string& out, T v) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t a = 0, b = sizeof(T) - 1; a < b; ++a, --b) std::swap(bytes[a], bytes[b]);
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const char* p) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t a = 0, b = sizeof(T) - 1; a < b; ++a, --b) std::swap(bytes[a], bytes[b]);
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

}  // namespace detail

inline std::string format_header(const Header& h) {
  using detail::format_double;
  std::string s = "BCF1 n=" + std::to_string(h.grid.n) + " eps=" + format_double(h.grid.eps) +
                  " f0=" + format_double(h.f0) + " fB=" + format_double(h.fB) +
                  " fF=" + format_double(h.fF) + " gamma=" + format_double(h.gamma) +
                  " mu=" + format_double(h.mu) + " e_p=" + format_double(h.e_p) +
                  " kind=" + to_string(h.kind);
  if (h.sigma) s += " sigma=" + format_double(*h.sigma);
  return s;
}

inline Header parse_header(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string magic;
  in >> magic;
  if (magic != "BCF1") throw IoError("not a BCF1 file");
  std::map<std::string, std::string, std::less<>> kv;
  for (std::string tok; in >> tok;) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw IoError("bcf header: malformed token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  auto need = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw IoError(std::string("bcf header: missing ") + key);
    return it->second;
  };
  auto num = [&](const char* key) { return detail::parse_double(key, need(key)); };

  Header h;
  const double n = num("n");
  if (!(n >= 2.0 && n <= 1e5 && n == std::floor(n))) throw IoError("bcf header: bad n");
  h.grid = {num("eps"), static_cast<std::size_t>(n)};
  h.f0 = num("f0");
  h.fB = num("fB");
  h.fF = num("fF");
  h.gamma = num("gamma");
  h.mu = num("mu");
  h.e_p = num("e_p");
  const std::string& kind = need("kind");
  if (kind == "field") h.kind = Kind::Field;
  else if (kind == "labels") h.kind = Kind::Labels;
  else if (kind == "edges") h.kind = Kind::Edges;
  else if (kind == "mask") h.kind = Kind::Mask;
  else throw IoError("bcf header: unknown kind '" + kind + "'");
  if (kv.count("sigma")) h.sigma = num("sigma");
  return h;
}

// Writes `bytes` to a sibling temporary and renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, std::string_view bytes) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into " + path.string());
  }
}

inline std::string encode(const BcfFile& f) {
  const std::size_t count = f.header.grid.size();
  const bool real = f.header.kind == Kind::Field;
  if ((real ? f.reals.size() : f.codes.size()) != count)
    throw ShapeError("bcf payload does not hold n*n elements");
  std::string out = format_header(f.header);
  out += '\n';
  out.reserve(out.size() + count * (real ? 8 : 1));
  if (real)
    for (double v : f.reals) detail::put_le(out, v);
  else
    out.append(reinterpret_cast<const char*>(f.codes.data()), f.codes.size());
  return out;
}

inline BcfFile decode(std::string_view bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string_view::npos) throw IoError("bcf: missing header line");
  BcfFile f;
  f.header = parse_header(bytes.substr(0, nl));
  const std::string_view payload = bytes.substr(nl + 1);
  const std::size_t count = f.header.grid.size();
  if (f.header.kind == Kind::Field) {
    if (payload.size() != count * 8) throw IoError("bcf: payload length mismatch");
    f.reals.resize(count);
    for (std::size_t k = 0; k < count; ++k) f.reals[k] = detail::get_le<double>(payload.data() + 8 * k);
  } else {
    if (payload.size() != count) throw IoError("bcf: payload length mismatch");
    f.codes.assign(payload.begin(), payload.end());
    const unsigned max_code = f.header.kind == Kind::Labels ? 4u : 1u;
    for (auto c : f.codes)
      if (c > max_code) throw IoError("bcf: code out of range");
  }
  return f;
}

inline void write_bcf(const std::filesystem::path& path, const BcfFile& f) {
  write_atomic(path, encode(f));
}

inline BcfFile read_bcf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return decode(bytes);
}

// ---- conversions between files and in-memory fields -------------------

inline BcfFile from_field(const ScalarField& field, const SystemParams& p) {
  BcfFile f;
  f.header = {field.spec, field.f0, field.fB, field.fF, field.gamma, p.mu(), p.e_p(), Kind::Field, {}};
  f.reals.assign(field.values.begin(), field.values.end());
  return f;
}

inline BcfFile from_labels(const LabelField& labels, double gamma, const SystemParams& p) {
  BcfFile f;
  const double extent = labels.ff - labels.f0;
  f.header = {labels.spec, labels.f0, std::min(extent, 0.0), std::max(extent, 0.0),
              gamma, p.mu(), p.e_p(), Kind::Labels, {}};
  f.codes.reserve(labels.labels.size());
  for (Label l : labels.labels) f.codes.push_back(static_cast<std::uint8_t>(l));
  return f;
}

// Event anomalies of a label file, stored as a field file on the same grid.
inline BcfFile events_of(const LabelField& labels, double gamma, const SystemParams& p) {
  BcfFile f = from_labels(labels, gamma, p);
  f.header.kind = Kind::Field;
  f.codes.clear();
  f.reals.assign(labels.event_anomaly.begin(), labels.event_anomaly.end());
  return f;
}

inline BcfFile from_mask(Header header, const Mask& mask, Kind kind) {
  BcfFile f;
  header.kind = kind;
  f.header = header;
  f.codes.assign(mask.begin(), mask.end());
  return f;
}

inline BcfFile from_edges(const EdgeMap& edges, const Header& source) {
  BcfFile f = from_mask(source, edges.mask, Kind::Edges);
  f.header.sigma = edges.sigma;
  return f;
}

inline void expect_kind(const BcfFile& f, Kind k) {
  if (f.header.kind != k)
    throw IoError(std::string("expected a ") + to_string(k) + " file, got " +
                  to_string(f.header.kind));
}

inline ScalarField to_field(const BcfFile& f) {
  expect_kind(f, Kind::Field);
  const Header& h = f.header;
  ScalarField out{h.grid, Grid<double>(h.grid.n, 0.0), h.f0, h.fB, h.fF, h.gamma};
  std::copy(f.reals.begin(), f.reals.end(), out.values.begin());
  return out;
}

inline LabelField to_labels(const BcfFile& f, const BcfFile* events = nullptr) {
  expect_kind(f, Kind::Labels);
  const Header& h = f.header;
  LabelField out{h.grid, Grid<Label>(h.grid.n, Label::WeaklyStable),
                 Grid<double>(h.grid.n, kNoEvent), h.f0, h.f0 + (h.fB != 0.0 ? h.fB : h.fF)};
  for (std::size_t k = 0; k < f.codes.size(); ++k) out.labels[k] = static_cast<Label>(f.codes[k]);
  if (events) {
    if (!(events->header.grid == h.grid) || events->header.kind != Kind::Field)
      throw ShapeError("event file does not match the label grid");
    std::copy(events->reals.begin(), events->reals.end(), out.event_anomaly.begin());
  }
  return out;
}

inline Mask to_mask(const BcfFile& f) {
  if (f.header.kind != Kind::Edges && f.header.kind != Kind::Mask)
    throw IoError(std::string("expected an edges or mask file, got ") + to_string(f.header.kind));
  Mask out(f.header.grid.n, 0);
  std::copy(f.codes.begin(), f.codes.end(), out.begin());
  return out;
}

inline EdgeMap to_edges(const BcfFile& f) {
  expect_kind(f, Kind::Edges);
  return {f.header.grid, to_mask(f), f.header.sigma.value_or(0.0)};
}

}  // namespace ldbc::io
