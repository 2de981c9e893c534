#include "swatom/io.hpp"

#include <openssl/evp.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "swatom/errors.hpp"

namespace swatom {
namespace {

std::string sanitize(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') c = '_';
  }
  return out;
}

void append_metadata(std::string& line, const std::map<std::string, std::string>& metadata) {
  for (const auto& [key, value] : metadata) {
    line += ' ';
    line += sanitize(key);
    line += '=';
    line += sanitize(value);
  }
}

void require_finite(const std::vector<double>& values, const std::string& what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw IntegrityError("finite payload", what + " holds a non-finite value at index " + std::to_string(i));
    }
  }
}

std::map<std::string, std::string> parse_metadata(const std::string& line, const std::filesystem::path& path) {
  if (line.rfind("# ", 0) != 0) throw IoError(path.string() + ": missing metadata line");
  std::map<std::string, std::string> out;
  std::istringstream in(line.substr(2));
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    out[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return out;
}

double parse_double(std::string_view text, const std::filesystem::path& path) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw IoError(path.string() + ": cannot parse number '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path) {
  std::vector<double> row;
  std::size_t start = 0;
  while (start <= line.size()) {
    const auto comma = line.find(',', start);
    const auto end = comma == std::string::npos ? line.size() : comma;
    row.push_back(parse_double(std::string_view(line).substr(start, end - start), path));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return row;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error("cannot format double");
  return {buf.data(), ptr};
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());

  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string render_series(const Series& series) {
  for (std::size_t r = 0; r < series.rows.size(); ++r) {
    if (series.rows[r].size() != series.columns.size()) {
      throw Error("series row " + std::to_string(r) + " has " + std::to_string(series.rows[r].size()) +
                  " values for " + std::to_string(series.columns.size()) + " columns");
    }
    require_finite(series.rows[r], "series row " + std::to_string(r));
  }
  std::string out = "# format=series";
  append_metadata(out, series.metadata);
  out += '\n';
  for (std::size_t c = 0; c < series.columns.size(); ++c) {
    if (c) out += ',';
    out += series.columns[c];
  }
  out += '\n';
  for (const auto& row : series.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_series(const Series& series, const std::filesystem::path& path) {
  write_atomic(path, render_series(series));
}

std::string render_field(const Field2D& field) {
  if (!field.shape_ok()) throw Error("field values do not match its axes");
  require_finite(field.values, "field '" + field.value_label + "'");
  std::string out = "# format=field2d nx=" + std::to_string(field.x.count) + " ny=" + std::to_string(field.y.count);
  out += " x_label=" + sanitize(field.x.label) + " x_min=" + format_double(field.x.min) +
         " x_max=" + format_double(field.x.max) + " x_count=" + std::to_string(field.x.count);
  out += " y_label=" + sanitize(field.y.label) + " y_min=" + format_double(field.y.min) +
         " y_max=" + format_double(field.y.max) + " y_count=" + std::to_string(field.y.count);
  out += " value_label=" + sanitize(field.value_label);
  append_metadata(out, field.metadata);
  out += "\n# layout=row-major rows=y cols=x\n";
  for (std::size_t iy = 0; iy < field.y.count; ++iy) {
    for (std::size_t ix = 0; ix < field.x.count; ++ix) {
      if (ix) out += ',';
      out += format_double(field.at(ix, iy));
    }
    out += '\n';
  }
  return out;
}

void write_field(const Field2D& field, const std::filesystem::path& path) { write_atomic(path, render_field(field)); }

Series read_series(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  Series s;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  s.metadata = parse_metadata(line, path);
  s.metadata.erase("format");
  if (!std::getline(in, line)) throw IoError(path.string() + ": missing column line");
  std::istringstream cols(line);
  std::string col;
  while (std::getline(cols, col, ',')) s.columns.push_back(col);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    s.rows.push_back(parse_row(line, path));
  }
  return s;
}

Field2D read_field(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  auto meta = parse_metadata(line, path);
  auto take = [&](const std::string& key) {
    const auto it = meta.find(key);
    if (it == meta.end()) throw IoError(path.string() + ": header lacks " + key);
    std::string v = it->second;
    meta.erase(it);
    return v;
  };
  Field2D f;
  take("format");
  take("nx");
  take("ny");
  f.x.label = take("x_label");
  f.x.min = parse_double(take("x_min"), path);
  f.x.max = parse_double(take("x_max"), path);
  f.x.count = std::stoul(take("x_count"));
  f.y.label = take("y_label");
  f.y.min = parse_double(take("y_min"), path);
  f.y.max = parse_double(take("y_max"), path);
  f.y.count = std::stoul(take("y_count"));
  f.value_label = take("value_label");
  f.metadata = std::move(meta);
  std::getline(in, line);  // layout line
  f.values.reserve(f.x.count * f.y.count);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = parse_row(line, path);
    f.values.insert(f.values.end(), row.begin(), row.end());
  }
  if (!f.shape_ok()) throw IoError(path.string() + ": value count does not match header");
  return f;
}

std::string sha256_file(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw IoError("sha256 failed for " + path.string());
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace swatom
