// SPDX-License-Identifier: Apache-2.0
#include "modspec/opfield_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace modspec {

namespace {

const char* kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    std::uint32_t chunk = std::uint32_t(bytes[i]) << 16;
    int have = 1;
    if (i + 1 < bytes.size()) { chunk |= std::uint32_t(bytes[i + 1]) << 8; ++have; }
    if (i + 2 < bytes.size()) { chunk |= std::uint32_t(bytes[i + 2]); ++have; }
    out.push_back(kBase64Alphabet[(chunk >> 18) & 63]);
    out.push_back(kBase64Alphabet[(chunk >> 12) & 63]);
    out.push_back(have > 1 ? kBase64Alphabet[(chunk >> 6) & 63] : '=');
    out.push_back(have > 2 ? kBase64Alphabet[chunk & 63] : '=');
  }
  return out;
}

int base64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

std::vector<std::uint8_t> base64_decode(const std::string& text, long offset) {
  std::vector<std::uint8_t> out;
  std::uint32_t chunk = 0;
  int bits = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '=') break;
    const int v = base64_value(c);
    if (v < 0)
      throw ParseError("invalid base64 character", offset + long(i));
    chunk = (chunk << 6) | std::uint32_t(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(std::uint8_t((chunk >> bits) & 0xff));
    }
  }
  return out;
}

void doubles_to_bytes(const std::vector<double>& values,
                      std::vector<std::uint8_t>& bytes) {
  bytes.resize(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &values[i], 8);
    for (int b = 0; b < 8; ++b)
      bytes[i * 8 + b] = std::uint8_t((bits >> (8 * b)) & 0xff);
  }
}

std::vector<double> bytes_to_doubles(const std::vector<std::uint8_t>& bytes,
                                     long offset) {
  if (bytes.size() % 8 != 0)
    throw ParseError("base64 payload is not a whole number of float64", offset);
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= std::uint64_t(bytes[i * 8 + b]) << (8 * b);
    std::memcpy(&values[i], &bits, 8);
  }
  return values;
}

// Whitespace-token cursor over the slurped input, tracking byte offsets.
class Cursor {
 public:
  explicit Cursor(std::string text) : text_(std::move(text)) {}

  long offset() const { return long(pos_); }
  bool eof() {
    skip_space();
    return pos_ >= text_.size();
  }

  std::string token() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", offset());
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(std::uint8_t(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void expect(const std::string& word) {
    const long at = peek_offset();
    const std::string got = token();
    if (got != word)
      throw ParseError("expected '" + word + "', found '" + got + "'", at);
  }

  long integer() {
    const long at = peek_offset();
    const std::string tok = token();
    try {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected integer, found '" + tok + "'", at);
    }
  }

  double real() {
    const long at = peek_offset();
    const std::string tok = token();
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      throw ParseError("expected number, found '" + tok + "'", at);
    return v;
  }

  long peek_offset() {
    skip_space();
    return offset();
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(std::uint8_t(text_[pos_]))) ++pos_;
  }
  std::string text_;
  std::size_t pos_ = 0;
};

std::string slurp(std::istream& is) {
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

} // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ModuleOperator OperatorFieldFile::to_operator() const {
  return ModuleOperator(grid, truncation, fibers);
}

OperatorFieldFile OperatorFieldFile::from_operator(const ModuleOperator& op,
                                                   bool hermitian,
                                                   PayloadFormat payload) {
  OperatorFieldFile file;
  file.grid = op.grid();
  file.truncation = op.truncation();
  file.hermitian = hermitian;
  file.payload = payload;
  file.fibers.reserve(op.points());
  for (std::size_t g = 0; g < op.points(); ++g) file.fibers.push_back(op.fiber(g));
  return file;
}

void write_opfield(std::ostream& os, const OperatorFieldFile& file) {
  const GridPtr& grid = file.grid;
  os << "opfield v1\n";
  os << "points " << grid->size() << "\n";
  for (std::size_t g = 0; g < grid->size(); ++g)
    os << "point " << g << " " << format_double(grid->label(g)) << " "
       << format_double(grid->weight(g)) << " " << grid->dim(g) << "\n";
  os << "truncation " << file.truncation << "\n";
  os << "hermitian " << (file.hermitian ? 1 : 0) << "\n";
  os << "payload "
     << (file.payload == PayloadFormat::decimal ? "decimal" : "base64") << "\n";
  for (std::size_t g = 0; g < grid->size(); ++g) {
    os << "fiber " << g << "\n";
    const Mat& m = file.fibers[g];
    if (file.payload == PayloadFormat::decimal) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          if (c) os << " ";
          os << format_double(m(r, c).real()) << " "
             << format_double(m(r, c).imag());
        }
        os << "\n";
      }
    } else {
      std::vector<double> values;
      values.reserve(std::size_t(m.size()) * 2);
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          values.push_back(m(r, c).real());
          values.push_back(m(r, c).imag());
        }
      std::vector<std::uint8_t> bytes;
      doubles_to_bytes(values, bytes);
      os << base64_encode(bytes) << "\n";
    }
  }
  os << "end\n";
}

OperatorFieldFile read_opfield(std::istream& is) {
  Cursor cur(slurp(is));
  cur.expect("opfield");
  cur.expect("v1");
  cur.expect("points");
  const long npts = cur.integer();
  if (npts < 1) throw ParseError("point count must be positive", cur.offset());
  std::vector<double> labels(npts), weights(npts);
  std::vector<int> dims(npts);
  for (long g = 0; g < npts; ++g) {
    cur.expect("point");
    const long idx = cur.integer();
    if (idx != g) throw ParseError("points out of order", cur.offset());
    labels[g] = cur.real();
    weights[g] = cur.real();
    const long dim = cur.integer();
    if (dim < 1) throw ParseError("fiber dim must be >= 1", cur.offset());
    dims[g] = int(dim);
    if (!(weights[g] > 0.0))
      throw ParseError("weights must be positive", cur.offset());
  }
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (std::abs(sum - 1.0) > 1e-9)
    throw ParseError("weights sum to " + format_double(sum), cur.offset());
  if (std::abs(sum - 1.0) > 0.5e-12)
    for (double& w : weights) w /= sum;

  OperatorFieldFile file;
  cur.expect("truncation");
  const long truncation = cur.integer();
  if (truncation < 1) throw ParseError("truncation must be >= 1", cur.offset());
  file.truncation = int(truncation);
  cur.expect("hermitian");
  file.hermitian = cur.integer() != 0;
  cur.expect("payload");
  const long payload_at = cur.peek_offset();
  const std::string payload = cur.token();
  if (payload == "decimal")
    file.payload = PayloadFormat::decimal;
  else if (payload == "base64")
    file.payload = PayloadFormat::base64;
  else
    throw ParseError("unknown payload format '" + payload + "'", payload_at);

  file.grid = make_grid(std::move(labels), std::move(weights), std::move(dims));
  file.fibers.resize(npts);
  for (long g = 0; g < npts; ++g) {
    cur.expect("fiber");
    const long idx = cur.integer();
    if (idx != g) throw ParseError("fibers out of order", cur.offset());
    const Eigen::Index dim = Eigen::Index(file.truncation) * file.grid->dim(g);
    Mat m(dim, dim);
    if (file.payload == PayloadFormat::decimal) {
      for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) {
          const double re = cur.real();
          const double im = cur.real();
          m(r, c) = Complex(re, im);
        }
    } else {
      const long at = cur.peek_offset();
      const std::string blob = cur.token();
      const std::vector<double> values = bytes_to_doubles(
          base64_decode(blob, at), at);
      if (Eigen::Index(values.size()) != 2 * dim * dim)
        throw ParseError("base64 payload has wrong length", at);
      std::size_t i = 0;
      for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) {
          m(r, c) = Complex(values[i], values[i + 1]);
          i += 2;
        }
    }
    file.fibers[g] = std::move(m);
  }
  cur.expect("end");

  if (file.hermitian) {
    for (long g = 0; g < npts; ++g) {
      const double defect = hermitian_defect(file.fibers[g]);
      if (defect > 1e-10)
        throw ParseError("declared Hermitian but fiber " + std::to_string(g) +
                             " has defect " + format_double(defect),
                         0);
    }
  }
  return file;
}

void write_opfield_file(const std::string& path, const OperatorFieldFile& file) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_opfield(os, file);
}

OperatorFieldFile read_opfield_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_opfield(is);
}

std::vector<FourierCoeff> read_coefficients(std::istream& is) {
  const std::string text = slurp(is);
  std::vector<FourierCoeff> coeffs;
  std::size_t pos = 0;
  long lineno = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    const long line_offset = long(pos);
    ++lineno;
    pos = eol + 1;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(std::uint8_t(c))) blank = false;
    if (blank) continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    FourierCoeff coeff;
    double re = 0.0, im = 0.0;
    if (!(ls >> coeff.k >> coeff.l >> re >> im))
      throw ParseError("malformed coefficient line " + std::to_string(lineno),
                       line_offset);
    std::string rest;
    if (ls >> rest)
      throw ParseError("trailing garbage on coefficient line " +
                           std::to_string(lineno),
                       line_offset);
    coeff.w = Complex(re, im);
    coeffs.push_back(coeff);
  }
  return coeffs;
}

std::vector<FourierCoeff> read_coefficients_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_coefficients(is);
}

void write_coefficients(std::ostream& os, const std::vector<FourierCoeff>& coeffs) {
  os << "# k,l,re,im\n";
  for (const FourierCoeff& c : coeffs)
    os << c.k << "," << c.l << "," << format_double(c.w.real()) << ","
       << format_double(c.w.imag()) << "\n";
}

void write_decomposition_csv(std::ostream& os, const SpectralDecomposition& dec) {
  os << "# modspec decomposition v1: term,point,label,k,value\n";
  for (std::size_t i = 0; i < dec.terms().size(); ++i) {
    for (std::size_t g = 0; g < dec.grid()->size(); ++g) {
      const std::vector<double> spec = term_spectrum(dec.terms()[i], g);
      for (std::size_t k = 0; k < spec.size(); ++k)
        os << (i + 1) << "," << g << "," << format_double(dec.grid()->label(g))
           << "," << k << "," << format_double(spec[k]) << "\n";
    }
  }
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << "# modspec sweep v1: theta,bloch1,bloch2,eigenvalue,trusted\n";
  for (const SweepRow& row : sweep.rows)
    os << format_double(row.theta) << "," << format_double(row.bloch1) << ","
       << format_double(row.bloch2) << "," << format_double(row.value) << ","
       << (row.trusted ? 1 : 0) << "\n";
}

} // namespace modspec
