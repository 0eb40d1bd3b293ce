// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "modspec/diagonalizer.hpp"
#include "modspec/magnetic.hpp"

namespace modspec {

/// Parse or format failure; carries the byte offset of the offending input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long offset)
      : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  long byte_offset;
};

/// Serialized operator field: grid header plus one row-major complex matrix
/// per fiber. The decimal payload prints 17 significant digits, which
/// round-trips IEEE doubles exactly; the base64 payload stores the raw
/// float64 pairs little-endian.
enum class PayloadFormat { decimal, base64 };

struct OperatorFieldFile {
  GridPtr grid;
  int truncation = 1;
  bool hermitian = false;
  PayloadFormat payload = PayloadFormat::decimal;
  std::vector<Mat> fibers;

  ModuleOperator to_operator() const;
  static OperatorFieldFile from_operator(const ModuleOperator& op,
                                         bool hermitian = true,
                                         PayloadFormat payload = PayloadFormat::decimal);
};

void write_opfield(std::ostream& os, const OperatorFieldFile& file);
/// Throws ParseError on malformed input; declared-Hermitian files are
/// verified on load (defect <= 1e-10) and weight sums checked to 1e-9.
OperatorFieldFile read_opfield(std::istream& is);

void write_opfield_file(const std::string& path, const OperatorFieldFile& file);
OperatorFieldFile read_opfield_file(const std::string& path);

/// Coefficient file: one "k,l,re,im" line per stored Fourier coefficient;
/// '#' comments and blank lines are ignored.
std::vector<FourierCoeff> read_coefficients(std::istream& is);
std::vector<FourierCoeff> read_coefficients_file(const std::string& path);
void write_coefficients(std::ostream& os, const std::vector<FourierCoeff>& coeffs);

/// Eigenvalue-field dump: one row per (term, point, spectral value), with
/// the column order pinned in a versioned header comment.
void write_decomposition_csv(std::ostream& os, const SpectralDecomposition& dec);

/// Sweep table rows "theta,bloch1,bloch2,eigenvalue,trusted".
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

/// Deterministic 17-significant-digit decimal formatting used by every
/// writer (bit-exact round trip).
std::string format_double(double v);

} // namespace modspec
