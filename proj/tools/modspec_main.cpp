// SPDX-License-Identifier: Apache-2.0
//
// modspec: spectral decomposition of operator fields over a sampled base
// algebra, quadratic-form maximization, and magnetic ladder sweeps.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "modspec/dyadic_model.hpp"
#include "modspec/opfield_io.hpp"
#include "modspec/quadform.hpp"

namespace {

using namespace modspec;

constexpr int kExitOk = 0;
constexpr int kExitCertificate = 1;
constexpr int kExitFormat = 2;

struct DiagonalizeArgs {
  std::string input;
  std::string output;
  double target = 1.0;
  int max_terms = -1;
  int example35 = 0;
};

int run_diagonalize(const DiagonalizeArgs& args) {
  std::optional<ModuleOperator> op;
  if (args.example35 > 0) {
    op = dyadic_operator(args.example35);
  } else {
    const OperatorFieldFile file = read_opfield_file(args.input);
    op = file.to_operator();
  }

  const SpectralDecomposition dec =
      diagonalize(*op, args.max_terms, args.target);

  std::ostringstream report;
  report << "terms extracted:       " << dec.terms().size() << "\n";
  report << dec.certificates().summary();
  if (!dec.terms().empty()) {
    const TailProfile profile = tail_profile(dec.terms().front().x);
    report << "tail profile verdict:  " << profile.verdict() << "\n";
  }

  if (!args.output.empty()) {
    std::ofstream csv(args.output + "_eigenvalues.csv");
    if (!csv) throw std::runtime_error("cannot open output CSV");
    write_decomposition_csv(csv, dec);
    std::ofstream cert(args.output + "_certificates.txt");
    if (!cert) throw std::runtime_error("cannot open certificate report");
    cert << report.str();
    std::cout << report.str();
  } else {
    std::cout << report.str();
    write_decomposition_csv(std::cout, dec);
  }
  return dec.certificates().pass() ? kExitOk : kExitCertificate;
}

struct QuadformArgs {
  std::string input;
  int iters = 5000;
  double tol = 1e-13;
};

int run_quadform(const QuadformArgs& args) {
  const OperatorFieldFile file = read_opfield_file(args.input);
  const ModuleOperator d = file.to_operator();
  if (min_eigenvalue(d) <= 1e-10) {
    std::cerr << "operator is not positive kernel-free\n";
    return kExitCertificate;
  }
  const QuadraticForm form(d);
  const MaximizeResult mr = maximize_on_ball(form, args.iters, args.tol);
  const KyFanResult kf = kyfan_value(form);
  const double diff = std::abs(mr.value - kf.value);
  std::cout << "Q* (projected ascent):          " << format_double(mr.value)
            << (mr.certified ? "" : "  [not certified]") << "\n";
  std::cout << "tau(lambda_1):                  " << format_double(kf.value)
            << (kf.separation_ok ? "" : "  [separation hypothesis unmet]")
            << "\n";
  std::cout << "difference:                     " << format_double(diff) << "\n";
  std::cout << "inner-square projection defect: "
            << format_double(mr.projection_defect) << "\n";
  const bool pass =
      mr.certified && diff <= 1e-5 && mr.projection_defect <= 1e-6;
  return pass ? kExitOk : kExitCertificate;
}

struct SweepArgs {
  std::string coeff_file;
  std::string output;
  double theta_min = 0.25;
  double theta_max = 0.45;
  int steps = 5;
  long q_max = 64;
  int osc_dim = 32;
  int bloch = 2;
  std::string theta_list;  // explicit list overrides the range
};

std::vector<double> sweep_thetas(const SweepArgs& args) {
  std::vector<double> thetas;
  if (!args.theta_list.empty()) {
    std::stringstream ss(args.theta_list);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) thetas.push_back(std::stod(item));
    return thetas;
  }
  if (args.steps < 1) return thetas;
  if (args.steps == 1) {
    thetas.push_back(args.theta_min);
    return thetas;
  }
  for (int i = 0; i < args.steps; ++i)
    thetas.push_back(args.theta_min + (args.theta_max - args.theta_min) *
                                          double(i) / double(args.steps - 1));
  return thetas;
}

void print_gap_reports(const SweepResult& sweep) {
  for (const std::string& notice : sweep.notices)
    std::cout << "notice: " << notice << "\n";
  for (const GapReport& report : sweep.reports) {
    std::cout << "theta " << format_double(report.theta)
              << "  sum|w| = " << format_double(report.coeff_l1)
              << "  ||W|| = " << format_double(report.w_norm) << "  gap: ";
    if (!report.applicable)
      std::cout << "NOT-APPLICABLE (||W|| >= theta)";
    else if (report.pass)
      std::cout << "PASS (margin " << format_double(report.worst_margin) << ")";
    else
      std::cout << "FAIL (margin " << format_double(report.worst_margin) << ")";
    std::cout << "\n";
  }
}

int run_butterfly(const SweepArgs& args) {
  const std::vector<FourierCoeff> coeffs =
      read_coefficients_file(args.coeff_file);
  const SweepResult sweep =
      spectrum_sweep(coeffs, sweep_thetas(args), args.q_max, args.osc_dim,
                     args.bloch, args.bloch);
  if (!args.output.empty()) {
    std::ofstream csv(args.output);
    if (!csv) throw std::runtime_error("cannot open output CSV");
    write_sweep_csv(csv, sweep);
  } else {
    write_sweep_csv(std::cout, sweep);
  }
  print_gap_reports(sweep);
  return kExitOk;
}

int run_gaps(const SweepArgs& args) {
  const std::vector<FourierCoeff> coeffs =
      read_coefficients_file(args.coeff_file);
  const SweepResult sweep =
      spectrum_sweep(coeffs, sweep_thetas(args), args.q_max, args.osc_dim,
                     args.bloch, args.bloch);
  print_gap_reports(sweep);
  return kExitOk;
}

struct Example35Args {
  int levels = 12;
  std::string output;
};

int run_example35(const Example35Args& args) {
  const ModuleOperator k = dyadic_operator(args.levels);
  const SpectralDecomposition dec = diagonalize(k, 1);
  const std::vector<double> b = dyadic_couplings(args.levels);

  double lambda_dev = 0.0;
  for (int g = 0; g < args.levels; ++g)
    lambda_dev = std::max(
        lambda_dev,
        std::abs(dec.terms()[0].lambda.fiber(g)(0, 0).real() - b[g]));
  const TailProfile profile = tail_profile(dec.terms()[0].x);

  std::cout << "levels:                " << args.levels << "\n";
  std::cout << "max |lambda_1 - b_k|:  " << format_double(lambda_dev) << "\n";
  std::cout << "sup-norm tails t_m (m = 0..N-1):\n";
  for (int m = 0; m < args.levels; ++m)
    std::cout << "  t_" << m << " = " << format_double(profile.sup_tails[m])
              << "   tau tail = " << format_double(profile.trace_tails[m])
              << "\n";
  std::cout << "tail profile verdict:  " << profile.verdict() << "\n";
  std::cout << dec.certificates().summary();

  if (!args.output.empty()) {
    std::ofstream csv(args.output + "_eigenvalues.csv");
    if (!csv) throw std::runtime_error("cannot open output CSV");
    write_decomposition_csv(csv, dec);
  }
  const bool pass = dec.certificates().pass() && lambda_dev <= 1e-10 &&
                    !profile.h_like;
  return pass ? kExitOk : kExitCertificate;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-field spectral toolkit"};
  app.require_subcommand(1);

  DiagonalizeArgs dargs;
  CLI::App* diag = app.add_subcommand(
      "diagonalize", "Decompose a Hermitian operator field into operator "
                     "eigenvalues and eigenvector fields");
  diag->add_option("input", dargs.input, "operator field file");
  diag->add_option("--target", dargs.target, "center-trace per extracted term");
  diag->add_option("--max-terms", dargs.max_terms, "terms to extract (-1: all)");
  diag->add_option("--output", dargs.output, "output prefix");
  diag->add_option("--example35", dargs.example35,
                   "generate the built-in dyadic model with this many levels "
                   "instead of reading input");

  QuadformArgs qargs;
  CLI::App* quad = app.add_subcommand(
      "quadform", "Maximize tau(<Dx,x>) on the unit ball and compare with "
                  "the first eigenvalue trace");
  quad->add_option("input", qargs.input, "operator field file")->required();
  quad->add_option("--iters", qargs.iters, "iteration budget");
  quad->add_option("--tol", qargs.tol, "stationarity tolerance");

  SweepArgs bargs;
  CLI::App* butterfly = app.add_subcommand(
      "butterfly", "Sweep the magnetic ladder spectrum over flux values");
  butterfly->add_option("coeffs", bargs.coeff_file, "coefficient file")
      ->required();
  butterfly->add_option("--theta-min", bargs.theta_min, "lowest flux");
  butterfly->add_option("--theta-max", bargs.theta_max, "highest flux");
  butterfly->add_option("--steps", bargs.steps, "number of flux values");
  butterfly->add_option("--theta", bargs.theta_list,
                        "comma separated flux list (overrides the range)");
  butterfly->add_option("--q-max", bargs.q_max, "denominator bound");
  butterfly->add_option("--osc-dim", bargs.osc_dim, "oscillator truncation");
  butterfly->add_option("--bloch", bargs.bloch, "Bloch grid size per axis");
  butterfly->add_option("--output", bargs.output, "CSV output path");

  SweepArgs gargs;
  CLI::App* gaps = app.add_subcommand(
      "gaps", "Gap report for a coefficient file across flux values");
  gaps->add_option("coeffs", gargs.coeff_file, "coefficient file")->required();
  gaps->add_option("--theta", gargs.theta_list, "comma separated flux list");
  gaps->add_option("--theta-min", gargs.theta_min, "lowest flux");
  gaps->add_option("--theta-max", gargs.theta_max, "highest flux");
  gaps->add_option("--steps", gargs.steps, "number of flux values");
  gaps->add_option("--q-max", gargs.q_max, "denominator bound");
  gaps->add_option("--osc-dim", gargs.osc_dim, "oscillator truncation");
  gaps->add_option("--bloch", gargs.bloch, "Bloch grid size per axis");

  Example35Args eargs;
  CLI::App* example = app.add_subcommand(
      "example35", "Run the built-in dyadic two-level model end to end");
  example->add_option("--levels", eargs.levels, "number of dyadic levels");
  example->add_option("--output", eargs.output, "output prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (diag->parsed()) {
      if (dargs.example35 <= 0 && dargs.input.empty()) {
        std::cerr << "diagonalize: provide an input file or --example35\n";
        return kExitFormat;
      }
      return run_diagonalize(dargs);
    }
    if (quad->parsed()) return run_quadform(qargs);
    if (butterfly->parsed()) return run_butterfly(bargs);
    if (gaps->parsed()) return run_gaps(gargs);
    if (example->parsed()) return run_example35(eargs);
  } catch (const ParseError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::exception& e) {
    const std::string what = e.what();
    if (what.find("cannot open") != std::string::npos) {
      std::cerr << "i/o error: " << what << "\n";
      return kExitFormat;
    }
    std::cerr << "error: " << what << "\n";
    return kExitCertificate;
  }
  return kExitFormat;
}
